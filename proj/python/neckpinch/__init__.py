from ._core import (
    Grid,
    ModulationFit,
    NeckpinchError,
    RadialProfile,
    almost_solution,
    beta_ref,
    curvature_norm,
    cylinder_exact,
    cylinder_pinch_time,
    fit_parameters,
    hermite_spectrum,
    lower_barrier,
    mcf_rhs,
    modulation_residuals,
    run_physical,
    sphere_radius_exact,
    weighted_inner,
    weighted_norm,
    __version__,
)

__all__ = [
    "Grid",
    "ModulationFit",
    "NeckpinchError",
    "RadialProfile",
    "almost_solution",
    "beta_ref",
    "curvature_norm",
    "cylinder_exact",
    "cylinder_pinch_time",
    "fit_parameters",
    "hermite_spectrum",
    "lower_barrier",
    "mcf_rhs",
    "modulation_residuals",
    "run_physical",
    "sphere_radius_exact",
    "weighted_inner",
    "weighted_norm",
    "__version__",
]
