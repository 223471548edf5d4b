#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "neckpinch/profile.hpp"

namespace neckpinch {

// Nodewise du/dt = u_xx/(1+u_x^2) - (d-1)/u (interior + origin; the outer node
// carries the Dirichlet closure and gets the same expression for reporting).
std::vector<double> mcf_rhs(const RadialProfile& p);

/// Dirichlet value imposed at the outer node as a function of time.
struct BoundaryClosure {
  ClosureKind kind = ClosureKind::cylinder_tangent;
  double u0_boundary = 1.0;  // datum value at the outer node
  double sphere_r0 = 1.0;    // sphere_reference only
  double x_boundary = 0.0;
  int d = 2;

  static BoundaryClosure for_profile(const RadialProfile& datum, ClosureKind kind,
                                     double sphere_r0 = 1.0);
  double value(double t) const;
};

struct StepOptions {
  double newton_tol = 1e-10;
  int newton_max_iter = 12;
};

/// One implicit Euler step of the physical flow (Newton on the tridiagonal
/// system).  dt = 0 returns the input unchanged.  Throws "step-rejected" when
/// Newton fails or the iterate leaves u > 0; the message carries a suggested
/// smaller dt.
RadialProfile step_physical(const RadialProfile& p, double dt,
                            const BoundaryClosure& bc, const StepOptions& opts = {});

struct TrajectorySample {
  double t, u_min, max_a, dt;
};

struct PinchEstimate {
  double t_star = 0.0;
  double rms_residual = 0.0;
  double r_squared = 0.0;
  double window_sensitivity = 0.0;  // |t*_half-window - t*| / t*
  bool reliable = false;
};

enum class StopReason {
  collapse_detected,
  t_end_reached,
  budget_exceeded,
  domain_exhausted,
  scale_underflow,
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<RadialProfile> snapshots;  // profile.t carries the snapshot time
  StopReason stop = StopReason::collapse_detected;
  std::optional<PinchEstimate> pinch;
};

using StepCallback = std::function<void(const RadialProfile&, double dt)>;

struct RunControls {
  double u_min_stop = 0.0;   // absolute threshold
  double t_end = 0.0;        // 0 = run to collapse
  double tol_step = 1e-8;
  double newton_tol = 1e-10;
  int newton_max_iter = 12;
  double dt_init = 1e-6;
  double wall_budget_s = 600.0;
  bool regrid = false;       // rebuild the cluster when u_min halves
  int regrid_nodes = 0;      // 0 = keep the profile's node count
  double regrid_stretch = 0.0;
};

/// Core integration loop: step-doubling dt control, the 10%-per-step u_min
/// cap, optional regridding on u_min halving, snapshots at each halving.
Trajectory run_profile(RadialProfile p, const BoundaryClosure& bc,
                       const RunControls& rc, const StepCallback& on_step = {});

/// Config-level driver: builds the datum and closure, then runs until
/// u_min <= u_min_stop_rel * u0(0) (or t_end / wall budget).
Trajectory run_physical(const SimConfig& cfg, const StepCallback& on_step = {});

// Step-doubling driver for a single accepted step; returns the accepted
// profile and updates dt in place (used by run_physical and the rescaled loop).
RadialProfile advance_adaptive(const RadialProfile& p, double& dt, double tol,
                               const BoundaryClosure& bc, const StepOptions& opts);

}  // namespace neckpinch
