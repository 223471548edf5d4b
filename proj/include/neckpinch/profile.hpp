#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "neckpinch/grid.hpp"

namespace neckpinch {

/// Rotationally symmetric surface in physical variables: r = u(x, t) on the
/// half-line grid (even in x, reflection ghost at the origin).
struct RadialProfile {
  Grid grid;
  std::vector<double> u;  // radius at each node, > 0
  int d = 2;              // surface dimension
  double t = 0.0;

  double u_min() const;
  int u_min_index() const;
  // Throws "collapsed-input" / "numerical-overflow" if invariants fail.
  void validate() const;
  // Full-line reconstruction (mirror); symmetric by construction.
  std::vector<double> mirrored_values() const;
  std::vector<double> mirrored_nodes() const;
};

enum class DatumKind { neck, cylinder, sphere };
enum class PerturbShape { none, gauss, poly_gauss, noise };
enum class ClosureKind { cylinder_tangent, sphere_reference, fixed_value };

struct SimConfig {
  int d = 2;
  DatumKind datum = DatumKind::neck;
  double epsilon0 = 0.1;       // slope of the datum's quadratic profile
  double varsigma0 = 0.5;      // overall datum normalization, in [1/2, 2]
  double kappa0 = 2.0;         // class constants (report only, not claims)
  double class_constant = 1.0;
  double cylinder_u0 = 1.0;
  double sphere_radius = 1.0;
  PerturbShape perturb_shape = PerturbShape::none;
  double perturb_amplitude = 0.0;
  std::uint64_t perturb_seed = 1;

  double domain_half_width = 10.0;  // physical x
  double y_half_width = 20.0;       // rescaled frame
  int nodes = 801;
  double grid_stretch = 4.0;
  double lambda0 = 1.0;

  double u_min_stop_rel = 1e-3;  // stop when u_min <= this * u0(0)
  double t_end = 0.0;            // optional hard stop (0 = run to collapse)
  double tol_step = 1e-8;        // step-doubling relative target
  double newton_tol = 1e-10;
  int newton_max_iter = 12;
  double dt_init = 1e-6;
  double dtau_init = 1e-3;
  double dtau_max = 0.05;
  double tau_max = 100.0;
  int output_cadence = 10;       // CSV row thinning
  double fit_tol = 1e-12;
  int fit_max_iter = 40;

  double alpha = 0.5;     // spectral runs
  int spectrum_count = 5;
  double spectrum_half_width = 20.0;
  int spectrum_nodes = 3201;
  double probe_beta = 0.05;
  double probe_horizon = 6.0;
  double wall_budget_s = 600.0;

  ClosureKind closure() const {
    return datum == DatumKind::sphere ? ClosureKind::sphere_reference
                                      : ClosureKind::cylinder_tangent;
  }
  // Throws on out-of-class values (d <= 1, varsigma0 outside [1/2, 2], ...).
  void validate() const;
};

/// How the constructed datum compares against its class budgets
/// ||u0 - ref||_{m,n} <= C eps0^{(m+n+1)/2} plus the barrier-type lower bound.
struct DatumClassReport {
  std::array<double, 4> norms{};    // (3,0), (11/10,0), (2,1), (1,2)
  std::array<double, 4> budgets{};
  bool norms_ok = true;
  bool lower_bound_ok = true;
  bool passed() const { return norms_ok && lower_bound_ok; }
};

// Reference (unperturbed) neck-class datum value at x.
double neck_reference(const SimConfig& cfg, double x);

// Builds the datum on the given grid; for neck data the class report is
// filled, for cylinder/sphere it is trivially passing.
RadialProfile make_initial_datum(const SimConfig& cfg, const Grid& grid,
                                 DatumClassReport* report = nullptr);

// Exact solutions used as oracles.
double cylinder_exact(double u0, int d, double t);        // throws "past-collapse"
double cylinder_pinch_time(double u0, int d);
double sphere_radius_exact(double r0, int d, double t);   // R(t), center value
double sphere_pinch_time(double r0, int d);
double sphere_profile_exact(double r0, int d, double x, double t);

// Nodewise |A| = sqrt( (u_xx/(1+u_x^2)^{3/2})^2 + (d-1)/(u^2(1+u_x^2)) ).
std::vector<double> curvature_norm(const RadialProfile& p);
double max_curvature(const RadialProfile& p);

}  // namespace neckpinch
