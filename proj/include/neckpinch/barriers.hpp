#pragma once

#include <span>
#include <vector>

#include "neckpinch/collapse.hpp"
#include "neckpinch/profile.hpp"

namespace neckpinch {

// Piecewise comparison function: (9/10) sqrt(2(d-1)) on b y^2 < 20(d-1),
// 4 sqrt(d-1) on b y^2 >= 20(d-1).  The jump is kept verbatim.
double lower_barrier(double y, double b_param, int d);

struct BarrierVerdict {
  double min_margin = 0.0;      // min over nodes of v - g(y, beta)
  int worst_node = 0;
  bool barrier_ok = false;
  double rho_central_max = 0.0; // max |rho| on |y| <= 1/10
  double rho_outer_min = 0.0;   // min rho on beta y^2 >= 2(d-1)
  bool rho_central_ok = false;
  bool rho_outer_ok = false;    // only meaningful when the datum qualified
  bool rho_outer_applicable = false;
  double chi_max = 0.0;         // max of u u_xx/(1+u_x^2) - (d-1)
};

// Nodewise v >= g(y, beta); fills the barrier part of the verdict.
BarrierVerdict barrier_check(const CollapseState& s, double beta);

// rho = v v_yy / (1 + v_y^2); frame-invariant against the physical profile.
std::vector<double> rho(const Grid& g, std::span<const double> values);

// |rho| <= 4 beta on |y| <= 1/10; rho >= -1 on beta y^2 >= 2(d-1) when the
// run's datum satisfied v0 v0'' >= -1 (datum_qualifies).  `tol` absorbs
// stencil error on data that sit exactly on a bound (spheres at rho = -1).
BarrierVerdict rho_bounds_check(const CollapseState& s, double beta,
                                bool datum_qualifies, double tol = 1e-6);

// chi = u u_xx/(1+u_x^2) - (d-1) (nonpositive iff mean curvature >= 0).
std::vector<double> mean_curvature_chi(const RadialProfile& p);
double chi_max(const RadialProfile& p);

struct MonotoneCheck {
  std::vector<double> chi_max_series;
  bool chi_nonpositive = true;    // chi <= tol at every snapshot
  bool u_nonincreasing = true;    // u(x, t2) <= u(x, t1) + tol on common nodes
};
// Sign/monotonicity check over recorded snapshots (requires a
// nonpositive-chi datum; tol absorbs stencil error).
MonotoneCheck mean_curvature_sign_check(std::span<const RadialProfile> snapshots,
                                        double tol = 1e-6);

}  // namespace neckpinch
