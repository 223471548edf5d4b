#pragma once

#include <array>
#include <functional>
#include <vector>

#include "neckpinch/pde.hpp"
#include "neckpinch/profile.hpp"

namespace neckpinch {

/// Rescaled (collapse-frame) state: v(y, tau) = u(lambda y, t)/lambda on a
/// fixed half-line y-grid, with the scale lambda driven by the fitted drift a
/// through -lambda lambda_t = a.
struct CollapseState {
  Grid grid;                // y nodes
  std::vector<double> v;    // > 0
  double lambda = 1.0;
  double t = 0.0;
  double tau = 0.0;
  double a = 0.5;           // scale drift (fitted)
  double b = 0.0;           // neck-shape parameter (fitted)
  int d = 2;

  double c() const { return a + 0.5; }  // derived, never fitted independently
  void validate() const;
};

// Resample a physical profile into collapse variables (throws
// "domain-exhausted" if lambda * y_max exceeds the physical domain).
CollapseState to_collapse_vars(const RadialProfile& p, double lambda, const Grid& ygrid);
// Inverse transform onto the given physical grid.
RadialProfile from_collapse_vars(const CollapseState& s, const Grid& xgrid);

// Nodewise d v/d tau = v_yy/(1+v_y^2) - a y v_y + a v - (d-1)/v.
std::vector<double> rescaled_rhs(const CollapseState& s);

/// One implicit step of size dtau with a frozen over the step.  lambda is
/// updated by exact exponential integration of d(lambda^2)/dtau = -2 a lambda^2
/// (keeps lambda > 0 structurally) and t by the exact integral of lambda^2.
///
/// Far-field closure: the outer node is slaved to the almost-solution family
/// modulo the locally linear fluctuation, v_N = V_N + extrapolated phi (the
/// fluctuation is only <y>^3-weighted small, so pinning phi = 0 at the outer
/// node would shear off a spurious boundary layer; the outer region is an
/// outflow of the -a y d_y transport, where linear extrapolation is the
/// consistent closure).  `predict`, when set, supplies (a, b) at the step's
/// target tau so the family part of the closure does not lag the fit drift.
/// Throws "scale-underflow" when lambda^2 underflows.
using ParamPredictor = std::function<std::array<double, 2>(double tau)>;
CollapseState step_rescaled(const CollapseState& s, double dtau,
                            const StepOptions& opts = {},
                            const ParamPredictor& predict = {});

// Gauge transform w = e^{-a y^2/4} v and its inverse.
std::vector<double> gauge_transform(const CollapseState& s);
std::vector<double> gauge_inverse(const CollapseState& s, std::span<const double> w);

// Right side of the gauge-transformed equation with omega^2 = a^2 + a_tau:
//   w_yy/(1+v_y^2) - (omega^2/4) y^2 w + (3a/2) w - e^{-a y^2/2} (d-1)/w.
std::vector<double> w_equation_rhs(const CollapseState& s, double a_tau);

// Exact transport correction by which the conjugated rescaled flow differs
// from w_equation_rhs: -(a y w_y + (a^2 y^2/4 + a/2) w) v_y^2/(1+v_y^2).
// Vanishes identically on y-independent states.
std::vector<double> w_equation_correction(const CollapseState& s);

// Curvature sup in the physical frame implied by the rescaled state.
double max_curvature(const CollapseState& s);
double rescaled_max_curvature(const CollapseState& s);

}  // namespace neckpinch
