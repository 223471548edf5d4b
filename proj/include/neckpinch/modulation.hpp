#pragma once

#include <array>
#include <span>
#include <vector>

#include "neckpinch/grid.hpp"

namespace neckpinch {

/// Two-parameter almost-solution family V_{ab}(y) = sqrt((2(d-1)+b y^2)/(a+1/2)).
struct AlmostSolution {
  double a = 0.5;
  double b = 0.0;
  int d = 2;

  double operator()(double y) const;
  double da(double y) const;  // dV/da
  double db(double y) const;  // dV/db
  std::vector<double> values(const Grid& g) const;
};

// Static cylinder solution of the rescaled flow at frozen a.
double static_cylinder_value(double a, int d);  // sqrt((d-1)/a)
// General adiabatic family sqrt((2(d-1)+b y^2)/c); exact first-order solution
// when c = 2a.
double adiabatic_family_value(double b, double c, int d, double y);

/// Gaussian-weighted inner product  <f,g>_a = \int_R f g e^{-a y^2/2} dy
/// (even extension from the half grid).  Requires the weight to decay below
/// 1e-14 at the boundary ("domain-too-small" otherwise).
double weighted_inner(const Grid& g, std::span<const double> f,
                      std::span<const double> h, double a);

/// ||f||_{m,n} = max_i <y_i>^{-m} |d^n f(y_i)|, <y> = sqrt(1+y^2).
/// n <= 2 uses single stencils; n = 3,4 composed stencils (reduced accuracy).
double weighted_norm(const Grid& g, std::span<const double> f, double m, int n,
                     Parity parity = Parity::even);

enum class FitStatus { converged, fit_failed, left_admissible_cone };

/// Result of solving G(mu, v) = 0 for mu = (a, b).
struct ModulationFit {
  double a = 0.0, b = 0.0;
  std::vector<double> phi;            // v - V_{ab}
  std::array<double, 2> ortho_residual{};  // (<phi,1>_a, <phi,1-a y^2>_a)
  int newton_iters = 0;
  FitStatus status = FitStatus::fit_failed;
  bool converged = false;
  bool b_boundary = false;            // iterates clamped at b >= b_floor
  bool a_outside_admissible_box = false;   // a outside [1/4, 1]
  bool neighborhood_warning = false;  // ||v - V||_{3,0} > b/10 at the solution
  double jacobian_cond = 0.0;
};

struct FitOptions {
  double tol = 1e-12;       // scaled residual target
  int max_iter = 40;
  double b_floor = 1e-10;
  double a_min = 0.2, a_max = 1.2;  // widened fit-level box
  double cond_limit = 1e8;
};

// G(mu, v) and its exact Jacobian (2x2, row-major [dG1/da dG1/db; dG2/da dG2/db]).
std::array<double, 2> fit_residual(const Grid& g, std::span<const double> v,
                                   int d, double a, double b);
std::array<double, 4> fit_jacobian(const Grid& g, std::span<const double> v,
                                   int d, double a, double b);

/// Newton solve of G(mu, v) = 0 starting from (a0, b0).
ModulationFit fit_parameters(const Grid& g, std::span<const double> v, int d,
                             double a0, double b0, const FitOptions& opts = {});

// Cold-start guess: a = 1/2, b from the adiabatic relation v v_yy(0) ~ b/(a+1/2).
std::array<double, 2> cold_start_guess(const Grid& g, std::span<const double> v);

struct SplitResult {
  std::vector<double> family;  // V_{ab} on the grid
  std::vector<double> phi;
  ModulationFit fit;
};
SplitResult splitting_decompose(const Grid& g, std::span<const double> v, int d,
                                double a0, double b0, const FitOptions& opts = {});

}  // namespace neckpinch
