#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "neckpinch/grid.hpp"
#include "neckpinch/pde.hpp"

namespace neckpinch {

// Reference decay rate beta(tau) = 1/(1/b0 + tau/(d-1)).
double beta_ref(double tau, double b0, int d);

/// One per-step record of the rescaled run, everything the estimating
/// functions and law fits consume.
struct FitRecord {
  double tau = 0.0, t = 0.0, lambda = 0.0;
  double a = 0.0, b = 0.0;
  std::array<double, 4> phi_norms{};  // ||phi||_{m,n} for (3,0),(11/10,0),(2,1),(1,2)
  double max_a_phys = 0.0;            // physical-frame sup |A|
  double v_min = 0.0;
  bool admissible = true;             // a in [1/4, 1]
};

/// Running majorants M_{m,n}, A, B at the latest record.
struct EstimatingFunctions {
  std::array<double, 4> M{};
  double A = 0.0;
  double B = 0.0;
  void absorb(const FitRecord& r, double b0, int d);
};

// Exponents (m+n+1)/2 pair list shared by datum budgets and majorants.
inline constexpr double kNormPairs[4][2] = {{3.0, 0}, {1.1, 0}, {2.0, 1}, {1.0, 2}};

// Majorants over a whole history (running maxima at the final record).
EstimatingFunctions estimating_functions(std::span<const FitRecord> hist, double b0, int d);

// Gamma_1 = a_tau/(a+1/2) + a - 1/2 + b/(d-1),
// Gamma_2 = -b_tau - b(a - 1/2 + b/(d-1)) - b^2/(d-1).
std::array<double, 2> modulation_residuals(double a, double b, double a_tau,
                                           double b_tau, int d);

// Backward-difference parameter rates from the history tail (3-point on the
// nonuniform tau samples; 2-point when only two records exist).
std::array<double, 2> parameter_rates(std::span<const FitRecord> hist);

/// Least-squares fit of u_min(t)^2 ~ C (t* - t) over the trailing window
/// (final decade of u_min).  Throws "pinch-fit-unreliable" on a non-monotone
/// tail or R^2 < 0.99.
PinchEstimate estimate_pinch_time(std::span<const TrajectorySample> samples);

struct LawSeries {
  std::vector<double> t, tau, value;
};

struct AsymptoticsOptions {
  double lambda_window = 0.10;    // |terminal ratio - 1| bound
  double b_window = 0.25;         // relative window around -(d-1)
  double c_lo = 0.65, c_hi = 1.35;
};

/// The three collapse laws against the fitted pinch time, evaluated on the
/// trust window t*-t in [10 (t*-t_end), 0.1 t*].
struct AsymptoticsReport {
  double t_star = 0.0;
  PinchEstimate pinch;
  LawSeries lambda_ratio;  // lambda/sqrt(t*-t)
  LawSeries b_law;         // b ln|t*-t|
  LawSeries c_law;         // (c-1) ln|t*-t|
  double terminal_lambda_ratio = 0.0;
  double terminal_b_law = 0.0;
  double terminal_c_law = 0.0;
  double type_one_constant = 0.0;
  double type_one_growth = 0.0;   // relative growth of the running sup, last decade
  bool lambda_ok = false, lambda_trend_ok = false;
  bool b_ok = false, c_ok = false, type_one_ok = false;
  bool has_fit_series = true;
};

// Throws "window-too-short" when the history spans < 2 decades of t*-t.
AsymptoticsReport verify_asymptotics(std::span<const FitRecord> hist, double t_star,
                                     int d, const AsymptoticsOptions& opts = {});

/// sup over the trust window of max|A|(t) sqrt(t*-t), plus the growth of the
/// running sup over the final trusted decade.
struct TypeOneResult {
  double constant = 0.0;
  double growth = 0.0;
  bool plateaued = false;
};
TypeOneResult type_one_check(std::span<const double> t, std::span<const double> max_a,
                             double t_star);

// Sum_{m+n=3, n<=2} ||<y>^{-m} d^n phi||_inf / b^2.
double remainder_bound_check(const Grid& g, std::span<const double> phi, double b);

}  // namespace neckpinch
