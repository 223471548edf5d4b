#include "neckpinch/profile.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "neckpinch/errors.hpp"
#include "neckpinch/modulation.hpp"

namespace neckpinch {

double RadialProfile::u_min() const {
  return *std::min_element(u.begin(), u.end());
}

int RadialProfile::u_min_index() const {
  return static_cast<int>(std::min_element(u.begin(), u.end()) - u.begin());
}

void RadialProfile::validate() const {
  if (d < 2) fail("bad-argument", "surface dimension must be >= 2");
  if (static_cast<int>(u.size()) != grid.size())
    fail("bad-argument", "profile/grid size mismatch");
  for (double v : u) {
    if (!std::isfinite(v)) fail("numerical-overflow", "non-finite profile value");
    if (v <= 0.0) fail("collapsed-input", "profile has non-positive radius");
  }
  if (grid.max_spacing_ratio() > 4.0)
    fail("bad-grid", "adjacent spacing ratio exceeds 4");
}

std::vector<double> RadialProfile::mirrored_values() const {
  const int n = grid.size();
  std::vector<double> out(2 * n - 1);
  for (int i = 0; i < n; ++i) {
    out[n - 1 - i] = u[i];
    out[n - 1 + i] = u[i];
  }
  return out;
}

std::vector<double> RadialProfile::mirrored_nodes() const {
  const int n = grid.size();
  std::vector<double> out(2 * n - 1);
  for (int i = 0; i < n; ++i) {
    out[n - 1 - i] = -grid.node(i);
    out[n - 1 + i] = grid.node(i);
  }
  return out;
}

void SimConfig::validate() const {
  if (d <= 1) fail("bad-config", "d >= 2 required (the curvature term changes character at d = 1)");
  if (epsilon0 <= 0.0) fail("bad-config", "epsilon0 must be positive");
  if (varsigma0 < 0.5 || varsigma0 > 2.0)
    fail("bad-config", "varsigma0 must lie in [1/2, 2]");
  if (kappa0 < 2.0) fail("bad-config", "kappa0 must be >= 2");
  if (u_min_stop_rel <= 0.0) fail("bad-config", "u_min_stop_rel must be positive");
  if (nodes < 16) fail("bad-config", "nodes must be >= 16");
  if (domain_half_width <= 0.0 || y_half_width <= 0.0)
    fail("bad-config", "domain widths must be positive");
  if (lambda0 <= 0.0) fail("bad-config", "lambda0 must be positive");
  if (tol_step <= 0.0 || newton_tol <= 0.0 || fit_tol <= 0.0)
    fail("bad-config", "tolerances must be positive");
  if (alpha <= 0.0) fail("bad-config", "alpha must be positive");
}

double neck_reference(const SimConfig& cfg, double x) {
  return std::sqrt((2.0 * (cfg.d - 1) + cfg.epsilon0 * x * x) / (2.0 * cfg.varsigma0));
}

namespace {

double perturbation_value(const SimConfig& cfg, double x, double noise) {
  switch (cfg.perturb_shape) {
    case PerturbShape::none:
      return 0.0;
    case PerturbShape::gauss:
      return cfg.perturb_amplitude * std::exp(-x * x);
    case PerturbShape::poly_gauss:
      return cfg.perturb_amplitude * x * x * std::exp(-x * x);
    case PerturbShape::noise:
      return cfg.perturb_amplitude * noise * std::exp(-x * x / 4.0);
  }
  return 0.0;
}

}  // namespace

RadialProfile make_initial_datum(const SimConfig& cfg, const Grid& grid,
                                 DatumClassReport* report) {
  cfg.validate();
  RadialProfile p;
  p.grid = grid;
  p.d = cfg.d;
  p.t = 0.0;
  p.u.resize(grid.size());

  if (cfg.datum == DatumKind::cylinder) {
    std::fill(p.u.begin(), p.u.end(), cfg.cylinder_u0);
    if (report) *report = DatumClassReport{};
    return p;
  }
  if (cfg.datum == DatumKind::sphere) {
    const double R = cfg.sphere_radius;
    if (grid.half_width() >= R) fail("bad-config", "sphere grid must stay inside the cap");
    for (int i = 0; i < grid.size(); ++i)
      p.u[i] = std::sqrt(R * R - grid.node(i) * grid.node(i));
    if (report) *report = DatumClassReport{};
    return p;
  }

  // neck-class datum: quadratic-profile reference plus optional perturbation.
  std::mt19937_64 rng(cfg.perturb_seed);
  std::normal_distribution<double> gauss01(0.0, 1.0);
  std::vector<double> pert(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const double noise = (cfg.perturb_shape == PerturbShape::noise) ? gauss01(rng) : 0.0;
    pert[i] = perturbation_value(cfg, grid.node(i), noise);
    p.u[i] = neck_reference(cfg, grid.node(i)) + pert[i];
  }
  p.validate();

  if (report) {
    DatumClassReport rep;
    const double pairs[4][2] = {{3.0, 0}, {1.1, 0}, {2.0, 1}, {1.0, 2}};
    rep.norms_ok = true;
    for (int k = 0; k < 4; ++k) {
      const double m = pairs[k][0];
      const int n = static_cast<int>(pairs[k][1]);
      rep.norms[k] = weighted_norm(grid, pert, m, n);
      rep.budgets[k] = cfg.class_constant * std::pow(cfg.epsilon0, 0.5 * (m + n + 1));
      if (rep.norms[k] > rep.budgets[k]) rep.norms_ok = false;
    }
    // lower-bound line: u0(x) >= lam0 * g(x/lam0, eps0/(2 varsigma0)) with
    // lam0 = 1/sqrt(2 varsigma0 + eps0/(d-1))
    const double lam0 = 1.0 / std::sqrt(2.0 * cfg.varsigma0 + cfg.epsilon0 / (cfg.d - 1));
    const double bpar = cfg.epsilon0 / (2.0 * cfg.varsigma0);
    rep.lower_bound_ok = true;
    for (int i = 0; i < grid.size(); ++i) {
      const double xs = grid.node(i) / lam0;
      const double gv = (bpar * xs * xs < 20.0 * (cfg.d - 1))
                            ? 0.9 * std::sqrt(2.0 * (cfg.d - 1))
                            : 4.0 * std::sqrt(static_cast<double>(cfg.d - 1));
      if (p.u[i] < lam0 * gv) {
        rep.lower_bound_ok = false;
        break;
      }
    }
    *report = rep;
  }
  return p;
}

double cylinder_pinch_time(double u0, int d) { return u0 * u0 / (2.0 * (d - 1)); }

double cylinder_exact(double u0, int d, double t) {
  const double ts = cylinder_pinch_time(u0, d);
  if (t >= ts) fail("past-collapse", "cylinder queried at or beyond its pinch time");
  return std::sqrt(u0 * u0 - 2.0 * (d - 1) * t);
}

double sphere_pinch_time(double r0, int d) { return r0 * r0 / (2.0 * d); }

double sphere_radius_exact(double r0, int d, double t) {
  const double ts = sphere_pinch_time(r0, d);
  if (t >= ts) fail("past-collapse", "sphere queried at or beyond its pinch time");
  return std::sqrt(r0 * r0 - 2.0 * d * t);
}

double sphere_profile_exact(double r0, int d, double x, double t) {
  const double R = sphere_radius_exact(r0, d, t);
  if (std::abs(x) >= R) fail("past-collapse", "sphere profile queried outside the cap");
  return std::sqrt(R * R - x * x);
}

std::vector<double> curvature_norm(const RadialProfile& p) {
  p.validate();
  auto ux = p.grid.deriv(p.u, 1, Parity::even);
  auto uxx = p.grid.deriv(p.u, 2, Parity::even);
  std::vector<double> a(p.u.size());
  for (size_t i = 0; i < p.u.size(); ++i) {
    const double s = 1.0 + ux[i] * ux[i];
    const double k1 = uxx[i] / std::pow(s, 1.5);
    a[i] = std::sqrt(k1 * k1 + (p.d - 1) / (p.u[i] * p.u[i] * s));
  }
  return a;
}

double max_curvature(const RadialProfile& p) {
  auto a = curvature_norm(p);
  return *std::max_element(a.begin(), a.end());
}

}  // namespace neckpinch
