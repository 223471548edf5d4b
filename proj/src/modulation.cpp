#include "neckpinch/modulation.hpp"

#include <algorithm>
#include <cmath>

#include "neckpinch/errors.hpp"

namespace neckpinch {

double AlmostSolution::operator()(double y) const {
  return std::sqrt((2.0 * (d - 1) + b * y * y) / (a + 0.5));
}

double AlmostSolution::da(double y) const { return -(*this)(y) / (2.0 * (a + 0.5)); }

double AlmostSolution::db(double y) const {
  return y * y / (2.0 * (a + 0.5) * (*this)(y));
}

std::vector<double> AlmostSolution::values(const Grid& g) const {
  std::vector<double> out(g.size());
  for (int i = 0; i < g.size(); ++i) out[i] = (*this)(g.node(i));
  return out;
}

double static_cylinder_value(double a, int d) { return std::sqrt((d - 1) / a); }

double adiabatic_family_value(double b, double c, int d, double y) {
  return std::sqrt((2.0 * (d - 1) + b * y * y) / c);
}

double weighted_inner(const Grid& g, std::span<const double> f,
                      std::span<const double> h, double a) {
  if (a <= 0.0) fail("bad-argument", "inner-product weight needs a > 0");
  const double W = g.half_width();
  if (std::exp(-a * W * W / 2.0) > 1e-14)
    fail("domain-too-small", "e^{-a y^2/2} > 1e-14 at the grid boundary");
  const int n = g.size();
  double s = 0.0;
  const auto& w = g.quad_weights();
  for (int i = 0; i < n; ++i) {
    const double y = g.node(i);
    s += w[i] * f[i] * h[i] * std::exp(-0.5 * a * y * y);
  }
  return 2.0 * s;
}

double weighted_norm(const Grid& g, std::span<const double> f, double m, int n,
                     Parity parity) {
  std::vector<double> df = g.deriv_n(f, n, parity);
  double best = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double y = g.node(i);
    best = std::max(best, std::abs(df[i]) * std::pow(1.0 + y * y, -0.5 * m));
  }
  return best;
}

namespace {

struct Quads {
  // moments of (V - v) and the family derivatives against the fit windows
  double g1, g2;          // <V-v, 1>, <V-v, 1-a y^2>
  double da1, da2;        // <dV/da, 1>, <dV/da, 1-a y^2>
  double db1, db2;        // <dV/db, ...>
  double r_y2;            // <V-v, y^2>
  double r_y2w;           // <V-v, (1-a y^2) y^2>
};

Quads assemble(const Grid& g, std::span<const double> v, int d, double a, double b) {
  const double W = g.half_width();
  if (std::exp(-a * W * W / 2.0) > 1e-14)
    fail("domain-too-small", "fit weight does not decay at the boundary");
  AlmostSolution V{a, b, d};
  Quads q{};
  const auto& w = g.quad_weights();
  for (int i = 0; i < g.size(); ++i) {
    const double y = g.node(i);
    const double y2 = y * y;
    const double mu = w[i] * std::exp(-0.5 * a * y2);
    const double win = 1.0 - a * y2;
    const double r = V(y) - v[i];
    q.g1 += mu * r;
    q.g2 += mu * r * win;
    q.da1 += mu * V.da(y);
    q.da2 += mu * V.da(y) * win;
    q.db1 += mu * V.db(y);
    q.db2 += mu * V.db(y) * win;
    q.r_y2 += mu * r * y2;
    q.r_y2w += mu * r * win * y2;
  }
  const double two = 2.0;  // even extension
  q.g1 *= two; q.g2 *= two;
  q.da1 *= two; q.da2 *= two;
  q.db1 *= two; q.db2 *= two;
  q.r_y2 *= two; q.r_y2w *= two;
  return q;
}

}  // namespace

std::array<double, 2> fit_residual(const Grid& g, std::span<const double> v,
                                   int d, double a, double b) {
  Quads q = assemble(g, v, d, a, b);
  return {q.g1, q.g2};
}

std::array<double, 4> fit_jacobian(const Grid& g, std::span<const double> v,
                                   int d, double a, double b) {
  // Full derivative of G: the family derivative (A1 block) plus the terms from
  // differentiating the Gaussian measure and the window 1 - a y^2 in a, all of
  // which carry a factor V - v and vanish on the family.
  Quads q = assemble(g, v, d, a, b);
  const double j11 = q.da1 - 0.5 * q.r_y2;
  const double j12 = q.db1;
  const double j21 = q.da2 - q.r_y2 - 0.5 * q.r_y2w;
  const double j22 = q.db2;
  return {j11, j12, j21, j22};
}

ModulationFit fit_parameters(const Grid& g, std::span<const double> v, int d,
                             double a0, double b0, const FitOptions& opts) {
  ModulationFit out;
  double a = std::clamp(a0, opts.a_min, opts.a_max);
  double b = std::max(b0, opts.b_floor);
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  double cond = 0.0;
  bool clamped = false;
  int it = 0;
  double scale = vmax * std::sqrt(2.0 * M_PI / a);
  auto small = [&](const std::array<double, 2>& r) {
    return std::abs(r[0]) <= opts.tol * scale && std::abs(r[1]) <= opts.tol * scale;
  };
  std::array<double, 2> r = fit_residual(g, v, d, a, b);
  while (!small(r) && it < opts.max_iter) {
    const auto J = fit_jacobian(g, v, d, a, b);
    const double det = J[0] * J[3] - J[1] * J[2];
    // crude 2x2 condition estimate via Frobenius norms
    const double fro = std::sqrt(J[0] * J[0] + J[1] * J[1] + J[2] * J[2] + J[3] * J[3]);
    cond = (det == 0.0) ? 1e300 : fro * fro / std::abs(det);
    if (cond > opts.cond_limit) break;
    double da = (-r[0] * J[3] + r[1] * J[1]) / det;
    double db = (-J[0] * r[1] + J[2] * r[0]) / det;
    const double len = std::hypot(da, db);
    if (len > 0.2) {  // trust-region style clip, keeps iterates in the basin
      da *= 0.2 / len;
      db *= 0.2 / len;
    }
    a = std::clamp(a + da, opts.a_min, opts.a_max);
    const double b_prev = b;
    b += db;
    if (b < opts.b_floor) {
      b = opts.b_floor;
      clamped = true;
    }
    scale = vmax * std::sqrt(2.0 * M_PI / a);
    r = fit_residual(g, v, d, a, b);
    ++it;
    if (clamped && b == opts.b_floor && b_prev == opts.b_floor && std::abs(da) < 1e-14)
      break;  // pinned at the boundary with no progress left in a
  }
  out.a = a;
  out.b = b;
  out.newton_iters = it;
  out.jacobian_cond = cond;
  out.b_boundary = clamped;
  out.a_outside_admissible_box = (a < 0.25 || a > 1.0);
  out.ortho_residual = {-r[0], -r[1]};  // <phi, .> = -G at the solution
  out.converged = small(r);
  if (!out.converged && clamped && b == opts.b_floor) {
    // projected convergence at the b >= b_floor boundary: accept when the
    // leftover residual is no larger than what the clamp itself pins
    const auto J = fit_jacobian(g, v, d, a, b);
    const double fro = std::sqrt(J[0] * J[0] + J[1] * J[1] + J[2] * J[2] + J[3] * J[3]);
    const double slack = 10.0 * fro * opts.b_floor + opts.tol * scale;
    out.converged = std::abs(r[0]) <= slack && std::abs(r[1]) <= slack;
  }
  if (out.converged) {
    out.status = clamped ? FitStatus::left_admissible_cone : FitStatus::converged;
  } else {
    out.status = FitStatus::fit_failed;
  }
  AlmostSolution V{a, b, d};
  out.phi.resize(g.size());
  for (int i = 0; i < g.size(); ++i) out.phi[i] = v[i] - V(g.node(i));
  if (out.converged) {
    const double n30 = weighted_norm(g, out.phi, 3.0, 0);
    out.neighborhood_warning = (n30 > b / 10.0);
  }
  return out;
}

std::array<double, 2> cold_start_guess(const Grid& g, std::span<const double> v) {
  auto vyy = g.deriv(v, 2, Parity::even);
  double b = v[0] * vyy[0];  // rho(0) = b/(a+1/2) with a = 1/2
  b = std::clamp(b, 1e-6, 1.0);
  return {0.5, b};
}

SplitResult splitting_decompose(const Grid& g, std::span<const double> v, int d,
                                double a0, double b0, const FitOptions& opts) {
  SplitResult s;
  s.fit = fit_parameters(g, v, d, a0, b0, opts);
  if (s.fit.status == FitStatus::fit_failed)
    fail("fit-failed", "modulation fit did not converge");
  AlmostSolution V{s.fit.a, s.fit.b, d};
  s.family = V.values(g);
  s.phi = s.fit.phi;
  return s;
}

}  // namespace neckpinch
