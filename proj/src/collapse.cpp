#include "neckpinch/collapse.hpp"

#include <algorithm>
#include <cmath>

#include "neckpinch/errors.hpp"
#include "neckpinch/modulation.hpp"

namespace neckpinch {

void CollapseState::validate() const {
  if (d < 2) fail("bad-argument", "surface dimension must be >= 2");
  if (!(lambda > 0.0)) fail("scale-underflow", "lambda must be positive");
  if (static_cast<int>(v.size()) != grid.size())
    fail("bad-argument", "state/grid size mismatch");
  for (double x : v) {
    if (!std::isfinite(x)) fail("numerical-overflow", "non-finite rescaled value");
    if (x <= 0.0) fail("collapsed-input", "rescaled profile has non-positive value");
  }
}

CollapseState to_collapse_vars(const RadialProfile& p, double lambda, const Grid& ygrid) {
  p.validate();
  if (!(lambda > 0.0)) fail("bad-argument", "lambda must be positive");
  if (lambda * ygrid.half_width() > p.grid.half_width() * (1.0 + 1e-12))
    fail("domain-exhausted", "rescaled window exceeds the physical domain");
  MonotoneCubic interp(p.grid.nodes(), p.u);
  CollapseState s;
  s.grid = ygrid;
  s.d = p.d;
  s.t = p.t;
  s.lambda = lambda;
  s.v.resize(ygrid.size());
  for (int i = 0; i < ygrid.size(); ++i) {
    const double x = std::min(lambda * ygrid.node(i), p.grid.half_width());
    s.v[i] = interp(x) / lambda;
  }
  return s;
}

RadialProfile from_collapse_vars(const CollapseState& s, const Grid& xgrid) {
  s.validate();
  if (xgrid.half_width() > s.lambda * s.grid.half_width() * (1.0 + 1e-12))
    fail("domain-exhausted", "physical window exceeds the rescaled domain");
  MonotoneCubic interp(s.grid.nodes(), s.v);
  RadialProfile p;
  p.grid = xgrid;
  p.d = s.d;
  p.t = s.t;
  p.u.resize(xgrid.size());
  for (int i = 0; i < xgrid.size(); ++i) {
    const double y = std::min(xgrid.node(i) / s.lambda, s.grid.half_width());
    p.u[i] = s.lambda * interp(y);
  }
  return p;
}

std::vector<double> rescaled_rhs(const CollapseState& s) {
  s.validate();
  auto vy = s.grid.deriv(s.v, 1, Parity::even);
  auto vyy = s.grid.deriv(s.v, 2, Parity::even);
  std::vector<double> r(s.v.size());
  for (size_t i = 0; i < s.v.size(); ++i) {
    const double y = s.grid.node(static_cast<int>(i));
    r[i] = vyy[i] / (1.0 + vy[i] * vy[i]) - s.a * y * vy[i] + s.a * s.v[i] -
           (s.d - 1) / s.v[i];
    if (!std::isfinite(r[i])) fail("numerical-overflow", "non-finite rescaled rhs");
  }
  return r;
}

CollapseState step_rescaled(const CollapseState& s, double dtau, const StepOptions& opts,
                            const ParamPredictor& predict) {
  s.validate();
  if (dtau < 0.0) fail("bad-argument", "negative dtau");
  if (dtau == 0.0) return s;

  CollapseState out = s;
  out.tau = s.tau + dtau;
  // exact scale update with a frozen over the step
  const double decay = std::exp(-2.0 * s.a * dtau);
  const double lam2 = s.lambda * s.lambda;
  out.lambda = s.lambda * std::sqrt(decay);
  if (!(out.lambda > 0.0) || !std::isfinite(out.lambda))
    fail("scale-underflow", "lambda underflowed; pinch reached");
  out.t = s.t + lam2 * (1.0 - decay) / (2.0 * s.a);

  const int n = s.grid.size();
  const auto& d1 = s.grid.d1_rows();
  const auto& d2 = s.grid.d2_rows();

  // closure: v_{n-1} = (1+r) v_{n-2} - r v_{n-3} + R_V, the family value plus
  // the linearly extrapolated fluctuation, folded into the last PDE row
  const double r_sp = (s.grid.node(n - 1) - s.grid.node(n - 2)) /
                      (s.grid.node(n - 2) - s.grid.node(n - 3));
  const auto ab = predict ? predict(out.tau) : std::array<double, 2>{s.a, s.b};
  AlmostSolution Vn{ab[0], std::max(ab[1], 0.0), s.d};
  const double RV = Vn(s.grid.node(n - 1)) - (1.0 + r_sp) * Vn(s.grid.node(n - 2)) +
                    r_sp * Vn(s.grid.node(n - 3));
  auto closure_value = [&](const std::vector<double>& v) {
    return (1.0 + r_sp) * v[n - 2] - r_sp * v[n - 3] + RV;
  };
  out.v[n - 1] = closure_value(out.v);

  std::vector<double> sub(n - 1), diag(n - 1), sup(n - 1), res(n - 1);
  for (int iter = 0; iter <= opts.newton_max_iter; ++iter) {
    double gmax = 0.0;
    for (int i = 0; i < n - 1; ++i) {
      const double y = s.grid.node(i);
      const double vm = (i == 0) ? out.v[1] : out.v[i - 1];
      const double vp = out.v[i + 1];
      const double s1 = d1[i].cm * vm + d1[i].c0 * out.v[i] + d1[i].cp * vp;
      const double s2 = d2[i].cm * vm + d2[i].c0 * out.v[i] + d2[i].cp * vp;
      const double den = 1.0 + s1 * s1;
      const double f =
          s2 / den - s.a * y * s1 + s.a * out.v[i] - (s.d - 1) / out.v[i];
      const double g = out.v[i] - s.v[i] - dtau * f;
      res[i] = -g;
      gmax = std::max(gmax, std::abs(g));
      const double common = -2.0 * s2 * s1 / (den * den);
      double jm = d2[i].cm / den + common * d1[i].cm - s.a * y * d1[i].cm;
      double jc = d2[i].c0 / den + common * d1[i].c0 - s.a * y * d1[i].c0 + s.a +
                  (s.d - 1) / (out.v[i] * out.v[i]);
      double jp = d2[i].cp / den + common * d1[i].cp - s.a * y * d1[i].cp;
      if (i == 0) {
        jp += jm;
        jm = 0.0;
      }
      if (i == n - 2) {  // substitute the closure for the v_{n-1} dependency
        jc += jp * (1.0 + r_sp);
        jm -= jp * r_sp;
        jp = 0.0;
      }
      sub[i] = -dtau * jm;
      diag[i] = 1.0 - dtau * jc;
      sup[i] = (i == n - 2) ? 0.0 : -dtau * jp;
    }
    const double scale = std::max(1.0, out.v[0]);
    if (gmax <= opts.newton_tol * scale) return out;
    // Thomas solve
    for (int i = 1; i < n - 1; ++i) {
      const double w = sub[i] / diag[i - 1];
      diag[i] -= w * sup[i - 1];
      res[i] -= w * res[i - 1];
    }
    res[n - 2] /= diag[n - 2];
    for (int i = n - 3; i >= 0; --i) res[i] = (res[i] - sup[i] * res[i + 1]) / diag[i];
    bool ok = true;
    for (int i = 0; i < n - 1; ++i) {
      out.v[i] += res[i];
      if (!(out.v[i] > 0.0) || !std::isfinite(out.v[i])) ok = false;
    }
    out.v[n - 1] = closure_value(out.v);
    if (!(out.v[n - 1] > 0.0) || !std::isfinite(out.v[n - 1])) ok = false;
    if (!ok)
      fail("step-rejected", "rescaled Newton iterate left v > 0; retry with dtau <= " +
                                std::to_string(dtau / 4.0));
  }
  fail("step-rejected", "rescaled Newton did not converge; retry with dtau <= " +
                            std::to_string(dtau / 2.0));
}

std::vector<double> gauge_transform(const CollapseState& s) {
  std::vector<double> w(s.v.size());
  for (size_t i = 0; i < s.v.size(); ++i) {
    const double y = s.grid.node(static_cast<int>(i));
    w[i] = std::exp(-0.25 * s.a * y * y) * s.v[i];
  }
  return w;
}

std::vector<double> gauge_inverse(const CollapseState& s, std::span<const double> w) {
  std::vector<double> v(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    const double y = s.grid.node(static_cast<int>(i));
    v[i] = std::exp(0.25 * s.a * y * y) * w[i];
  }
  return v;
}

std::vector<double> w_equation_rhs(const CollapseState& s, double a_tau) {
  auto w = gauge_transform(s);
  auto vy = s.grid.deriv(s.v, 1, Parity::even);
  auto wyy = s.grid.deriv(w, 2, Parity::even);
  const double om2 = s.a * s.a + a_tau;
  std::vector<double> r(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    const double y = s.grid.node(static_cast<int>(i));
    r[i] = wyy[i] / (1.0 + vy[i] * vy[i]) - 0.25 * om2 * y * y * w[i] +
           1.5 * s.a * w[i] - std::exp(-0.5 * s.a * y * y) * (s.d - 1) / w[i];
  }
  return r;
}

std::vector<double> w_equation_correction(const CollapseState& s) {
  auto w = gauge_transform(s);
  auto vy = s.grid.deriv(s.v, 1, Parity::even);
  auto wy = s.grid.deriv(w, 1, Parity::even);
  std::vector<double> c(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    const double y = s.grid.node(static_cast<int>(i));
    const double frac = vy[i] * vy[i] / (1.0 + vy[i] * vy[i]);
    c[i] = -(s.a * y * wy[i] + (0.25 * s.a * s.a * y * y + 0.5 * s.a) * w[i]) * frac;
  }
  return c;
}

double rescaled_max_curvature(const CollapseState& s) {
  auto vy = s.grid.deriv(s.v, 1, Parity::even);
  auto vyy = s.grid.deriv(s.v, 2, Parity::even);
  double best = 0.0;
  for (size_t i = 0; i < s.v.size(); ++i) {
    const double q = 1.0 + vy[i] * vy[i];
    const double k1 = vyy[i] / std::pow(q, 1.5);
    best = std::max(best, std::sqrt(k1 * k1 + (s.d - 1) / (s.v[i] * s.v[i] * q)));
  }
  return best;
}

double max_curvature(const CollapseState& s) {
  return rescaled_max_curvature(s) / s.lambda;
}

}  // namespace neckpinch
