#include <doctest.h>

#include <cmath>
#include <vector>

#include "neckpinch/collapse.hpp"
#include "neckpinch/errors.hpp"
#include "neckpinch/modulation.hpp"
#include "neckpinch/runner.hpp"

using namespace neckpinch;

TEST_SUITE_BEGIN("collapse");

namespace {

CollapseState make_state(const std::vector<double>& v, const Grid& g, int d = 2,
                         double a = 0.5, double b = 0.0) {
  CollapseState s;
  s.grid = g;
  s.v = v;
  s.d = d;
  s.a = a;
  s.b = b;
  return s;
}

RadialProfile profile_sqrt2px2(int nodes = 401, double half_width = 10.0) {
  RadialProfile p;
  p.grid = Grid::half_line(half_width, nodes, 2.0);
  p.d = 2;
  p.u.resize(p.grid.size());
  for (int i = 0; i < p.grid.size(); ++i)
    p.u[i] = std::sqrt(2.0 + p.grid.node(i) * p.grid.node(i));
  return p;
}

}  // namespace

TEST_CASE("frame change at lambda = 1 is the identity up to interpolation") {
  auto p = profile_sqrt2px2();
  Grid ygrid = Grid::half_line(8.0, 301, 2.0);
  auto s = to_collapse_vars(p, 1.0, ygrid);
  double err = 0.0;
  for (int i = 0; i < ygrid.size(); ++i)
    err = std::max(err, std::abs(s.v[i] - std::sqrt(2.0 + ygrid.node(i) * ygrid.node(i))));
  CHECK(err < 1e-5);  // monotone-cubic resampling error at this resolution
}

TEST_CASE("cylinder rescales to the unit profile") {
  RadialProfile p;
  p.grid = Grid::half_line(5.0, 101, 0.0);
  p.d = 2;
  p.u.assign(101, 0.37);
  auto s = to_collapse_vars(p, 0.37, Grid::half_line(10.0, 101, 0.0));
  for (double v : s.v) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("u = sqrt(2+x^2) at lambda = 1/sqrt(2) gives v(0) = 2") {
  auto p = profile_sqrt2px2();
  auto s = to_collapse_vars(p, 1.0 / std::sqrt(2.0), Grid::half_line(10.0, 301, 2.0));
  CHECK(s.v[0] == doctest::Approx(2.0).epsilon(1e-9));
  // v(y) = sqrt(4 + y^2)
  CHECK(s.v[150] ==
        doctest::Approx(std::sqrt(4.0 + s.grid.node(150) * s.grid.node(150))).epsilon(1e-7));
}

TEST_CASE("frame round-trip stays within interpolation tolerance") {
  auto p = profile_sqrt2px2();
  const double lam = 0.6;
  auto s = to_collapse_vars(p, lam, Grid::half_line(12.0, 501, 2.0));
  auto back = from_collapse_vars(s, Grid::half_line(7.0, 301, 2.0));
  MonotoneCubic exact(p.grid.nodes(), p.u);
  double err = 0.0;
  for (int i = 0; i < back.grid.size(); ++i)
    err = std::max(err, std::abs(back.u[i] - exact(back.grid.node(i))));
  CHECK(err < 1e-5);
}

TEST_CASE("window larger than the physical domain is rejected") {
  auto p = profile_sqrt2px2(101, 5.0);
  CHECK_THROWS_WITH_AS((void)to_collapse_vars(p, 1.0, Grid::half_line(20.0, 101, 0.0)),
                       doctest::Contains("domain-exhausted"), Error);
}

TEST_CASE("rescaled rhs vanishes on static cylinders") {
  Grid g = Grid::half_line(10.0, 201, 2.0);
  SUBCASE("v_a for several a") {
    for (double a : {0.3, 0.5, 0.8}) {
      auto s = make_state(std::vector<double>(g.size(), static_cylinder_value(a, 2)), g, 2, a);
      for (double r : rescaled_rhs(s)) CHECK(std::abs(r) < 1e-11);
    }
  }
  SUBCASE("d=2, a=1/2, v = sqrt(2)") {
    auto s = make_state(std::vector<double>(g.size(), std::sqrt(2.0)), g, 2, 0.5);
    for (double r : rescaled_rhs(s)) CHECK(std::abs(r) < 1e-11);
  }
}

TEST_CASE("first-order terms cancel on the adiabatic family with c = 2a") {
  Grid g = Grid::half_line(10.0, 401, 2.0);
  const double a = 0.45, b = 0.07;
  const int d = 2;
  const double c = 2.0 * a;
  std::vector<double> v(g.size());
  for (int i = 0; i < g.size(); ++i) v[i] = adiabatic_family_value(b, c, d, g.node(i));
  // algebraic identity with the analytic derivative v_y = b y/(c v)
  for (int i = 0; i < g.size(); ++i) {
    const double y = g.node(i);
    const double vy = b * y / (c * v[i]);
    CHECK(std::abs(a * y * vy - a * v[i] + (d - 1) / v[i]) < 1e-13);
  }
  // so the full rhs reduces to the curvature term, up to stencil error
  auto s = make_state(v, g, d, a, b);
  auto r = rescaled_rhs(s);
  for (int i = 0; i < g.size(); ++i) {
    const double y = g.node(i);
    const double vy = b * y / (c * v[i]);
    const double vyy = b / (c * v[i]) - b * b * y * y / (c * c * v[i] * v[i] * v[i]);
    CHECK(r[i] == doctest::Approx(vyy / (1.0 + vy * vy)).epsilon(2e-4));
  }
}

TEST_CASE("dtau = 0 step is the identity") {
  Grid g = Grid::half_line(10.0, 101, 2.0);
  auto s = make_state(std::vector<double>(g.size(), std::sqrt(2.0)), g);
  s.lambda = 0.8;
  auto out = step_rescaled(s, 0.0);
  CHECK(out.v == s.v);
  CHECK(out.lambda == s.lambda);
}

TEST_CASE("frozen a = 1/2 cylinder reproduces the exact collapse law") {
  Grid g = Grid::half_line(10.0, 101, 0.0);
  const int d = 2;
  auto s = make_state(std::vector<double>(g.size(), std::sqrt(2.0 * (d - 1))), g, d, 0.5);
  s.lambda = 1.0;
  const double dtau = 0.05;
  for (int k = 0; k < 60; ++k) s = step_rescaled(s, dtau, {1e-12, 20});
  const double tau = s.tau;
  CHECK(tau == doctest::Approx(3.0));
  CHECK(s.lambda == doctest::Approx(std::exp(-tau / 2.0)).epsilon(1e-12));
  // reconstructed u distance to the cylinder law (u0^2 = 2(d-1) lambda0^2)
  const double u = s.lambda * s.v[0];
  CHECK(u == doctest::Approx(cylinder_exact(std::sqrt(2.0), d, s.t)).epsilon(1e-9));
  // tau accounting: tau = int lambda^{-2} dt is exact for the closed-form pair
  CHECK(s.t == doctest::Approx(1.0 - std::exp(-tau)).epsilon(1e-12));
}

TEST_CASE("one small step matches the explicit Euler prediction") {
  Grid g = Grid::half_line(15.0, 601, 2.5);
  const double a = 0.5, b = 0.1;
  const int d = 2;
  AlmostSolution V{a, b, d};
  auto s = make_state(V.values(g), g, d, a, b);
  auto r = rescaled_rhs(s);
  const double dtau = 1e-3;
  auto out = step_rescaled(s, dtau, {1e-13, 30});
  double err = 0.0;
  for (int i = 0; i + 1 < g.size(); ++i)
    err = std::max(err, std::abs(out.v[i] - (s.v[i] + dtau * r[i])));
  CHECK(err < 1e-6);  // implicit vs explicit differ at O(dtau^2)
}

TEST_CASE("gauge transform and its inverse") {
  Grid g = Grid::half_line(10.0, 201, 2.0);
  auto s = make_state(std::vector<double>(g.size(), std::sqrt(2.0)), g, 2, 0.5);
  auto w = gauge_transform(s);
  CHECK(w[0] == doctest::Approx(s.v[0]));  // weight 1 at the origin
  // at y = 2: w = sqrt(2) e^{-1/2}
  int i2 = 0;
  while (g.node(i2) < 2.0) ++i2;
  const double y = g.node(i2);
  CHECK(w[i2] == doctest::Approx(std::sqrt(2.0) * std::exp(-0.125 * y * y)).epsilon(1e-12));
  auto v2 = gauge_inverse(s, w);
  for (int i = 0; i < g.size(); ++i) CHECK(v2[i] == doctest::Approx(s.v[i]).epsilon(1e-13));
}

TEST_CASE("gauge-conjugated flow matches the transformed equation at O(h^2)") {
  const int d = 2;
  // residual of: e^{-a y^2/4} rescaled_rhs - (a_tau y^2/4) w  ==  w-equation rhs
  // (+ transport correction when v_y != 0); exact in the continuum, so the
  // discrete residual must shrink at second order
  auto residual = [&](int nodes, bool cylinder, double a_tau, bool with_corr) {
    Grid g = Grid::half_line(16.0, nodes, 2.5);
    const double a = cylinder ? 0.45 : 0.5;
    CollapseState s;
    if (cylinder) {
      s = make_state(std::vector<double>(g.size(), static_cylinder_value(a, d)), g, d, a);
    } else {
      AlmostSolution V{a, 0.1, d};
      s = make_state(V.values(g), g, d, a, 0.1);
    }
    auto lhs = rescaled_rhs(s);
    auto w = gauge_transform(s);
    auto rhs = w_equation_rhs(s, a_tau);
    auto corr = w_equation_correction(s);
    double err = 0.0;
    for (int i = 0; i < g.size() - 2; ++i) {
      const double y = g.node(i);
      const double conj = std::exp(-0.25 * a * y * y) * lhs[i] - 0.25 * a_tau * y * y * w[i];
      double target = rhs[i];
      if (with_corr) target += corr[i];
      err = std::max(err, std::abs(conj - target));
    }
    return err;
  };
  SUBCASE("cylinder states, with and without synthetic a_tau") {
    for (double a_tau : {0.0, 0.03}) {
      const double e1 = residual(401, true, a_tau, false);
      const double e2 = residual(801, true, a_tau, false);
      CHECK(e1 / e2 > 3.0);
      CHECK(e2 < 1e-5);
    }
  }
  SUBCASE("family states need the transport correction term") {
    const double e1 = residual(401, false, 0.01, true);
    const double e2 = residual(801, false, 0.01, true);
    CHECK(e1 / e2 > 3.0);
    CHECK(e2 < 1e-4);
    CHECK(residual(801, false, 0.01, false) > 1e-3);  // correction genuinely present
  }
}

TEST_CASE("static solutions are preserved under frozen-a stepping") {
  Grid g = Grid::half_line(14.0, 401, 2.0);
  for (double a : {0.5, 0.4}) {
    const int d = 2;
    const double va = static_cylinder_value(a, d);
    auto s = make_state(std::vector<double>(g.size(), va), g, d, a, 0.0);
    double worst = 0.0;
    while (s.tau < 10.0) {
      s = step_rescaled(s, 0.05, {1e-12, 20});
      for (double v : s.v) worst = std::max(worst, std::abs(v - va));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("physical and rescaled frames agree on the reference datum") {
  // rescaled run with live fits to tau = 5, then the same window integrated in
  // physical variables and pulled back with the fitted lambda history
  SimConfig cfg;
  cfg.d = 2;
  cfg.epsilon0 = 0.1;
  cfg.varsigma0 = 0.5;
  cfg.nodes = 601;
  cfg.grid_stretch = 3.0;
  cfg.y_half_width = 20.0;
  cfg.tau_max = 5.0;
  cfg.u_min_stop_rel = 1e-6;
  cfg.tol_step = 1e-9;
  RescaledRun run = run_rescaled(cfg);
  CHECK(run.final_state.tau >= 5.0);

  SimConfig pcfg = cfg;
  pcfg.domain_half_width = 10.0;
  pcfg.t_end = run.final_state.t;
  pcfg.nodes = 801;
  pcfg.grid_stretch = 4.0;
  pcfg.dt_init = 1e-7;
  Trajectory traj = run_physical(pcfg);
  const RadialProfile& uT = traj.snapshots.back();
  CHECK(uT.t == doctest::Approx(run.final_state.t).epsilon(1e-10));

  auto pulled = to_collapse_vars(uT, run.final_state.lambda,
                                 Grid::half_line(10.0, 301, 2.0));
  MonotoneCubic vres(run.final_state.grid.nodes(), run.final_state.v);
  double err = 0.0;
  for (int i = 0; i < pulled.grid.size(); ++i) {
    const double y = pulled.grid.node(i);
    err = std::max(err, std::abs(pulled.v[i] - vres(y)) / vres(y));
  }
  CHECK(err < 1e-5);  // both integrations at tol 1e-9 plus interpolation
}

TEST_SUITE_END();
