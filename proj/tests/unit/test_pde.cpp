#include <doctest.h>

#include <cmath>
#include <vector>

#include "neckpinch/errors.hpp"
#include "neckpinch/pde.hpp"

using namespace neckpinch;

TEST_SUITE_BEGIN("pde");

namespace {

RadialProfile constant_profile(double u0, int d, double half_width = 5.0, int nodes = 101) {
  RadialProfile p;
  p.grid = Grid::half_line(half_width, nodes, 0.0);
  p.u.assign(nodes, u0);
  p.d = d;
  return p;
}

}  // namespace

TEST_CASE("rhs of a cylinder is -(d-1)/u at every node") {
  auto p = constant_profile(1.0, 2);
  for (double r : mcf_rhs(p)) CHECK(r == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("rhs of a sphere is -d/u") {
  RadialProfile p;
  p.grid = Grid::half_line(0.6, 301, 0.0);
  p.d = 2;
  p.u.resize(p.grid.size());
  for (int i = 0; i < p.grid.size(); ++i)
    p.u[i] = std::sqrt(1.0 - p.grid.node(i) * p.grid.node(i));
  auto r = mcf_rhs(p);
  for (int i = 0; i < p.grid.size() - 2; ++i)
    CHECK(r[i] == doctest::Approx(-2.0 / p.u[i]).epsilon(1e-5));
  CHECK(r[0] == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("rhs of a linear profile has no curvature term") {
  // u = 1 + x is odd-slope data; evenness only matters at the origin stencil,
  // so check interior nodes
  RadialProfile p;
  p.grid = Grid::half_line(4.0, 201, 0.0);
  p.d = 3;
  p.u.resize(p.grid.size());
  for (int i = 0; i < p.grid.size(); ++i) p.u[i] = 1.0 + p.grid.node(i);
  auto r = mcf_rhs(p);
  for (int i = 1; i < p.grid.size() - 1; ++i)
    CHECK(r[i] == doctest::Approx(-2.0 / (1.0 + p.grid.node(i))).epsilon(1e-10));
}

TEST_CASE("rhs rejects collapsed input") {
  auto p = constant_profile(1.0, 2);
  p.u[3] = -0.1;
  CHECK_THROWS_WITH_AS((void)mcf_rhs(p), doctest::Contains("collapsed-input"), Error);
}

TEST_CASE("finite-difference rhs matches the analytic rhs at second order") {
  auto rhs_err = [](int nodes) {
    RadialProfile p;
    p.grid = Grid::half_line(6.0, nodes, 2.0);
    p.d = 2;
    p.u.resize(p.grid.size());
    for (int i = 0; i < p.grid.size(); ++i)
      p.u[i] = std::sqrt(2.0 + p.grid.node(i) * p.grid.node(i));
    auto r = mcf_rhs(p);
    double err = 0.0;
    for (int i = 0; i < p.grid.size() - 2; ++i) {
      const double x = p.grid.node(i);
      const double u = p.u[i];
      const double exact = (2.0 / (u * u * u)) / ((2.0 + 2.0 * x * x) / (2.0 + x * x)) - 1.0 / u;
      err = std::max(err, std::abs(r[i] - exact));
    }
    return err;
  };
  const double e1 = rhs_err(201), e2 = rhs_err(401);
  CHECK(e1 / e2 > 3.5);
}

TEST_CASE("curvature norm closed forms") {
  SUBCASE("cylinder d=2: |A| = 1/r") {
    auto p = constant_profile(0.7, 2);
    for (double a : curvature_norm(p)) CHECK(a == doctest::Approx(1.0 / 0.7).epsilon(1e-12));
  }
  SUBCASE("cylinder d=5 radius 2: |A| = 1") {
    auto p = constant_profile(2.0, 5);
    CHECK(max_curvature(p) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("unit sphere at the pole: |A| = sqrt(2)") {
    RadialProfile p;
    p.grid = Grid::half_line(0.5, 401, 0.0);
    p.d = 2;
    p.u.resize(p.grid.size());
    for (int i = 0; i < p.grid.size(); ++i)
      p.u[i] = std::sqrt(1.0 - p.grid.node(i) * p.grid.node(i));
    CHECK(curvature_norm(p)[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  }
}

TEST_CASE("exact solution oracles") {
  CHECK(cylinder_exact(1.0, 2, 0.0) == 1.0);
  CHECK(cylinder_pinch_time(1.0, 2) == doctest::Approx(0.5));
  CHECK(cylinder_exact(2.0, 3, 0.5) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_WITH_AS((void)cylinder_exact(1.0, 2, 0.6), doctest::Contains("past-collapse"),
                       Error);
  CHECK(sphere_pinch_time(1.0, 2) == doctest::Approx(0.25));
}

TEST_CASE("one step: dt = 0 is the identity") {
  auto p = constant_profile(1.0, 2);
  BoundaryClosure bc = BoundaryClosure::for_profile(p, ClosureKind::cylinder_tangent);
  auto q = step_physical(p, 0.0, bc);
  CHECK(q.u == p.u);
  CHECK(q.t == p.t);
}

TEST_CASE("cylinder stepped to t = 0.25 hits sqrt(1/2)") {
  auto p = constant_profile(1.0, 2, 5.0, 51);
  BoundaryClosure bc = BoundaryClosure::for_profile(p, ClosureKind::cylinder_tangent);
  RunControls rc;
  rc.u_min_stop = 1e-6;
  rc.t_end = 0.25;
  rc.tol_step = 1e-9;
  rc.dt_init = 1e-7;
  auto traj = run_profile(p, bc, rc);
  CHECK(traj.stop == StopReason::t_end_reached);
  const auto& last = traj.snapshots.back();
  CHECK(last.t == doctest::Approx(0.25).epsilon(1e-12));
  for (double u : last.u) CHECK(u == doctest::Approx(std::sqrt(0.5)).epsilon(1e-7));
}

TEST_CASE("sphere center stepped to t = 0.1 hits sqrt(0.6)") {
  RadialProfile p;
  p.grid = Grid::half_line(0.3, 401, 0.0);
  p.d = 2;
  p.u.resize(p.grid.size());
  for (int i = 0; i < p.grid.size(); ++i)
    p.u[i] = std::sqrt(1.0 - p.grid.node(i) * p.grid.node(i));
  BoundaryClosure bc = BoundaryClosure::for_profile(p, ClosureKind::sphere_reference, 1.0);
  RunControls rc;
  rc.u_min_stop = 1e-6;
  rc.t_end = 0.1;
  rc.tol_step = 1e-9;
  rc.dt_init = 1e-8;
  auto traj = run_profile(p, bc, rc);
  CHECK(traj.snapshots.back().u[0] == doctest::Approx(std::sqrt(0.6)).epsilon(1e-6));
}

TEST_CASE("neck-class datum and its class report") {
  SimConfig cfg;
  cfg.d = 2;
  cfg.epsilon0 = 0.1;
  cfg.varsigma0 = 0.5;
  Grid g = Grid::half_line(10.0, 301, 3.0);
  SUBCASE("unperturbed value at the origin and zero norms") {
    DatumClassReport rep;
    auto p = make_initial_datum(cfg, g, &rep);
    CHECK(p.u[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    for (double n : rep.norms) CHECK(n == 0.0);
    CHECK(rep.passed());
  }
  SUBCASE("small even perturbation stays in class") {
    cfg.epsilon0 = 0.05;
    cfg.varsigma0 = 1.0;
    cfg.perturb_shape = PerturbShape::poly_gauss;
    cfg.perturb_amplitude = 1e-4;
    DatumClassReport rep;
    (void)make_initial_datum(cfg, g, &rep);
    CHECK(rep.norms_ok);
    CHECK(rep.lower_bound_ok);
    for (int k = 0; k < 4; ++k) CHECK(rep.norms[k] < rep.budgets[k]);
  }
  SUBCASE("oversized perturbation is flagged, not fatal") {
    cfg.perturb_shape = PerturbShape::gauss;
    cfg.perturb_amplitude = 0.5;
    DatumClassReport rep;
    (void)make_initial_datum(cfg, g, &rep);
    CHECK_FALSE(rep.passed());
  }
}

TEST_CASE("mirrored reconstruction is exactly even") {
  SimConfig cfg;
  Grid g = Grid::half_line(10.0, 101, 3.0);
  auto p = make_initial_datum(cfg, g);
  auto vals = p.mirrored_values();
  auto xs = p.mirrored_nodes();
  const size_t n = vals.size();
  for (size_t i = 0; i < n; ++i) {
    CHECK(vals[i] == vals[n - 1 - i]);
    CHECK(xs[i] == -xs[n - 1 - i]);
  }
}

TEST_CASE("run stops immediately when the datum is already below threshold") {
  SimConfig cfg;
  cfg.datum = DatumKind::cylinder;
  cfg.cylinder_u0 = 1.0;
  cfg.u_min_stop_rel = 1.5;  // threshold above the datum
  auto traj = run_physical(cfg);
  CHECK(traj.stop == StopReason::collapse_detected);
  CHECK(traj.samples.size() == 1);
}

TEST_CASE("cylinder run stops near the pinch-time prediction") {
  SimConfig cfg;
  cfg.datum = DatumKind::cylinder;
  cfg.cylinder_u0 = 1.0;
  cfg.d = 2;
  cfg.u_min_stop_rel = 0.05;
  cfg.nodes = 51;
  cfg.grid_stretch = 0.0;
  cfg.domain_half_width = 5.0;
  cfg.tol_step = 1e-8;
  cfg.dt_init = 1e-6;
  auto traj = run_physical(cfg);
  CHECK(traj.stop == StopReason::collapse_detected);
  // u = 0.05 at t = (1 - 0.0025)/2
  CHECK(traj.samples.back().t == doctest::Approx(0.49875).epsilon(1e-3));
}

TEST_CASE("doubling the sphere grid cuts the center error by at least 3x") {
  auto center_err = [](int nodes) {
    SimConfig cfg;
    cfg.datum = DatumKind::sphere;
    cfg.sphere_radius = 1.0;
    cfg.d = 2;
    cfg.u_min_stop_rel = 1e-9;
    cfg.t_end = 0.15;
    cfg.nodes = nodes;
    cfg.grid_stretch = 0.0;
    cfg.domain_half_width = 0.3;
    cfg.tol_step = 1e-10;
    cfg.dt_init = 1e-8;
    double err = 0.0;
    run_physical(cfg, [&](const RadialProfile& p, double) {
      const double exact = std::sqrt(1.0 - 4.0 * p.t);
      err = std::max(err, std::abs(p.u[0] - exact) / exact);
    });
    return err;
  };
  CHECK(center_err(201) / center_err(401) > 3.0);
}

TEST_CASE("wall-clock budget stops the run with a partial trajectory") {
  SimConfig cfg;
  cfg.datum = DatumKind::cylinder;
  cfg.cylinder_u0 = 1.0;
  cfg.nodes = 51;
  cfg.grid_stretch = 0.0;
  cfg.domain_half_width = 4.0;
  cfg.u_min_stop_rel = 0.05;
  cfg.tol_step = 1e-12;  // force many steps
  cfg.dt_init = 1e-10;
  cfg.wall_budget_s = 0.01;
  auto traj = run_physical(cfg);
  CHECK(traj.stop == StopReason::budget_exceeded);
  CHECK(traj.samples.size() > 1);  // partial trajectory is returned
}

TEST_CASE("far-boundary closure does not leak into the neck") {
  // same grid, two different closures at x = 10: any center difference is a
  // pure boundary effect
  SimConfig cfg;
  cfg.d = 2;
  cfg.epsilon0 = 0.1;
  cfg.varsigma0 = 0.5;
  Grid g = Grid::half_line(10.0, 401, 3.0);
  RadialProfile p0 = make_initial_datum(cfg, g);
  RunControls rc;
  rc.u_min_stop = 1e-6;
  rc.t_end = 0.3;
  rc.tol_step = 1e-9;
  rc.dt_init = 1e-7;
  auto center_with = [&](ClosureKind kind) {
    BoundaryClosure bc = BoundaryClosure::for_profile(p0, kind);
    return run_profile(p0, bc, rc).snapshots.back().u[0];
  };
  CHECK(std::abs(center_with(ClosureKind::cylinder_tangent) -
                 center_with(ClosureKind::fixed_value)) < 1e-8);
}

TEST_SUITE_END();
