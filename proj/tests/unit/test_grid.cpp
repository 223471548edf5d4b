#include <doctest.h>

#include <cmath>
#include <vector>

#include "neckpinch/errors.hpp"
#include "neckpinch/grid.hpp"

using namespace neckpinch;

TEST_SUITE_BEGIN("grid");

TEST_CASE("fornberg weights reproduce the classic central stencils") {
  const double pts[3] = {-1.0, 0.0, 1.0};
  auto w1 = fd_weights(0.0, pts, 1);
  CHECK(w1[0] == doctest::Approx(-0.5));
  CHECK(w1[1] == doctest::Approx(0.0));
  CHECK(w1[2] == doctest::Approx(0.5));
  auto w2 = fd_weights(0.0, pts, 2);
  CHECK(w2[0] == doctest::Approx(1.0));
  CHECK(w2[1] == doctest::Approx(-2.0));
  CHECK(w2[2] == doctest::Approx(1.0));
}

TEST_CASE("graded grid respects the spacing-ratio cap") {
  Grid g = Grid::half_line(20.0, 801, 3.0);
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(800) == doctest::Approx(20.0));
  CHECK(g.max_spacing_ratio() < 1.1);
  Grid u = Grid::half_line(5.0, 101, 0.0);
  CHECK(u.max_spacing_ratio() == doctest::Approx(1.0));
}

static double deriv_error(int nodes, int order) {
  Grid g = Grid::half_line(6.0, nodes, 2.0);
  std::vector<double> f(g.size());
  for (int i = 0; i < g.size(); ++i) f[i] = std::cos(g.node(i));  // even
  auto df = g.deriv(f, order, Parity::even);
  double err = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double exact = (order == 1) ? -std::sin(g.node(i)) : -std::cos(g.node(i));
    err = std::max(err, std::abs(df[i] - exact));
  }
  return err;
}

TEST_CASE("stencils converge at second order on the graded grid") {
  for (int order : {1, 2}) {
    const double e1 = deriv_error(201, order);
    const double e2 = deriv_error(401, order);
    CHECK(e1 / e2 > 3.0);
  }
}

TEST_CASE("parity handling at the origin") {
  Grid g = Grid::half_line(4.0, 201, 1.5);
  std::vector<double> odd(g.size());
  for (int i = 0; i < g.size(); ++i) odd[i] = std::sin(g.node(i));
  auto d1 = g.deriv(odd, 1, Parity::odd);
  CHECK(d1[0] == doctest::Approx(1.0).epsilon(1e-4));
  std::vector<double> even(g.size());
  for (int i = 0; i < g.size(); ++i) even[i] = std::cos(g.node(i));
  CHECK(g.deriv(even, 1, Parity::even)[0] == 0.0);  // exact by symmetry
}

TEST_CASE("even quadrature integrates gaussians to near machine precision") {
  Grid g = Grid::half_line(20.0, 801, 3.0);
  std::vector<double> f(g.size());
  for (int i = 0; i < g.size(); ++i) f[i] = std::exp(-0.25 * g.node(i) * g.node(i));
  const double exact = std::sqrt(2.0 * M_PI / 0.5);
  CHECK(std::abs(g.integrate_even(f) - exact) / exact < 1e-13);
}

TEST_CASE("monotone cubic preserves monotonicity and converges") {
  auto sup_err = [](int nodes) {
    Grid g = Grid::half_line(5.0, nodes, 2.0);
    std::vector<double> y(g.size());
    for (int i = 0; i < g.size(); ++i) y[i] = std::sqrt(2.0 + g.node(i) * g.node(i));
    MonotoneCubic itp(g.nodes(), y);
    double err = 0.0;
    for (int k = 1; k <= 400; ++k) {
      const double x = 5.0 * k / 400.0;
      err = std::max(err, std::abs(itp(x) - std::sqrt(2.0 + x * x)));
    }
    return err;
  };
  CHECK(sup_err(41) < 5e-4);
  CHECK(sup_err(41) / sup_err(81) > 3.5);  // at least second order

  Grid g = Grid::half_line(5.0, 41, 2.0);
  std::vector<double> y(g.size());
  for (int i = 0; i < g.size(); ++i) y[i] = std::sqrt(2.0 + g.node(i) * g.node(i));
  MonotoneCubic itp(g.nodes(), y);
  double prev = itp(0.0);
  for (int k = 1; k <= 400; ++k) {
    const double val = itp(5.0 * k / 400.0);
    CHECK(val >= prev - 1e-14);  // data increasing => interpolant increasing
    prev = val;
  }
  CHECK_THROWS_AS((void)itp(5.5), Error);
}

TEST_CASE("composed higher derivatives carry the parity flips") {
  Grid g = Grid::half_line(6.0, 801, 2.0);
  std::vector<double> f(g.size());
  for (int i = 0; i < g.size(); ++i) {
    const double x = g.node(i);
    f[i] = std::exp(-x * x);
  }
  auto d3 = g.deriv_n(f, 3, Parity::even);
  // d^3/dx^3 e^{-x^2} = (12x - 8x^3) e^{-x^2}
  double err = 0.0;
  for (int i = 0; i < g.size() - 4; ++i) {
    const double x = g.node(i);
    err = std::max(err, std::abs(d3[i] - (12.0 * x - 8.0 * x * x * x) * std::exp(-x * x)));
  }
  CHECK(err < 5e-3);
}

TEST_SUITE_END();
