#include <doctest.h>

#include <cmath>
#include <vector>

#include "neckpinch/diagnostics.hpp"
#include "neckpinch/errors.hpp"
#include "neckpinch/modulation.hpp"

using namespace neckpinch;

TEST_SUITE_BEGIN("diagnostics");

TEST_CASE("reference decay rate beta") {
  CHECK(beta_ref(0.0, 0.1, 2) == doctest::Approx(0.1));
  CHECK(beta_ref(10.0, 0.1, 2) == doctest::Approx(0.05));
  // Riccati form: d beta/d tau = -beta^2/(d-1)
  const double b0 = 0.07;
  const int d = 3;
  const double h = 1e-5;
  for (double tau : {0.5, 3.0, 20.0}) {
    const double fd = (beta_ref(tau + h, b0, d) - beta_ref(tau - h, b0, d)) / (2 * h);
    const double rhs = -std::pow(beta_ref(tau, b0, d), 2) / (d - 1);
    CHECK(fd == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("estimating functions on synthetic histories") {
  const int d = 2;
  const double b0 = 0.1;
  SUBCASE("exact tracking gives zeros") {
    std::vector<FitRecord> hist;
    for (double tau = 0.0; tau <= 5.0; tau += 0.5) {
      FitRecord r;
      r.tau = tau;
      const double beta = beta_ref(tau, b0, d);
      r.b = beta;
      r.a = 0.5 - beta / (d - 1);
      r.phi_norms = {0, 0, 0, 0};
      hist.push_back(r);
    }
    auto e = estimating_functions(hist, b0, d);
    for (double m : e.M) CHECK(m == 0.0);
    CHECK(e.A < 1e-12);  // round-off of 0.5 - beta + beta
    CHECK(e.B == 0.0);
  }
  SUBCASE("a single record defines the normalization") {
    FitRecord r;
    r.tau = 2.0;
    const double beta = beta_ref(2.0, b0, d);
    r.b = beta;
    r.a = 0.5 - beta / (d - 1);
    r.phi_norms = {beta * beta, 0, 0, 0};  // ||phi||_{3,0} = beta^2
    std::vector<FitRecord> hist{r};
    auto e = estimating_functions(hist, b0, d);
    CHECK(e.M[0] == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("b = beta (1 + beta^{3/4}) saturates B at exactly 1") {
    std::vector<FitRecord> hist;
    for (double tau = 0.0; tau <= 5.0; tau += 0.25) {
      FitRecord r;
      r.tau = tau;
      const double beta = beta_ref(tau, b0, d);
      r.b = beta * (1.0 + std::pow(beta, 0.75));
      r.a = 0.5 - r.b / (d - 1);
      hist.push_back(r);
    }
    auto e = estimating_functions(hist, b0, d);
    CHECK(e.B == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("modulation residual formulas") {
  CHECK(modulation_residuals(0.5, 0.0, 0.0, 0.0, 2)[0] == 0.0);
  CHECK(modulation_residuals(0.5, 0.0, 0.0, 0.0, 2)[1] == 0.0);
  SUBCASE("beta dynamics annihilates Gamma_2 and leaves the predicted Gamma_1") {
    const int d = 2;
    const double beta = 0.08;
    const double a = 0.5 - beta / (d - 1);
    const double a_tau = beta * beta / ((d - 1.0) * (d - 1.0));
    const double b_tau = -beta * beta / (d - 1);
    auto g = modulation_residuals(a, beta, a_tau, b_tau, d);
    CHECK(g[1] == doctest::Approx(0.0).epsilon(1e-15));
    const double expected = a_tau / (1.0 - beta / (d - 1));
    CHECK(g[0] == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("plain arithmetic case") {
    auto g = modulation_residuals(0.5, 0.1, 0.0, -0.005, 2);
    CHECK(g[1] == doctest::Approx(-0.015).epsilon(1e-14));
  }
}

TEST_CASE("backward-difference parameter rates") {
  std::vector<FitRecord> hist(3);
  // a(tau) = tau^2 sampled nonuniformly: the 3-point rule is exact
  const double taus[3] = {0.0, 0.4, 1.0};
  for (int i = 0; i < 3; ++i) {
    hist[i].tau = taus[i];
    hist[i].a = taus[i] * taus[i];
    hist[i].b = 3.0 * taus[i];
  }
  auto r = parameter_rates(hist);
  CHECK(r[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("pinch-time estimation") {
  SUBCASE("exact linear law u^2 = 1 - t") {
    std::vector<TrajectorySample> s;
    for (double t = 0.0; t <= 0.9; t += 0.01)
      s.push_back({t, std::sqrt(1.0 - t), 0.0, 0.01});
    auto pe = estimate_pinch_time(s);
    CHECK(pe.reliable);
    CHECK(std::abs(pe.t_star - 1.0) < 1e-10);
  }
  SUBCASE("cylinder samples") {
    std::vector<TrajectorySample> s;
    for (double t = 0.0; t <= 0.4987; t += 0.0005)
      s.push_back({t, cylinder_exact(1.0, 2, t), 0.0, 0.0005});
    auto pe = estimate_pinch_time(s);
    CHECK(std::abs(pe.t_star - 0.5) < 1e-6);
    CHECK(pe.window_sensitivity < 1e-6);
  }
  SUBCASE("non-monotone tail is rejected") {
    std::vector<TrajectorySample> s;
    for (double t = 0.0; t <= 0.9; t += 0.01)
      s.push_back({t, std::sqrt(1.0 - t), 0.0, 0.01});
    s[s.size() - 2].u_min = s.back().u_min * 0.5;  // kick
    CHECK_THROWS_WITH_AS((void)estimate_pinch_time(s),
                         doctest::Contains("pinch-fit-unreliable"), Error);
  }
  SUBCASE("too few samples") {
    std::vector<TrajectorySample> s(5, {0.1, 1.0, 0.0, 0.0});
    CHECK_THROWS_AS((void)estimate_pinch_time(s), Error);
  }
}

namespace {

std::vector<FitRecord> manufactured_history(double t_star, int d) {
  // history built exactly from the leading collapse laws
  std::vector<FitRecord> hist;
  for (double rem = 0.5; rem > 1e-7; rem *= 0.9) {
    FitRecord r;
    r.t = t_star - rem;
    r.tau = -std::log(rem);
    r.lambda = std::sqrt(rem);
    r.b = -(d - 1.0) / std::log(rem);
    r.a = 1.0 + 1.0 / std::log(rem) - 0.5;  // c = a + 1/2 = 1 + 1/ln
    r.max_a_phys = 1.0 / std::sqrt(2.0 * rem);  // type-I witness
    hist.push_back(r);
  }
  return hist;
}

}  // namespace

TEST_CASE("asymptotics verification on a manufactured exact history") {
  const double t_star = 1.25;
  const int d = 2;
  auto hist = manufactured_history(t_star, d);
  auto rep = verify_asymptotics(hist, t_star, d);
  CHECK(rep.lambda_ok);
  CHECK(rep.lambda_trend_ok);
  CHECK(rep.b_ok);
  CHECK(rep.c_ok);
  CHECK(std::abs(rep.terminal_lambda_ratio - 1.0) < 1e-8);
  CHECK(std::abs(rep.terminal_b_law + (d - 1.0)) < 1e-8);
  CHECK(std::abs(rep.terminal_c_law - 1.0) < 1e-8);
  CHECK(rep.type_one_ok);
  CHECK(rep.type_one_constant == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("window-too-short is reported") {
  auto hist = manufactured_history(1.25, 2);
  hist.resize(12);  // barely more than one decade
  CHECK_THROWS_WITH_AS((void)verify_asymptotics(hist, 1.25, 2),
                       doctest::Contains("window-too-short"), Error);
}

TEST_CASE("exact-cylinder lambda law is identically 1") {
  // lambda := u(0,t)/sqrt(2(d-1)) turns the cylinder into the exact law
  const int d = 2;
  const double ts = 0.5;
  std::vector<FitRecord> hist;
  for (double t = 0.0; t < ts - 2e-6; t += (ts - t > 0.01 ? 0.005 : 2e-7)) {
    FitRecord r;
    r.t = t;
    r.tau = -std::log(ts - t);
    r.lambda = cylinder_exact(1.0, d, t) / std::sqrt(2.0 * (d - 1));
    r.b = 1e-12;
    r.a = 0.5;
    r.max_a_phys = 1.0 / cylinder_exact(1.0, d, t);
    hist.push_back(r);
  }
  auto rep = verify_asymptotics(hist, ts, d);
  for (double v : rep.lambda_ratio.value) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.type_one_constant == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("type-I constants of the exact solutions") {
  SUBCASE("cylinder: |A| sqrt(t*-t) = 1/sqrt(2)") {
    std::vector<double> t, a;
    for (double tt = 0.0; tt < 0.499; tt += 0.001) {
      t.push_back(tt);
      a.push_back(1.0 / cylinder_exact(1.0, 2, tt));
    }
    auto r = type_one_check(t, a, 0.5);
    CHECK(r.constant == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
    CHECK(r.plateaued);
  }
  SUBCASE("sphere: |A| sqrt(t*-t) = 1/sqrt(2)") {
    std::vector<double> t, a;
    for (double tt = 0.0; tt < 0.2495; tt += 0.0005) {
      t.push_back(tt);
      a.push_back(std::sqrt(2.0) / sphere_radius_exact(1.0, 2, tt));
    }
    auto r = type_one_check(t, a, 0.25);
    CHECK(r.constant == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
    CHECK(r.plateaued);
  }
}

TEST_CASE("remainder witness: sum of three weighted norms over b^2") {
  Grid g = Grid::half_line(20.0, 801, 3.0);
  SUBCASE("zero fluctuation") {
    std::vector<double> phi(g.size(), 0.0);
    CHECK(remainder_bound_check(g, phi, 0.05) == 0.0);
  }
  SUBCASE("phi = b^2 e^{-y^2} against a dense-sampling oracle") {
    // fine uniform grid so the stencil error sits below the 1e-6 agreement
    Grid gf = Grid::half_line(20.0, 40001, 0.0);
    const double b = 0.07;
    std::vector<double> phi(gf.size());
    for (int i = 0; i < gf.size(); ++i)
      phi[i] = b * b * std::exp(-gf.node(i) * gf.node(i));
    const double got = remainder_bound_check(gf, phi, b);
    // independent evaluation of the three sup norms by dense sampling of the
    // closed-form derivatives of e^{-y^2}
    double n30 = 0, n21 = 0, n12 = 0;
    for (int k = 0; k <= 200000; ++k) {
      const double y = 20.0 * k / 200000.0;
      const double e = std::exp(-y * y);
      n30 = std::max(n30, e / std::pow(1 + y * y, 1.5));
      n21 = std::max(n21, std::abs(-2.0 * y * e) / (1 + y * y));
      n12 = std::max(n12, std::abs((4.0 * y * y - 2.0) * e) / std::sqrt(1 + y * y));
    }
    CHECK(got == doctest::Approx(n30 + n21 + n12).epsilon(1e-6));
  }
}

TEST_SUITE_END();
