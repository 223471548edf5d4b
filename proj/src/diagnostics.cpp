#include "neckpinch/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "neckpinch/errors.hpp"
#include "neckpinch/modulation.hpp"

namespace neckpinch {

double beta_ref(double tau, double b0, int d) {
  if (b0 <= 0.0) fail("bad-argument", "beta needs b0 > 0");
  if (tau < 0.0) fail("bad-argument", "beta needs tau >= 0");
  return 1.0 / (1.0 / b0 + tau / (d - 1));
}

void EstimatingFunctions::absorb(const FitRecord& r, double b0, int d) {
  const double beta = beta_ref(r.tau, b0, d);
  for (int k = 0; k < 4; ++k) {
    const double p = 0.5 * (kNormPairs[k][0] + kNormPairs[k][1] + 1.0);
    M[k] = std::max(M[k], std::pow(beta, -p) * r.phi_norms[k]);
  }
  A = std::max(A, std::pow(beta, -2.0) * std::abs(r.a - 0.5 + r.b / (d - 1)));
  B = std::max(B, std::pow(beta, -1.75) * std::abs(r.b - beta));
}

EstimatingFunctions estimating_functions(std::span<const FitRecord> hist, double b0, int d) {
  EstimatingFunctions e;
  for (const auto& r : hist) e.absorb(r, b0, d);
  return e;
}

std::array<double, 2> modulation_residuals(double a, double b, double a_tau,
                                           double b_tau, int d) {
  if (a + 0.5 <= 0.0) fail("bad-argument", "residuals need a + 1/2 > 0");
  const double drift = a - 0.5 + b / (d - 1);
  const double g1 = a_tau / (a + 0.5) + drift;
  const double g2 = -b_tau - b * drift - b * b / (d - 1);
  return {g1, g2};
}

std::array<double, 2> parameter_rates(std::span<const FitRecord> hist) {
  const size_t n = hist.size();
  if (n < 2) return {0.0, 0.0};
  if (n == 2) {
    const double dt = hist[1].tau - hist[0].tau;
    return {(hist[1].a - hist[0].a) / dt, (hist[1].b - hist[0].b) / dt};
  }
  // 3-point backward difference on nonuniform tau samples
  const auto &r0 = hist[n - 3], &r1 = hist[n - 2], &r2 = hist[n - 1];
  const double h1 = r1.tau - r0.tau, h2 = r2.tau - r1.tau;
  const double c0 = h2 / (h1 * (h1 + h2));
  const double c1 = -(h1 + h2) / (h1 * h2);
  const double c2 = (h1 + 2.0 * h2) / (h2 * (h1 + h2));
  return {c0 * r0.a + c1 * r1.a + c2 * r2.a, c0 * r0.b + c1 * r1.b + c2 * r2.b};
}

namespace {

struct LineFit {
  double p, q;  // y ~ p + q x
  double rms, r2;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const size_t n = x.size();
  double sx = 0, sy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.q = sxy / sxx;
  f.p = my - f.q * mx;
  double ss = 0;
  for (size_t i = 0; i < n; ++i) {
    const double e = y[i] - (f.p + f.q * x[i]);
    ss += e * e;
  }
  f.rms = std::sqrt(ss / n);
  f.r2 = (syy > 0.0) ? 1.0 - ss / syy : 1.0;
  return f;
}

PinchEstimate pinch_from_window(std::span<const TrajectorySample> w) {
  std::vector<double> x(w.size()), y(w.size());
  const double t_ref = w.back().t;  // center for conditioning
  for (size_t i = 0; i < w.size(); ++i) {
    x[i] = w[i].t - t_ref;
    y[i] = w[i].u_min * w[i].u_min;
  }
  LineFit f = fit_line(x, y);
  PinchEstimate e;
  e.t_star = t_ref - f.p / f.q;  // root of p + q (t - t_ref)
  e.rms_residual = f.rms;
  e.r_squared = f.r2;
  return e;
}

}  // namespace

PinchEstimate estimate_pinch_time(std::span<const TrajectorySample> samples) {
  if (samples.size() < 10) fail("pinch-fit-unreliable", "need at least 10 samples");
  const double u_end = samples.back().u_min;
  // trailing window: final decade of u_min
  size_t start = samples.size();
  for (size_t i = samples.size(); i-- > 0;) {
    if (samples[i].u_min > 10.0 * u_end) break;
    start = i;
  }
  if (samples.size() - start < 10)
    start = samples.size() >= 10 ? samples.size() - 10 : 0;
  auto window = samples.subspan(start);
  for (size_t i = 1; i < window.size(); ++i)
    if (window[i].u_min > window[i - 1].u_min)
      fail("pinch-fit-unreliable", "non-monotone u_min tail");
  PinchEstimate e = pinch_from_window(window);
  if (e.r_squared < 0.99) fail("pinch-fit-unreliable", "R^2 < 0.99 in the tail fit");
  // window sensitivity: refit on the second half
  auto half = window.subspan(window.size() / 2);
  if (half.size() >= 5) {
    PinchEstimate e2 = pinch_from_window(half);
    e.window_sensitivity = std::abs(e2.t_star - e.t_star) / e.t_star;
  }
  e.reliable = true;
  return e;
}

AsymptoticsReport verify_asymptotics(std::span<const FitRecord> hist, double t_star,
                                     int d, const AsymptoticsOptions& opts) {
  if (hist.size() < 8) fail("window-too-short", "too few records");
  AsymptoticsReport rep;
  rep.t_star = t_star;
  const double res_scale = t_star - hist.back().t;  // final resolution scale
  if (res_scale <= 0.0) fail("window-too-short", "t* not beyond the history");
  const double lo = 10.0 * res_scale, hi = 0.1 * t_star;
  if (!(lo < hi) || hi / lo < 10.0)
    fail("window-too-short", "history spans fewer than 2 decades of t*-t");

  std::vector<double> ta, maxa;
  for (const auto& r : hist) {
    const double rem = t_star - r.t;
    if (rem < lo || rem > hi) continue;
    const double ln = std::log(rem);
    rep.lambda_ratio.t.push_back(r.t);
    rep.lambda_ratio.tau.push_back(r.tau);
    rep.lambda_ratio.value.push_back(r.lambda / std::sqrt(rem));
    rep.b_law.t.push_back(r.t);
    rep.b_law.tau.push_back(r.tau);
    rep.b_law.value.push_back(r.b * ln);
    rep.c_law.t.push_back(r.t);
    rep.c_law.tau.push_back(r.tau);
    rep.c_law.value.push_back((r.a + 0.5 - 1.0) * ln);
    ta.push_back(r.t);
    maxa.push_back(r.max_a_phys);
  }
  if (rep.lambda_ratio.value.size() < 8)
    fail("window-too-short", "trust window holds too few records");

  rep.terminal_lambda_ratio = rep.lambda_ratio.value.back();
  rep.terminal_b_law = rep.b_law.value.back();
  rep.terminal_c_law = rep.c_law.value.back();
  rep.lambda_ok = std::abs(rep.terminal_lambda_ratio - 1.0) <= opts.lambda_window;
  // trend: the deviation |ratio - 1| over the last quarter must not exceed the
  // first quarter (monotone-in-trend approach to 1)
  {
    const auto& v = rep.lambda_ratio.value;
    const size_t q = std::max<size_t>(1, v.size() / 4);
    double head = 0.0, tail = 0.0;
    for (size_t i = 0; i < q; ++i) head += std::abs(v[i] - 1.0);
    for (size_t i = v.size() - q; i < v.size(); ++i) tail += std::abs(v[i] - 1.0);
    // noise floor: t* - t cancellation error near the resolution scale
    const double noise = 10.0 * 2.2e-16 * t_star / lo;
    rep.lambda_trend_ok = tail <= head * (1.0 + 1e-6) + q * noise;
  }
  const double b_target = -(d - 1.0);
  rep.b_ok = rep.terminal_b_law >= b_target * (1.0 + opts.b_window) &&
             rep.terminal_b_law <= b_target * (1.0 - opts.b_window);
  rep.c_ok = rep.terminal_c_law >= opts.c_lo && rep.terminal_c_law <= opts.c_hi;

  TypeOneResult t1 = type_one_check(ta, maxa, t_star);
  rep.type_one_constant = t1.constant;
  rep.type_one_growth = t1.growth;
  rep.type_one_ok = t1.plateaued;
  return rep;
}

TypeOneResult type_one_check(std::span<const double> t, std::span<const double> max_a,
                             double t_star) {
  if (t.size() < 4) fail("window-too-short", "type-I check needs more samples");
  TypeOneResult r;
  std::vector<double> running(t.size());
  double sup = 0.0;
  for (size_t i = 0; i < t.size(); ++i) {
    sup = std::max(sup, max_a[i] * std::sqrt(std::max(t_star - t[i], 0.0)));
    running[i] = sup;
  }
  r.constant = sup;
  // growth of the running sup over the final decade of t*-t
  const double rem_end = t_star - t.back();
  double start_val = running.front();
  for (size_t i = 0; i < t.size(); ++i) {
    if (t_star - t[i] <= 10.0 * rem_end) {
      start_val = running[i];
      break;
    }
  }
  r.growth = (start_val > 0.0) ? sup / start_val - 1.0 : 0.0;
  r.plateaued = r.growth < 0.05;
  return r;
}

double remainder_bound_check(const Grid& g, std::span<const double> phi, double b) {
  if (!(b > 0.0)) fail("bad-argument", "remainder check needs b > 0");
  const double s = weighted_norm(g, phi, 3.0, 0) + weighted_norm(g, phi, 2.0, 1) +
                   weighted_norm(g, phi, 1.0, 2);
  return s / (b * b);
}

}  // namespace neckpinch
