#include "neckpinch/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "neckpinch/errors.hpp"

namespace neckpinch {

std::vector<double> fd_weights(double x0, std::span<const double> xs, int m) {
  // B. Fornberg, "Generation of finite difference formulas on arbitrarily
  // spaced grids", Math. Comp. 51 (1988).
  const int n = static_cast<int>(xs.size()) - 1;
  std::vector<double> c(static_cast<size_t>(n + 1) * static_cast<size_t>(m + 1), 0.0);
  auto C = [&](int i, int j) -> double& { return c[static_cast<size_t>(i) * (m + 1) + j]; };
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  C(0, 0) = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
        C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k)
        C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
      C(j, 0) = c4 * C(j, 0) / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = C(i, m);
  return w;
}

Grid Grid::half_line(double half_width, int nodes, double stretch) {
  if (nodes < 8) fail("bad-grid", "need at least 8 nodes");
  if (half_width <= 0.0) fail("bad-grid", "half_width must be positive");
  if (stretch < 0.0) fail("bad-grid", "stretch must be >= 0");
  Grid g;
  g.stretch_ = stretch;
  const int n = nodes;
  g.x_.resize(n);
  g.qw_.resize(n);
  const double dxi = 1.0 / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double xi = i * dxi;
    double s, sp;  // map and its derivative
    if (stretch > 0.0) {
      const double sh = std::sinh(stretch);
      s = half_width * std::sinh(stretch * xi) / sh;
      sp = half_width * stretch * std::cosh(stretch * xi) / sh;
    } else {
      s = half_width * xi;
      sp = half_width;
    }
    g.x_[i] = s;
    g.qw_[i] = sp * dxi;
  }
  g.x_[0] = 0.0;
  g.x_[n - 1] = half_width;
  g.qw_[0] *= 0.5;
  g.qw_[n - 1] *= 0.5;
  g.build_stencils();
  return g;
}

double Grid::max_spacing_ratio() const {
  double r = 1.0;
  for (int i = 1; i + 1 < size(); ++i) {
    const double a = x_[i] - x_[i - 1];
    const double b = x_[i + 1] - x_[i];
    r = std::max(r, std::max(a / b, b / a));
  }
  return r;
}

void Grid::build_stencils() {
  const int n = size();
  d1_.resize(n - 1);
  d2_.resize(n - 1);
  // origin row: nodes (-x1, 0, x1)
  {
    const double pts[3] = {-x_[1], 0.0, x_[1]};
    auto w1 = fd_weights(0.0, pts, 1);
    auto w2 = fd_weights(0.0, pts, 2);
    d1_[0] = {w1[0], w1[1], w1[2]};
    d2_[0] = {w2[0], w2[1], w2[2]};
  }
  for (int i = 1; i + 1 < n; ++i) {
    const double pts[3] = {x_[i - 1], x_[i], x_[i + 1]};
    auto w1 = fd_weights(x_[i], pts, 1);
    auto w2 = fd_weights(x_[i], pts, 2);
    d1_[i] = {w1[0], w1[1], w1[2]};
    d2_[i] = {w2[0], w2[1], w2[2]};
  }
  // one-sided rows at the outer node: 3 points for d1, 4 for d2 (both O(h^2))
  {
    const double p1[3] = {x_[n - 3], x_[n - 2], x_[n - 1]};
    d1_end_ = fd_weights(x_[n - 1], p1, 1);
    const double p2[4] = {x_[n - 4], x_[n - 3], x_[n - 2], x_[n - 1]};
    d2_end_ = fd_weights(x_[n - 1], p2, 2);
  }
}

std::vector<double> Grid::deriv(std::span<const double> f, int n, Parity parity) const {
  if (n != 1 && n != 2) fail("bad-grid", "deriv supports n = 1 or 2");
  const int N = size();
  const auto& rows = (n == 1) ? d1_ : d2_;
  std::vector<double> out(N);
  const double sgn = (parity == Parity::even) ? 1.0 : -1.0;
  out[0] = rows[0].cm * sgn * f[1] + rows[0].c0 * f[0] + rows[0].cp * f[1];
  for (int i = 1; i + 1 < N; ++i)
    out[i] = rows[i].cm * f[i - 1] + rows[i].c0 * f[i] + rows[i].cp * f[i + 1];
  if (n == 1) {
    out[N - 1] = d1_end_[0] * f[N - 3] + d1_end_[1] * f[N - 2] + d1_end_[2] * f[N - 1];
  } else {
    out[N - 1] = d2_end_[0] * f[N - 4] + d2_end_[1] * f[N - 3] + d2_end_[2] * f[N - 2] +
                 d2_end_[3] * f[N - 1];
  }
  return out;
}

std::vector<double> Grid::deriv_n(std::span<const double> f, int n, Parity parity) const {
  if (n == 0) return std::vector<double>(f.begin(), f.end());
  std::vector<double> cur(f.begin(), f.end());
  Parity p = parity;
  int left = n;
  while (left > 0) {
    const int take = (left >= 2) ? 2 : 1;
    cur = deriv(cur, take, p);
    // parity flips once per derivative order
    if (take == 1) p = (p == Parity::even) ? Parity::odd : Parity::even;
    left -= take;
  }
  return cur;
}

double Grid::integrate_even(std::span<const double> f) const {
  double s = 0.0;
  for (int i = 0; i < size(); ++i) s += qw_[i] * f[i];
  return 2.0 * s;
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const int n = static_cast<int>(x_.size());
  if (n < 2 || y_.size() != x_.size()) fail("bad-grid", "interpolant needs matched nodes");
  std::vector<double> d(n - 1);
  for (int i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
  m_.assign(n, 0.0);
  m_[0] = d[0];
  m_[n - 1] = d[n - 2];
  for (int i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      m_[i] = 0.0;
    } else {
      const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      const double w0 = 2.0 * h1 + h0, w1 = h1 + 2.0 * h0;
      m_[i] = (w0 + w1) / (w0 / d[i - 1] + w1 / d[i]);  // weighted harmonic mean
    }
  }
  // Fritsch-Carlson limiter on the end slopes
  auto limit_end = [&](int i, double del) {
    if (del == 0.0) {
      m_[i] = 0.0;
    } else {
      const double r = m_[i] / del;
      if (r < 0.0) m_[i] = 0.0;
      else if (r > 3.0) m_[i] = 3.0 * del;
    }
  };
  limit_end(0, d[0]);
  limit_end(n - 1, d[n - 2]);
}

double MonotoneCubic::operator()(double xq) const {
  const int n = static_cast<int>(x_.size());
  if (xq < x_.front() || xq > x_.back()) fail("domain-exhausted", "query outside interpolant domain");
  auto it = std::upper_bound(x_.begin(), x_.end(), xq);
  int i = static_cast<int>(it - x_.begin()) - 1;
  i = std::clamp(i, 0, n - 2);
  const double h = x_[i + 1] - x_[i];
  const double s = (xq - x_[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

}  // namespace neckpinch
