#pragma once

#include <span>
#include <vector>

namespace neckpinch {

// Finite-difference weights on arbitrary nodes (Fornberg's recursion).
// Returns c with c[j] = weight of f(xs[j]) in the m-th derivative at x0.
std::vector<double> fd_weights(double x0, std::span<const double> xs, int m);

// Parity of a grid function under reflection at x = 0.
enum class Parity { even = 1, odd = -1 };

/// Half-line grid on [0, half_width] with sinh grading toward the origin.
///
/// Nodes are x_i = W sinh(c xi_i)/sinh(c) on uniform xi in [0,1] (c = stretch;
/// c = 0 degenerates to a uniform grid).  Evenness of the represented function
/// is encoded by a reflection ghost at -x_1, so first derivatives vanish at
/// the origin for even data by construction.  Quadrature weights are the
/// trapezoid rule in the map variable xi; for smooth even integrands that
/// decay below round-off before the outer boundary this rule is spectrally
/// accurate (all Euler-Maclaurin boundary corrections vanish).
class Grid {
 public:
  static Grid half_line(double half_width, int nodes, double stretch);

  int size() const { return static_cast<int>(x_.size()); }
  double half_width() const { return x_.back(); }
  double stretch() const { return stretch_; }
  const std::vector<double>& nodes() const { return x_; }
  double node(int i) const { return x_[i]; }
  const std::vector<double>& quad_weights() const { return qw_; }

  // Largest ratio of adjacent spacings (invariant: bounded).
  double max_spacing_ratio() const;

  // Nodal n-th derivative (n = 1 or 2), second-order stencils; the reflection
  // ghost at the origin uses the given parity, the outer node a one-sided
  // stencil.  Higher derivatives are taken by composition (parity alternates).
  std::vector<double> deriv(std::span<const double> f, int n, Parity parity) const;
  std::vector<double> deriv_n(std::span<const double> f, int n, Parity parity) const;

  // \int_R f dx for the even extension of nodal f.
  double integrate_even(std::span<const double> f) const;

  // Interior stencil rows (i = 1 .. n-2) as weights on (f_{i-1}, f_i, f_{i+1});
  // row 0 is the symmetric origin stencil on (f(-x_1), f_0, f_1).
  struct Row {
    double cm, c0, cp;
  };
  const std::vector<Row>& d1_rows() const { return d1_; }
  const std::vector<Row>& d2_rows() const { return d2_; }

  bool operator==(const Grid&) const = default;

 private:
  std::vector<double> x_;
  std::vector<double> qw_;
  std::vector<Row> d1_, d2_;       // rows 0 .. n-2 (row 0 = origin w/ ghost)
  std::vector<double> d1_end_, d2_end_;  // one-sided weights on last 3 (d1) / 4 (d2) nodes
  double stretch_ = 0.0;

  void build_stencils();
};

/// Monotone piecewise-cubic interpolant (Fritsch-Carlson slopes).  Used for
/// regridding and frame changes, where overshoot near the neck must not
/// produce spurious non-positive radii.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  double operator()(double xq) const;
  double min_x() const { return x_.front(); }
  double max_x() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, m_;  // nodes, values, node slopes
};

}  // namespace neckpinch
