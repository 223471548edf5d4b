#include "neckpinch/barriers.hpp"

#include <algorithm>
#include <cmath>

#include "neckpinch/errors.hpp"

namespace neckpinch {

double lower_barrier(double y, double b_param, int d) {
  if (!(b_param > 0.0)) fail("bad-argument", "barrier needs b > 0");
  if (b_param * y * y < 20.0 * (d - 1)) return 0.9 * std::sqrt(2.0 * (d - 1));
  return 4.0 * std::sqrt(static_cast<double>(d - 1));
}

BarrierVerdict barrier_check(const CollapseState& s, double beta) {
  s.validate();
  BarrierVerdict v;
  v.min_margin = 1e300;
  for (int i = 0; i < s.grid.size(); ++i) {
    const double m = s.v[i] - lower_barrier(s.grid.node(i), beta, s.d);
    if (m < v.min_margin) {
      v.min_margin = m;
      v.worst_node = i;
    }
  }
  v.barrier_ok = v.min_margin >= 0.0;
  return v;
}

std::vector<double> rho(const Grid& g, std::span<const double> values) {
  auto vy = g.deriv(values, 1, Parity::even);
  auto vyy = g.deriv(values, 2, Parity::even);
  std::vector<double> out(values.size());
  for (size_t i = 0; i < values.size(); ++i)
    out[i] = values[i] * vyy[i] / (1.0 + vy[i] * vy[i]);
  return out;
}

BarrierVerdict rho_bounds_check(const CollapseState& s, double beta,
                                bool datum_qualifies, double tol) {
  BarrierVerdict v;
  auto r = rho(s.grid, s.v);
  v.rho_central_max = 0.0;
  v.rho_outer_min = 1e300;
  bool outer_seen = false;
  for (int i = 0; i < s.grid.size(); ++i) {
    const double y = s.grid.node(i);
    if (std::abs(y) <= 0.1) v.rho_central_max = std::max(v.rho_central_max, std::abs(r[i]));
    if (beta * y * y >= 2.0 * (s.d - 1)) {
      v.rho_outer_min = std::min(v.rho_outer_min, r[i]);
      outer_seen = true;
    }
  }
  v.rho_central_ok = v.rho_central_max <= 4.0 * beta + tol;
  v.rho_outer_applicable = datum_qualifies && outer_seen;
  v.rho_outer_ok = !v.rho_outer_applicable || v.rho_outer_min >= -1.0 - tol;
  if (!outer_seen) v.rho_outer_min = 0.0;
  return v;
}

std::vector<double> mean_curvature_chi(const RadialProfile& p) {
  auto r = rho(p.grid, p.u);
  std::vector<double> chi(r.size());
  for (size_t i = 0; i < r.size(); ++i) chi[i] = r[i] - (p.d - 1);
  return chi;
}

double chi_max(const RadialProfile& p) {
  auto c = mean_curvature_chi(p);
  return *std::max_element(c.begin(), c.end());
}

MonotoneCheck mean_curvature_sign_check(std::span<const RadialProfile> snapshots,
                                        double tol) {
  MonotoneCheck out;
  if (snapshots.empty()) return out;
  for (const auto& s : snapshots) {
    const double c = chi_max(s);
    out.chi_max_series.push_back(c);
    if (c > tol) out.chi_nonpositive = false;
  }
  // pointwise monotone decay across snapshots sharing a grid
  for (size_t k = 1; k < snapshots.size(); ++k) {
    const auto& a = snapshots[k - 1];
    const auto& b = snapshots[k];
    if (a.grid.nodes() != b.grid.nodes()) continue;  // regrid boundary
    for (size_t i = 0; i < a.u.size(); ++i) {
      if (b.u[i] > a.u[i] + 1e-8) {
        out.u_nonincreasing = false;
        break;
      }
    }
  }
  return out;
}

}  // namespace neckpinch
