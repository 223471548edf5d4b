#include "neckpinch/pde.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "neckpinch/errors.hpp"

namespace neckpinch {

std::vector<double> mcf_rhs(const RadialProfile& p) {
  p.validate();
  auto ux = p.grid.deriv(p.u, 1, Parity::even);
  auto uxx = p.grid.deriv(p.u, 2, Parity::even);
  std::vector<double> r(p.u.size());
  for (size_t i = 0; i < p.u.size(); ++i) {
    r[i] = uxx[i] / (1.0 + ux[i] * ux[i]) - (p.d - 1) / p.u[i];
    if (!std::isfinite(r[i])) fail("numerical-overflow", "non-finite rhs value");
  }
  return r;
}

BoundaryClosure BoundaryClosure::for_profile(const RadialProfile& datum,
                                             ClosureKind kind, double sphere_r0) {
  BoundaryClosure bc;
  bc.kind = kind;
  bc.d = datum.d;
  bc.u0_boundary = datum.u.back();
  bc.x_boundary = datum.grid.half_width();
  bc.sphere_r0 = sphere_r0;
  return bc;
}

double BoundaryClosure::value(double t) const {
  switch (kind) {
    case ClosureKind::fixed_value:
      return u0_boundary;
    case ClosureKind::cylinder_tangent: {
      // the tangent cylinder of the datum at the outer node, advanced exactly
      const double s = u0_boundary * u0_boundary - 2.0 * (d - 1) * t;
      if (s <= 0.0) fail("past-collapse", "tangent-cylinder closure collapsed");
      return std::sqrt(s);
    }
    case ClosureKind::sphere_reference:
      return sphere_profile_exact(sphere_r0, d, x_boundary, t);
  }
  fail("bad-argument", "unknown closure kind");
}

namespace {

// Thomas solve of a tridiagonal system; diagonals (a = sub, b = diag, c = super).
bool solve_tridiag(std::vector<double>& a, std::vector<double>& b,
                   std::vector<double>& c, std::vector<double>& rhs) {
  const int n = static_cast<int>(b.size());
  for (int i = 1; i < n; ++i) {
    if (b[i - 1] == 0.0) return false;
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  if (b[n - 1] == 0.0) return false;
  rhs[n - 1] /= b[n - 1];
  for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - c[i] * rhs[i + 1]) / b[i];
  return true;
}

}  // namespace

RadialProfile step_physical(const RadialProfile& p, double dt,
                            const BoundaryClosure& bc, const StepOptions& opts) {
  p.validate();
  if (dt < 0.0) fail("bad-argument", "negative dt");
  if (dt == 0.0) return p;

  const int n = p.grid.size();
  const auto& d1 = p.grid.d1_rows();
  const auto& d2 = p.grid.d2_rows();
  const double t_new = p.t + dt;
  const double u_bnd = bc.value(t_new);

  RadialProfile out = p;
  out.t = t_new;
  out.u.back() = u_bnd;

  std::vector<double> sub(n - 1), diag(n - 1), sup(n - 1), res(n - 1);
  // Newton on the interior unknowns u_0 .. u_{n-2}; the outer node is pinned.
  for (int iter = 0; iter <= opts.newton_max_iter; ++iter) {
    double gmax = 0.0;
    for (int i = 0; i < n - 1; ++i) {
      const double um = (i == 0) ? out.u[1] : out.u[i - 1];
      const double up = out.u[i + 1];
      const double s1 = d1[i].cm * um + d1[i].c0 * out.u[i] + d1[i].cp * up;
      const double s2 = d2[i].cm * um + d2[i].c0 * out.u[i] + d2[i].cp * up;
      const double den = 1.0 + s1 * s1;
      const double f = s2 / den - (p.d - 1) / out.u[i];
      const double g = out.u[i] - p.u[i] - dt * f;
      res[i] = -g;
      gmax = std::max(gmax, std::abs(g));
      // dF/du_j over the stencil
      const double common = -2.0 * s2 * s1 / (den * den);
      double jm = d2[i].cm / den + common * d1[i].cm;
      double jc = d2[i].c0 / den + common * d1[i].c0 + (p.d - 1) / (out.u[i] * out.u[i]);
      double jp = d2[i].cp / den + common * d1[i].cp;
      if (i == 0) {  // ghost folds the mirror neighbor onto u_1
        jp += jm;
        jm = 0.0;
      }
      sub[i] = -dt * jm;
      diag[i] = 1.0 - dt * jc;
      sup[i] = (i == n - 2) ? 0.0 : -dt * jp;  // outer node pinned
    }
    const double scale = std::max(1.0, out.u[0]);
    if (gmax <= opts.newton_tol * scale) return out;
    auto a = sub;
    auto b = diag;
    auto c = sup;
    auto r = res;
    if (!solve_tridiag(a, b, c, r))
      fail("step-rejected", "singular Newton system; retry with dt <= " +
                                std::to_string(dt / 4.0));
    bool ok = true;
    for (int i = 0; i < n - 1; ++i) {
      out.u[i] += r[i];
      if (!(out.u[i] > 0.0) || !std::isfinite(out.u[i])) ok = false;
    }
    if (!ok)
      fail("step-rejected", "Newton iterate left u > 0; retry with dt <= " +
                                std::to_string(dt / 4.0));
  }
  fail("step-rejected", "Newton did not converge; retry with dt <= " +
                            std::to_string(dt / 2.0));
}

RadialProfile advance_adaptive(const RadialProfile& p, double& dt, double tol,
                               const BoundaryClosure& bc, const StepOptions& opts) {
  for (int tries = 0; tries < 60; ++tries) {
    RadialProfile full, half2;
    bool stepped = false;
    try {
      full = step_physical(p, dt, bc, opts);
      RadialProfile half = step_physical(p, 0.5 * dt, bc, opts);
      half2 = step_physical(half, 0.5 * dt, bc, opts);
      stepped = true;
    } catch (const Error& e) {
      if (e.code() != "step-rejected" && e.code() != "past-collapse") throw;
    }
    double err = stepped ? 0.0 : 1e300;
    if (stepped) {
      for (size_t i = 0; i + 1 < half2.u.size(); ++i)
        err = std::max(err, std::abs(full.u[i] - half2.u[i]) / half2.u[i]);
    }
    if (err <= tol) {
      // local Richardson extrapolation of the doubling pair; the collapse
      // amplifies early errors by (u/u_f)^2, which a first-order accept
      // cannot absorb at oracle tolerances
      bool positive = true;
      for (size_t i = 0; i + 1 < half2.u.size(); ++i) {
        half2.u[i] = 2.0 * half2.u[i] - full.u[i];
        if (!(half2.u[i] > 0.0)) positive = false;
      }
      if (!positive) half2 = step_physical(step_physical(p, 0.5 * dt, bc, opts), 0.5 * dt, bc, opts);
      const double grow = (err > 0.0) ? 0.9 * std::sqrt(tol / err) : 5.0;
      dt *= std::clamp(grow, 0.3, 5.0);
      return half2;
    }
    dt *= std::clamp(0.9 * std::sqrt(tol / err), 0.1, 0.5);
  }
  fail("step-rejected", "adaptive controller could not find an acceptable dt");
}

namespace {

Grid regrid_for(double half_width, int nodes, double base_stretch, double u_min) {
  if (base_stretch <= 0.0) return Grid::half_line(half_width, nodes, 0.0);
  // choose the stretch so the origin spacing tracks the shrinking neck
  const double target = std::max(u_min / 25.0, half_width * 1e-9);
  const double ratio = nodes * target / half_width;  // c/sinh(c)
  double lo = 1e-6, hi = 60.0;
  auto f = [&](double c) { return c / std::sinh(c) - ratio; };
  double c = base_stretch;
  if (f(lo) > 0.0 && f(hi) < 0.0) {
    for (int i = 0; i < 200; ++i) {
      c = 0.5 * (lo + hi);
      (f(c) > 0.0 ? lo : hi) = c;
    }
  }
  c = std::max(c, base_stretch);
  c = std::min(c, 0.1 * nodes);  // adjacent-ratio cap near 1.1
  return Grid::half_line(half_width, nodes, c);
}

RadialProfile resample(const RadialProfile& p, const Grid& g) {
  MonotoneCubic interp(p.grid.nodes(), p.u);
  RadialProfile out;
  out.grid = g;
  out.d = p.d;
  out.t = p.t;
  out.u.resize(g.size());
  for (int i = 0; i < g.size(); ++i) out.u[i] = interp(g.node(i));
  return out;
}

}  // namespace

Trajectory run_profile(RadialProfile p, const BoundaryClosure& bc,
                       const RunControls& rc, const StepCallback& on_step) {
  p.validate();
  Trajectory traj;
  StepOptions sopts{rc.newton_tol, rc.newton_max_iter};

  traj.snapshots.push_back(p);
  traj.samples.push_back({p.t, p.u_min(), max_curvature(p), 0.0});
  if (p.u_min() <= rc.u_min_stop) {
    traj.stop = StopReason::collapse_detected;
    return traj;
  }

  double dt = rc.dt_init;
  double regrid_mark = p.u_min();
  const auto wall_start = std::chrono::steady_clock::now();
  while (true) {
    // 10%-per-step cap on the relative change of u_min
    const double umin = p.u_min();
    const double drift = (p.d - 1) / umin;  // leading contraction speed
    dt = std::min(dt, 0.1 * umin / drift);
    if (rc.t_end > 0.0) dt = std::min(dt, rc.t_end - p.t);
    p = advance_adaptive(p, dt, rc.tol_step, bc, sopts);
    traj.samples.push_back({p.t, p.u_min(), max_curvature(p), dt});
    if (on_step) on_step(p, dt);

    if (p.u_min() <= rc.u_min_stop) {
      traj.stop = StopReason::collapse_detected;
      break;
    }
    if (rc.t_end > 0.0 && p.t >= rc.t_end * (1.0 - 1e-12)) {
      traj.stop = StopReason::t_end_reached;
      break;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    if (wall > rc.wall_budget_s) {
      traj.stop = StopReason::budget_exceeded;
      break;
    }
    if (p.u_min() < 0.5 * regrid_mark) {
      traj.snapshots.push_back(p);
      if (rc.regrid) {
        const int nodes = rc.regrid_nodes > 0 ? rc.regrid_nodes : p.grid.size();
        p = resample(p, regrid_for(p.grid.half_width(), nodes, rc.regrid_stretch,
                                   p.u_min()));
      }
      regrid_mark = p.u_min();
    }
  }
  traj.snapshots.push_back(p);
  return traj;
}

Trajectory run_physical(const SimConfig& cfg, const StepCallback& on_step) {
  cfg.validate();
  Grid g = Grid::half_line(cfg.domain_half_width, cfg.nodes,
                           cfg.datum == DatumKind::sphere ? 0.0 : cfg.grid_stretch);
  RadialProfile p = make_initial_datum(cfg, g);
  BoundaryClosure bc = BoundaryClosure::for_profile(p, cfg.closure(), cfg.sphere_radius);
  RunControls rc;
  rc.u_min_stop = cfg.u_min_stop_rel * p.u[0];
  rc.t_end = cfg.t_end;
  rc.tol_step = cfg.tol_step;
  rc.newton_tol = cfg.newton_tol;
  rc.newton_max_iter = cfg.newton_max_iter;
  rc.dt_init = cfg.dt_init;
  rc.wall_budget_s = cfg.wall_budget_s;
  rc.regrid = cfg.grid_stretch > 0.0 && cfg.datum == DatumKind::neck;
  rc.regrid_stretch = cfg.grid_stretch;
  return run_profile(std::move(p), bc, rc, on_step);
}

}  // namespace neckpinch
