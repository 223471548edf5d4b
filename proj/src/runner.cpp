#include "neckpinch/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "neckpinch/errors.hpp"

namespace neckpinch {

namespace {

FitRecord make_record(const CollapseState& s, const ModulationFit& fit) {
  FitRecord r;
  r.tau = s.tau;
  r.t = s.t;
  r.lambda = s.lambda;
  r.a = fit.a;
  r.b = fit.b;
  for (int k = 0; k < 4; ++k)
    r.phi_norms[k] = weighted_norm(s.grid, fit.phi, kNormPairs[k][0],
                                   static_cast<int>(kNormPairs[k][1]));
  r.max_a_phys = max_curvature(s);
  r.v_min = *std::min_element(s.v.begin(), s.v.end());
  r.admissible = (fit.a >= 0.25 && fit.a <= 1.0);
  return r;
}

CollapseState initial_state(const SimConfig& cfg) {
  Grid ygrid = Grid::half_line(cfg.y_half_width, cfg.nodes, std::min(cfg.grid_stretch, 3.0));
  CollapseState s;
  s.grid = ygrid;
  s.d = cfg.d;
  s.lambda = cfg.lambda0;
  s.t = 0.0;
  s.tau = 0.0;
  s.v.resize(ygrid.size());
  // datum evaluated directly in the rescaled frame: v0(y) = u0(lambda0 y)/lambda0
  SimConfig datum_cfg = cfg;
  for (int i = 0; i < ygrid.size(); ++i) {
    const double x = cfg.lambda0 * ygrid.node(i);
    double u0 = neck_reference(datum_cfg, x);
    if (cfg.perturb_shape == PerturbShape::gauss)
      u0 += cfg.perturb_amplitude * std::exp(-x * x);
    else if (cfg.perturb_shape == PerturbShape::poly_gauss)
      u0 += cfg.perturb_amplitude * x * x * std::exp(-x * x);
    s.v[i] = u0 / cfg.lambda0;
  }
  s.validate();
  return s;
}

}  // namespace

RescaledRun run_rescaled(const SimConfig& cfg, const Checkpoint* resume,
                         const RescaledOptions& opts) {
  cfg.validate();
  if (cfg.datum != DatumKind::neck)
    fail("bad-config", "rescaled mode runs on the neck-class datum");

  RescaledRun run;
  CollapseState s;
  double dtau = cfg.dtau_init;
  EstimatingFunctions est;
  FitOptions fopts;
  fopts.tol = cfg.fit_tol;
  fopts.max_iter = cfg.fit_max_iter;

  if (resume) {
    s = resume->state;
    dtau = resume->dtau;
    run.b0 = resume->b0;
    run.datum_rho_qualifies = resume->datum_rho_qualifies;
    run.history = resume->history;
    run.samples = resume->samples;
    for (const auto& r : run.history) est.absorb(r, run.b0, s.d);
  } else {
    s = initial_state(cfg);
    {
      Grid xgrid = Grid::half_line(cfg.domain_half_width, cfg.nodes, cfg.grid_stretch);
      make_initial_datum(cfg, xgrid, &run.datum_report);
    }
    auto vyy = s.grid.deriv(s.v, 2, Parity::even);
    run.datum_rho_qualifies = true;
    for (int i = 0; i < s.grid.size(); ++i) {
      if (s.v[i] * vyy[i] < -1.0) {
        run.datum_rho_qualifies = false;
        break;
      }
    }
  }

  const double u0_center = cfg.lambda0 * s.v[0];
  const double u_stop = (resume == nullptr)
                            ? cfg.u_min_stop_rel * u0_center
                            : cfg.u_min_stop_rel *
                                  (run.samples.empty() ? u0_center
                                                       : run.samples.front().u_min);
  StepOptions sopts{cfg.newton_tol, cfg.newton_max_iter};
  const auto wall_start = std::chrono::steady_clock::now();
  long accepted = 0;

  // warm start from the previous step's parameters
  double a_guess = s.a, b_guess = s.b;
  if (!resume) {
    auto cold = cold_start_guess(s.grid, s.v);
    a_guess = cold[0];
    b_guess = cold[1];
  }

  // the checkpoint state was fitted and recorded before it was saved
  bool skip_record = (resume != nullptr) && !run.history.empty();
  while (true) {
    if (!skip_record) {
      ModulationFit fit = fit_parameters(s.grid, s.v, s.d, a_guess, b_guess, fopts);
      if (fit.status == FitStatus::fit_failed)
        fail("fit-failed", "per-step modulation fit failed at tau = " + std::to_string(s.tau));
      s.a = fit.a;
      s.b = fit.b;
      a_guess = fit.a;
      b_guess = fit.b;

      if (run.history.empty()) run.b0 = fit.b;
      FitRecord rec = make_record(s, fit);
      run.history.push_back(rec);
      est.absorb(rec, run.b0, s.d);
      const double beta = beta_ref(s.tau, run.b0, s.d);

      DiagRow row;
      row.tau = s.tau;
      row.t = s.t;
      row.lambda = s.lambda;
      row.a = s.a;
      row.b = s.b;
      row.c = s.c();
      row.beta = beta;
      row.M30 = est.M[0];
      row.M1110 = est.M[1];
      row.M21 = est.M[2];
      row.M12 = est.M[3];
      row.A = est.A;
      row.B = est.B;
      auto rates = parameter_rates(run.history);
      auto gam = modulation_residuals(s.a, s.b, rates[0], rates[1], s.d);
      row.gamma1 = gam[0];
      row.gamma2 = gam[1];
      row.fit_iters = fit.newton_iters;
      row.ortho1 = fit.ortho_residual[0];
      row.ortho2 = fit.ortho_residual[1];
      row.jac_cond = fit.jacobian_cond;
      BarrierVerdict bv = barrier_check(s, beta);
      BarrierVerdict rv = rho_bounds_check(s, beta, run.datum_rho_qualifies);
      row.barrier_margin = bv.min_margin;
      row.barrier_ok = bv.barrier_ok;
      row.rho_central = rv.rho_central_max;
      row.rho_outer = rv.rho_outer_min;
      row.rho_ok = rv.rho_central_ok && rv.rho_outer_ok;
      {
      auto rr = rho(s.grid, s.v);
      double cm = -1e300;
      for (double x : rr) cm = std::max(cm, x - (s.d - 1));
      row.chi_max = cm;
      }
      row.admissible = rec.admissible;
      run.diag.push_back(row);
      run.samples.push_back({s.t, s.lambda * rec.v_min, rec.max_a_phys, dtau});
    }
    skip_record = false;

    const double u_min = run.samples.back().u_min;
    if (u_min <= u_stop) {
      run.stop = StopReason::collapse_detected;
      break;
    }
    if (s.tau >= cfg.tau_max) {
      run.stop = StopReason::t_end_reached;
      break;
    }
    if (opts.max_steps >= 0 && accepted >= opts.max_steps) {
      run.stop = StopReason::budget_exceeded;
      break;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    if (wall > cfg.wall_budget_s) {
      run.stop = StopReason::budget_exceeded;
      break;
    }

    // step-doubling in dtau with the same frozen (a, b); the far-field family
    // closure tracks the fitted parameter drift to the step's target tau
    auto rates_now = parameter_rates(run.history);
    const double tau0 = s.tau, a0 = s.a, b0v = s.b;
    ParamPredictor bval = [=](double tau) {
      const double dt = tau - tau0;
      return std::array<double, 2>{a0 + rates_now[0] * dt,
                                   std::max(b0v + rates_now[1] * dt, 0.0)};
    };
    bool stepped = false;
    for (int tries = 0; tries < 40 && !stepped; ++tries) {
      try {
        CollapseState full = step_rescaled(s, dtau, sopts, bval);
        CollapseState half = step_rescaled(s, 0.5 * dtau, sopts, bval);
        CollapseState half2 = step_rescaled(half, 0.5 * dtau, sopts, bval);
        double err = 0.0;
        for (size_t i = 0; i + 1 < half2.v.size(); ++i)
          err = std::max(err, std::abs(full.v[i] - half2.v[i]) / half2.v[i]);
        if (err <= cfg.tol_step) {
          bool positive = true;
          for (size_t i = 0; i + 1 < half2.v.size(); ++i) {
            half2.v[i] = 2.0 * half2.v[i] - full.v[i];  // local extrapolation
            if (!(half2.v[i] > 0.0)) positive = false;
          }
          if (!positive)
            half2 = step_rescaled(step_rescaled(s, 0.5 * dtau, sopts, bval), 0.5 * dtau,
                                  sopts, bval);
          s = half2;
          const double grow = (err > 0.0) ? 0.9 * std::sqrt(cfg.tol_step / err) : 5.0;
          dtau = std::min(cfg.dtau_max, dtau * std::clamp(grow, 0.3, 5.0));
          stepped = true;
        } else {
          dtau *= std::clamp(0.9 * std::sqrt(cfg.tol_step / err), 0.1, 0.5);
        }
      } catch (const Error& e) {
        if (e.code() != "step-rejected") throw;
        dtau *= 0.25;
      }
    }
    if (!stepped) fail("step-rejected", "rescaled controller stalled");
    ++accepted;
  }
  run.final_state = s;
  run.final_dtau = dtau;
  run.snapshots.push_back(s);
  return run;
}

Checkpoint make_checkpoint(const SimConfig& cfg, const RescaledRun& run, double dtau) {
  Checkpoint c;
  c.run_id = "";
  c.state = run.final_state;
  c.dtau = dtau > 0 ? dtau : (run.final_dtau > 0 ? run.final_dtau : cfg.dtau_init);
  c.b0 = run.b0;
  c.datum_rho_qualifies = run.datum_rho_qualifies;
  c.history = run.history;
  c.samples = run.samples;
  return c;
}

AsymptoticsReport verify_run(RescaledRun& run, int d) {
  PinchEstimate pinch = estimate_pinch_time(run.samples);
  AsymptoticsReport rep = verify_asymptotics(run.history, pinch.t_star, d);
  rep.pinch = pinch;
  for (size_t i = 0; i < run.diag.size(); ++i) {
    const double rem = pinch.t_star - run.diag[i].t;
    run.diag[i].type_one =
        (rem > 0.0) ? run.history[i].max_a_phys * std::sqrt(rem) : 0.0;
  }
  return rep;
}

}  // namespace neckpinch
