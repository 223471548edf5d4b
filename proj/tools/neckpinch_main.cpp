#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "neckpinch/config.hpp"
#include "neckpinch/errors.hpp"
#include "neckpinch/io.hpp"
#include "neckpinch/runner.hpp"
#include "neckpinch/spectral.hpp"
#include "neckpinch/version.hpp"

namespace fs = std::filesystem;
using namespace neckpinch;

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::string checkpoint_path;
  bool resume = false;
  double grid_scale = 1.0;
  bool quiet = false;
};

void info(const CliOptions& o, const std::string& msg) {
  if (!o.quiet) std::cout << msg << "\n";
}

SimConfig load(const CliOptions& o) {
  SimConfig cfg = o.config_path.empty() ? SimConfig{} : load_config_file(o.config_path);
  if (o.grid_scale != 1.0) {
    cfg.nodes = static_cast<int>(cfg.nodes * o.grid_scale) | 1;  // keep odd-ish counts
    cfg.spectrum_nodes = static_cast<int>(cfg.spectrum_nodes * o.grid_scale) | 1;
  }
  cfg.validate();
  return cfg;
}

std::string out_file(const CliOptions& o, const std::string& name) {
  return (fs::path(o.out_dir) / name).string();
}

int run_physical_mode(const CliOptions& o, Manifest& man) {
  SimConfig cfg = load(o);
  Trajectory traj = run_physical(cfg);
  write_trajectory_csv(out_file(o, "trajectory.csv"), traj.samples, cfg.output_cadence);
  man.outputs.push_back("trajectory.csv");
  for (size_t i = 0; i < traj.snapshots.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%04zu.csv", i);
    write_snapshot_csv(out_file(o, name), traj.snapshots[i]);
    man.outputs.push_back(name);
  }
  bool pinch_ok = true;
  std::string detail = "stopped without pinch estimate";
  if (traj.stop == StopReason::collapse_detected) {
    try {
      PinchEstimate pe = estimate_pinch_time(traj.samples);
      detail = "t* = " + format_double(pe.t_star);
    } catch (const Error& e) {
      pinch_ok = false;
      detail = e.what();
    }
  }
  man.checks.push_back({"physical-run-completed",
                        traj.stop == StopReason::collapse_detected ||
                            traj.stop == StopReason::t_end_reached,
                        detail});
  man.checks.push_back({"pinch-fit", pinch_ok, detail});
  info(o, "physical run: " + std::to_string(traj.samples.size()) + " steps, " + detail);
  return man.all_passed() ? 0 : 1;
}

int run_rescaled_mode(const CliOptions& o, Manifest& man) {
  SimConfig cfg = load(o);
  RescaledRun run;
  if (o.resume) {
    if (o.checkpoint_path.empty()) fail("bad-config", "--resume needs --checkpoint PATH");
    Checkpoint c = load_checkpoint(o.checkpoint_path);
    run = run_rescaled(cfg, &c);
  } else {
    run = run_rescaled(cfg);
  }
  write_diagnostics_csv(out_file(o, "diagnostics.csv"), run.diag, cfg.output_cadence);
  write_fitlog_csv(out_file(o, "fitlog.csv"), run.diag, cfg.output_cadence);
  write_barrier_csv(out_file(o, "barrier.csv"), run.diag, cfg.output_cadence);
  write_trajectory_csv(out_file(o, "trajectory.csv"), run.samples, cfg.output_cadence);
  write_rescaled_snapshot_csv(out_file(o, "rescaled_final.csv"), run.final_state);
  man.outputs.insert(man.outputs.end(), {"diagnostics.csv", "fitlog.csv", "barrier.csv",
                                         "trajectory.csv", "rescaled_final.csv"});
  if (!o.checkpoint_path.empty() && !o.resume) {
    Checkpoint c = make_checkpoint(cfg, run, cfg.dtau_init);
    c.run_id = config_run_id(cfg);
    save_checkpoint(o.checkpoint_path, c);
  }
  bool admissible = true, barrier = true, rho_ok = true;
  for (const auto& r : run.diag) {
    admissible = admissible && r.admissible;
    barrier = barrier && r.barrier_ok;
    rho_ok = rho_ok && r.rho_ok;
  }
  man.checks.push_back({"rescaled-run-completed",
                        run.stop == StopReason::collapse_detected ||
                            run.stop == StopReason::t_end_reached,
                        "stop reason recorded"});
  man.checks.push_back({"datum-in-class", run.datum_report.passed(), ""});
  man.checks.push_back({"admissible-drift", admissible, "a in [1/4,1] at every step"});
  man.checks.push_back({"barrier", barrier, "v >= g(y,beta) nodewise"});
  man.checks.push_back({"rho-bounds", rho_ok, ""});
  info(o, "rescaled run: " + std::to_string(run.diag.size()) + " steps to tau = " +
              format_double(run.final_state.tau));
  return man.all_passed() ? 0 : 1;
}

int run_fit_mode(const CliOptions& o, Manifest& man) {
  SimConfig cfg = load(o);
  Grid ygrid = Grid::half_line(cfg.y_half_width, cfg.nodes, std::min(cfg.grid_stretch, 3.0));
  CollapseState s;
  s.grid = ygrid;
  s.d = cfg.d;
  s.lambda = cfg.lambda0;
  s.v.resize(ygrid.size());
  for (int i = 0; i < ygrid.size(); ++i)
    s.v[i] = neck_reference(cfg, cfg.lambda0 * ygrid.node(i)) / cfg.lambda0;
  auto guess = cold_start_guess(s.grid, s.v);
  FitOptions fo;
  fo.tol = cfg.fit_tol;
  fo.max_iter = cfg.fit_max_iter;
  ModulationFit fit = fit_parameters(s.grid, s.v, s.d, guess[0], guess[1], fo);
  std::vector<DiagRow> rows(1);
  rows[0].tau = 0.0;
  rows[0].a = fit.a;
  rows[0].b = fit.b;
  rows[0].fit_iters = fit.newton_iters;
  rows[0].ortho1 = fit.ortho_residual[0];
  rows[0].ortho2 = fit.ortho_residual[1];
  rows[0].jac_cond = fit.jacobian_cond;
  write_fitlog_csv(out_file(o, "fitlog.csv"), rows, 1);
  man.outputs.push_back("fitlog.csv");
  man.checks.push_back({"fit-converged", fit.converged,
                        "a = " + format_double(fit.a) + ", b = " + format_double(fit.b)});
  info(o, "fit: a = " + format_double(fit.a) + " b = " + format_double(fit.b));
  return man.all_passed() ? 0 : 1;
}

int run_spectrum_mode(const CliOptions& o, Manifest& man) {
  SimConfig cfg = load(o);
  auto line = spectral::UniformLine::make(cfg.spectrum_half_width, cfg.spectrum_nodes);
  spectral::OperatorParams p;
  p.alpha = cfg.alpha;
  p.d = cfg.d;
  auto op = spectral::assemble_operator(spectral::OperatorId::L_alpha_shifted, p, line);
  auto rows = spectral::discrete_spectrum_with_residuals(op, cfg.spectrum_count);
  write_spectrum_csv(out_file(o, "spectrum.csv"), cfg.alpha, rows);
  man.outputs.push_back("spectrum.csv");
  bool ladder_ok = true;
  for (const auto& r : rows) {
    const double expected = (r.index - 2) * cfg.alpha;
    if (std::abs(r.eigenvalue - expected) > 1e-3) ladder_ok = false;
  }
  man.checks.push_back({"spectrum-ladder", ladder_ok, "eigenvalues near {n alpha}"});

  std::vector<std::pair<std::string, spectral::ProbeResult>> probes;
  {
    std::vector<double> seed(line.size());
    for (int i = 0; i < line.size(); ++i) {
      const double z = line.z[i];
      seed[i] = z * z * std::exp(-0.25 * cfg.alpha * z * z);
    }
    probes.emplace_back("flat_n2", spectral::propagator_decay_probe(
                                       2, cfg.alpha, false, line, seed, cfg.probe_horizon));
  }
  {
    std::vector<double> seed(line.size());
    for (int i = 0; i < line.size(); ++i) {
      const double z = line.z[i];
      seed[i] = z * z * z * std::exp(-0.25 * cfg.alpha * z * z);
    }
    probes.emplace_back("potential_n3",
                        spectral::propagator_decay_probe(3, cfg.alpha, true, line, seed,
                                                         cfg.probe_horizon, cfg.probe_beta,
                                                         cfg.d));
  }
  write_probe_json(out_file(o, "probe.json"), probes);
  man.outputs.push_back("probe.json");
  for (const auto& [name, pr] : probes)
    man.checks.push_back({"probe-" + name, pr.passed, "rate = " + format_double(pr.rate)});
  info(o, "spectrum mode done");
  return man.all_passed() ? 0 : 1;
}

int run_verify_mode(const CliOptions& o, Manifest& man) {
  SimConfig cfg = load(o);
  auto diag = read_diagnostics_csv(out_file(o, "diagnostics.csv"));
  auto samples = read_trajectory_csv(out_file(o, "trajectory.csv"));
  std::vector<FitRecord> hist(diag.size());
  for (size_t i = 0; i < diag.size(); ++i) {
    hist[i].tau = diag[i].tau;
    hist[i].t = diag[i].t;
    hist[i].lambda = diag[i].lambda;
    hist[i].a = diag[i].a;
    hist[i].b = diag[i].b;
  }
  PinchEstimate pe = estimate_pinch_time(samples);
  // rebuild the type-I series from the stored max|A|
  for (size_t i = 0; i < hist.size(); ++i) {
    // nearest trajectory sample by t
    size_t j = std::min(i * samples.size() / std::max<size_t>(hist.size(), 1),
                        samples.size() - 1);
    hist[i].max_a_phys = samples[j].max_a;
  }
  AsymptoticsReport rep = verify_asymptotics(hist, pe.t_star, cfg.d);
  rep.pinch = pe;
  write_report_json(out_file(o, "report.json"), rep);
  man.outputs.push_back("report.json");
  // fill the post-run type-I column and rewrite the diagnostics table
  for (size_t i = 0; i < diag.size(); ++i) {
    const double rem = pe.t_star - diag[i].t;
    diag[i].type_one = (rem > 0.0) ? hist[i].max_a_phys * std::sqrt(rem) : 0.0;
  }
  write_diagnostics_csv(out_file(o, "diagnostics.csv"), diag, 1);
  man.checks.push_back({"lambda-law", rep.lambda_ok,
                        "terminal ratio = " + format_double(rep.terminal_lambda_ratio)});
  man.checks.push_back({"b-law", rep.b_ok, "terminal = " + format_double(rep.terminal_b_law)});
  man.checks.push_back({"c-law", rep.c_ok, "terminal = " + format_double(rep.terminal_c_law)});
  man.checks.push_back({"type-one", rep.type_one_ok,
                        "constant = " + format_double(rep.type_one_constant)});
  info(o, "verify: report.json written");
  return man.all_passed() ? 0 : 1;
}

int run_all_mode(const CliOptions& o, Manifest& man) {
  int rc = 0;
  rc |= run_physical_mode(o, man);
  rc |= run_rescaled_mode(o, man);
  rc |= run_spectrum_mode(o, man);
  rc |= run_verify_mode(o, man);
  rc |= run_fit_mode(o, man);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"neckpinch: rotationally symmetric mean-curvature-flow laboratory"};
  app.set_version_flag("--version", kVersion);
  CliOptions o;
  app.add_option("--config", o.config_path, "run configuration file (key = value)");
  app.add_option("--out", o.out_dir, "output directory");
  app.add_option("--checkpoint", o.checkpoint_path, "checkpoint file to write (or read with --resume)");
  app.add_flag("--resume", o.resume, "continue from --checkpoint");
  app.add_option("--grid-scale", o.grid_scale, "multiply node counts (convergence studies)");
  app.add_flag("--quiet", o.quiet, "suppress progress output");
  app.require_subcommand(1);
  auto* sub_physical = app.add_subcommand("physical", "integrate the physical-variable flow");
  auto* sub_rescaled = app.add_subcommand("rescaled", "collapse-frame run with live modulation");
  auto* sub_fit = app.add_subcommand("fit", "single modulation fit of the config datum");
  auto* sub_spectrum = app.add_subcommand("spectrum", "eigenvalue ladder and propagator probes");
  auto* sub_verify = app.add_subcommand("verify", "law fits over stored histories");
  auto* sub_all = app.add_subcommand("all", "run every mode");
  CLI11_PARSE(app, argc, argv);

  if (const char* env = std::getenv("NECKPINCH_OUT")) o.out_dir = env;
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);

  Manifest man;
  man.mode = app.get_subcommands().front()->get_name();
  const auto t0 = std::chrono::steady_clock::now();
  int rc = 0;
  try {
    SimConfig cfg = load(o);
    man.run_id = config_run_id(cfg);
    man.config_echo = config_echo(cfg);
    if (sub_physical->parsed()) rc = run_physical_mode(o, man);
    else if (sub_rescaled->parsed()) rc = run_rescaled_mode(o, man);
    else if (sub_fit->parsed()) rc = run_fit_mode(o, man);
    else if (sub_spectrum->parsed()) rc = run_spectrum_mode(o, man);
    else if (sub_verify->parsed()) rc = run_verify_mode(o, man);
    else if (sub_all->parsed()) rc = run_all_mode(o, man);
  } catch (const Error& e) {
    nlohmann::json err{{"code", e.code()}, {"message", e.what()}};
    std::ofstream(fs::path(o.out_dir) / "error.json") << err.dump(2) << "\n";
    std::cerr << "error: " << e.what() << "\n";
    rc = 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    rc = 2;
  }
  man.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest((fs::path(o.out_dir) / "manifest.json").string(), man);
  return rc;
}
