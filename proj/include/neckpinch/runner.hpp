#pragma once

#include <optional>
#include <string>
#include <vector>

#include "neckpinch/barriers.hpp"
#include "neckpinch/collapse.hpp"
#include "neckpinch/diagnostics.hpp"
#include "neckpinch/modulation.hpp"
#include "neckpinch/profile.hpp"

namespace neckpinch {

/// One diagnostics row of the rescaled run (written to diagnostics.csv).
struct DiagRow {
  double tau = 0, t = 0, lambda = 0, a = 0, b = 0, c = 0, beta = 0;
  double M30 = 0, M1110 = 0, M21 = 0, M12 = 0, A = 0, B = 0;
  double gamma1 = 0, gamma2 = 0;
  double type_one = 0;  // max|A| sqrt(t*-t), filled post-run
  double fit_iters = 0, ortho1 = 0, ortho2 = 0, jac_cond = 0;
  double barrier_margin = 0, rho_central = 0, rho_outer = 0, chi_max = 0;
  bool barrier_ok = false, rho_ok = false, admissible = true;
};

struct RescaledRun {
  std::vector<FitRecord> history;        // per accepted step
  std::vector<DiagRow> diag;
  std::vector<TrajectorySample> samples;  // physical-frame series
  std::vector<CollapseState> snapshots;
  CollapseState final_state;
  double final_dtau = 0.0;  // controller state for exact continuation
  StopReason stop = StopReason::collapse_detected;
  double b0 = 0.0;
  bool datum_rho_qualifies = false;  // v0 v0'' >= -1 held at tau = 0
  DatumClassReport datum_report;
};

/// Mid-run state sufficient to continue a rescaled run exactly.
struct Checkpoint {
  int schema = 1;
  std::string run_id;
  CollapseState state;
  double dtau = 0.0;
  double b0 = 0.0;
  bool datum_rho_qualifies = false;
  std::vector<FitRecord> history;
  std::vector<TrajectorySample> samples;
};

struct RescaledOptions {
  // stop the loop early after this many accepted steps (checkpoint tests)
  long max_steps = -1;
};

/// Rescaled evolution with a per-step modulation fit driving (a, b) and the
/// scale law.  Starts from the config datum evaluated directly on the y-grid
/// at lambda0, or continues from a checkpoint.
RescaledRun run_rescaled(const SimConfig& cfg,
                         const Checkpoint* resume = nullptr,
                         const RescaledOptions& opts = {});

// Checkpoint of the loop state right after `steps` accepted steps.
Checkpoint make_checkpoint(const SimConfig& cfg, const RescaledRun& run, double dtau);

// Post-run law verification (fits t*, fills type-I column of diag rows).
AsymptoticsReport verify_run(RescaledRun& run, int d);

}  // namespace neckpinch
