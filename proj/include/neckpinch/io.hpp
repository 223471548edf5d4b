#pragma once

#include <string>
#include <vector>

#include "neckpinch/diagnostics.hpp"
#include "neckpinch/runner.hpp"
#include "neckpinch/spectral.hpp"

namespace neckpinch {

// Shortest round-trip decimal form of a double (deterministic, exact reload).
std::string format_double(double x);

void write_snapshot_csv(const std::string& path, const RadialProfile& p);
void write_trajectory_csv(const std::string& path,
                          const std::vector<TrajectorySample>& samples, int cadence = 1);
void write_rescaled_snapshot_csv(const std::string& path, const CollapseState& s);
void write_fitlog_csv(const std::string& path, const std::vector<DiagRow>& rows,
                      int cadence = 1);
void write_diagnostics_csv(const std::string& path, const std::vector<DiagRow>& rows,
                           int cadence = 1);
void write_barrier_csv(const std::string& path, const std::vector<DiagRow>& rows,
                       int cadence = 1);
void write_spectrum_csv(const std::string& path, double alpha,
                        const std::vector<spectral::SpectrumRow>& rows);
void write_probe_json(const std::string& path,
                      const std::vector<std::pair<std::string, spectral::ProbeResult>>& probes);
void write_report_json(const std::string& path, const AsymptoticsReport& rep);

// Reload of our own outputs (verify mode consumes stored histories).
std::vector<DiagRow> read_diagnostics_csv(const std::string& path);
std::vector<TrajectorySample> read_trajectory_csv(const std::string& path);

// Checkpoint round-trip is bit-exact on every state field; version or shape
// mismatches raise "incompatible-checkpoint".
void save_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::string& path);

struct CheckOutcome {
  std::string name;
  bool passed;
  std::string detail;
};

struct Manifest {
  std::string run_id;
  std::string mode;
  std::string config_echo;
  std::vector<std::string> outputs;
  std::vector<CheckOutcome> checks;
  double wall_seconds = 0.0;
  bool all_passed() const;
};
void write_manifest(const std::string& path, const Manifest& m);

}  // namespace neckpinch
