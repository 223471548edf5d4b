#include "neckpinch/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "neckpinch/config.hpp"
#include "neckpinch/errors.hpp"
#include "neckpinch/version.hpp"

namespace neckpinch {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("io-error", "cannot open " + path + " for writing");
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc()) fail("io-error", "bad number in CSV: '" + s + "'");
  return v;
}

}  // namespace

void write_snapshot_csv(const std::string& path, const RadialProfile& p) {
  auto out = open_out(path);
  out << "# t=" << format_double(p.t) << " d=" << p.d << "\n";
  out << "x,u,u_x,u_xx,abs_A\n";
  auto ux = p.grid.deriv(p.u, 1, Parity::even);
  auto uxx = p.grid.deriv(p.u, 2, Parity::even);
  auto a = curvature_norm(p);
  for (int i = 0; i < p.grid.size(); ++i) {
    out << format_double(p.grid.node(i)) << ',' << format_double(p.u[i]) << ','
        << format_double(ux[i]) << ',' << format_double(uxx[i]) << ','
        << format_double(a[i]) << "\n";
  }
}

void write_trajectory_csv(const std::string& path,
                          const std::vector<TrajectorySample>& samples, int cadence) {
  auto out = open_out(path);
  out << "t,u_min,max_abs_A,dt\n";
  for (size_t i = 0; i < samples.size(); ++i) {
    if (i % cadence != 0 && i + 1 != samples.size()) continue;
    const auto& s = samples[i];
    out << format_double(s.t) << ',' << format_double(s.u_min) << ','
        << format_double(s.max_a) << ',' << format_double(s.dt) << "\n";
  }
}

void write_rescaled_snapshot_csv(const std::string& path, const CollapseState& s) {
  auto out = open_out(path);
  out << "# tau=" << format_double(s.tau) << " t=" << format_double(s.t)
      << " lambda=" << format_double(s.lambda) << " a=" << format_double(s.a)
      << " b=" << format_double(s.b) << "\n";
  out << "y,v,V_ab,phi,weight\n";
  AlmostSolution V{s.a, s.b, s.d};
  for (int i = 0; i < s.grid.size(); ++i) {
    const double y = s.grid.node(i);
    const double Vv = V(y);
    out << format_double(y) << ',' << format_double(s.v[i]) << ',' << format_double(Vv)
        << ',' << format_double(s.v[i] - Vv) << ','
        << format_double(std::exp(-0.5 * s.a * y * y)) << "\n";
  }
}

void write_fitlog_csv(const std::string& path, const std::vector<DiagRow>& rows,
                      int cadence) {
  auto out = open_out(path);
  out << "tau,a,b,iterations,ortho1,ortho2,jacobian_cond\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i % cadence != 0 && i + 1 != rows.size()) continue;
    const auto& r = rows[i];
    out << format_double(r.tau) << ',' << format_double(r.a) << ',' << format_double(r.b)
        << ',' << format_double(r.fit_iters) << ',' << format_double(r.ortho1) << ','
        << format_double(r.ortho2) << ',' << format_double(r.jac_cond) << "\n";
  }
}

static const char* kDiagHeader =
    "tau,t,lambda,a,b,c,beta,M30,M1110,M21,M12,A,B,Gamma1,Gamma2,type_one,"
    "barrier_ok,rho_ok,admissible";

void write_diagnostics_csv(const std::string& path, const std::vector<DiagRow>& rows,
                           int cadence) {
  auto out = open_out(path);
  out << kDiagHeader << "\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i % cadence != 0 && i + 1 != rows.size()) continue;
    const auto& r = rows[i];
    out << format_double(r.tau) << ',' << format_double(r.t) << ','
        << format_double(r.lambda) << ',' << format_double(r.a) << ','
        << format_double(r.b) << ',' << format_double(r.c) << ','
        << format_double(r.beta) << ',' << format_double(r.M30) << ','
        << format_double(r.M1110) << ',' << format_double(r.M21) << ','
        << format_double(r.M12) << ',' << format_double(r.A) << ','
        << format_double(r.B) << ',' << format_double(r.gamma1) << ','
        << format_double(r.gamma2) << ',' << format_double(r.type_one) << ','
        << (r.barrier_ok ? 1 : 0) << ',' << (r.rho_ok ? 1 : 0) << ','
        << (r.admissible ? 1 : 0) << "\n";
  }
}

void write_barrier_csv(const std::string& path, const std::vector<DiagRow>& rows,
                       int cadence) {
  auto out = open_out(path);
  out << "tau,min_margin,rho_central_max,rho_outer_min,chi_max\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i % cadence != 0 && i + 1 != rows.size()) continue;
    const auto& r = rows[i];
    out << format_double(r.tau) << ',' << format_double(r.barrier_margin) << ','
        << format_double(r.rho_central) << ',' << format_double(r.rho_outer) << ','
        << format_double(r.chi_max) << "\n";
  }
}

void write_spectrum_csv(const std::string& path, double alpha,
                        const std::vector<spectral::SpectrumRow>& rows) {
  auto out = open_out(path);
  out << "alpha,mode_index,eigenvalue,residual\n";
  for (const auto& r : rows)
    out << format_double(alpha) << ',' << r.index << ',' << format_double(r.eigenvalue)
        << ',' << format_double(r.residual) << "\n";
}

void write_probe_json(const std::string& path,
                      const std::vector<std::pair<std::string, spectral::ProbeResult>>& probes) {
  json j;
  j["schema"] = 1;
  for (const auto& [name, p] : probes) {
    json e;
    e["rate"] = p.rate;
    e["bound_rate"] = p.bound_rate;
    e["passed"] = p.passed;
    e["sigmas"] = p.sigmas;
    e["norms"] = p.norms;
    j["probes"][name] = e;
  }
  open_out(path) << j.dump(2) << "\n";
}

namespace {

json law_json(const LawSeries& s) {
  return json{{"t", s.t}, {"tau", s.tau}, {"value", s.value}};
}

}  // namespace

void write_report_json(const std::string& path, const AsymptoticsReport& rep) {
  json j;
  j["schema"] = 1;
  j["t_star"] = rep.t_star;
  j["pinch_fit"] = {{"rms_residual", rep.pinch.rms_residual},
                    {"r_squared", rep.pinch.r_squared},
                    {"window_sensitivity", rep.pinch.window_sensitivity},
                    {"reliable", rep.pinch.reliable}};
  j["lambda_ratio"] = law_json(rep.lambda_ratio);
  j["b_law"] = law_json(rep.b_law);
  j["c_law"] = law_json(rep.c_law);
  j["terminal"] = {{"lambda_ratio", rep.terminal_lambda_ratio},
                   {"b_law", rep.terminal_b_law},
                   {"c_law", rep.terminal_c_law}};
  j["type_one"] = {{"constant", rep.type_one_constant},
                   {"growth", rep.type_one_growth},
                   {"ok", rep.type_one_ok}};
  j["checks"] = {{"lambda_law", rep.lambda_ok},
                 {"lambda_trend", rep.lambda_trend_ok},
                 {"b_law", rep.b_ok},
                 {"c_law", rep.c_ok},
                 {"type_one", rep.type_one_ok}};
  open_out(path) << j.dump(2) << "\n";
}

std::vector<DiagRow> read_diagnostics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io-error", "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kDiagHeader)
    fail("io-error", "unexpected diagnostics header in " + path);
  std::vector<DiagRow> rows;
  while (std::getline(in, line)) {
    auto f = split_csv(line);
    if (f.size() != 19) fail("io-error", "bad diagnostics row in " + path);
    DiagRow r;
    r.tau = to_double(f[0]);
    r.t = to_double(f[1]);
    r.lambda = to_double(f[2]);
    r.a = to_double(f[3]);
    r.b = to_double(f[4]);
    r.c = to_double(f[5]);
    r.beta = to_double(f[6]);
    r.M30 = to_double(f[7]);
    r.M1110 = to_double(f[8]);
    r.M21 = to_double(f[9]);
    r.M12 = to_double(f[10]);
    r.A = to_double(f[11]);
    r.B = to_double(f[12]);
    r.gamma1 = to_double(f[13]);
    r.gamma2 = to_double(f[14]);
    r.type_one = to_double(f[15]);
    r.barrier_ok = f[16] == "1";
    r.rho_ok = f[17] == "1";
    r.admissible = f[18] == "1";
    rows.push_back(r);
  }
  return rows;
}

std::vector<TrajectorySample> read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io-error", "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "t,u_min,max_abs_A,dt")
    fail("io-error", "unexpected trajectory header in " + path);
  std::vector<TrajectorySample> rows;
  while (std::getline(in, line)) {
    auto f = split_csv(line);
    if (f.size() != 4) fail("io-error", "bad trajectory row in " + path);
    rows.push_back({to_double(f[0]), to_double(f[1]), to_double(f[2]), to_double(f[3])});
  }
  return rows;
}

namespace {

json grid_json(const Grid& g) {
  return json{{"half_width", g.half_width()}, {"nodes", g.size()}, {"stretch", g.stretch()}};
}

Grid grid_from_json(const json& j) {
  return Grid::half_line(j.at("half_width").get<double>(), j.at("nodes").get<int>(),
                         j.at("stretch").get<double>());
}

json record_json(const FitRecord& r) {
  return json::array({r.tau, r.t, r.lambda, r.a, r.b, r.phi_norms[0], r.phi_norms[1],
                      r.phi_norms[2], r.phi_norms[3], r.max_a_phys, r.v_min,
                      r.admissible ? 1 : 0});
}

FitRecord record_from_json(const json& j) {
  FitRecord r;
  r.tau = j.at(0);
  r.t = j.at(1);
  r.lambda = j.at(2);
  r.a = j.at(3);
  r.b = j.at(4);
  for (int k = 0; k < 4; ++k) r.phi_norms[k] = j.at(5 + k);
  r.max_a_phys = j.at(9);
  r.v_min = j.at(10);
  r.admissible = j.at(11).get<int>() == 1;
  return r;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  json j;
  j["schema"] = c.schema;
  j["kind"] = "rescaled";
  j["run_id"] = c.run_id;
  j["state"] = {{"grid", grid_json(c.state.grid)}, {"v", c.state.v},
                {"lambda", c.state.lambda},       {"t", c.state.t},
                {"tau", c.state.tau},             {"a", c.state.a},
                {"b", c.state.b},                 {"d", c.state.d}};
  j["dtau"] = c.dtau;
  j["b0"] = c.b0;
  j["datum_rho_qualifies"] = c.datum_rho_qualifies;
  json hist = json::array();
  for (const auto& r : c.history) hist.push_back(record_json(r));
  j["history"] = std::move(hist);
  json samp = json::array();
  for (const auto& s : c.samples) samp.push_back(json::array({s.t, s.u_min, s.max_a, s.dt}));
  j["samples"] = std::move(samp);
  open_out(path) << j.dump() << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("incompatible-checkpoint", "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail("incompatible-checkpoint", std::string("parse error: ") + e.what());
  }
  Checkpoint c;
  try {
    c.schema = j.at("schema").get<int>();
    if (c.schema != 1) fail("incompatible-checkpoint", "unsupported schema version");
    if (j.at("kind").get<std::string>() != "rescaled")
      fail("incompatible-checkpoint", "unsupported checkpoint kind");
    c.run_id = j.at("run_id").get<std::string>();
    const json& s = j.at("state");
    c.state.grid = grid_from_json(s.at("grid"));
    c.state.v = s.at("v").get<std::vector<double>>();
    c.state.lambda = s.at("lambda");
    c.state.t = s.at("t");
    c.state.tau = s.at("tau");
    c.state.a = s.at("a");
    c.state.b = s.at("b");
    c.state.d = s.at("d");
    c.dtau = j.at("dtau");
    c.b0 = j.at("b0");
    c.datum_rho_qualifies = j.at("datum_rho_qualifies");
    for (const auto& r : j.at("history")) c.history.push_back(record_from_json(r));
    for (const auto& r : j.at("samples"))
      c.samples.push_back({r.at(0), r.at(1), r.at(2), r.at(3)});
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail("incompatible-checkpoint", std::string("malformed checkpoint: ") + e.what());
  }
  return c;
}

bool Manifest::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

void write_manifest(const std::string& path, const Manifest& m) {
  json j;
  j["schema"] = 1;
  j["version"] = kVersion;
  j["run_id"] = m.run_id;
  j["mode"] = m.mode;
  j["config"] = m.config_echo;
  j["outputs"] = m.outputs;
  json checks = json::array();
  for (const auto& c : m.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = std::move(checks);
  j["all_passed"] = m.all_passed();
  j["wall_seconds"] = m.wall_seconds;
  open_out(path) << j.dump(2) << "\n";
}

}  // namespace neckpinch
