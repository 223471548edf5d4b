#include "neckpinch/config.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "neckpinch/errors.hpp"
#include "neckpinch/io.hpp"

namespace neckpinch {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

DatumKind parse_datum(const std::string& v, int line) {
  if (v == "neck") return DatumKind::neck;
  if (v == "cylinder") return DatumKind::cylinder;
  if (v == "sphere") return DatumKind::sphere;
  fail("bad-config", "line " + std::to_string(line) + ": unknown datum '" + v + "'");
}

PerturbShape parse_shape(const std::string& v, int line) {
  if (v == "none") return PerturbShape::none;
  if (v == "gauss") return PerturbShape::gauss;
  if (v == "poly_gauss") return PerturbShape::poly_gauss;
  if (v == "noise") return PerturbShape::noise;
  fail("bad-config", "line " + std::to_string(line) + ": unknown perturb_shape '" + v + "'");
}

const char* datum_name(DatumKind k) {
  switch (k) {
    case DatumKind::neck: return "neck";
    case DatumKind::cylinder: return "cylinder";
    case DatumKind::sphere: return "sphere";
  }
  return "neck";
}

const char* shape_name(PerturbShape s) {
  switch (s) {
    case PerturbShape::none: return "none";
    case PerturbShape::gauss: return "gauss";
    case PerturbShape::poly_gauss: return "poly_gauss";
    case PerturbShape::noise: return "noise";
  }
  return "none";
}

}  // namespace

SimConfig parse_config(const std::string& text) {
  SimConfig cfg;
  std::map<std::string, std::function<void(const std::string&, int)>> setters;
  auto num = [](double& slot) {
    return [&slot](const std::string& v, int line) {
      try {
        size_t pos = 0;
        slot = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
      } catch (...) {
        fail("bad-config", "line " + std::to_string(line) + ": expected a number, got '" + v + "'");
      }
    };
  };
  auto integer = [](int& slot) {
    return [&slot](const std::string& v, int line) {
      try {
        size_t pos = 0;
        slot = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
      } catch (...) {
        fail("bad-config", "line " + std::to_string(line) + ": expected an integer, got '" + v + "'");
      }
    };
  };
  setters["d"] = integer(cfg.d);
  setters["datum"] = [&cfg](const std::string& v, int l) { cfg.datum = parse_datum(v, l); };
  setters["epsilon0"] = num(cfg.epsilon0);
  setters["varsigma0"] = num(cfg.varsigma0);
  setters["kappa0"] = num(cfg.kappa0);
  setters["class_constant"] = num(cfg.class_constant);
  setters["cylinder_u0"] = num(cfg.cylinder_u0);
  setters["sphere_radius"] = num(cfg.sphere_radius);
  setters["perturb_shape"] = [&cfg](const std::string& v, int l) {
    cfg.perturb_shape = parse_shape(v, l);
  };
  setters["perturb_amplitude"] = num(cfg.perturb_amplitude);
  setters["perturb_seed"] = [&cfg](const std::string& v, int line) {
    try {
      cfg.perturb_seed = std::stoull(v);
    } catch (...) {
      fail("bad-config", "line " + std::to_string(line) + ": expected an integer seed");
    }
  };
  setters["domain_half_width"] = num(cfg.domain_half_width);
  setters["y_half_width"] = num(cfg.y_half_width);
  setters["nodes"] = integer(cfg.nodes);
  setters["grid_stretch"] = num(cfg.grid_stretch);
  setters["lambda0"] = num(cfg.lambda0);
  setters["u_min_stop_rel"] = num(cfg.u_min_stop_rel);
  setters["t_end"] = num(cfg.t_end);
  setters["tol_step"] = num(cfg.tol_step);
  setters["newton_tol"] = num(cfg.newton_tol);
  setters["newton_max_iter"] = integer(cfg.newton_max_iter);
  setters["dt_init"] = num(cfg.dt_init);
  setters["dtau_init"] = num(cfg.dtau_init);
  setters["dtau_max"] = num(cfg.dtau_max);
  setters["tau_max"] = num(cfg.tau_max);
  setters["output_cadence"] = integer(cfg.output_cadence);
  setters["fit_tol"] = num(cfg.fit_tol);
  setters["fit_max_iter"] = integer(cfg.fit_max_iter);
  setters["alpha"] = num(cfg.alpha);
  setters["spectrum_count"] = integer(cfg.spectrum_count);
  setters["spectrum_half_width"] = num(cfg.spectrum_half_width);
  setters["spectrum_nodes"] = integer(cfg.spectrum_nodes);
  setters["probe_beta"] = num(cfg.probe_beta);
  setters["probe_horizon"] = num(cfg.probe_horizon);
  setters["wall_budget_s"] = num(cfg.wall_budget_s);

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      fail("bad-config", "line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end())
      fail("bad-config", "line " + std::to_string(line) + ": unknown key '" + key + "'");
    it->second(val, line);
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("bad-config", "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_echo(const SimConfig& cfg) {
  std::ostringstream o;
  auto put = [&o](const char* k, const std::string& v) { o << k << " = " << v << "\n"; };
  put("d", std::to_string(cfg.d));
  put("datum", datum_name(cfg.datum));
  put("epsilon0", format_double(cfg.epsilon0));
  put("varsigma0", format_double(cfg.varsigma0));
  put("kappa0", format_double(cfg.kappa0));
  put("class_constant", format_double(cfg.class_constant));
  put("cylinder_u0", format_double(cfg.cylinder_u0));
  put("sphere_radius", format_double(cfg.sphere_radius));
  put("perturb_shape", shape_name(cfg.perturb_shape));
  put("perturb_amplitude", format_double(cfg.perturb_amplitude));
  put("perturb_seed", std::to_string(cfg.perturb_seed));
  put("domain_half_width", format_double(cfg.domain_half_width));
  put("y_half_width", format_double(cfg.y_half_width));
  put("nodes", std::to_string(cfg.nodes));
  put("grid_stretch", format_double(cfg.grid_stretch));
  put("lambda0", format_double(cfg.lambda0));
  put("u_min_stop_rel", format_double(cfg.u_min_stop_rel));
  put("t_end", format_double(cfg.t_end));
  put("tol_step", format_double(cfg.tol_step));
  put("newton_tol", format_double(cfg.newton_tol));
  put("newton_max_iter", std::to_string(cfg.newton_max_iter));
  put("dt_init", format_double(cfg.dt_init));
  put("dtau_init", format_double(cfg.dtau_init));
  put("dtau_max", format_double(cfg.dtau_max));
  put("tau_max", format_double(cfg.tau_max));
  put("output_cadence", std::to_string(cfg.output_cadence));
  put("fit_tol", format_double(cfg.fit_tol));
  put("fit_max_iter", std::to_string(cfg.fit_max_iter));
  put("alpha", format_double(cfg.alpha));
  put("spectrum_count", std::to_string(cfg.spectrum_count));
  put("spectrum_half_width", format_double(cfg.spectrum_half_width));
  put("spectrum_nodes", std::to_string(cfg.spectrum_nodes));
  put("probe_beta", format_double(cfg.probe_beta));
  put("probe_horizon", format_double(cfg.probe_horizon));
  put("wall_budget_s", format_double(cfg.wall_budget_s));
  return o.str();
}

std::string config_run_id(const SimConfig& cfg) {
  const std::string echo = config_echo(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : echo) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace neckpinch
