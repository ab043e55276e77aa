#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pzlab/dynamics.hpp"
#include "pzlab/errors.hpp"
#include "pzlab/memory_kernel.hpp"
#include "pzlab/params.hpp"

namespace pzlab {

inline constexpr const char* kVersion = "0.1.0";

/// FNV-1a over the raw config bytes; embedded in every output header so
/// identical configs produce bit-identical artifacts.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/// Flat [section] key=value config.  '#' and ';' start comments; one level of
/// sections, no nesting.
struct Config {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::uint64_t hash = 0;
  std::string source;

  bool has(const std::string& sec, const std::string& key) const {
    auto it = sections.find(sec);
    return it != sections.end() && it->second.count(key) > 0;
  }
  std::string get(const std::string& sec, const std::string& key) const {
    auto it = sections.find(sec);
    if (it == sections.end() || !it->second.count(key))
      throw MissingKeyError(sec + "." + key);
    return it->second.at(key);
  }
  std::string get_or(const std::string& sec, const std::string& key,
                     const std::string& dflt) const {
    return has(sec, key) ? get(sec, key) : dflt;
  }
  double num(const std::string& sec, const std::string& key) const {
    const std::string s = get(sec, key);
    try {
      size_t pos = 0;
      double v = std::stod(s, &pos);
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos != s.size()) throw ConfigError("");
      return v;
    } catch (...) {
      throw ConfigError("not a number: " + sec + "." + key + " = '" + s + "'");
    }
  }
  double num_or(const std::string& sec, const std::string& key, double dflt) const {
    return has(sec, key) ? num(sec, key) : dflt;
  }
  bool flag_or(const std::string& sec, const std::string& key, bool dflt) const {
    if (!has(sec, key)) return dflt;
    std::string v = get(sec, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("not a boolean: " + sec + "." + key);
  }
};

namespace cfg_detail {
inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}
}  // namespace cfg_detail

inline Config parse_config_text(const std::string& text) {
  Config cfg;
  cfg.source = text;
  cfg.hash = fnv1a64(text);
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line = line.substr(0, cut);
    line = cfg_detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("bad section header at line " + std::to_string(lineno));
      section = cfg_detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key=value at line " + std::to_string(lineno));
    std::string key = cfg_detail::trim(line.substr(0, eq));
    std::string val = cfg_detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
    cfg.sections[section][key] = val;
  }
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// "log:min:max:count" or "lin:min:max:count"; zero is excluded (lambda in R*).
inline std::vector<double> parse_lambda_range(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.size() != 4) throw ConfigError("lambda range must be kind:min:max:count");
  double lo, hi;
  int count;
  try {
    lo = std::stod(parts[1]);
    hi = std::stod(parts[2]);
    count = std::stoi(parts[3]);
  } catch (...) {
    throw ConfigError("bad number in lambda range: " + spec);
  }
  if (count < 1) throw ConfigError("lambda range needs count >= 1");
  if (hi <= lo) throw ConfigError("reversed or empty lambda range");
  std::vector<double> out;
  if (parts[0] == "log") {
    if (lo <= 0) throw ConfigError("log range needs min > 0");
    for (int i = 0; i < count; ++i) {
      double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      out.push_back(lo * std::pow(hi / lo, t));
    }
  } else if (parts[0] == "lin") {
    for (int i = 0; i < count; ++i) {
      double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      double v = lo + t * (hi - lo);
      if (v == 0.0) throw ConfigError("lambda = 0 excluded (resolvent sweep on R*)");
      out.push_back(v);
    }
  } else {
    throw ConfigError("lambda range kind must be log or lin");
  }
  return out;
}

// ---------------------------------------------------------------------------
// scenario assembly
// ---------------------------------------------------------------------------

/// Named analytic initial-data profile, sampled on the grid.
///   zero | sine:k:amp | cosine:k:amp | halfsine:amp | bump:x0:width:amp
inline Vec sample_profile(const std::string& spec, const SpatialGrid& g) {
  constexpr double pi = 3.14159265358979323846;
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  Vec out = Vec::Zero(g.N + 2);
  auto need = [&](size_t n) {
    if (parts.size() != n) throw ConfigError("bad profile spec: " + spec);
  };
  try {
    if (parts.empty() || parts[0] == "zero") return out;
    if (parts[0] == "sine") {
      need(3);
      double k = std::stod(parts[1]), amp = std::stod(parts[2]);
      for (int i = 0; i <= g.N + 1; ++i) out[i] = amp * std::sin(k * pi * g.node(i) / g.L);
      return out;
    }
    if (parts[0] == "cosine") {
      need(3);
      double k = std::stod(parts[1]), amp = std::stod(parts[2]);
      for (int i = 0; i <= g.N + 1; ++i) out[i] = amp * std::cos(k * pi * g.node(i) / g.L);
      return out;
    }
    if (parts[0] == "halfsine") {
      need(2);
      double amp = std::stod(parts[1]);
      for (int i = 0; i <= g.N + 1; ++i) out[i] = amp * std::sin(pi * g.node(i) / (2 * g.L));
      return out;
    }
    if (parts[0] == "bump") {
      need(4);
      double x0 = std::stod(parts[1]), wd = std::stod(parts[2]), amp = std::stod(parts[3]);
      for (int i = 0; i <= g.N + 1; ++i) {
        double u = (g.node(i) - x0) / wd;
        out[i] = amp * std::exp(-u * u);
      }
      return out;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    throw ConfigError("bad number in profile spec: " + spec);
  }
  throw ConfigError("unknown profile kind: " + spec);
}

/// A fully validated run description: params, kernel, grids, time stepping,
/// initial data and output policy.
struct Scenario {
  PhysicalParams params;
  MemoryKernel kernel;
  SpatialGrid grid;
  MemoryQuadrature quad;
  SimulateOptions sim;
  PrimalState initial;
  bool compat_project = true;
  std::vector<double> sweep_lambdas;
  std::string out_dir = ".";
  bool kappa_snapshots = false;
  std::uint64_t hash = 0;

  Discretization discretization() const {
    return Discretization(params, grid, kernel, quad);
  }
};

inline MemoryKernel kernel_from_config(const Config& cfg) {
  std::string name = cfg.get_or("kernel", "name", "exponential");
  if (name == "exponential")
    return exponential_kernel(cfg.num_or("kernel", "g0", 1.0), cfg.num_or("kernel", "delta", 2.0));
  if (name == "polynomial")
    return polynomial_kernel(cfg.num_or("kernel", "g0", 1.0), cfg.num_or("kernel", "p", 2.0));
  if (name == "file") {
    std::ifstream in(cfg.get("kernel", "file"));
    if (!in) throw ConfigError("cannot read kernel sample file");
    std::vector<std::pair<double, double>> rows;
    double s, v;
    while (in >> s >> v) rows.emplace_back(s, v);
    return sampled_kernel(rows, cfg.num_or("kernel", "d_sigma", 0.0));
  }
  throw ConfigError("unknown kernel name: " + name);
}

inline Scenario scenario_from_config(const Config& cfg) {
  Scenario sc;
  sc.hash = cfg.hash;
  std::map<std::string, double> raw;
  auto it = cfg.sections.find("params");
  if (it == cfg.sections.end()) throw ConfigError("missing [params] section");
  for (auto& [k, v] : it->second) {
    try {
      raw[k] = std::stod(v);
    } catch (...) {
      throw ConfigError("not a number: params." + k);
    }
  }
  auto pv = validate(raw);
  if (!pv.ok()) {
    std::string msg = "invalid params:";
    for (auto& s : pv.violations) msg += " " + s;
    throw ConfigError(msg);
  }
  sc.params = *pv.params;
  sc.kernel = kernel_from_config(cfg);

  int N = static_cast<int>(cfg.num_or("grid", "N", 200));
  sc.grid = SpatialGrid(sc.params.L, N);
  int Ns = static_cast<int>(cfg.num_or("grid", "Ns", 24));
  double Smax = cfg.has("grid", "Smax") && cfg.get("grid", "Smax") != "auto"
                    ? cfg.num("grid", "Smax")
                    : 10.0 / sc.kernel.d_sigma;
  double ratio = cfg.num_or("grid", "ratio", 1.15);
  sc.quad = build_quadrature(sc.kernel, Ns, Smax, ratio);

  sc.sim.dt = cfg.num_or("time", "dt", 1e-3);
  if (!(sc.sim.dt > 0)) throw ConfigError("time.dt must be positive");
  sc.sim.T_end = cfg.num_or("time", "T", 20.0);
  if (sc.sim.T_end < 0) throw ConfigError("time.T must be nonnegative");
  sc.sim.burn_in = cfg.num_or("time", "burn_in", 0.0);
  sc.sim.burn_in_dt = cfg.num_or("time", "burn_in_dt", 5e-3);

  sc.initial = PrimalState(N);
  auto prof = [&](const char* key) {
    return sample_profile(cfg.get_or("init", key, "zero"), sc.grid);
  };
  sc.initial.v = prof("v0");
  sc.initial.v[0] = 0.0;
  sc.initial.vt = prof("v1");
  sc.initial.vt[0] = 0.0;
  sc.initial.phi = prof("phi0");
  sc.initial.phit = prof("phi1");
  sc.initial.theta = prof("theta0");
  sc.initial.theta[0] = sc.initial.theta[N + 1] = 0.0;
  sc.initial.thetat = prof("theta1");
  sc.initial.thetat[0] = sc.initial.thetat[N + 1] = 0.0;
  sc.initial.eta = prof("eta0");
  sc.initial.etat = prof("eta1");
  sc.initial.w = prof("w0");
  sc.initial.w[0] = sc.initial.w[N + 1] = 0.0;
  sc.compat_project = cfg.flag_or("init", "compat", true);

  if (cfg.has("sweep", "range")) sc.sweep_lambdas = parse_lambda_range(cfg.get("sweep", "range"));
  sc.out_dir = cfg.get_or("output", "dir", ".");
  sc.sim.snapshot_every = static_cast<int>(cfg.num_or("output", "snapshot_every", 0));
  sc.kappa_snapshots = cfg.flag_or("output", "kappa_snapshots", false);
  sc.sim.history_snapshots = sc.kappa_snapshots;
  return sc;
}

}  // namespace pzlab
