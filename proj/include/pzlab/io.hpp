#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pzlab/analysis.hpp"
#include "pzlab/config.hpp"
#include "pzlab/dynamics.hpp"

namespace pzlab {

using json = nlohmann::json;

inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string file_header(std::uint64_t hash) {
  return std::string("# pzlab ") + kVersion + " config=" + hash_hex(hash) + "\n";
}

/// Trajectory CSV: t,Ek,Ep,EB,Eelec,Em,E,D,residual (comma separated, '.'
/// decimal, '#' comments, LF endings).  Row n carries the step residual of
/// the step that produced it (0 for the initial row).
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr, std::uint64_t hash) {
  os << file_header(hash);
  os << "t,Ek,Ep,EB,Eelec,Em,E,D,residual\n";
  for (size_t i = 0; i < tr.times.size(); ++i) {
    const auto& e = tr.energy[i];
    double r = i == 0 ? 0.0 : tr.residual[i - 1];
    os << fmt_num(tr.times[i]) << ',' << fmt_num(e.Ek) << ',' << fmt_num(e.Ep) << ','
       << fmt_num(e.EB) << ',' << fmt_num(e.Eelec) << ',' << fmt_num(e.Em) << ','
       << fmt_num(e.E) << ',' << fmt_num(e.D) << ',' << fmt_num(r) << '\n';
  }
}

inline void write_sweep_csv(std::ostream& os, const std::vector<ResolventSample>& sweep,
                            std::uint64_t hash) {
  os << file_header(hash);
  os << "lambda,norm,scaled,singular\n";
  for (const auto& s : sweep)
    os << fmt_num(s.lambda) << ',' << fmt_num(s.norm) << ',' << fmt_num(s.scaled) << ','
       << (s.singular ? 1 : 0) << '\n';
}

inline json fit_to_json(const DecayFit& f) {
  return json{{"kind", f.kind == DecayKind::Exponential ? "Exponential" : "Polynomial"},
              {"energy_rate", f.rate},
              {"state_rate", f.state_rate},
              {"loglog_slope", f.exponent},
              {"prefactor", f.prefactor},
              {"window", {f.t0, f.t1}},
              {"r2", f.r2}};
}

inline json verdict_to_json(const StabilityVerdict& v) {
  json crit = json::array();
  for (const auto& c : v.criteria)
    crit.push_back(json{{"name", c.name},
                        {"measured", c.measured},
                        {"threshold", c.threshold},
                        {"pass", c.pass},
                        {"note", c.note}});
  return json{{"tool", std::string("pzlab ") + kVersion},
              {"claim", v.claim},
              {"statement", v.theorem},
              {"regime",
               {{"thermal", to_string(v.regime.thermal)},
                {"damping", to_string(v.regime.damping)}}},
              {"config", hash_hex(v.config_hash)},
              {"criteria", crit},
              {"pass", v.pass()}};
}

inline json lemma_report_to_json(const LemmaReport& rep, const LemmaConstants& c) {
  json entries = json::array();
  for (const auto& e : rep.entries)
    entries.push_back(json{{"name", e.name},
                           {"applicable", e.applicable},
                           {"lhs", e.lhs},
                           {"bound", e.bound},
                           {"margin", e.margin},
                           {"ok", e.ok}});
  return json{{"lambda", rep.lambda},
              {"normU", rep.normU},
              {"normF", rep.normF},
              {"compat_residual", rep.compat_residual},
              {"C_P", c.C_P},
              {"S", {c.S1, c.S2, c.S3, c.S4, c.S5, c.S6, c.S7}},
              {"S7_degenerate", c.S7_degenerate},
              {"S7_structural_tol", c.S7_structural_tol},
              {"entries", entries}};
}

inline json hypothesis_to_json(const HypothesisReport& r) {
  return json{{"mass_ok", r.mass_ok},
              {"monotone_ok", r.monotone_ok},
              {"dafermos_ok", r.dafermos_ok},
              {"mass", r.mass},
              {"mass_margin", r.mass_margin},
              {"monotone_margin", r.monotone_margin},
              {"dafermos_margin", r.dafermos_margin},
              {"pass", r.pass()}};
}

/// One field snapshot per CSV: x,value rows.
inline void write_field_csv(std::ostream& os, const SpatialGrid& g, const Vec& field,
                            std::uint64_t hash) {
  os << file_header(hash);
  os << "x,value\n";
  for (int i = 0; i < field.size(); ++i)
    os << fmt_num(g.node(i)) << ',' << fmt_num(field[i]) << '\n';
}

/// kappa(x, s) grid dump: rows x, columns ages (header lists s values).
inline void write_history_csv(std::ostream& os, const SpatialGrid& g, const MemoryQuadrature& q,
                              const HistoryField& k, std::uint64_t hash) {
  os << file_header(hash);
  os << "x";
  for (int j = 0; j < q.count(); ++j) os << ",s=" << fmt_num(q.nodes[j]);
  os << '\n';
  for (int i = 0; i < k.N(); ++i) {
    os << fmt_num(g.node(i + 1));
    for (int j = 0; j < static_cast<int>(k.values.cols()); ++j)
      os << ',' << fmt_num(k.values(i, j));
    os << '\n';
  }
}

struct ConvergenceRow {
  int N = 0;
  double err = 0.0;
  double order = 0.0;  // vs previous row; 0 for the first
};

inline void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows,
                                  std::uint64_t hash) {
  os << file_header(hash);
  os << "N,l2_error,observed_order\n";
  for (const auto& r : rows)
    os << r.N << ',' << fmt_num(r.err) << ',' << fmt_num(r.order) << '\n';
}

}  // namespace pzlab
