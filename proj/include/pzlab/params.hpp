#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pzlab/errors.hpp"

namespace pzlab {

/// Material and damping constants of the coupled beam/thermal system.
///
/// All quantities are kept in the paper's notation.  Derived combinations
/// (alpha1, alpha2, k1) are computed on demand, never stored.
struct PhysicalParams {
  double rho = 1.0;    // mass density (> 0)
  double alpha = 1.0;  // elastic stiffness (> 0)
  double gamma = 1.0;  // piezoelectric coupling (> 0)
  double mu = 1.0;     // magnetic permeability (> 0)
  double xi = 1.0;     // permittivity ratio eps1*h^2/(12*eps3) (> 0)
  double eps3 = 1.0;   // permittivity in z (> 0)
  double a = 1.0;      // stretching/thermal coupling (> 0)
  double b = 0.0;      // x-direction electric damping (>= 0)
  double c = 0.0;      // z-direction electric damping (>= 0)
  double d = 1.0;      // thermal diffusivity (> 0)
  double m = 0.5;      // memory mixing, 0 Fourier .. 1 Gurtin-Pipkin
  double L = 1.0;      // beam length (> 0)

  double alpha1() const { return alpha + gamma * gamma / eps3; }
  double alpha2() const { return alpha + gamma / eps3; }
  double k1() const { return gamma / eps3; }
};

enum class ThermalLaw { Fourier, ColemanGurtin, GurtinPipkin };

enum class DampingCase { BothDamped, OnlyZ, OnlyX, Undamped };

struct RegimeTag {
  ThermalLaw thermal;
  DampingCase damping;
  bool operator==(const RegimeTag&) const = default;
};

inline const char* to_string(ThermalLaw t) {
  switch (t) {
    case ThermalLaw::Fourier: return "Fourier";
    case ThermalLaw::ColemanGurtin: return "ColemanGurtin";
    case ThermalLaw::GurtinPipkin: return "GurtinPipkin";
  }
  return "?";
}

inline const char* to_string(DampingCase d) {
  switch (d) {
    case DampingCase::BothDamped: return "BothDamped";
    case DampingCase::OnlyZ: return "OnlyZ";
    case DampingCase::OnlyX: return "OnlyX";
    case DampingCase::Undamped: return "Undamped";
  }
  return "?";
}

/// Stationary-case index of Proposition-style damping patterns:
/// 1: b=0,c=0   2: b=0,c!=0   3: b!=0,c=0   4: b!=0,c!=0.
/// Comparisons are exact: a config selects an undamped case only with literal 0.
inline int damping_case_index(const PhysicalParams& p) {
  if (p.b == 0.0 && p.c == 0.0) return 1;
  if (p.b == 0.0) return 2;
  if (p.c == 0.0) return 3;
  return 4;
}

inline RegimeTag classify(const PhysicalParams& p) {
  RegimeTag tag{};
  if (p.m == 0.0)
    tag.thermal = ThermalLaw::Fourier;
  else if (p.m == 1.0)
    tag.thermal = ThermalLaw::GurtinPipkin;
  else
    tag.thermal = ThermalLaw::ColemanGurtin;
  switch (damping_case_index(p)) {
    case 1: tag.damping = DampingCase::Undamped; break;
    case 2: tag.damping = DampingCase::OnlyZ; break;
    case 3: tag.damping = DampingCase::OnlyX; break;
    default: tag.damping = DampingCase::BothDamped; break;
  }
  return tag;
}

struct ParamValidation {
  std::optional<PhysicalParams> params;
  std::vector<std::string> violations;
  bool ok() const { return params.has_value(); }
};

/// Validates a raw key/value map into PhysicalParams.
/// Collects every violated constraint instead of stopping at the first.
inline ParamValidation validate(const std::map<std::string, double>& raw) {
  ParamValidation out;
  PhysicalParams p;
  const std::vector<std::pair<std::string, double*>> keys = {
      {"rho", &p.rho}, {"alpha", &p.alpha}, {"gamma", &p.gamma}, {"mu", &p.mu},
      {"xi", &p.xi},   {"eps3", &p.eps3},   {"a", &p.a},         {"b", &p.b},
      {"c", &p.c},     {"d", &p.d},         {"m", &p.m},         {"L", &p.L}};
  for (auto& [key, slot] : keys) {
    auto it = raw.find(key);
    if (it == raw.end()) {
      out.violations.push_back("MissingKey(" + key + ")");
      continue;
    }
    *slot = it->second;
  }
  for (const char* k : {"rho", "alpha", "gamma", "mu", "xi", "eps3", "a", "d", "L"}) {
    auto it = raw.find(k);
    if (it != raw.end() && !(it->second > 0.0))
      out.violations.push_back(std::string("NonPositive(") + k + ")");
  }
  for (const char* k : {"b", "c"}) {
    auto it = raw.find(k);
    if (it != raw.end() && it->second < 0.0)
      out.violations.push_back(std::string("NonPositive(") + k + ")");
  }
  if (auto it = raw.find("m"); it != raw.end() && (it->second < 0.0 || it->second > 1.0))
    out.violations.push_back("OutOfRange(m)");
  if (out.violations.empty()) out.params = p;
  return out;
}

/// Throwing variant used by code paths that require valid params.
inline PhysicalParams validate_or_throw(const std::map<std::string, double>& raw) {
  auto r = validate(raw);
  if (!r.ok()) {
    std::string msg;
    for (const auto& v : r.violations) msg += (msg.empty() ? "" : ", ") + v;
    throw OutOfRangeError(msg);
  }
  return *r.params;
}

inline std::map<std::string, double> to_map(const PhysicalParams& p) {
  return {{"rho", p.rho}, {"alpha", p.alpha}, {"gamma", p.gamma}, {"mu", p.mu},
          {"xi", p.xi},   {"eps3", p.eps3},   {"a", p.a},         {"b", p.b},
          {"c", p.c},     {"d", p.d},         {"m", p.m},         {"L", p.L}};
}

}  // namespace pzlab
