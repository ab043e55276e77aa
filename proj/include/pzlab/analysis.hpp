#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "pzlab/errors.hpp"
#include "pzlab/generator.hpp"

namespace pzlab {

enum class DecayKind { Exponential, Polynomial };

/// Least-squares decay fit on an energy trajectory.  Exponential fits the
/// line on (t, log E); polynomial on (log t, log E).  The energy-rate is
/// -slope; the state-norm rate is half of it.
struct DecayFit {
  DecayKind kind = DecayKind::Exponential;
  double rate = 0.0;        // energy rate (exponential) or |exponent| (polynomial)
  double exponent = 0.0;    // signed log-log slope (polynomial)
  double state_rate = 0.0;  // rate/2: decay rate of the state norm
  double prefactor = 0.0;
  double t0 = 0.0, t1 = 0.0;
  double r2 = 0.0;
  std::uint64_t config_hash = 0;
};

namespace fit_detail {
inline DecayFit line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  DecayFit f;
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double det = n * sxx - sx * sx;
  double slope = (n * sxy - sx * sy) / det;
  double icept = (sy * sxx - sx * sxy) / det;
  double ss_res = 0, ss_tot = 0, ym = sy / n;
  for (size_t i = 0; i < n; ++i) {
    double e = y[i] - (slope * x[i] + icept);
    ss_res += e * e;
    ss_tot += (y[i] - ym) * (y[i] - ym);
  }
  f.exponent = slope;
  f.prefactor = std::exp(icept);
  f.r2 = ss_tot > 1e-300 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 0.0;
  return f;
}
}  // namespace fit_detail

inline DecayFit fit_exponential(const std::vector<double>& times, const std::vector<double>& E,
                                double t0, double t1) {
  if (times.size() != E.size()) throw SizeMismatchError("fit_exponential");
  std::vector<double> x, y;
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t0 || times[i] > t1) continue;
    if (!(E[i] > 0)) throw Error("fit_exponential: nonpositive energy in window");
    x.push_back(times[i]);
    y.push_back(std::log(E[i]));
  }
  if (x.size() < 2) throw Error("fit_exponential: empty window");
  DecayFit f = fit_detail::line_fit(x, y);
  f.kind = DecayKind::Exponential;
  f.rate = -f.exponent;
  f.state_rate = 0.5 * f.rate;
  f.t0 = t0;
  f.t1 = t1;
  return f;
}

inline DecayFit fit_polynomial(const std::vector<double>& times, const std::vector<double>& E,
                               double t0, double t1) {
  if (times.size() != E.size()) throw SizeMismatchError("fit_polynomial");
  if (!(t0 > 0)) throw OutOfRangeError("fit window must have t0 > 0");
  std::vector<double> x, y;
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t0 || times[i] > t1 || times[i] <= 0) continue;
    if (!(E[i] > 0)) throw Error("fit_polynomial: nonpositive energy in window");
    x.push_back(std::log(times[i]));
    y.push_back(std::log(E[i]));
  }
  if (x.size() < 2) throw Error("fit_polynomial: empty window");
  DecayFit f = fit_detail::line_fit(x, y);
  f.kind = DecayKind::Polynomial;
  f.rate = std::abs(f.exponent);
  f.state_rate = 0.5 * f.rate;
  f.t0 = t0;
  f.t1 = t1;
  return f;
}

/// Instantaneous log-log slope t * dlnE/dt at t_eval, from a local
/// exponential fit near the trajectory end (comparison diagnostic).
inline double effective_loglog_slope(const std::vector<double>& times,
                                     const std::vector<double>& E, double t_eval) {
  DecayFit f = fit_exponential(times, E, 0.75 * t_eval, t_eval);
  return -f.rate * t_eval;
}

struct ResolventSample {
  double lambda = 0.0;
  double norm = 0.0;    // ||(i lambda - A)^-1|| in the energy norm
  double scaled = 0.0;  // norm / lambda^2
  bool singular = false;
  int iterations = 0;
};

/// Per-frequency resolvent-norm estimates, sorted by lambda.  Singular
/// factorizations are flagged and the sweep continues.
inline std::vector<ResolventSample> resolvent_sweep(const GeneratorMatrix& gen,
                                                    std::vector<double> lambdas,
                                                    std::uint64_t seed = 12345,
                                                    int threads = 1) {
  std::sort(lambdas.begin(), lambdas.end());
  std::vector<ResolventSample> out(lambdas.size());
  auto work = [&](size_t i) {
    ResolventSample s;
    s.lambda = lambdas[i];
    try {
      auto r = resolvent_norm(gen, lambdas[i], seed + i);
      s.norm = r.norm;
      s.iterations = r.iterations;
    } catch (const SolverSingularError&) {
      s.singular = true;
    }
    s.scaled = s.norm / (lambdas[i] * lambdas[i]);
    out[i] = s;
  };
  if (threads <= 1) {
    for (size_t i = 0; i < lambdas.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (size_t i = next++; i < lambdas.size(); i = next++) work(i);
      });
    for (auto& th : pool) th.join();
  }
  return out;
}

// ---------------------------------------------------------------------------
// certification
// ---------------------------------------------------------------------------

struct CriterionResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

struct StabilityVerdict {
  std::string claim;       // Exponential | Polynomial | OutsideProvenRegimes
  std::string theorem;     // which stability statement the regime matches
  RegimeTag regime{};
  std::vector<CriterionResult> criteria;
  std::uint64_t config_hash = 0;
  bool pass() const {
    for (const auto& c : criteria)
      if (!c.pass) return false;
    return true;
  }
};

/// Decade-based boundedness proxy: max over the top decade of lambda vs the
/// decade below it.
inline double decade_ratio(const std::vector<ResolventSample>& sweep, bool scaled) {
  double lmax = 0;
  for (const auto& s : sweep) lmax = std::max(lmax, s.lambda);
  double top = 0, prev = 0;
  for (const auto& s : sweep) {
    if (s.singular) continue;
    double val = scaled ? s.scaled : s.norm;
    if (s.lambda > lmax / 10.0)
      top = std::max(top, val);
    else if (s.lambda > lmax / 100.0)
      prev = std::max(prev, val);
  }
  return prev > 0 ? top / prev : 0.0;
}

/// Is the scaled (norm / lambda^2) profile nonincreasing over the top decade?
inline bool scaled_nonincreasing_top_decade(const std::vector<ResolventSample>& sweep) {
  double lmax = 0;
  for (const auto& s : sweep) lmax = std::max(lmax, s.lambda);
  double prevv = -1;
  bool first = true;
  for (const auto& s : sweep) {
    if (s.singular || s.lambda <= lmax / 10.0) continue;
    if (!first && s.scaled > prevv * (1 + 1e-9)) return false;
    prevv = s.scaled;
    first = false;
  }
  return true;
}

/// Cross-checks the stability statement matching the regime against the
/// measured sweep and trajectory fits.  Pure function of its inputs; refuses
/// mismatched config hashes.
inline StabilityVerdict certify(const PhysicalParams& p,
                                const std::vector<ResolventSample>& sweep,
                                std::uint64_t sweep_hash, const DecayFit& exp_fit,
                                const DecayFit& poly_fit, const DecayFit* comparison_exp,
                                double comparison_t_end) {
  if (sweep_hash != exp_fit.config_hash || sweep_hash != poly_fit.config_hash)
    throw InconsistentInputsError("sweep and fits come from different configs");
  StabilityVerdict v;
  v.regime = classify(p);
  v.config_hash = sweep_hash;
  const bool gp = v.regime.thermal == ThermalLaw::GurtinPipkin;
  const bool damped_both = v.regime.damping == DampingCase::BothDamped;
  if (gp && !damped_both) {
    v.claim = "OutsideProvenRegimes";
    v.theorem = "none: Gurtin-Pipkin with undamped electric components is not covered";
    return v;
  }
  if (!gp) {
    v.claim = "Exponential";
    switch (v.regime.damping) {
      case DampingCase::BothDamped: v.theorem = "exponential stability, both electric dampings"; break;
      case DampingCase::OnlyZ: v.theorem = "exponential stability, z-damping only"; break;
      case DampingCase::OnlyX: v.theorem = "exponential stability, x-damping only"; break;
      case DampingCase::Undamped: v.theorem = "exponential stability, thermal damping alone"; break;
    }
    if (v.regime.thermal == ThermalLaw::Fourier) v.theorem += " (Fourier limit)";
    CriterionResult c1{"sweep bounded (top decade <= 1.1x prev)", decade_ratio(sweep, false),
                       1.1, false, ""};
    c1.pass = c1.measured <= c1.threshold && c1.measured > 0;
    CriterionResult c2{"exp fit rate > 0", exp_fit.rate, 0.0, exp_fit.rate > 0, ""};
    CriterionResult c3{"exp fit R^2 >= 0.99", exp_fit.r2, 0.99, exp_fit.r2 >= 0.99, ""};
    v.criteria = {c1, c2, c3};
    return v;
  }
  v.claim = "Polynomial";
  v.theorem = "polynomial stability t^-1 (energy), Gurtin-Pipkin with damped electric components";
  CriterionResult c1{"scaled norm/lambda^2 nonincreasing (top decade)",
                     scaled_nonincreasing_top_decade(sweep) ? 1.0 : 0.0, 1.0, false, ""};
  c1.pass = c1.measured >= 1.0;
  CriterionResult c2{"log-log energy slope <= -0.8", poly_fit.exponent, -0.8,
                     poly_fit.exponent <= -0.8, "target -1, asymptotic"};
  v.criteria = {c1, c2};
  if (comparison_exp) {
    double eff = -comparison_exp->rate * comparison_t_end;
    CriterionResult c3{"slope shallower than comparison exponential at t_end",
                       poly_fit.exponent, eff, poly_fit.exponent > eff,
                       "comparison: effective log-log slope of the exponential run"};
    v.criteria.push_back(c3);
  }
  return v;
}

}  // namespace pzlab
