#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "pzlab/errors.hpp"

namespace pzlab {

/// Memory kernel sigma(s) with its primitive g(s) = int_s^inf sigma and the
/// Dafermos rate d_sigma claimed for it.  sigma_prime is analytic when the
/// kernel comes from a closed form; otherwise a centered finite-difference
/// proxy is substituted so the admissibility check never silently assumes
/// smoothness.
struct MemoryKernel {
  std::string name;
  std::function<double(double)> sigma;
  std::function<double(double)> sigma_prime;  // may be empty -> FD proxy
  std::function<double(double)> g;            // may be empty -> tail estimate
  double g0 = 0.0;       // total mass  int_0^inf sigma
  double sigma0 = 0.0;   // lim_{s->0+} sigma(s)
  double d_sigma = 0.0;  // claimed Dafermos rate

  bool has_analytic_prime() const { return static_cast<bool>(sigma_prime); }

  double prime(double s, double ds = 1e-6) const {
    if (sigma_prime) return sigma_prime(s);
    double sl = std::max(s - ds, 0.0);
    return (sigma(s + ds) - sigma(sl)) / (s + ds - sl);
  }

  /// Tail mass beyond S. Under the Dafermos condition sigma decays at least
  /// exponentially, so sigma(S)/d_sigma is a rigorous upper bound; exact for
  /// the exponential kernel.
  double tail_bound(double S) const {
    if (g) return g(S);
    return d_sigma > 0 ? sigma(S) / d_sigma : 0.0;
  }
};

inline MemoryKernel exponential_kernel(double g0, double delta) {
  if (!(g0 > 0)) throw NonPositiveError("g0");
  if (!(delta > 0)) throw NonPositiveError("delta");
  MemoryKernel k;
  k.name = "exponential";
  k.sigma = [=](double s) { return g0 * delta * std::exp(-delta * s); };
  k.sigma_prime = [=](double s) { return -g0 * delta * delta * std::exp(-delta * s); };
  k.g = [=](double s) { return g0 * std::exp(-delta * s); };
  k.g0 = g0;
  k.sigma0 = g0 * delta;
  k.d_sigma = delta;
  return k;
}

/// sigma(s) = g0 (p-1) (1+s)^{-p}, p > 1.  Integrable with mass g0 but no
/// uniform Dafermos rate (sigma'/sigma -> 0); the claimed rate is the value
/// at s=0, so the admissibility check fails exactly on the Dafermos clause.
inline MemoryKernel polynomial_kernel(double g0, double p) {
  if (!(g0 > 0)) throw NonPositiveError("g0");
  if (!(p > 1)) throw OutOfRangeError("p");
  MemoryKernel k;
  k.name = "polynomial";
  k.sigma = [=](double s) { return g0 * (p - 1) * std::pow(1.0 + s, -p); };
  k.sigma_prime = [=](double s) { return -g0 * (p - 1) * p * std::pow(1.0 + s, -p - 1); };
  k.g = [=](double s) { return g0 * std::pow(1.0 + s, 1.0 - p); };
  k.g0 = g0;
  k.sigma0 = g0 * (p - 1);
  k.d_sigma = p;  // -sigma'/sigma at s=0
  return k;
}

inline MemoryKernel zero_kernel() {
  MemoryKernel k;
  k.name = "zero";
  k.sigma = [](double) { return 0.0; };
  k.sigma_prime = [](double) { return 0.0; };
  k.g = [](double) { return 0.0; };
  k.g0 = 0.0;
  k.sigma0 = 0.0;
  k.d_sigma = 1.0;
  return k;
}

/// Kernel from (s, sigma) samples, piecewise-linear; sigma' left to the FD
/// proxy.  d_sigma is estimated from the steepest admissible rate over the
/// sampled range unless the caller overrides it.
inline MemoryKernel sampled_kernel(std::vector<std::pair<double, double>> samples,
                                   double d_sigma_claim = 0.0) {
  if (samples.size() < 2) throw SizeMismatchError("sampled kernel needs >= 2 rows");
  std::sort(samples.begin(), samples.end());
  auto eval = [samples](double s) {
    if (s <= samples.front().first) return samples.front().second;
    if (s >= samples.back().first) return samples.back().second;
    auto hi = std::upper_bound(samples.begin(), samples.end(), std::make_pair(s, 1e300));
    auto lo = hi - 1;
    double t = (s - lo->first) / (hi->first - lo->first);
    return (1 - t) * lo->second + t * hi->second;
  };
  MemoryKernel k;
  k.name = "sampled";
  k.sigma = eval;
  k.sigma0 = samples.front().second;
  double mass = 0.0;
  for (size_t i = 1; i < samples.size(); ++i)
    mass += 0.5 * (samples[i].second + samples[i - 1].second) *
            (samples[i].first - samples[i - 1].first);
  k.g0 = mass;
  if (d_sigma_claim > 0) {
    k.d_sigma = d_sigma_claim;
  } else {
    double rate = 1e300;
    for (size_t i = 1; i < samples.size(); ++i) {
      double sp = (samples[i].second - samples[i - 1].second) /
                  (samples[i].first - samples[i - 1].first);
      double sm = 0.5 * (samples[i].second + samples[i - 1].second);
      if (sm > 0) rate = std::min(rate, -sp / sm);
    }
    k.d_sigma = (rate == 1e300 || rate <= 0) ? 1.0 : rate;
  }
  return k;
}

/// Quadrature of the truncated memory axis [0, S_max]:  int_0^inf f ds
/// ~ sum_j q_j f(s_j) + (declared tail).  Geometrically graded composite
/// trapezoid, nodes clustered near s=0; node 0 sits at s=0.
///
/// The history state stores ages j >= 1 only (kappa(.,0) = 0 identically);
/// the constant interior ratio q_j/ds_j = (1+r)/2 of the trapezoid weights is
/// what makes the age-transport dissipation form provably nonnegative for
/// every nonincreasing sigma.
struct MemoryQuadrature {
  double S_max = 0.0;
  std::vector<double> nodes;    // s_0 = 0 < s_1 < ... < s_{Ns-1} = S_max
  std::vector<double> weights;  // trapezoid weights, all positive
  double tail_bound = 0.0;      // bound on int_{S_max}^inf sigma
  double mass_tol = 0.0;        // declared quadrature tolerance for sigma-mass

  int count() const { return static_cast<int>(nodes.size()); }
  int stored_ages() const { return count() - 1; }  // kappa columns (s > 0)
  double ds(int j) const { return nodes[j] - nodes[j - 1]; }

  double mass(const MemoryKernel& k) const {
    double acc = 0.0;
    for (int j = 0; j < count(); ++j) acc += weights[j] * k.sigma(nodes[j]);
    return acc;
  }
  double first_moment(const MemoryKernel& k) const {
    double acc = 0.0;
    for (int j = 0; j < count(); ++j) acc += weights[j] * nodes[j] * k.sigma(nodes[j]);
    return acc;
  }
};

inline MemoryQuadrature build_quadrature(const MemoryKernel& kernel, int N_s, double S_max,
                                         double ratio = 1.15) {
  if (N_s < 2) throw OutOfRangeError("N_s");
  if (!(S_max > 0)) throw NonPositiveError("S_max");
  MemoryQuadrature q;
  q.S_max = S_max;
  const int M = N_s - 1;  // intervals
  std::vector<double> ds(M);
  if (std::abs(ratio - 1.0) < 1e-14) {
    std::fill(ds.begin(), ds.end(), S_max / M);
  } else {
    double d1 = S_max * (ratio - 1.0) / (std::pow(ratio, M) - 1.0);
    for (int j = 0; j < M; ++j) ds[j] = d1 * std::pow(ratio, j);
  }
  q.nodes.resize(N_s);
  q.nodes[0] = 0.0;
  for (int j = 1; j < N_s; ++j) q.nodes[j] = q.nodes[j - 1] + ds[j - 1];
  q.nodes[N_s - 1] = S_max;  // kill accumulated round-off
  q.weights.assign(N_s, 0.0);
  for (int j = 0; j < M; ++j) {
    q.weights[j] += 0.5 * ds[j];
    q.weights[j + 1] += 0.5 * ds[j];
  }
  q.tail_bound = kernel.tail_bound(S_max);
  // second-order error model: sum ds^3 |sigma''| / 12 with sigma'' ~ d_sigma^2 sigma
  double tol = 0.0;
  for (int j = 0; j < M; ++j) {
    double smid = 0.5 * (q.nodes[j] + q.nodes[j + 1]);
    tol += std::pow(ds[j], 3) / 12.0 * kernel.d_sigma * kernel.d_sigma *
           std::abs(kernel.sigma(smid));
  }
  q.mass_tol = 2.0 * tol + 1e-12;
  return q;
}

struct HypothesisReport {
  bool mass_ok = false;
  bool monotone_ok = false;
  bool dafermos_ok = false;
  double mass = 0.0;           // quadrature mass + tail
  double mass_margin = 0.0;    // |mass - g0| - (mass_tol + tail slack)
  double monotone_margin = 0;  // max increase sigma(s_{j+1}) - sigma(s_j)
  double dafermos_margin = 0;  // max over nodes of sigma' + d_sigma*sigma (<=0 wanted)
  bool pass() const { return mass_ok && monotone_ok && dafermos_ok; }
};

/// Evaluates hypothesis-(H)-style admissibility on the probe's nodes:
/// positive integrable mass, nonincreasing sigma, and the Dafermos bound
/// sigma' <= -d_sigma * sigma.  Failures are report entries, never throws.
inline HypothesisReport check_hypothesis_H(const MemoryKernel& kernel,
                                           const MemoryQuadrature& probe) {
  HypothesisReport r;
  r.mass = probe.mass(kernel) + kernel.tail_bound(probe.S_max);
  double scale = std::max(std::abs(kernel.g0), 1e-30);
  r.mass_margin = std::abs(r.mass - kernel.g0) - (probe.mass_tol + 1e-9 * scale);
  r.mass_ok = kernel.g0 > 0 && r.mass > 0 && r.mass_margin <= 0;

  r.monotone_margin = -1e300;
  for (int j = 0; j + 1 < probe.count(); ++j) {
    double inc = kernel.sigma(probe.nodes[j + 1]) - kernel.sigma(probe.nodes[j]);
    r.monotone_margin = std::max(r.monotone_margin, inc);
  }
  r.monotone_ok = r.monotone_margin <= 1e-12 * std::max(kernel.sigma0, 1.0);

  r.dafermos_margin = -1e300;
  for (int j = 0; j < probe.count(); ++j) {
    double s = probe.nodes[j];
    double viol = kernel.prime(s) + kernel.d_sigma * kernel.sigma(s);
    r.dafermos_margin = std::max(r.dafermos_margin, viol);
  }
  double dscale = std::max(kernel.d_sigma * std::max(kernel.sigma0, 1e-30), 1e-30);
  r.dafermos_ok = r.dafermos_margin <= 1e-6 * dscale;
  return r;
}

}  // namespace pzlab
