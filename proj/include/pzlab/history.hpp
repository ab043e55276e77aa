#pragma once

#include <Eigen/Dense>

#include "pzlab/grid.hpp"
#include "pzlab/memory_kernel.hpp"
#include "pzlab/state.hpp"

namespace pzlab {

/// One implicit upwind step of the age transport  kappa_t + kappa_s = w.
/// Information flows from s=0 (inflow value 0) toward larger ages; outflow at
/// S_max needs no condition.  Unconditionally stable, so dt and the age grid
/// are decoupled.
inline HistoryField transport_step(const HistoryField& kappa, const Vec& w_interior, double dt,
                                   const MemoryQuadrature& quad) {
  if (!(dt > 0)) throw NonPositiveDtError();
  const int N = kappa.N();
  const int M = kappa.ages();
  if (w_interior.size() != N) throw SizeMismatchError("transport_step: w");
  if (M != quad.stored_ages()) throw SizeMismatchError("transport_step: ages");
  HistoryField out(N, M);
  for (int i = 0; i < N; ++i) {
    double upstream = 0.0;  // kappa(., s=0)
    for (int j = 1; j <= M; ++j) {
      double ds = quad.ds(j);
      double val = (kappa.values(i, j) / dt + w_interior[i] + upstream / ds) /
                   (1.0 / dt + 1.0 / ds);
      out.values(i, j) = val;
      upstream = val;
    }
  }
  return out;
}

/// Memory flux  sum_j q_j sigma(s_j) * d2 kappa(., s_j)  on interior nodes.
inline Vec memory_flux(const HistoryField& kappa, const MemoryKernel& kernel,
                       const MemoryQuadrature& quad, const SpatialGrid& grid) {
  const int N = grid.N;
  if (kappa.N() != N || kappa.ages() != quad.stored_ages())
    throw SizeMismatchError("memory_flux");
  Vec flux = Vec::Zero(N);
  const double h2 = grid.h * grid.h;
  for (int j = 1; j < quad.count(); ++j) {
    double wj = quad.weights[j] * kernel.sigma(quad.nodes[j]);
    if (wj == 0.0) continue;
    for (int i = 0; i < N; ++i) {
      double km = (i > 0) ? kappa.values(i - 1, j) : 0.0;
      double kp = (i < N - 1) ? kappa.values(i + 1, j) : 0.0;
      flux[i] += wj * (km - 2.0 * kappa.values(i, j) + kp) / h2;
    }
  }
  return flux;
}

/// Memory part of the energy: (m d / 2) sum_j q_j sigma_j ||kappa_x(., s_j)||^2.
inline double history_energy(const HistoryField& kappa, const MemoryKernel& kernel,
                             const MemoryQuadrature& quad, const SpatialGrid& grid,
                             const PhysicalParams& p) {
  double acc = 0.0;
  for (int j = 1; j < quad.count(); ++j) {
    double wj = quad.weights[j] * kernel.sigma(quad.nodes[j]);
    Vec col = pad_full(grid, kappa.values.col(j), BcTag::DirichletBothAges);
    acc += wj * stiffness_bilinear(grid, col, col);
  }
  return 0.5 * p.m * p.d * acc;
}

/// sigma'-weighted dissipation functional  m d sum_j q_j sigma'(s_j) ||kappa_x||^2.
/// Nonpositive whenever sigma is nonincreasing on the nodes.
inline double history_dissipation(const HistoryField& kappa, const MemoryKernel& kernel,
                                  const MemoryQuadrature& quad, const SpatialGrid& grid,
                                  const PhysicalParams& p) {
  double acc = 0.0;
  for (int j = 1; j < quad.count(); ++j) {
    double wj = quad.weights[j] * kernel.prime(quad.nodes[j]);
    Vec col = pad_full(grid, kappa.values.col(j), BcTag::DirichletBothAges);
    acc += wj * stiffness_bilinear(grid, col, col);
  }
  return p.m * p.d * acc;
}

}  // namespace pzlab
