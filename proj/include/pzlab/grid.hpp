#pragma once

#include <Eigen/Dense>

#include "pzlab/errors.hpp"
#include "pzlab/params.hpp"

namespace pzlab {

using Vec = Eigen::VectorXd;

/// Uniform grid on [0,L]: nodes x_i = i h, i = 0..N+1, h = L/(N+1).
/// N counts interior nodes.
struct SpatialGrid {
  double L = 1.0;
  int N = 0;
  double h = 0.0;

  SpatialGrid() = default;
  SpatialGrid(double L_, int N_) : L(L_), N(N_), h(L_ / (N_ + 1)) {
    if (!(L > 0)) throw NonPositiveError("L");
    if (N < 2) throw OutOfRangeError("N");
  }
  double node(int i) const { return i * h; }
  int total_nodes() const { return N + 2; }
  Vec nodes() const {
    Vec x(N + 2);
    for (int i = 0; i <= N + 1; ++i) x[i] = node(i);
    return x;
  }
};

/// Per-field boundary behavior of the coupled system. Dirichlet fields store
/// interior nodes only; Neumann/Robin fields store all N+2 (resp. N+1) nodes.
enum class BcTag {
  DirichletBoth,           // theta, w: f(0)=f(L)=0, interior storage
  NeumannBoth,             // phi, eta: f_x(0)=f_x(L)=0, full storage
  DirichletLeftRobinRight, // v: f(0)=0, alpha f_x(L) + gamma*(coupled)(L)=0
  DirichletBothAges        // kappa(.,s): Dirichlet in x at every age
};

inline int field_size(BcTag tag, int N) {
  switch (tag) {
    case BcTag::DirichletBoth:
    case BcTag::DirichletBothAges: return N;
    case BcTag::NeumannBoth: return N + 2;
    case BcTag::DirichletLeftRobinRight: return N + 1;
  }
  return 0;
}

// ---- full-grid helpers (nodes 0..N+1) --------------------------------------

/// Zero-pads a stored field to the full grid according to its tag.
inline Vec pad_full(const SpatialGrid& g, const Vec& f, BcTag tag) {
  const int N = g.N;
  if (f.size() != field_size(tag, N)) throw SizeMismatchError("pad_full");
  Vec out = Vec::Zero(N + 2);
  switch (tag) {
    case BcTag::DirichletBoth:
    case BcTag::DirichletBothAges: out.segment(1, N) = f; break;
    case BcTag::NeumannBoth: out = f; break;
    case BcTag::DirichletLeftRobinRight: out.segment(1, N + 1) = f; break;
  }
  return out;
}

/// First derivative on the full grid: centered interior, one-sided two-point
/// boundary rows (the closure that integrates by parts exactly against the
/// trapezoid weights).
inline Vec d1_full(const SpatialGrid& g, const Vec& f) {
  const int n = g.N + 2;
  if (f.size() != n) throw SizeMismatchError("d1_full");
  Vec out(n);
  out[0] = (f[1] - f[0]) / g.h;
  out[n - 1] = (f[n - 1] - f[n - 2]) / g.h;
  for (int i = 1; i < n - 1; ++i) out[i] = (f[i + 1] - f[i - 1]) / (2 * g.h);
  return out;
}

/// Stiffness matvec (A f)_i of the interval-difference bilinear form.
inline Vec stiffness_apply(const SpatialGrid& g, const Vec& f) {
  const int n = g.N + 2;
  if (f.size() != n) throw SizeMismatchError("stiffness_apply");
  Vec out(n);
  out[0] = (f[0] - f[1]) / g.h;
  out[n - 1] = (f[n - 1] - f[n - 2]) / g.h;
  for (int i = 1; i < n - 1; ++i) out[i] = (-f[i - 1] + 2 * f[i] - f[i + 1]) / g.h;
  return out;
}

/// Interval-difference bilinear form: sum_k h * (df/h)(dg/h) ~ int f_x g_x.
inline double stiffness_bilinear(const SpatialGrid& g, const Vec& f, const Vec& w) {
  if (f.size() != w.size() || f.size() != g.N + 2) throw SizeMismatchError("stiffness_bilinear");
  double acc = 0.0;
  for (int i = 0; i <= g.N; ++i) acc += (f[i + 1] - f[i]) * (w[i + 1] - w[i]);
  return acc / g.h;
}

/// Trapezoid node weights on the full grid.
inline Vec trapezoid_weights(const SpatialGrid& g) {
  Vec w = Vec::Constant(g.N + 2, g.h);
  w[0] = w[g.N + 1] = 0.5 * g.h;
  return w;
}

inline double trapezoid_dot(const SpatialGrid& g, const Vec& f, const Vec& w) {
  if (f.size() != w.size() || f.size() != g.N + 2) throw SizeMismatchError("trapezoid_dot");
  double acc = 0.5 * (f[0] * w[0] + f[g.N + 1] * w[g.N + 1]);
  for (int i = 1; i <= g.N; ++i) acc += f[i] * w[i];
  return acc * g.h;
}

// ---- tag-aware stencil operators (diagnostic / primal-rhs surface) ---------

/// Ghost value across x=L enforcing alpha v_x(L) = -gamma*(coupled)(L) with a
/// centered stencil: v_ghost = v_{N} - 2h (gamma/alpha) coupled_L.
inline double robin_ghost(const SpatialGrid& g, const Vec& v_full, double coupled_L,
                          const PhysicalParams& p) {
  if (v_full.size() != g.N + 2) throw SizeMismatchError("robin_ghost");
  return v_full[g.N] - 2.0 * g.h * (p.gamma / p.alpha) * coupled_L;
}

/// First derivative of a full-grid field honoring its tag's ghost values.
/// For DirichletLeftRobinRight the caller supplies the coupled boundary value
/// gamma-row data via robin_coupled (phi+eta_t at L), else it is ignored.
inline Vec d1(const SpatialGrid& g, const Vec& f_full, BcTag tag,
              const PhysicalParams& p = {}, double robin_coupled = 0.0) {
  const int n = g.N + 2;
  if (f_full.size() != n) throw SizeMismatchError("d1");
  Vec out(n);
  for (int i = 1; i < n - 1; ++i) out[i] = (f_full[i + 1] - f_full[i - 1]) / (2 * g.h);
  switch (tag) {
    case BcTag::NeumannBoth:
      out[0] = 0.0;  // mirror ghost
      out[n - 1] = 0.0;
      break;
    case BcTag::DirichletBoth:
    case BcTag::DirichletBothAges:
      out[0] = (-3 * f_full[0] + 4 * f_full[1] - f_full[2]) / (2 * g.h);
      out[n - 1] = (3 * f_full[n - 1] - 4 * f_full[n - 2] + f_full[n - 3]) / (2 * g.h);
      break;
    case BcTag::DirichletLeftRobinRight: {
      out[0] = (-3 * f_full[0] + 4 * f_full[1] - f_full[2]) / (2 * g.h);
      double ghost = robin_ghost(g, f_full, robin_coupled, p);
      out[n - 1] = (ghost - f_full[n - 2]) / (2 * g.h);
      break;
    }
  }
  return out;
}

/// Second derivative honoring the tag's ghosts; quadratics exact interior.
inline Vec d2(const SpatialGrid& g, const Vec& f_full, BcTag tag,
              const PhysicalParams& p = {}, double robin_coupled = 0.0) {
  const int n = g.N + 2;
  if (f_full.size() != n) throw SizeMismatchError("d2");
  const double h2 = g.h * g.h;
  Vec out(n);
  for (int i = 1; i < n - 1; ++i) out[i] = (f_full[i - 1] - 2 * f_full[i] + f_full[i + 1]) / h2;
  auto mirror0 = f_full[1];
  auto mirrorL = f_full[n - 2];
  switch (tag) {
    case BcTag::NeumannBoth:
      out[0] = (mirror0 - 2 * f_full[0] + f_full[1]) / h2;
      out[n - 1] = (f_full[n - 2] - 2 * f_full[n - 1] + mirrorL) / h2;
      break;
    case BcTag::DirichletBoth:
    case BcTag::DirichletBothAges:
      // boundary values are pinned to 0; second derivative there is not used
      out[0] = (2 * f_full[0] - 5 * f_full[1] + 4 * f_full[2] - f_full[3]) / h2;
      out[n - 1] = (2 * f_full[n - 1] - 5 * f_full[n - 2] + 4 * f_full[n - 3] - f_full[n - 4]) / h2;
      break;
    case BcTag::DirichletLeftRobinRight: {
      out[0] = (2 * f_full[0] - 5 * f_full[1] + 4 * f_full[2] - f_full[3]) / h2;
      double ghost = robin_ghost(g, f_full, robin_coupled, p);
      out[n - 1] = (f_full[n - 2] - 2 * f_full[n - 1] + ghost) / h2;
      break;
    }
  }
  return out;
}

}  // namespace pzlab
