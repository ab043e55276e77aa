#pragma once

#include <Eigen/Dense>

#include "pzlab/grid.hpp"
#include "pzlab/memory_kernel.hpp"
#include "pzlab/params.hpp"

namespace pzlab {

using Mat = Eigen::MatrixXd;

/// Flattened layout of the first-order state U = (v, z, u1, u2, u3, w, kappa)
/// on the energy grid.  kappa holds M = stored_ages columns (the s>0 nodes of
/// the age quadrature; the s=0 column is identically zero and not stored).
struct StateLayout {
  int N = 0;  // interior spatial nodes
  int M = 0;  // stored age columns (0 when m = 0)
  int off_v = 0, off_z = 0, off_u1 = 0, off_u2 = 0, off_u3 = 0, off_w = 0, off_kappa = 0;
  int n = 0;

  StateLayout() = default;
  StateLayout(int N_, int M_) : N(N_), M(M_) {
    off_v = 0;
    off_z = off_v + (N + 1);
    off_u1 = off_z + (N + 1);
    off_u2 = off_u1 + N;
    off_u3 = off_u2 + N;
    off_w = off_u3 + (N + 2);
    off_kappa = off_w + N;
    n = off_kappa + N * M;
  }
  int kappa_index(int i, int j) const { return off_kappa + j * N + (i - 1); }  // i=1..N, j=0..M-1
};

/// Dafermos history field kappa(x_i, s_j) on the tensor grid, including the
/// identically-zero s=0 column so the boundary-in-age row is explicit.
/// Spatially Dirichlet at both ends (interior rows stored).
struct HistoryField {
  Mat values;  // N x (M+1): column 0 is the s=0 row, kept at zero

  HistoryField() = default;
  HistoryField(int N, int stored_ages) : values(Mat::Zero(N, stored_ages + 1)) {}
  int N() const { return static_cast<int>(values.rows()); }
  int ages() const { return static_cast<int>(values.cols()) - 1; }  // stored s>0 columns
  Eigen::Block<Mat> stored() { return values.block(0, 1, values.rows(), values.cols() - 1); }
  Eigen::Block<const Mat> stored() const {
    return values.block(0, 1, values.rows(), values.cols() - 1);
  }
};

/// View-style accessor bundle over a flat state vector.
template <class VecT>
struct StateView {
  const StateLayout& lay;
  VecT& x;
  auto v() const { return x.segment(lay.off_v, lay.N + 1); }
  auto z() const { return x.segment(lay.off_z, lay.N + 1); }
  auto u1() const { return x.segment(lay.off_u1, lay.N); }
  auto u2() const { return x.segment(lay.off_u2, lay.N); }
  auto u3() const { return x.segment(lay.off_u3, lay.N + 2); }
  auto w() const { return x.segment(lay.off_w, lay.N); }
  auto kappa(int j) const { return x.segment(lay.off_kappa + j * lay.N, lay.N); }
};

template <class VecT>
StateView<VecT> view(const StateLayout& lay, VecT& x) {
  return {lay, x};
}

/// Primal-field snapshot at one time instant.  All fields are stored on the
/// full grid with boundary slots carrying their pinned values.
struct PrimalState {
  Vec v, vt, phi, phit, theta, thetat, eta, etat, w;
  double t = 0.0;

  explicit PrimalState(int N)
      : v(Vec::Zero(N + 2)), vt(Vec::Zero(N + 2)), phi(Vec::Zero(N + 2)),
        phit(Vec::Zero(N + 2)), theta(Vec::Zero(N + 2)), thetat(Vec::Zero(N + 2)),
        eta(Vec::Zero(N + 2)), etat(Vec::Zero(N + 2)), w(Vec::Zero(N + 2)) {}
  PrimalState() = default;
};

/// The H inner product: trapezoid/interval-difference evaluation of
///   int alpha v_x w1_x + rho z1 w2 + mu u1 w3 + xi eps3 u2 w4 + eps3 u3 w5 + w w6
/// plus the sigma-weighted history pairing md * sum_j q_j sigma_j int k1_x k2_x.
inline double inner_product_H(const SpatialGrid& g, const PhysicalParams& p,
                              const MemoryQuadrature& quad, const MemoryKernel& kernel,
                              const StateLayout& lay, const Vec& X, const Vec& Y) {
  if (X.size() != lay.n || Y.size() != lay.n) throw SizeMismatchError("inner_product_H");
  auto a = view(lay, X);
  auto b = view(lay, Y);
  const int N = lay.N;
  Vec va = pad_full(g, a.v(), BcTag::DirichletLeftRobinRight);
  Vec vb = pad_full(g, b.v(), BcTag::DirichletLeftRobinRight);
  double acc = p.alpha * stiffness_bilinear(g, va, vb);
  // z: trapezoid over nodes 1..N+1 (node 0 pinned)
  for (int i = 0; i <= N; ++i) {
    double wgt = (i == N) ? 0.5 * g.h : g.h;
    acc += p.rho * wgt * a.z()[i] * b.z()[i];
  }
  for (int i = 0; i < N; ++i) acc += p.mu * g.h * a.u1()[i] * b.u1()[i];
  for (int i = 0; i < N; ++i) acc += p.xi * p.eps3 * g.h * a.u2()[i] * b.u2()[i];
  for (int i = 0; i <= N + 1; ++i) {
    double wgt = (i == 0 || i == N + 1) ? 0.5 * g.h : g.h;
    acc += p.eps3 * wgt * a.u3()[i] * b.u3()[i];
  }
  for (int i = 0; i < N; ++i) acc += g.h * a.w()[i] * b.w()[i];
  const double md = p.m * p.d;
  if (md != 0.0) {
    for (int j = 0; j < lay.M; ++j) {
      double wj = quad.weights[j + 1] * kernel.sigma(quad.nodes[j + 1]);
      Vec ka = pad_full(g, a.kappa(j), BcTag::DirichletBothAges);
      Vec kb = pad_full(g, b.kappa(j), BcTag::DirichletBothAges);
      acc += md * wj * stiffness_bilinear(g, ka, kb);
    }
  }
  return acc;
}

inline double norm_H(const SpatialGrid& g, const PhysicalParams& p, const MemoryQuadrature& quad,
                     const MemoryKernel& kernel, const StateLayout& lay, const Vec& X) {
  return std::sqrt(std::max(0.0, inner_product_H(g, p, quad, kernel, lay, X, X)));
}

}  // namespace pzlab
