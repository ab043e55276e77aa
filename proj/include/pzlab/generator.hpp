#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <Eigen/SparseCholesky>

#include <complex>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "pzlab/grid.hpp"
#include "pzlab/history.hpp"
#include "pzlab/memory_kernel.hpp"
#include "pzlab/params.hpp"
#include "pzlab/state.hpp"

namespace pzlab {

using SpMat = Eigen::SparseMatrix<double>;
using Cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using SpMatC = Eigen::SparseMatrix<Cplx>;
using Triplet = Eigen::Triplet<double>;

/// Everything the discrete operator needs: parameters, spatial grid, kernel
/// and its age quadrature, plus the flat state layout.  For m = 0 the history
/// block is dropped entirely (no kappa columns).
struct Discretization {
  PhysicalParams prm;
  SpatialGrid grid;
  MemoryKernel kernel;
  MemoryQuadrature quad;
  StateLayout lay;

  Discretization() = default;
  Discretization(const PhysicalParams& p, const SpatialGrid& g, const MemoryKernel& k,
                 const MemoryQuadrature& q)
      : prm(p), grid(g), kernel(k), quad(q),
        lay(g.N, p.m == 0.0 ? 0 : q.stored_ages()) {}

  /// q_j * sigma(s_j) for stored age column jj (0-based; node jj+1).
  double age_weight(int jj) const {
    return quad.weights[jj + 1] * kernel.sigma(quad.nodes[jj + 1]);
  }
  double age_ds(int jj) const { return quad.ds(jj + 1); }
};

namespace detail {

enum class RowMode { Generator, StationaryPlain, StationaryConstrained };

/// Triplets of the generator A (RowMode::Generator) or of -A with the u3-slot
/// equation optionally replaced by the discrete compatibility row
/// (StationaryConstrained).  Index helpers mirror StateLayout.
inline std::vector<Triplet> assemble_triplets(const Discretization& d, RowMode mode) {
  const auto& p = d.prm;
  const auto& lay = d.lay;
  const int N = lay.N;
  const double h = d.grid.h;
  const double h2 = h * h;
  const double sgn = (mode == RowMode::Generator) ? 1.0 : -1.0;
  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(14 * N + 3 * N * lay.M));
  auto V = [&](int i) { return lay.off_v + (i - 1); };     // i = 1..N+1
  auto Z = [&](int i) { return lay.off_z + (i - 1); };     // i = 1..N+1
  auto U1 = [&](int i) { return lay.off_u1 + (i - 1); };   // i = 1..N
  auto U2 = [&](int i) { return lay.off_u2 + (i - 1); };   // i = 1..N
  auto U3 = [&](int i) { return lay.off_u3 + i; };         // i = 0..N+1
  auto W = [&](int i) { return lay.off_w + (i - 1); };     // i = 1..N
  auto K = [&](int i, int jj) { return lay.kappa_index(i, jj); };

  // v-rows: v_t = z
  for (int i = 1; i <= N + 1; ++i) t.emplace_back(V(i), Z(i), sgn * 1.0);

  // z-rows: (alpha/rho) v_xx + (gamma/rho) u3_x - (a/rho) w_x, Robin flux at L
  for (int i = 1; i <= N; ++i) {
    int r = Z(i);
    double cA = sgn * p.alpha / (p.rho * h2);
    if (i - 1 >= 1) t.emplace_back(r, V(i - 1), cA);
    t.emplace_back(r, V(i), -2 * cA);
    t.emplace_back(r, V(i + 1), cA);
    double cG = sgn * p.gamma / (2 * h * p.rho);
    t.emplace_back(r, U3(i + 1), cG);
    t.emplace_back(r, U3(i - 1), -cG);
    double cW = sgn * p.a / (2 * h * p.rho);
    if (i + 1 <= N) t.emplace_back(r, W(i + 1), -cW);
    if (i - 1 >= 1) t.emplace_back(r, W(i - 1), cW);
  }
  {
    // boundary row i = N+1: H^-1(-alpha A v + flux e), flux = -gamma u3(L)
    int r = Z(N + 1);
    double c2 = sgn * 2.0 * p.alpha / (p.rho * h2);
    t.emplace_back(r, V(N), c2);
    t.emplace_back(r, V(N + 1), -c2);
    t.emplace_back(r, U3(N + 1), -sgn * 2.0 * p.gamma / (p.rho * h));
    double cG = sgn * p.gamma / (p.rho * h);
    t.emplace_back(r, U3(N + 1), cG);
    t.emplace_back(r, U3(N), -cG);
    t.emplace_back(r, W(N), sgn * p.a / (p.rho * h));
  }

  // u1-rows: u2 - u3_x
  for (int i = 1; i <= N; ++i) {
    int r = U1(i);
    t.emplace_back(r, U2(i), sgn * 1.0);
    double c = sgn / (2 * h);
    t.emplace_back(r, U3(i + 1), -c);
    t.emplace_back(r, U3(i - 1), c);
  }

  // u2-rows: -(mu/(xi eps3)) u1 - b u2
  for (int i = 1; i <= N; ++i) {
    int r = U2(i);
    t.emplace_back(r, U1(i), -sgn * p.mu / (p.xi * p.eps3));
    if (p.b != 0.0) t.emplace_back(r, U2(i), -sgn * p.b);
  }

  // u3-rows: -(mu/eps3) u1_x + (gamma/eps3) z_x - c u3, or the compat row
  if (mode == RowMode::StationaryConstrained) {
    // xi * (D1 u2~)_i - u3_i + (gamma/eps3) (D1 v~)_i = 0
    const double k1 = p.k1();
    for (int i = 0; i <= N + 1; ++i) {
      int r = U3(i);
      t.emplace_back(r, U3(i), -1.0);
      if (i == 0) {
        t.emplace_back(r, U2(1), p.xi / h);
        t.emplace_back(r, V(1), k1 / h);
      } else if (i == N + 1) {
        t.emplace_back(r, U2(N), -p.xi / h);
        t.emplace_back(r, V(N + 1), k1 / h);
        t.emplace_back(r, V(N), -k1 / h);
      } else {
        if (i + 1 <= N) t.emplace_back(r, U2(i + 1), p.xi / (2 * h));
        if (i - 1 >= 1) t.emplace_back(r, U2(i - 1), -p.xi / (2 * h));
        t.emplace_back(r, V(i + 1), k1 / (2 * h));
        if (i - 1 >= 1) t.emplace_back(r, V(i - 1), -k1 / (2 * h));
      }
    }
  } else {
    const double cm = p.mu / p.eps3;
    const double cg = p.gamma / p.eps3;
    for (int i = 0; i <= N + 1; ++i) {
      int r = U3(i);
      if (i == 0) {
        t.emplace_back(r, U1(1), -sgn * cm / h);
        t.emplace_back(r, Z(1), sgn * cg / h);
      } else if (i == N + 1) {
        t.emplace_back(r, U1(N), sgn * cm / h);
        t.emplace_back(r, Z(N + 1), sgn * cg / h);
        t.emplace_back(r, Z(N), -sgn * cg / h);
      } else {
        if (i + 1 <= N) t.emplace_back(r, U1(i + 1), -sgn * cm / (2 * h));
        if (i - 1 >= 1) t.emplace_back(r, U1(i - 1), sgn * cm / (2 * h));
        t.emplace_back(r, Z(i + 1), sgn * cg / (2 * h));
        if (i - 1 >= 1) t.emplace_back(r, Z(i - 1), -sgn * cg / (2 * h));
      }
      if (p.c != 0.0) t.emplace_back(r, U3(i), -sgn * p.c);
    }
  }

  // w-rows: d(1-m) w_xx + d m * memory flux - a z_x
  const double cd = p.d * (1.0 - p.m);
  for (int i = 1; i <= N; ++i) {
    int r = W(i);
    if (cd != 0.0) {
      double c = sgn * cd / h2;
      if (i - 1 >= 1) t.emplace_back(r, W(i - 1), c);
      t.emplace_back(r, W(i), -2 * c);
      if (i + 1 <= N) t.emplace_back(r, W(i + 1), c);
    }
    for (int jj = 0; jj < lay.M; ++jj) {
      double c = sgn * p.d * p.m * d.age_weight(jj) / h2;
      if (c == 0.0) continue;
      if (i - 1 >= 1) t.emplace_back(r, K(i - 1, jj), c);
      t.emplace_back(r, K(i, jj), -2 * c);
      if (i + 1 <= N) t.emplace_back(r, K(i + 1, jj), c);
    }
    double cz = sgn * p.a / (2 * h);
    t.emplace_back(r, Z(i + 1), -cz);
    if (i - 1 >= 1) t.emplace_back(r, Z(i - 1), cz);
  }

  // kappa-rows: -(kappa_j - kappa_{j-1})/ds_j + w
  for (int jj = 0; jj < lay.M; ++jj) {
    double invds = 1.0 / d.age_ds(jj);
    for (int i = 1; i <= N; ++i) {
      int r = K(i, jj);
      t.emplace_back(r, K(i, jj), -sgn * invds);
      if (jj >= 1) t.emplace_back(r, K(i, jj - 1), sgn * invds);
      t.emplace_back(r, W(i), sgn * 1.0);
    }
  }
  return t;
}

}  // namespace detail

/// Sparse realization of the first-order generator on the flat state, plus
/// the snapshots needed to interpret it.  For m=1 the (1-m) diffusive block
/// vanishes exactly; same assembler (only the Lambda term changes).
struct GeneratorMatrix {
  Discretization disc;
  RegimeTag regime;
  SpMat A;

  int dim() const { return disc.lay.n; }
};

inline GeneratorMatrix assemble(const PhysicalParams& p, const SpatialGrid& g,
                                const MemoryKernel& kernel, const MemoryQuadrature& quad) {
  GeneratorMatrix gen;
  gen.disc = Discretization(p, g, kernel, quad);
  gen.regime = classify(p);
  auto t = detail::assemble_triplets(gen.disc, detail::RowMode::Generator);
  gen.A.resize(gen.disc.lay.n, gen.disc.lay.n);
  gen.A.setFromTriplets(t.begin(), t.end());
  gen.A.makeCompressed();
  return gen;
}

/// Matrix-free application of the generator; an independent code path used to
/// cross-check the assembled matrix.
inline Vec apply_generator(const Discretization& d, const Vec& X) {
  const auto& p = d.prm;
  const auto& lay = d.lay;
  const int N = lay.N;
  const double h = d.grid.h;
  if (X.size() != lay.n) throw SizeMismatchError("apply_generator");
  auto s = view(lay, X);
  Vec out = Vec::Zero(lay.n);
  auto o = view(lay, out);

  Vec vf = pad_full(d.grid, s.v(), BcTag::DirichletLeftRobinRight);
  Vec zf = pad_full(d.grid, s.z(), BcTag::DirichletLeftRobinRight);
  Vec u1f = pad_full(d.grid, s.u1(), BcTag::DirichletBoth);
  Vec wf = pad_full(d.grid, s.w(), BcTag::DirichletBoth);
  Vec u3 = s.u3();

  Vec d1u3 = d1_full(d.grid, u3);
  Vec d1z = d1_full(d.grid, zf);
  Vec d1u1 = d1_full(d.grid, u1f);
  Vec d1w = d1_full(d.grid, wf);

  // v_t = z
  o.v() = s.z();

  // z_t
  Vec Av = stiffness_apply(d.grid, vf);
  for (int i = 1; i <= N; ++i)
    o.z()[i - 1] = (-p.alpha * Av[i] / h + p.gamma * d1u3[i] - p.a * d1w[i]) / p.rho;
  o.z()[N] = ((-p.alpha * Av[N + 1] - p.gamma * u3[N + 1]) / (0.5 * h) + p.gamma * d1u3[N + 1] -
              p.a * d1w[N + 1]) /
             p.rho;

  // u1_t, u2_t
  for (int i = 1; i <= N; ++i) {
    o.u1()[i - 1] = s.u2()[i - 1] - d1u3[i];
    o.u2()[i - 1] = -(p.mu / (p.xi * p.eps3)) * s.u1()[i - 1] - p.b * s.u2()[i - 1];
  }

  // u3_t
  for (int i = 0; i <= N + 1; ++i)
    o.u3()[i] = -(p.mu / p.eps3) * d1u1[i] + (p.gamma / p.eps3) * d1z[i] - p.c * u3[i];

  // w_t: d * Lambda_xx - a z_x with Lambda = (1-m) w + m sum_j q_j sigma_j kappa_j
  Vec lam = (1.0 - p.m) * wf;
  for (int jj = 0; jj < lay.M; ++jj)
    lam += p.m * d.age_weight(jj) * pad_full(d.grid, s.kappa(jj), BcTag::DirichletBothAges);
  Vec Alam = stiffness_apply(d.grid, lam);
  for (int i = 1; i <= N; ++i) o.w()[i - 1] = -p.d * Alam[i] / h - p.a * d1z[i];

  // kappa_t = -kappa_s + w (upwind in age, inflow 0)
  for (int jj = 0; jj < lay.M; ++jj) {
    double invds = 1.0 / d.age_ds(jj);
    auto kj = s.kappa(jj);
    for (int i = 1; i <= N; ++i) {
      double upstream = (jj >= 1) ? s.kappa(jj - 1)[i - 1] : 0.0;
      o.kappa(jj)[i - 1] = -(kj[i - 1] - upstream) * invds + s.w()[i - 1];
    }
  }
  return out;
}

/// Gram matrix of the energy inner product (E = 0.5 * U^T G U).
inline SpMat gram_matrix(const Discretization& d) {
  const auto& p = d.prm;
  const auto& lay = d.lay;
  const int N = lay.N;
  const double h = d.grid.h;
  std::vector<Triplet> t;
  auto V = [&](int i) { return lay.off_v + (i - 1); };
  // v-block: alpha * interval stiffness with v_0 = 0
  for (int i = 1; i <= N; ++i) t.emplace_back(V(i), V(i), 2 * p.alpha / h);
  t.emplace_back(V(N + 1), V(N + 1), p.alpha / h);
  for (int i = 1; i <= N; ++i) {
    t.emplace_back(V(i), V(i + 1), -p.alpha / h);
    t.emplace_back(V(i + 1), V(i), -p.alpha / h);
  }
  for (int i = 1; i <= N + 1; ++i) {
    double wq = (i == N + 1) ? 0.5 * h : h;
    t.emplace_back(lay.off_z + i - 1, lay.off_z + i - 1, p.rho * wq);
  }
  for (int i = 0; i < N; ++i) {
    t.emplace_back(lay.off_u1 + i, lay.off_u1 + i, p.mu * h);
    t.emplace_back(lay.off_u2 + i, lay.off_u2 + i, p.xi * p.eps3 * h);
    t.emplace_back(lay.off_w + i, lay.off_w + i, h);
  }
  for (int i = 0; i <= N + 1; ++i) {
    double wq = (i == 0 || i == N + 1) ? 0.5 * h : h;
    t.emplace_back(lay.off_u3 + i, lay.off_u3 + i, p.eps3 * wq);
  }
  const double md = p.m * p.d;
  for (int jj = 0; jj < lay.M; ++jj) {
    double c = md * d.age_weight(jj);
    if (c == 0.0) continue;
    auto K = [&](int i) { return lay.kappa_index(i, jj); };
    for (int i = 1; i <= N; ++i) t.emplace_back(K(i), K(i), 2 * c / h);
    for (int i = 1; i < N; ++i) {
      t.emplace_back(K(i), K(i + 1), -c / h);
      t.emplace_back(K(i + 1), K(i), -c / h);
    }
  }
  SpMat G(lay.n, lay.n);
  G.setFromTriplets(t.begin(), t.end());
  G.makeCompressed();
  return G;
}

/// Exact discrete dissipation D(U) = Re<G U, A U>: the closed form of the
/// energy identity.  Nonpositive for every state (the age-transport part
/// telescopes with nonincreasing weights).
inline double dissipation_value(const Discretization& d, const Vec& X) {
  const auto& p = d.prm;
  const auto& lay = d.lay;
  const int N = lay.N;
  const double h = d.grid.h;
  auto s = view(lay, X);
  double out = 0.0;
  if (p.b != 0.0) {
    double acc = 0.0;
    for (int i = 0; i < N; ++i) acc += s.u2()[i] * s.u2()[i];
    out -= p.b * p.xi * p.eps3 * h * acc;
  }
  if (p.c != 0.0) {
    double acc = 0.0;
    for (int i = 0; i <= N + 1; ++i) {
      double wq = (i == 0 || i == N + 1) ? 0.5 : 1.0;
      acc += wq * s.u3()[i] * s.u3()[i];
    }
    out -= p.c * p.eps3 * h * acc;
  }
  if (p.m < 1.0) {
    Vec wf = pad_full(d.grid, s.w(), BcTag::DirichletBoth);
    out -= (1.0 - p.m) * p.d * stiffness_bilinear(d.grid, wf, wf);
  }
  const double md = p.m * p.d;
  if (md != 0.0 && lay.M > 0) {
    double T = 0.0;
    Vec prev = Vec::Zero(N + 2);
    for (int jj = 0; jj < lay.M; ++jj) {
      Vec kj = pad_full(d.grid, s.kappa(jj), BcTag::DirichletBothAges);
      double beta = d.age_weight(jj) / d.age_ds(jj);
      T += beta * stiffness_bilinear(d.grid, kj, kj - prev);
      prev = kj;
    }
    out -= md * T;
  }
  return out;
}

// ---------------------------------------------------------------------------
// stationary and resolvent solves
// ---------------------------------------------------------------------------

/// Direct solve of -A_h U = F faithful to the per-case surjectivity proof:
/// when b = 0 or c = 0 the u3-slot equation is replaced by the discrete
/// compatibility row (index reduction; the dropped row is implied by the
/// compatibility of F when b = c = 0, and its residual is the structural
/// -b xi u2_x + c u3 otherwise).  For b, c > 0 the monolithic system is
/// nonsingular and solved as assembled.
inline Vec stationary_solve(const GeneratorMatrix& gen, const Vec& F) {
  const auto& d = gen.disc;
  if (F.size() != d.lay.n) throw SizeMismatchError("stationary_solve: F");
  const bool constrained = (d.prm.b == 0.0) || (d.prm.c == 0.0);
  auto trip = detail::assemble_triplets(
      d, constrained ? detail::RowMode::StationaryConstrained : detail::RowMode::StationaryPlain);
  SpMat M(d.lay.n, d.lay.n);
  M.setFromTriplets(trip.begin(), trip.end());
  M.makeCompressed();
  Vec rhs = F;
  if (constrained) rhs.segment(d.lay.off_u3, d.lay.N + 2).setZero();
  Eigen::SparseLU<SpMat> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success) throw SolverSingularError("stationary matrix", 0.0);
  Vec U = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw SolverSingularError("stationary solve", 0.0);
  return U;
}

/// Factorized resolvent (i lambda I - A): repeated solves at one frequency.
class ResolventFactor {
 public:
  ResolventFactor(const GeneratorMatrix& gen, double lambda) : lambda_(lambda) {
    SpMatC M = gen.A.cast<Cplx>();
    M *= Cplx(-1.0, 0.0);
    SpMatC I(gen.dim(), gen.dim());
    I.setIdentity();
    M += Cplx(0.0, lambda) * I;
    M.makeCompressed();
    lu_.compute(M);
    if (lu_.info() != Eigen::Success)
      throw SolverSingularError("resolvent factorization", lambda);
  }
  CVec solve(const CVec& F) const {
    CVec U = lu_.solve(F);
    if (lu_.info() != Eigen::Success) throw SolverSingularError("resolvent solve", lambda_);
    return U;
  }
  CVec solve_adjoint(const CVec& F) const {
    CVec U = lu_.adjoint().solve(F);
    return U;
  }
  double lambda() const { return lambda_; }

 private:
  double lambda_;
  Eigen::SparseLU<SpMatC> lu_;
};

/// Solves (i lambda I - A_h) U = F.  lambda = 0 reduces to the stationary
/// path (whose case-aware row handling keeps the undamped cases solvable).
inline CVec resolvent_solve(const GeneratorMatrix& gen, double lambda, const CVec& F) {
  if (F.size() != gen.dim()) throw SizeMismatchError("resolvent_solve: F");
  if (lambda == 0.0) {
    Vec re = stationary_solve(gen, F.real());
    Vec im = stationary_solve(gen, F.imag());
    CVec U(gen.dim());
    U.real() = re;
    U.imag() = im;
    return U;
  }
  ResolventFactor R(gen, lambda);
  return R.solve(F);
}

namespace detail {

struct GramOps {
  explicit GramOps(const Discretization& d) : G(gram_matrix(d)) {
    ldlt.compute(G);
    if (ldlt.info() != Eigen::Success) throw SolverSingularError("gram factorization");
  }
  SpMat G;
  Eigen::SimplicialLDLT<SpMat> ldlt;

  CVec mul(const CVec& x) const {
    CVec y(x.size());
    y.real() = G * x.real().eval();
    y.imag() = G * x.imag().eval();
    return y;
  }
  CVec solve(const CVec& x) const {
    CVec y(x.size());
    y.real() = ldlt.solve(x.real().eval());
    y.imag() = ldlt.solve(x.imag().eval());
    return y;
  }
  double norm(const CVec& x) const {
    return std::sqrt(std::abs(x.dot(mul(x)).real()));
  }
};

}  // namespace detail

struct ResolventNormResult {
  double norm = 0.0;   // ||(i lambda - A)^-1|| in the energy operator norm
  int iterations = 0;
  bool converged = false;
};

/// Energy-norm resolvent norm via power iteration on the normal operator of
/// (i lambda - A)^-1 in the G geometry.  Deterministic given the seed.
inline ResolventNormResult resolvent_norm(const GeneratorMatrix& gen, double lambda,
                                          std::uint64_t seed = 12345, double tol = 1e-9,
                                          int max_iter = 400) {
  ResolventFactor R(gen, lambda);
  detail::GramOps gram(gen.disc);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> nd;
  const int n = gen.dim();
  CVec y(n);
  for (int i = 0; i < n; ++i) y[i] = Cplx(nd(rng), nd(rng));
  y /= gram.norm(y);
  ResolventNormResult out;
  double prev = 0.0;
  for (int k = 0; k < max_iter; ++k) {
    CVec x = R.solve(y);
    double nu = gram.norm(x);
    out.norm = nu;
    out.iterations = k + 1;
    if (k > 2 && std::abs(nu - prev) <= tol * std::max(nu, 1e-300)) {
      out.converged = true;
      break;
    }
    prev = nu;
    // y <- normalized G^-1 (i lam - A)^-H G x   (one normal-operator sweep)
    CVec t = gram.mul(x);
    CVec u = R.solve_adjoint(t);
    y = gram.solve(u);
    double ny = gram.norm(y);
    if (!(ny > 0) || !std::isfinite(ny)) break;
    y /= ny;
  }
  return out;
}

/// Dense SVD evaluation of the same operator norm (cross-check; N small).
inline double resolvent_norm_dense(const GeneratorMatrix& gen, double lambda) {
  const int n = gen.dim();
  Eigen::MatrixXd A = Eigen::MatrixXd(gen.A);
  Eigen::MatrixXd G = Eigen::MatrixXd(gram_matrix(gen.disc));
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw SolverSingularError("gram not SPD");
  Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(n, n) * Cplx(0, lambda) - A.cast<Cplx>();
  Eigen::MatrixXcd Minv = M.partialPivLu().solve(Eigen::MatrixXcd::Identity(n, n));
  // ||M^-1||_G = || L^T M^-1 L^-T ||_2
  Eigen::MatrixXcd LT = L.transpose().cast<Cplx>();
  Eigen::MatrixXcd T = LT * Minv;
  T = LT.triangularView<Eigen::Upper>().solve(T.transpose().eval()).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(T);
  return svd.singularValues()(0);
}

// ---------------------------------------------------------------------------
// compatibility and lemma machinery
// ---------------------------------------------------------------------------

/// L2 norm of the discrete gauge-compatibility constraint
/// xi u2_x - u3 + (gamma/eps3) v_x over the full grid.
template <class Scalar>
inline double compatibility_residual(const Discretization& d,
                                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& X) {
  const auto& lay = d.lay;
  if (X.size() != lay.n) throw SizeMismatchError("compatibility_residual");
  auto comp = [&](const Vec& xr) {
    auto s = view(lay, xr);
    Vec u2f = pad_full(d.grid, s.u2(), BcTag::DirichletBoth);
    Vec vf = pad_full(d.grid, s.v(), BcTag::DirichletLeftRobinRight);
    Vec res = d.prm.xi * d1_full(d.grid, u2f) - Vec(s.u3()) +
              d.prm.k1() * d1_full(d.grid, vf);
    double acc = 0.0;
    for (int i = 0; i <= d.lay.N + 1; ++i) {
      double wq = (i == 0 || i == lay.N + 1) ? 0.5 : 1.0;
      acc += wq * res[i] * res[i];
    }
    return acc * d.grid.h;
  };
  if constexpr (std::is_same_v<Scalar, double>) {
    return std::sqrt(comp(X));
  } else {
    Vec re = X.real(), im = X.imag();
    return std::sqrt(comp(re) + comp(im));
  }
}

/// Explicit constants of the resolvent estimates, with their applicability.
/// C_P is fixed to the sharp 1-D Dirichlet Poincare constant (L/pi)^2.
struct LemmaConstants {
  double S1 = 0, S2 = 0, S3 = 0, S4 = 0, S5 = 0, S6 = 0, S7 = 0;
  double C_P = 0;
  bool has_S1 = false, has_S3 = false, has_S4 = false, has_S5 = false, has_S7 = false;
  bool S7_degenerate = false;  // b == c: the bound collapses to an identity
  double S7_structural_tol = 0.2;  // declared allowance for the degenerate check
};

inline LemmaConstants lemma_constants(const PhysicalParams& p, const MemoryKernel& kernel) {
  LemmaConstants c;
  constexpr double pi = 3.14159265358979323846;
  c.C_P = (p.L / pi) * (p.L / pi);
  if (p.m > 0.0 && p.m < 1.0) {
    c.S1 = 1.0 / ((1.0 - p.m) * p.d);
    c.S2 = c.C_P * c.S1;
    c.S5 = 2.0 / (p.m * p.d * kernel.d_sigma);
    c.S6 = 2.0 * (1.0 - p.m) / p.d + 4.0 * kernel.g0 / (p.m * p.d * kernel.d_sigma);
    c.has_S1 = c.has_S5 = true;
  }
  if (p.b > 0.0) {
    c.S3 = 1.0 / (p.b * p.xi * p.eps3);
    c.has_S3 = true;
  }
  if (p.c > 0.0) {
    c.S4 = 1.0 / (p.c * p.eps3);
    c.has_S4 = true;
  }
  if (p.b > 0.0 && p.c > 0.0) {
    c.S7 = p.alpha * (p.b - p.c) * (p.b - p.c) * (p.eps3 * p.eps3) /
           (p.b * p.b * p.gamma * p.gamma) * c.S4;
    c.has_S7 = true;
    c.S7_degenerate = (p.b == p.c);
  }
  return c;
}

struct LemmaEntry {
  std::string name;
  bool applicable = false;
  double lhs = 0.0;
  double bound = 0.0;   // constant * ||U|| ||F||  (or structural tol for degenerate S7)
  double margin = 0.0;  // lhs / bound
  bool ok = true;
};

struct LemmaReport {
  double lambda = 0.0;
  double normU = 0.0, normF = 0.0;
  double compat_residual = 0.0;
  std::vector<LemmaEntry> entries;
  bool pass(double tol = 1e-2) const {
    for (const auto& e : entries)
      if (e.applicable && e.margin > 1.0 + tol) return false;
    return true;
  }
};

/// Evaluates the in-regime resolvent inequalities on a triple
/// (U, F, lambda) with (i lambda - A) U = F.  The degenerate b = c form of
/// the S7 bound (the identity forces (b-c) * integral term = 0) is checked
/// against the declared structural allowance and reported, not inflated into
/// a discretization tolerance.
inline LemmaReport verify_lemma_bounds(const GeneratorMatrix& gen, const CVec& U, const CVec& F,
                                       double lambda, const LemmaConstants& consts) {
  const auto& d = gen.disc;
  const auto& lay = d.lay;
  const int N = lay.N;
  const double h = d.grid.h;
  LemmaReport rep;
  rep.lambda = lambda;

  auto cnorm2_stiff = [&](const CVec& full) {
    Vec re = full.real(), im = full.imag();
    return stiffness_bilinear(d.grid, re, re) + stiffness_bilinear(d.grid, im, im);
  };
  auto padc = [&](const CVec& f, BcTag tag) {
    Vec re = pad_full(d.grid, f.real(), tag);
    Vec im = pad_full(d.grid, f.imag(), tag);
    CVec out(re.size());
    out.real() = re;
    out.imag() = im;
    return out;
  };

  auto su = view(lay, U);
  auto sf = view(lay, F);
  (void)sf;
  rep.normU = std::sqrt(std::abs(
      inner_product_H(d.grid, d.prm, d.quad, d.kernel, lay, Vec(U.real()), Vec(U.real())) +
      inner_product_H(d.grid, d.prm, d.quad, d.kernel, lay, Vec(U.imag()), Vec(U.imag()))));
  rep.normF = std::sqrt(std::abs(
      inner_product_H(d.grid, d.prm, d.quad, d.kernel, lay, Vec(F.real()), Vec(F.real())) +
      inner_product_H(d.grid, d.prm, d.quad, d.kernel, lay, Vec(F.imag()), Vec(F.imag()))));
  rep.compat_residual = compatibility_residual<Cplx>(d, U);
  const double UF = rep.normU * rep.normF;

  CVec wfull = padc(su.w(), BcTag::DirichletBoth);
  double nwx = cnorm2_stiff(wfull);
  double nw = 0.0;
  for (int i = 0; i < N; ++i) nw += std::norm(su.w()[i]) * h;
  double nu2 = 0.0;
  for (int i = 0; i < N; ++i) nu2 += std::norm(su.u2()[i]) * h;
  double nu3 = 0.0;
  for (int i = 0; i <= N + 1; ++i) {
    double wq = (i == 0 || i == N + 1) ? 0.5 : 1.0;
    nu3 += wq * std::norm(su.u3()[i]) * h;
  }
  double nks = 0.0;
  CVec lam = Cplx(1.0 - d.prm.m, 0.0) * wfull;
  for (int jj = 0; jj < lay.M; ++jj) {
    CVec kf = padc(su.kappa(jj), BcTag::DirichletBothAges);
    double qs = d.age_weight(jj);
    nks += qs * cnorm2_stiff(kf);
    lam += Cplx(d.prm.m * qs, 0.0) * kf;
  }
  double nlx = cnorm2_stiff(lam);
  CVec vfull = padc(su.v(), BcTag::DirichletLeftRobinRight);
  double nvx = cnorm2_stiff(vfull);

  auto push = [&](const std::string& name, bool applicable, double lhs, double cst) {
    LemmaEntry e;
    e.name = name;
    e.applicable = applicable;
    e.lhs = lhs;
    e.bound = cst * UF;
    e.margin = applicable && e.bound > 0 ? lhs / e.bound : 0.0;
    e.ok = !applicable || e.margin <= 1.0 + 1e-2;
    rep.entries.push_back(e);
  };
  push("S1:|w_x|^2", consts.has_S1, nwx, consts.S1);
  push("S2:|w|^2", consts.has_S1, nw, consts.S2);
  push("S3:|u2|^2", consts.has_S3, nu2, consts.S3);
  push("S4:|u3|^2", consts.has_S4, nu3, consts.S4);
  push("S5:sigma|kx|^2", consts.has_S5, nks, consts.S5);
  push("S6:|Lambda_x|^2", consts.has_S5, nlx, consts.S6);
  if (consts.has_S7 && !consts.S7_degenerate) {
    push("S7:alpha|v_x|^2", true, d.prm.alpha * nvx, consts.S7);
  } else if (consts.has_S7) {
    // b = c: the paper's identity degenerates; check against the declared
    // structural allowance (compat-defect mechanism, not a discretization error)
    LemmaEntry e;
    e.name = "S7(degenerate b=c):alpha|v_x|^2";
    e.applicable = true;
    e.lhs = d.prm.alpha * nvx;
    e.bound = consts.S7_structural_tol * UF;
    e.margin = e.bound > 0 ? e.lhs / e.bound : 0.0;
    e.ok = e.margin <= 1.0 + 1e-2;
    rep.entries.push_back(e);
  }
  return rep;
}

/// Coordinate-format text export "row col re im" (0-based indices).
inline void export_coordinate(std::ostream& os, const SpMat& A) {
  os << "# rows cols nnz\n" << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "%d %d %.17g 0\n", static_cast<int>(it.row()),
                    static_cast<int>(it.col()), it.value());
      os << buf;
    }
}

}  // namespace pzlab
