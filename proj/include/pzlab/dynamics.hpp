#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pzlab/generator.hpp"
#include "pzlab/history.hpp"

namespace pzlab {

/// Energy bookkeeping.  Em carries both the thermal L2 part and the
/// sigma-weighted history seminorm; D is the exact discrete dissipation
/// value Re<G U, A U> (the closed form of the energy identity).
struct EnergyBreakdown {
  double Ek = 0, Ep = 0, EB = 0, Eelec = 0, Em = 0;
  double E = 0;
  double D = 0;
};

inline EnergyBreakdown energy_breakdown(const Discretization& d, const Vec& U) {
  const auto& p = d.prm;
  const auto& lay = d.lay;
  const int N = lay.N;
  const double h = d.grid.h;
  auto s = view(lay, U);
  EnergyBreakdown e;
  for (int i = 0; i <= N; ++i) {
    double wq = (i == N) ? 0.5 * h : h;
    e.Ek += 0.5 * p.rho * wq * s.z()[i] * s.z()[i];
  }
  Vec vf = pad_full(d.grid, s.v(), BcTag::DirichletLeftRobinRight);
  e.Ep = 0.5 * p.alpha * stiffness_bilinear(d.grid, vf, vf);
  for (int i = 0; i < N; ++i) e.EB += 0.5 * p.mu * h * s.u1()[i] * s.u1()[i];
  for (int i = 0; i < N; ++i) e.Eelec += 0.5 * p.xi * p.eps3 * h * s.u2()[i] * s.u2()[i];
  for (int i = 0; i <= N + 1; ++i) {
    double wq = (i == 0 || i == N + 1) ? 0.5 * h : h;
    e.Eelec += 0.5 * p.eps3 * wq * s.u3()[i] * s.u3()[i];
  }
  for (int i = 0; i < N; ++i) e.Em += 0.5 * h * s.w()[i] * s.w()[i];
  for (int jj = 0; jj < lay.M; ++jj) {
    Vec kf = pad_full(d.grid, s.kappa(jj), BcTag::DirichletBothAges);
    e.Em += 0.5 * p.m * p.d * d.age_weight(jj) * stiffness_bilinear(d.grid, kf, kf);
  }
  e.E = e.Ek + e.Ep + e.EB + e.Eelec + e.Em;
  e.D = dissipation_value(d, U);
  return e;
}

// ---------------------------------------------------------------------------
// primal <-> first-order maps and the (C2) right-hand side
// ---------------------------------------------------------------------------

/// First-order state plus the passenger potentials needed to reconstruct the
/// primal fields: X = [U | phi | theta | eta].
struct ExtendedLayout {
  StateLayout lay;
  int off_phi = 0, off_theta = 0, off_eta = 0, n = 0;
  explicit ExtendedLayout(const StateLayout& l) : lay(l) {
    off_phi = l.n;
    off_theta = off_phi + (l.N + 2);
    off_eta = off_theta + l.N;
    n = off_eta + (l.N + 2);
  }
};

/// Maps primal initial data to the extended state.  With compat_project the
/// z-direction electric velocity is chosen so the discrete compatibility
/// identity xi u2_x - u3 + (gamma/eps3) v_x = 0 holds, i.e. the initial datum
/// is taken in the (discrete) energy space of the first-order formulation.
inline Vec primal_to_extended(const Discretization& d, const PrimalState& ps,
                              bool compat_project) {
  const auto& lay = d.lay;
  const int N = lay.N;
  ExtendedLayout ext(lay);
  Vec X = Vec::Zero(ext.n);
  auto s = view(lay, X);
  for (int i = 1; i <= N + 1; ++i) s.v()[i - 1] = ps.v[i];
  for (int i = 1; i <= N + 1; ++i) s.z()[i - 1] = ps.vt[i];
  Vec d1eta = d1_full(d.grid, ps.eta);
  Vec d1phi = d1_full(d.grid, ps.phi);
  for (int i = 1; i <= N; ++i) s.u1()[i - 1] = ps.theta[i] - d1eta[i];
  for (int i = 1; i <= N; ++i) s.u2()[i - 1] = ps.thetat[i] + d1phi[i];
  for (int i = 0; i <= N + 1; ++i) s.u3()[i] = ps.etat[i] + ps.phi[i];
  for (int i = 1; i <= N; ++i) s.w()[i - 1] = ps.w[i];
  if (compat_project) {
    Vec u2f = pad_full(d.grid, s.u2(), BcTag::DirichletBoth);
    Vec vf = pad_full(d.grid, s.v(), BcTag::DirichletLeftRobinRight);
    Vec u3c = d.prm.xi * d1_full(d.grid, u2f) + d.prm.k1() * d1_full(d.grid, vf);
    for (int i = 0; i <= N + 1; ++i) s.u3()[i] = u3c[i];
  }
  X.segment(ext.off_phi, N + 2) = ps.phi;
  X.segment(ext.off_theta, N) = ps.theta.segment(1, N);
  X.segment(ext.off_eta, N + 2) = ps.eta;
  return X;
}

/// Reconstructs the primal snapshot from the extended state:
/// theta_t = u2 - phi_x, eta_t = u3 - phi, phi_t from the gauge relation.
inline PrimalState extended_to_primal(const Discretization& d, const Vec& X, double t) {
  const auto& lay = d.lay;
  const int N = lay.N;
  ExtendedLayout ext(lay);
  auto s = view(lay, X);
  PrimalState ps(N);
  ps.t = t;
  for (int i = 1; i <= N + 1; ++i) ps.v[i] = s.v()[i - 1];
  for (int i = 1; i <= N + 1; ++i) ps.vt[i] = s.z()[i - 1];
  ps.phi = X.segment(ext.off_phi, N + 2);
  ps.theta.setZero();
  ps.theta.segment(1, N) = X.segment(ext.off_theta, N);
  ps.eta = X.segment(ext.off_eta, N + 2);
  Vec d1phi = d1_full(d.grid, ps.phi);
  Vec d1theta = d1_full(d.grid, ps.theta);
  for (int i = 1; i <= N; ++i) ps.thetat[i] = s.u2()[i - 1] - d1phi[i];
  for (int i = 0; i <= N + 1; ++i) ps.etat[i] = s.u3()[i] - ps.phi[i];
  for (int i = 0; i <= N + 1; ++i)
    ps.phit[i] = (d.prm.mu / (d.prm.xi * d.prm.eps3)) * (ps.eta[i] - d.prm.xi * d1theta[i]);
  for (int i = 1; i <= N; ++i) ps.w[i] = s.w()[i - 1];
  return ps;
}

inline HistoryField extract_history(const Discretization& d, const Vec& X) {
  HistoryField k(d.lay.N, d.lay.M);
  auto s = view(d.lay, X);
  for (int jj = 0; jj < d.lay.M; ++jj) k.values.col(jj + 1) = s.kappa(jj);
  return k;
}

/// Time derivatives of the primal fields per the gauged system, evaluated
/// with the tag-aware stencils.  Diagnostic surface (manufactured-solution
/// residuals, regression tests); the integrator uses the first-order system.
struct PrimalRates {
  Vec vt, vtt, phit, phitt, thetat, thetatt, etat, etatt, wt;
};

inline PrimalRates rhs(const PrimalState& st, const HistoryField& kappa,
                       const PhysicalParams& p, const MemoryKernel& kernel,
                       const MemoryQuadrature& quad, const SpatialGrid& g) {
  const int N = g.N;
  if (st.v.size() != N + 2) throw SizeMismatchError("rhs: state");
  PrimalRates r;
  const double robin_coupled = st.phi[N + 1] + st.etat[N + 1];
  Vec d2v = d2(g, st.v, BcTag::DirichletLeftRobinRight, p, robin_coupled);
  Vec d1phi = d1(g, st.phi, BcTag::NeumannBoth);
  Vec d1eta = d1(g, st.eta, BcTag::NeumannBoth);
  Vec d1etat = d1(g, st.etat, BcTag::NeumannBoth);
  Vec d1w = d1(g, st.w, BcTag::DirichletBoth);
  Vec d1v = d1(g, st.v, BcTag::DirichletLeftRobinRight, p, robin_coupled);
  // one-sided closure at L for the velocity derivative (Robin data for vt
  // would need eta_tt, which is what we are computing)
  Vec d1vt = d1(g, st.vt, BcTag::DirichletBoth);
  Vec d2phi = d2(g, st.phi, BcTag::NeumannBoth);
  Vec d2theta = d2(g, st.theta, BcTag::DirichletBoth);
  Vec d2eta = d2(g, st.eta, BcTag::NeumannBoth);
  Vec d2w = d2(g, st.w, BcTag::DirichletBoth);

  r.vt = st.vt;
  r.phit = st.phit;
  r.thetat = st.thetat;
  r.etat = st.etat;
  r.vtt = Vec::Zero(N + 2);
  for (int i = 1; i <= N + 1; ++i)
    r.vtt[i] = (p.alpha * d2v[i] + p.gamma * (d1phi[i] + d1etat[i]) - p.a * d1w[i]) / p.rho;
  r.phitt = Vec::Zero(N + 2);
  for (int i = 0; i <= N + 1; ++i)
    r.phitt[i] = (p.mu / p.eps3) * d2phi[i] - (p.mu / (p.xi * p.eps3)) * st.phi[i] +
                 (p.gamma * p.mu / (p.xi * p.eps3 * p.eps3)) * d1v[i];
  r.thetatt = Vec::Zero(N + 2);
  for (int i = 1; i <= N; ++i)
    r.thetatt[i] = (p.mu / p.eps3) * d2theta[i] - (p.mu / (p.xi * p.eps3)) * st.theta[i] -
                   p.b * (st.thetat[i] + d1phi[i]);
  r.etatt = Vec::Zero(N + 2);
  for (int i = 0; i <= N + 1; ++i)
    r.etatt[i] = (p.mu / p.eps3) * d2eta[i] - (p.mu / (p.xi * p.eps3)) * st.eta[i] +
                 (p.gamma / p.eps3) * d1vt[i] - p.c * (st.etat[i] + st.phi[i]);
  r.wt = Vec::Zero(N + 2);
  Vec flux = (p.m != 0.0) ? memory_flux(kappa, kernel, quad, g) : Vec(Vec::Zero(N));
  for (int i = 1; i <= N; ++i)
    r.wt[i] = p.d * (1 - p.m) * d2w[i] + p.d * p.m * flux[i - 1] - p.a * d1vt[i];
  return r;
}

// ---------------------------------------------------------------------------
// implicit-midpoint stepper on the extended system
// ---------------------------------------------------------------------------

/// Builds the extended system matrix S over X = [U | phi | theta | eta]:
/// the generator block plus the passenger rows
///   phi_t = (mu/(xi eps3)) eta - (mu/eps3) theta_x,
///   theta_t = u2 - phi_x,   eta_t = u3 - phi.
inline SpMat extended_system(const Discretization& d) {
  const auto& p = d.prm;
  const auto& lay = d.lay;
  const int N = lay.N;
  const double h = d.grid.h;
  ExtendedLayout ext(lay);
  auto trip = detail::assemble_triplets(d, detail::RowMode::Generator);
  auto PHI = [&](int i) { return ext.off_phi + i; };      // 0..N+1
  auto TH = [&](int i) { return ext.off_theta + i - 1; }; // 1..N
  auto ETA = [&](int i) { return ext.off_eta + i; };      // 0..N+1
  const double cg = p.mu / (p.xi * p.eps3);
  const double cm = p.mu / p.eps3;
  for (int i = 0; i <= N + 1; ++i) {
    trip.emplace_back(PHI(i), ETA(i), cg);
    // -(mu/eps3) * (D1 theta~)_i with theta zero-padded
    if (i == 0) {
      trip.emplace_back(PHI(i), TH(1), -cm / h);
    } else if (i == N + 1) {
      trip.emplace_back(PHI(i), TH(N), cm / h);
    } else {
      if (i + 1 <= N) trip.emplace_back(PHI(i), TH(i + 1), -cm / (2 * h));
      if (i - 1 >= 1) trip.emplace_back(PHI(i), TH(i - 1), cm / (2 * h));
    }
  }
  for (int i = 1; i <= N; ++i) {
    trip.emplace_back(TH(i), lay.off_u2 + i - 1, 1.0);
    trip.emplace_back(TH(i), PHI(i + 1), -1.0 / (2 * h));
    trip.emplace_back(TH(i), PHI(i - 1), 1.0 / (2 * h));
  }
  for (int i = 0; i <= N + 1; ++i) {
    trip.emplace_back(ETA(i), lay.off_u3 + i, 1.0);
    trip.emplace_back(ETA(i), PHI(i), -1.0);
  }
  SpMat S(ext.n, ext.n);
  S.setFromTriplets(trip.begin(), trip.end());
  S.makeCompressed();
  return S;
}

/// Implicit-midpoint integrator with a cached factorization of (I - dt/2 S).
class MidpointStepper {
 public:
  MidpointStepper(const Discretization& d, double dt) : disc_(d), dt_(dt) {
    if (!(dt > 0)) throw NonPositiveDtError();
    SpMat S = extended_system(d);
    SpMat I(S.rows(), S.cols());
    I.setIdentity();
    lhs_ = I - (dt / 2) * S;
    rhs_ = I + (dt / 2) * S;
    lhs_.makeCompressed();
    rhs_.makeCompressed();
    lu_.compute(lhs_);
    if (lu_.info() != Eigen::Success)
      throw SolverSingularError("midpoint step matrix (dt=" + std::to_string(dt) + ")");
  }
  Vec step(const Vec& X) const {
    Vec Y = lu_.solve(rhs_ * X);
    if (lu_.info() != Eigen::Success) throw SolverSingularError("midpoint solve");
    return Y;
  }
  double dt() const { return dt_; }
  const Discretization& disc() const { return disc_; }

 private:
  Discretization disc_;
  double dt_;
  SpMat lhs_, rhs_;
  Eigen::SparseLU<SpMat> lu_;
};

/// One implicit-midpoint step of the coupled system (spec surface; for long
/// runs construct a MidpointStepper once).
inline std::pair<PrimalState, HistoryField> step(const PrimalState& st, const HistoryField& kappa,
                                                 double dt, const PhysicalParams& p,
                                                 const MemoryKernel& kernel,
                                                 const MemoryQuadrature& quad,
                                                 const SpatialGrid& g) {
  Discretization d(p, g, kernel, quad);
  Vec X = primal_to_extended(d, st, false);
  auto s = view(d.lay, X);
  for (int jj = 0; jj < d.lay.M; ++jj) s.kappa(jj) = kappa.values.col(jj + 1);
  MidpointStepper stepper(d, dt);
  Vec Y = stepper.step(X);
  return {extended_to_primal(d, Y, st.t + dt), extract_history(d, Y)};
}

// ---------------------------------------------------------------------------
// scenario-level simulation
// ---------------------------------------------------------------------------

struct Trajectory {
  std::vector<double> times;
  std::vector<EnergyBreakdown> energy;
  std::vector<double> residual;       // r_n = (E_{n+1}-E_n)/dt - (D_n+D_{n+1})/2
  double max_monotonicity_violation = 0.0;  // max (E_{n+1}-E_n)/E_0 over increasing steps
  double max_residual = 0.0;
  std::vector<double> compat_residual;      // monitored along the trajectory
  std::vector<std::pair<double, PrimalState>> snapshots;
  std::vector<std::pair<double, HistoryField>> history_snapshots;
  std::uint64_t config_hash = 0;
};

struct SimulateOptions {
  double dt = 1e-3;
  double T_end = 20.0;
  double burn_in = 0.0;       // mode-filtering pre-evolution (state renormalized)
  double burn_in_dt = 5e-3;
  int snapshot_every = 0;     // steps; 0 = none
  bool history_snapshots = false;
  int compat_every = 0;       // steps between compat-residual samples; 0 = start/end only
};

inline Trajectory simulate(const Discretization& d, const PrimalState& initial,
                           bool compat_project, const SimulateOptions& opt) {
  Trajectory out;
  Vec X = primal_to_extended(d, initial, compat_project);
  const int n_state = d.lay.n;
  auto energy_of = [&](const Vec& Xe) {
    return energy_breakdown(d, Xe.head(n_state));
  };
  if (opt.burn_in > 0) {
    MidpointStepper bstep(d, opt.burn_in_dt);
    int nb = static_cast<int>(std::llround(opt.burn_in / opt.burn_in_dt));
    double E0 = energy_of(X).E;
    for (int k = 0; k < nb; ++k) {
      X = bstep.step(X);
      if ((k & 1023) == 0) {
        double e = energy_of(X).E;
        if (e > 0 && (e < 1e-200 || e > 1e200)) X *= 1.0 / std::sqrt(e);
      }
    }
    double e = energy_of(X).E;
    if (e > 0 && E0 > 0) X *= std::sqrt(E0 / e);
  }
  const int nsteps = static_cast<int>(std::llround(opt.T_end / opt.dt));
  MidpointStepper stepper(d, opt.dt);
  out.times.reserve(nsteps + 1);
  out.energy.reserve(nsteps + 1);
  out.times.push_back(0.0);
  out.energy.push_back(energy_of(X));
  auto record_compat = [&](const Vec& Xe) {
    out.compat_residual.push_back(compatibility_residual<double>(d, Vec(Xe.head(n_state))));
  };
  record_compat(X);
  if (opt.snapshot_every > 0) {
    out.snapshots.emplace_back(0.0, extended_to_primal(d, X, 0.0));
    if (opt.history_snapshots) out.history_snapshots.emplace_back(0.0, extract_history(d, X));
  }
  const double E0 = out.energy.front().E;
  for (int k = 0; k < nsteps; ++k) {
    X = stepper.step(X);
    double t = (k + 1) * opt.dt;
    EnergyBreakdown e = energy_of(X);
    const EnergyBreakdown& prev = out.energy.back();
    double r = (e.E - prev.E) / opt.dt - 0.5 * (e.D + prev.D);
    out.residual.push_back(r);
    out.max_residual = std::max(out.max_residual, std::abs(r));
    if (e.E > prev.E)
      out.max_monotonicity_violation =
          std::max(out.max_monotonicity_violation, (e.E - prev.E) / std::max(E0, 1e-300));
    out.times.push_back(t);
    out.energy.push_back(e);
    if (opt.compat_every > 0 && ((k + 1) % opt.compat_every == 0)) record_compat(X);
    if (opt.snapshot_every > 0 && ((k + 1) % opt.snapshot_every == 0)) {
      out.snapshots.emplace_back(t, extended_to_primal(d, X, t));
      if (opt.history_snapshots) out.history_snapshots.emplace_back(t, extract_history(d, X));
    }
  }
  record_compat(X);
  return out;
}

}  // namespace pzlab
