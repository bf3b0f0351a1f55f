// iss.cpp
#include "phaseloss/iss.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "phaseloss/bounds.hpp"
#include "phaseloss/error.hpp"

namespace phaseloss::iss {

using linalg::cplx;
using linalg::CMatrix;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1/omega per parameter; 0 removes the parameter.
struct InvWeights {
  double phi = 0.0;
  double eta = 0.0;
  double of(Param p) const { return p == Param::Phi ? phi : eta; }
};

InvWeights invert(double omega_phi, double omega_eta) {
  auto inv = [](double w) {
    if (std::isinf(w) && w > 0) return 0.0;
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput("ISS weights must be positive or +inf");
    return 1.0 / w;
  };
  return {inv(omega_phi), inv(omega_eta)};
}

// Adds w * conj(a_n) a_n' [2 (conj(g_n) + g_n') L - L^2](n-m, n'-m) for n, n' >= m.
void add_block(CMatrix& M, const KrausFamily& kraus, int m, Param p, const CMatrix& L, const CMatrix& L2,
               double weight) {
  const int n_max = kraus.n_max();
  const Eigen::Index d = n_max - m + 1;
  CVector a(d), g(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    a(k) = kraus.amplitude(m, m + static_cast<int>(k));
    g(k) = kraus.gamma(p, m, m + static_cast<int>(k));
  }
  const auto Ls = L.topLeftCorner(d, d);
  const auto L2s = L2.topLeftCorner(d, d);
  CMatrix X = 2.0 * (g.conjugate().asDiagonal() * Ls + Ls * g.asDiagonal()) - L2s;
  M.bottomRightCorner(d, d) += weight * (a.conjugate().asDiagonal() * X * a.asDiagonal());
}

const HermitianMatrix& block_for(const BlockOperator& A, Scenario s, int m) {
  return s == Scenario::SingleMode ? A.blocks.at(0) : A.blocks.at(m);
}

// One SLD refresh for the current probe: the weighted objective at psi and
// the see-saw matrix M.
struct Step {
  double objective = 0.0;
  CMatrix M;
};

Step two_mode_step(const CVector& psi, const KrausFamily& kraus, const InvWeights& iw) {
  const int n_max = kraus.n_max();
  Step st;
  st.M = CMatrix::Zero(n_max + 1, n_max + 1);
  for (int m = 0; m <= n_max; ++m) {
    const CVector v = kraus.apply(m, psi);
    const double t = v.squaredNorm();
    if (t < 1e-300) continue;
    for (Param p : {Param::Phi, Param::Eta}) {
      if (iw.of(p) == 0.0) continue;
      const CVector w = kraus.apply_derivative(m, p, psi);
      // L = U C U^dag with U = [v, w]; L^2 = U (C U^dag U C) U^dag.
      CMatrix U(v.size(), 2);
      U.col(0) = v;
      U.col(1) = w;
      const double dt = 2.0 * v.dot(w).real();
      Eigen::Matrix2cd C;
      C << -dt / (t * t), 2.0 / t, 2.0 / t, 0.0;
      const Eigen::Matrix2cd C2 = C * (U.adjoint() * U) * C;
      const CMatrix L = U * C * U.adjoint();
      const CMatrix L2 = U * C2 * U.adjoint();
      const CVector lv = 2.0 * w - cplx(0.0, 2.0 * v.dot(w).imag() / t) * v;
      st.objective += iw.of(p) * lv.squaredNorm();
      add_block(st.M, kraus, m, p, L, L2, iw.of(p));
    }
  }
  st.M = 0.5 * (st.M + st.M.adjoint()).eval();
  return st;
}

Step generic_step(const FockProbe& probe, const KrausFamily& kraus, const InvWeights& iw) {
  const auto rho = channel::apply_channel(probe, kraus);
  const auto d = channel::apply_channel_derivatives(probe, kraus);
  const SldSet slds = qfi::compute_slds(rho, d.phi, d.eta);
  const qfi::QfiReport rep = qfi::qfi_from_slds(rho, slds);
  Step st;
  st.objective = iw.phi * rep.F(0, 0) + iw.eta * rep.F(1, 1);
  st.M = build_m_matrix(probe, slds, kraus, iw.phi > 0 ? 1.0 / iw.phi : kInf, iw.eta > 0 ? 1.0 / iw.eta : kInf)
             .matrix();
  return st;
}

// Top eigenvector of M; within a degenerate top eigenspace, the direction
// closest to the previous iterate.
CVector top_eigenvector(const CMatrix& M, const CVector& previous) {
  const linalg::EigenSystem es = linalg::hermitian_eig(HermitianMatrix(M));
  const double top = es.eigenvalues(0);
  const double gap_tol = 1e-10 * std::max(1.0, std::abs(top));
  Eigen::Index k = 1;
  while (k < es.eigenvalues.size() && top - es.eigenvalues(k) < gap_tol) ++k;
  if (k == 1) return es.eigenvectors.col(0);
  const CMatrix Q = es.eigenvectors.leftCols(k);
  CVector proj = Q * (Q.adjoint() * previous);
  if (proj.norm() < 1e-8) return es.eigenvectors.col(0);
  return proj / proj.norm();
}

CVector random_probe(std::size_t dim, std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  CVector c(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    c(i) = cplx(re, im);
  }
  return c / c.norm();
}

struct RunOutput {
  CVector psi;
  std::vector<double> trace;
  bool converged = false;
  int iterations = 0;
};

RunOutput run_one(const IssConfig& cfg, const KrausFamily& kraus, Scenario scenario, const InvWeights& iw,
                  CVector psi) {
  RunOutput out;
  for (;;) {
    const FockProbe probe(scenario, psi);
    const Step st = scenario == Scenario::TwoMode ? two_mode_step(psi, kraus, iw) : generic_step(probe, kraus, iw);
    out.trace.push_back(st.objective);
    const auto n = static_cast<int>(out.trace.size());
    if (n >= cfg.conv_window) {
      const auto first = out.trace.end() - cfg.conv_window;
      const double hi = *std::max_element(first, out.trace.end());
      const double lo = *std::min_element(first, out.trace.end());
      if (hi - lo <= cfg.conv_rel_tol * std::abs(hi)) {
        out.converged = true;
        break;
      }
    }
    if (out.iterations >= cfg.max_iters) break;
    CVector next = top_eigenvector(st.M, psi);
    psi = next / next.norm();
    ++out.iterations;
  }
  out.psi = psi;
  return out;
}

}  // namespace

void IssConfig::validate() const {
  if (conv_window < 2) throw InvalidInput("IssConfig: conv_window must be >= 2");
  if (!(conv_rel_tol > 0.0)) throw InvalidInput("IssConfig: conv_rel_tol must be positive");
  if (max_iters < 0) throw InvalidInput("IssConfig: max_iters must be >= 0");
  if (restarts < 1) throw InvalidInput("IssConfig: restarts must be >= 1");
  if (threads < 0) throw InvalidInput("IssConfig: threads must be >= 0");
  if (std::isinf(omega_phi) && std::isinf(omega_eta)) throw InvalidInput("IssConfig: both weights are infinite");
  if (std::isnan(omega_phi) || std::isnan(omega_eta)) throw InvalidInput("IssConfig: NaN weight");
}

double pre_qfi(const FockProbe& probe, const BlockOperator& A, const KrausFamily& kraus, Param which) {
  if (probe.scenario() != kraus.scenario() || probe.n_max() != kraus.n_max())
    throw InvalidInput("pre_qfi: probe and Kraus family do not match");
  const std::size_t want = kraus.scenario() == Scenario::SingleMode ? 1 : static_cast<std::size_t>(kraus.count());
  if (A.blocks.size() != want) throw InvalidInput("pre_qfi: operator has the wrong block layout");
  double total = 0.0;
  for (int m = 0; m < kraus.count(); ++m) {
    const CVector v = kraus.apply(m, probe.coeffs());
    const CVector w = kraus.apply_derivative(m, which, probe.coeffs());
    const CMatrix& a = block_for(A, kraus.scenario(), m).matrix();
    if (a.rows() != v.size()) throw InvalidInput("pre_qfi: operator block has the wrong size");
    const CVector av = a * v;
    total += 4.0 * av.dot(w).real() - av.squaredNorm();
  }
  return total;
}

HermitianMatrix build_m_matrix(const FockProbe& probe, const SldSet& slds, const KrausFamily& kraus,
                               double omega_phi, double omega_eta) {
  if (probe.scenario() != kraus.scenario() || probe.n_max() != kraus.n_max())
    throw InvalidInput("build_m_matrix: probe and Kraus family do not match");
  const InvWeights iw = invert(omega_phi, omega_eta);
  const Scenario s = kraus.scenario();
  const int dim = kraus.n_max() + 1;
  CMatrix M = CMatrix::Zero(dim, dim);
  for (Param p : {Param::Phi, Param::Eta}) {
    if (iw.of(p) == 0.0) continue;
    const BlockOperator& L = p == Param::Phi ? slds.phi : slds.eta;
    if (s == Scenario::SingleMode) {
      const CMatrix& l = L.blocks.at(0).matrix();
      const CMatrix l2 = l * l;
      for (int m = 0; m < kraus.count(); ++m) add_block(M, kraus, m, p, l, l2, iw.of(p));
    } else {
      for (int m = 0; m < kraus.count(); ++m) {
        const CMatrix& l = L.blocks.at(m).matrix();
        add_block(M, kraus, m, p, l, l * l, iw.of(p));
      }
    }
  }
  return HermitianMatrix(M);
}

IssResult optimize(const IssConfig& config, const ChannelParams& params, Scenario scenario) {
  config.validate();
  params.validate();
  const auto limits = bounds::fundamental_limits(params.n_max, params.eta);
  const double w_phi = config.omega_phi > 0.0 ? config.omega_phi : limits.f_phi_max_s12;
  const double w_eta = config.omega_eta > 0.0 ? config.omega_eta : limits.f_eta_max;
  const InvWeights iw = invert(w_phi, w_eta);
  const KrausFamily kraus(params, scenario);
  const std::size_t dim = params.n_max + 1;
  if (config.initial && static_cast<std::size_t>(config.initial->size()) != dim)
    throw InvalidInput("IssConfig: initial probe has the wrong dimension");

  std::vector<RunOutput> runs(config.restarts);
  std::vector<std::exception_ptr> errors(config.restarts);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k; (k = next.fetch_add(1)) < config.restarts;) {
      try {
        CVector start = (k == 0 && config.initial) ? CVector(*config.initial / config.initial->norm())
                                                   : random_probe(dim, config.seed, k);
        runs[k] = run_one(config, kraus, scenario, iw, std::move(start));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  int nthreads = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::clamp(nthreads, 1, config.restarts);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  IssResult res;
  int best = 0;
  for (int k = 0; k < config.restarts; ++k) {
    res.restarts.push_back({runs[k].trace.back(), runs[k].iterations, runs[k].converged});
    if (runs[k].trace.back() > runs[best].trace.back()) best = k;
  }
  res.best_restart = best;
  res.probe = fix_phase_gauge(FockProbe::normalized(scenario, runs[best].psi));
  res.objective_trace = std::move(runs[best].trace);
  res.converged = runs[best].converged;
  res.iterations = runs[best].iterations;
  res.final_qfi = qfi::with_weights(qfi::probe_qfi(res.probe, kraus),
                                    qfi::normalization_weights(limits.f_phi_max_s12, limits.f_eta_max));
  return res;
}

FockProbe fix_phase_gauge(const FockProbe& probe) {
  const CVector& c = probe.coeffs();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < c.size(); ++i)
    if (std::abs(c(i)) > std::abs(c(best)) * (1.0 + 1e-12)) best = i;
  if (std::abs(c(best)) == 0.0) return probe;
  const cplx phase = std::conj(c(best)) / std::abs(c(best));
  CVector out = c * phase;
  out(best) = std::abs(c(best));
  return FockProbe::normalized(probe.scenario(), out);
}

ProbeStatistics probe_statistics(const FockProbe& probe) {
  const bounds::Moments m = bounds::sensing_moments(probe);
  return {m.mean, m.var};
}

}  // namespace phaseloss::iss
