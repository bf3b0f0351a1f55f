// qfi.cpp
#include "phaseloss/qfi.hpp"

#include <algorithm>
#include <cmath>

#include "phaseloss/error.hpp"

namespace phaseloss::qfi {

using channel::Param;
using channel::Scenario;
using linalg::CMatrix;

namespace {

constexpr double kPsdTol = 1e-10;

void check_layout(const BlockDensity& a, const BlockDensity& b, const char* what) {
  if (a.blocks.size() != b.blocks.size()) throw InvalidInput(std::string(what) + ": block count mismatch");
  for (std::size_t k = 0; k < a.blocks.size(); ++k)
    if (a.blocks[k].dim() != b.blocks[k].dim()) throw InvalidInput(std::string(what) + ": block shape mismatch");
}

// Accumulates T_ij = Tr(rho L_i L_j) for one block.
void accumulate(const CMatrix& rho, const CMatrix& lp, const CMatrix& le, Eigen::Matrix2cd& T) {
  const CMatrix xp = rho * lp;
  const CMatrix xe = rho * le;
  T(0, 0) += (xp.array() * lp.transpose().array()).sum();
  T(1, 1) += (xe.array() * le.transpose().array()).sum();
  T(0, 1) += (xp.array() * le.transpose().array()).sum();
}

QfiReport from_traces(const Eigen::Matrix2cd& T) {
  QfiReport r;
  r.F(0, 0) = T(0, 0).real();
  r.F(1, 1) = T(1, 1).real();
  r.F(0, 1) = r.F(1, 0) = T(0, 1).real();
  r.i_phieta = T(0, 1).imag();
  return r;
}

}  // namespace

SldSet compute_slds(const BlockDensity& rho, const BlockDensity& drho_phi, const BlockDensity& drho_eta,
                    double rank_tol) {
  check_layout(rho, drho_phi, "compute_slds");
  check_layout(rho, drho_eta, "compute_slds");
  std::vector<linalg::EigenSystem> eigs;
  eigs.reserve(rho.blocks.size());
  double pmax = 0.0;
  for (const auto& b : rho.blocks) {
    eigs.push_back(linalg::hermitian_eig(b));
    if (eigs.back().eigenvalues.size() > 0) pmax = std::max(pmax, eigs.back().eigenvalues(0));
  }
  for (const auto& e : eigs) {
    const Eigen::Index n = e.eigenvalues.size();
    if (n > 0 && e.eigenvalues(n - 1) < -kPsdTol * std::max(1.0, pmax))
      throw InvalidState("compute_slds: density block has a negative eigenvalue " +
                         std::to_string(e.eigenvalues(n - 1)));
  }

  SldSet out;
  out.phi.scenario = out.eta.scenario = rho.scenario;
  for (std::size_t k = 0; k < eigs.size(); ++k) {
    // Rescale so the cut is relative to the global largest eigenvalue.
    const double local = eigs[k].eigenvalues.size() > 0 ? eigs[k].eigenvalues(0) : 0.0;
    if (!(local > rank_tol * pmax)) {
      // Whole block below the cut: kernel convention gives L = 0.
      out.phi.blocks.push_back(HermitianMatrix::zero(rho.blocks[k].dim()));
      out.eta.blocks.push_back(HermitianMatrix::zero(rho.blocks[k].dim()));
      continue;
    }
    const double tol = rank_tol * pmax / local;
    out.phi.blocks.push_back(linalg::solve_sld(eigs[k], drho_phi.blocks[k], tol));
    out.eta.blocks.push_back(linalg::solve_sld(eigs[k], drho_eta.blocks[k], tol));
  }
  return out;
}

SldSet analytic_two_mode_slds(const FockProbe& probe, const KrausFamily& kraus) {
  if (probe.scenario() != Scenario::TwoMode || kraus.scenario() != Scenario::TwoMode)
    throw InvalidInput("analytic_two_mode_slds: requires the two-mode scenario");
  SldSet out;
  out.phi.scenario = out.eta.scenario = Scenario::TwoMode;
  const CVector& psi = probe.coeffs();
  for (int m = 0; m < kraus.count(); ++m) {
    const CVector v = kraus.apply(m, psi);
    const double t = v.squaredNorm();
    for (Param p : {Param::Phi, Param::Eta}) {
      auto& dst = p == Param::Phi ? out.phi.blocks : out.eta.blocks;
      if (t < 1e-300) {
        dst.push_back(HermitianMatrix::zero(v.size()));
        continue;
      }
      const CVector w = kraus.apply_derivative(m, p, psi);
      const double dt = 2.0 * v.dot(w).real();  // Tr d rho_m; dot conjugates the first argument
      CMatrix L = (2.0 / t) * (w * v.adjoint() + v * w.adjoint()) - (dt / (t * t)) * v * v.adjoint();
      dst.emplace_back(L);
    }
  }
  return out;
}

QfiReport qfi_from_slds(const BlockDensity& rho, const SldSet& slds) {
  check_layout(rho, slds.phi, "qfi_from_slds");
  check_layout(rho, slds.eta, "qfi_from_slds");
  Eigen::Matrix2cd T = Eigen::Matrix2cd::Zero();
  for (std::size_t k = 0; k < rho.blocks.size(); ++k)
    accumulate(rho.blocks[k].matrix(), slds.phi.blocks[k].matrix(), slds.eta.blocks[k].matrix(), T);
  return from_traces(T);
}

QfiReport qfi_matrix(const BlockDensity& rho, const BlockDensity& drho_phi, const BlockDensity& drho_eta,
                     double rank_tol) {
  return qfi_from_slds(rho, compute_slds(rho, drho_phi, drho_eta, rank_tol));
}

QfiReport qfi_matrix(const HermitianMatrix& rho, const HermitianMatrix& drho_phi, const HermitianMatrix& drho_eta,
                     double rank_tol) {
  BlockDensity r, dp, de;
  r.blocks = {rho};
  dp.blocks = {drho_phi};
  de.blocks = {drho_eta};
  return qfi_matrix(r, dp, de, rank_tol);
}

QfiReport probe_qfi(const FockProbe& probe, const KrausFamily& kraus, SldMethod method, double rank_tol) {
  if (probe.scenario() == Scenario::TwoMode && method == SldMethod::Analytic) {
    // For rho_m = |v><v|: L v = 2 w - (2 i Im<v|w> / t) v, and
    // Tr(rho_m L_i L_j) = <L_i v | L_j v>.
    const CVector& psi = probe.coeffs();
    if (probe.n_max() != kraus.n_max() || kraus.scenario() != Scenario::TwoMode)
      throw InvalidInput("probe_qfi: probe and Kraus family do not match");
    Eigen::Matrix2cd T = Eigen::Matrix2cd::Zero();
    for (int m = 0; m < kraus.count(); ++m) {
      const CVector v = kraus.apply(m, psi);
      const double t = v.squaredNorm();
      if (t < 1e-300) continue;
      const CVector wp = kraus.apply_derivative(m, Param::Phi, psi);
      const CVector we = kraus.apply_derivative(m, Param::Eta, psi);
      const CVector lp = 2.0 * wp - cplx(0.0, 2.0 * v.dot(wp).imag() / t) * v;
      const CVector le = 2.0 * we - cplx(0.0, 2.0 * v.dot(we).imag() / t) * v;
      T(0, 0) += lp.squaredNorm();
      T(1, 1) += le.squaredNorm();
      T(0, 1) += lp.dot(le);
    }
    return from_traces(T);
  }
  const auto rho = channel::apply_channel(probe, kraus);
  const auto d = channel::apply_channel_derivatives(probe, kraus);
  return qfi_matrix(rho, d.phi, d.eta, rank_tol);
}

double scalar_crb(const Eigen::Matrix2d& F, const Eigen::Matrix2d& W) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(0.5 * (F + F.transpose()));
  const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(1);
  if (!(hi > 0.0) || !(lo > 0.0) || lo / hi < 1e-12)
    throw SingularInformation("scalar_crb: QFI matrix is singular (eigenvalues " + std::to_string(lo) + ", " +
                                  std::to_string(hi) + ")",
                              es.eigenvectors().col(0));
  return (W * F.inverse()).trace();
}

double hcrb_upper(const Eigen::Matrix2d& F, double i_phieta, const Eigen::Matrix2d& W) {
  const double cs = scalar_crb(F, W);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> ws(0.5 * (W + W.transpose()));
  const Eigen::Matrix2cd sw = ws.operatorSqrt().cast<cplx>();
  const Eigen::Matrix2cd finv = F.inverse().cast<cplx>();
  Eigen::Matrix2cd I;
  I << 0.0, cplx(0.0, i_phieta), cplx(0.0, -i_phieta), 0.0;
  const Eigen::Matrix2cd X = sw * finv * I * finv * sw;
  return cs + linalg::trace_norm(X);
}

double probe_quantifier(const Eigen::Matrix2d& F, double fmax_phi, double fmax_eta) {
  if (!(fmax_phi > 0.0) || !(fmax_eta > 0.0)) throw InvalidInput("probe_quantifier: Fmax values must be positive");
  return 0.5 * (F(0, 0) / fmax_phi + F(1, 1) / fmax_eta);
}

Eigen::Matrix2d normalization_weights(double fmax_phi, double fmax_eta) {
  Eigen::Matrix2d W = Eigen::Matrix2d::Zero();
  W(0, 0) = fmax_phi;
  W(1, 1) = fmax_eta;
  return W;
}

QfiReport with_weights(QfiReport report, const Eigen::Matrix2d& W) {
  report.W = W;
  try {
    report.c_s = scalar_crb(report.F, W);
    report.c_h_bar = hcrb_upper(report.F, report.i_phieta, W);
  } catch (const SingularInformation&) {
    report.c_s = report.c_h_bar = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

double meas_quantifiers(const QfiReport& report) {
  if (!std::isfinite(report.c_s) || !std::isfinite(report.c_h_bar) || !(report.c_h_bar > 0.0))
    throw InvalidInput("meas_quantifiers: report has no finite C_S / C_H_bar (apply with_weights first)");
  return report.c_s / report.c_h_bar;
}

}  // namespace phaseloss::qfi
