// channel.cpp
#include "phaseloss/channel.hpp"

#include <cmath>
#include <string>

#include "phaseloss/error.hpp"

namespace phaseloss::channel {

namespace {

void check_match(const FockProbe& probe, const KrausFamily& kraus) {
  if (probe.scenario() != kraus.scenario())
    throw InvalidInput("channel: probe and Kraus family scenarios differ");
  if (probe.n_max() != kraus.n_max())
    throw InvalidInput("channel: probe cutoff " + std::to_string(probe.n_max()) +
                       " does not match Kraus cutoff " + std::to_string(kraus.n_max()));
}

}  // namespace

void ChannelParams::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidInput("ChannelParams: eta must lie in (0,1)");
  if (n_max < 1) throw InvalidInput("ChannelParams: n_max must be >= 1");
  if (!std::isfinite(phi)) throw InvalidInput("ChannelParams: phi is not finite");
}

FockProbe::FockProbe(Scenario scenario, CVector coeffs) : scenario_(scenario), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() < 2) throw InvalidInput("FockProbe: need at least coefficients c_0, c_1");
  if (!coeffs_.allFinite()) throw InvalidInput("FockProbe: non-finite coefficient");
  if (std::abs(coeffs_.squaredNorm() - 1.0) > 1e-12) throw InvalidInput("FockProbe: coefficients not normalized");
}

FockProbe FockProbe::normalized(Scenario scenario, CVector coeffs) {
  const double nrm = coeffs.norm();
  if (!(nrm > 0.0)) throw InvalidInput("FockProbe: zero coefficient vector");
  return FockProbe(scenario, coeffs / nrm);
}

FockProbe FockProbe::fock(Scenario scenario, int n_max, int n) {
  if (n < 0 || n > n_max) throw InvalidInput("FockProbe::fock: n outside [0, n_max]");
  CVector c = CVector::Zero(n_max + 1);
  c(n) = 1.0;
  return FockProbe(scenario, c);
}

double binomial_loss_coeff(int n, int m, double eta) {
  if (n < 0 || m < 0 || m > n) throw InvalidInput("binomial_loss_coeff: need 0 <= m <= n");
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidInput("binomial_loss_coeff: eta outside [0,1]");
  const int k = n - m;  // survivors
  if (n <= 60) {
    double c = 1.0;
    for (int i = 1; i <= std::min(m, k); ++i) c = c * (n - std::min(m, k) + i) / i;
    return c * std::pow(eta, k) * std::pow(1.0 - eta, m);
  }
  double lg = std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(k + 1.0);
  if (k > 0) {
    if (eta == 0.0) return 0.0;
    lg += k * std::log(eta);
  }
  if (m > 0) {
    if (eta == 1.0) return 0.0;
    lg += m * std::log1p(-eta);
  }
  return std::exp(lg);
}

KrausFamily::KrausFamily(const ChannelParams& params, Scenario scenario) : params_(params), scenario_(scenario) {
  params_.validate();
  const int N = params_.n_max;
  sqrt_b_.assign(N + 1, RVector::Zero(N + 1));
  for (int m = 0; m <= N; ++m)
    for (int n = m; n <= N; ++n) sqrt_b_[m](n) = std::sqrt(binomial_loss_coeff(n, m, params_.eta));
  phase_.resize(N + 1);
  for (int n = 0; n <= N; ++n) phase_(n) = std::polar(1.0, n * params_.phi);
}

Eigen::Index KrausFamily::output_dim(int m) const {
  return scenario_ == Scenario::SingleMode ? params_.n_max + 1 : params_.n_max - m + 1;
}

cplx KrausFamily::amplitude(int m, int n) const { return sqrt_b_[m](n) * phase_(n); }

double KrausFamily::gamma_eta(int m, int n) const {
  const double eta = params_.eta;
  return (n * (1.0 - eta) - m) / (2.0 * eta * (1.0 - eta));
}

cplx KrausFamily::gamma(Param p, int m, int n) const {
  return p == Param::Phi ? cplx(0.0, n) : cplx(gamma_eta(m, n));
}

CMatrix KrausFamily::matrix(int m) const {
  const int N = params_.n_max;
  CMatrix k = CMatrix::Zero(output_dim(m), N + 1);
  for (int n = m; n <= N; ++n) k(n - m, n) = amplitude(m, n);
  return k;
}

CMatrix KrausFamily::derivative(int m, Param p) const {
  const int N = params_.n_max;
  CMatrix k = CMatrix::Zero(output_dim(m), N + 1);
  for (int n = m; n <= N; ++n) k(n - m, n) = gamma(p, m, n) * amplitude(m, n);
  return k;
}

CVector KrausFamily::apply(int m, const CVector& psi) const {
  const int N = params_.n_max;
  CVector out = CVector::Zero(output_dim(m));
  for (int n = m; n <= N; ++n) out(n - m) = amplitude(m, n) * psi(n);
  return out;
}

CVector KrausFamily::apply_derivative(int m, Param p, const CVector& psi) const {
  const int N = params_.n_max;
  CVector out = CVector::Zero(output_dim(m));
  for (int n = m; n <= N; ++n) out(n - m) = gamma(p, m, n) * amplitude(m, n) * psi(n);
  return out;
}

double BlockDensity::trace() const {
  double t = 0.0;
  for (const auto& b : blocks) t += b.trace();
  return t;
}

Eigen::Index BlockDensity::total_dim() const {
  Eigen::Index d = 0;
  for (const auto& b : blocks) d += b.dim();
  return d;
}

CMatrix BlockDensity::dense() const {
  CMatrix out = CMatrix::Zero(total_dim(), total_dim());
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    out.block(off, off, b.dim(), b.dim()) = b.matrix();
    off += b.dim();
  }
  return out;
}

std::vector<CVector> branch_states(const FockProbe& probe, const KrausFamily& kraus) {
  check_match(probe, kraus);
  std::vector<CVector> out;
  out.reserve(kraus.count());
  for (int m = 0; m < kraus.count(); ++m) out.push_back(kraus.apply(m, probe.coeffs()));
  return out;
}

BlockDensity apply_channel(const FockProbe& probe, const KrausFamily& kraus) {
  check_match(probe, kraus);
  BlockDensity rho;
  rho.scenario = probe.scenario();
  const int N = kraus.n_max();
  if (probe.scenario() == Scenario::SingleMode) {
    CMatrix acc = CMatrix::Zero(N + 1, N + 1);
    for (int m = 0; m <= N; ++m) {
      const CVector v = kraus.apply(m, probe.coeffs());
      acc.noalias() += v * v.adjoint();
    }
    rho.blocks.emplace_back(acc);
  } else {
    rho.blocks.reserve(N + 1);
    for (int m = 0; m <= N; ++m) rho.blocks.push_back(HermitianMatrix::projector(kraus.apply(m, probe.coeffs())));
  }
  return rho;
}

DensityDerivatives apply_channel_derivatives(const FockProbe& probe, const KrausFamily& kraus) {
  check_match(probe, kraus);
  DensityDerivatives out;
  out.phi.scenario = out.eta.scenario = probe.scenario();
  const int N = kraus.n_max();
  const CVector& psi = probe.coeffs();
  const bool single = probe.scenario() == Scenario::SingleMode;
  CMatrix acc_phi, acc_eta;
  if (single) {
    acc_phi = CMatrix::Zero(N + 1, N + 1);
    acc_eta = CMatrix::Zero(N + 1, N + 1);
  }
  for (int m = 0; m <= N; ++m) {
    const CVector v = kraus.apply(m, psi);
    const CVector vp = kraus.apply_derivative(m, Param::Phi, psi);
    const CVector ve = kraus.apply_derivative(m, Param::Eta, psi);
    // d(v v^dag) = dv v^dag + v dv^dag; the Hermitian part is taken on construction.
    if (single) {
      acc_phi.noalias() += 2.0 * vp * v.adjoint();
      acc_eta.noalias() += 2.0 * ve * v.adjoint();
    } else {
      out.phi.blocks.emplace_back(CMatrix(2.0 * vp * v.adjoint()));
      out.eta.blocks.emplace_back(CMatrix(2.0 * ve * v.adjoint()));
    }
  }
  if (single) {
    out.phi.blocks.emplace_back(acc_phi);
    out.eta.blocks.emplace_back(acc_eta);
  }
  return out;
}

}  // namespace phaseloss::channel
