// measurement.cpp
#include "phaseloss/measurement.hpp"

#include <cmath>
#include <limits>

#include "phaseloss/error.hpp"

namespace phaseloss::measurement {

using gaussian::Matrix4cd;
using gaussian::Vector4cd;
using linalg::cplx;
using linalg::CMatrix;
using linalg::CVector;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix4cd lift(const Eigen::Matrix2cd& b) {
  Matrix4cd big = Matrix4cd::Zero();
  big.topLeftCorner<2, 2>() = b;
  big.bottomRightCorner<2, 2>() = b.conjugate();
  return big;
}

// Symmetrized covariance of the linear forms sum_k ci_k dA_k and sum_k cj_k dA_k.
double linear_cov(const Vector4cd& ci, const Vector4cd& cj, const Matrix4cd& sigma) {
  static constexpr int swap[4] = {2, 3, 0, 1};
  cplx s = 0.0;
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) s += ci(k) * cj(l) * sigma(k, swap[l]);
  return 0.5 * s.real();
}

struct GaussianOutput {
  GaussianState state;
  StateDerivatives deriv;
};

GaussianOutput detected(const GaussianState& probe, const ChannelParams& params, double tau_in,
                        const DetectionScheme& scheme) {
  scheme.validate();
  return {output_transform(scheme, gaussian::evolve(probe, params, tau_in)),
          output_transform(scheme, gaussian::evolve_derivatives(probe, params, tau_in))};
}

}  // namespace

void DetectionScheme::validate() const {
  if (!(tau_out >= 0.0 && tau_out <= 1.0)) throw InvalidInput("DetectionScheme: tau_out must lie in [0,1]");
  if (!std::isfinite(xi)) throw InvalidInput("DetectionScheme: xi is not finite");
}

Eigen::Matrix2cd output_beamsplitter(double tau_out) {
  const double t = std::sqrt(tau_out), s = std::sqrt(1.0 - tau_out);
  Eigen::Matrix2cd b;
  b << t, cplx(0.0, -s), cplx(0.0, -s), t;
  return b;
}

GaussianState output_transform(const DetectionScheme& scheme, const GaussianState& state) {
  scheme.validate();
  const Matrix4cd V = lift(output_beamsplitter(scheme.tau_out));
  GaussianState out;
  out.sigma = V * state.sigma * V.adjoint();
  out.d = V * state.d;
  return out;
}

StateDerivatives output_transform(const DetectionScheme& scheme, const StateDerivatives& dv) {
  scheme.validate();
  const Matrix4cd V = lift(output_beamsplitter(scheme.tau_out));
  StateDerivatives out;
  out.dsigma_phi = V * dv.dsigma_phi * V.adjoint();
  out.dsigma_eta = V * dv.dsigma_eta * V.adjoint();
  out.dd_phi = V * dv.dd_phi;
  out.dd_eta = V * dv.dd_eta;
  return out;
}

CMatrix sector_unitary(int total, double tau_out) {
  if (total < 0) throw InvalidInput("sector_unitary: negative photon number");
  if (!(tau_out >= 0.0 && tau_out <= 1.0)) throw InvalidInput("sector_unitary: tau_out must lie in [0,1]");
  const int d = total + 1;
  // b1^dag b2 |k, S-k> = sqrt((k+1)(S-k)) |k+1, S-k-1>.
  CMatrix G = CMatrix::Zero(d, d);
  for (int k = 0; k + 1 < d; ++k) {
    const double g = std::sqrt(static_cast<double>(k + 1) * (total - k));
    G(k + 1, k) = g;
    G(k, k + 1) = g;
  }
  const double theta = std::acos(std::sqrt(tau_out));
  const linalg::EigenSystem es = linalg::hermitian_eig(linalg::HermitianMatrix(G));
  CVector ph(d);
  for (int k = 0; k < d; ++k) ph(k) = std::polar(1.0, -theta * es.eigenvalues(k));
  return es.eigenvectors * ph.asDiagonal() * es.eigenvectors.adjoint();
}

BlockDensity output_transform(const DetectionScheme& scheme, const BlockDensity& rho) {
  scheme.validate();
  if (rho.scenario != channel::Scenario::TwoMode)
    throw InvalidInput("output_transform: the output beamsplitter needs the two-mode scenario");
  BlockDensity out;
  out.scenario = rho.scenario;
  for (const auto& b : rho.blocks) {
    const CMatrix U = sector_unitary(static_cast<int>(b.dim()) - 1, scheme.tau_out);
    out.blocks.emplace_back(U * b.matrix() * U.adjoint());
  }
  return out;
}

MomentSet counting_moments(const GaussianState& probe, const ChannelParams& params, double tau_in,
                           const DetectionScheme& scheme) {
  const GaussianOutput g = detected(probe, params, tau_in, scheme);
  const Matrix4cd& s = g.state.sigma;
  const Vector4cd& d = g.state.d;
  MomentSet m;
  for (int i = 0; i < 2; ++i) {
    m.means(i) = 0.5 * (s(i, i).real() - 1.0) + std::norm(d(i));
    m.d_phi(i) = 0.5 * g.deriv.dsigma_phi(i, i).real() + 2.0 * (std::conj(d(i)) * g.deriv.dd_phi(i)).real();
    m.d_eta(i) = 0.5 * g.deriv.dsigma_eta(i, i).real() + 2.0 * (std::conj(d(i)) * g.deriv.dd_eta(i)).real();
  }
  // Wick: Cov(n_i, n_j) = |N_ij|^2 + |M_ij|^2 + delta_ij N_ii + linear part,
  // N_ij = <da_i^dag da_j>, M_ij = <da_i da_j>.
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const cplx Nij = 0.5 * (std::conj(s(i, j)) - (i == j ? 1.0 : 0.0));
      const cplx Mij = 0.5 * s(i, j + 2);
      double c = std::norm(Nij) + std::norm(Mij) + (i == j ? Nij.real() : 0.0);
      Vector4cd ci = Vector4cd::Zero(), cj = Vector4cd::Zero();
      ci(i) = std::conj(d(i));
      ci(i + 2) = d(i);
      cj(j) = std::conj(d(j));
      cj(j + 2) = d(j);
      c += linear_cov(ci, cj, s);
      m.cov(i, j) = c;
    }
  }
  m.cov = 0.5 * (m.cov + m.cov.transpose()).eval();
  return m;
}

MomentSet homodyne_moments(const GaussianState& probe, const ChannelParams& params, double tau_in,
                           const DetectionScheme& scheme) {
  const GaussianOutput g = detected(probe, params, tau_in, scheme);
  const cplx u = cplx(0.0, 1.0) * std::polar(1.0, scheme.xi);  // X = u c^dag + conj(u) c
  MomentSet m;
  Vector4cd c[2];
  for (int i = 0; i < 2; ++i) {
    m.means(i) = 2.0 * (std::conj(u) * g.state.d(i)).real();
    m.d_phi(i) = 2.0 * (std::conj(u) * g.deriv.dd_phi(i)).real();
    m.d_eta(i) = 2.0 * (std::conj(u) * g.deriv.dd_eta(i)).real();
    c[i] = Vector4cd::Zero();
    c[i](i) = std::conj(u);
    c[i](i + 2) = u;
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.cov(i, j) = linear_cov(c[i], c[j], g.state.sigma);
  m.cov = 0.5 * (m.cov + m.cov.transpose()).eval();
  return m;
}

MomentSet moments(const GaussianState& probe, const ChannelParams& params, double tau_in,
                  const DetectionScheme& scheme) {
  return scheme.kind == DetectionKind::Homodyne ? homodyne_moments(probe, params, tau_in, scheme)
                                                : counting_moments(probe, params, tau_in, scheme);
}

MomentSet counting_moments(const FockProbe& probe, const ChannelParams& params, const DetectionScheme& scheme) {
  scheme.validate();
  params.validate();
  if (probe.n_max() != params.n_max) throw InvalidInput("counting_moments: probe cutoff differs from n_max");
  const channel::KrausFamily kraus(params, probe.scenario());
  const BlockDensity rho = channel::apply_channel(probe, kraus);
  const channel::DensityDerivatives dr = channel::apply_channel_derivatives(probe, kraus);
  MomentSet m;
  const int N = params.n_max;

  if (probe.scenario() == channel::Scenario::SingleMode) {
    const Eigen::VectorXd n = Eigen::VectorXd::LinSpaced(N + 1, 0.0, N);
    const Eigen::VectorXd p = rho.blocks[0].matrix().diagonal().real();
    m.means(0) = p.dot(n);
    m.d_phi(0) = dr.phi.blocks[0].matrix().diagonal().real().dot(n);
    m.d_eta(0) = dr.eta.blocks[0].matrix().diagonal().real().dot(n);
    m.cov(0, 0) = p.dot(n.cwiseProduct(n)) - m.means(0) * m.means(0);
    return m;
  }

  // Sector S = N - m, basis |k, S-k>: n1 = k, n2 = S - k.
  const BlockDensity r = output_transform(scheme, rho);
  const BlockDensity rp = output_transform(scheme, dr.phi);
  const BlockDensity re = output_transform(scheme, dr.eta);
  Eigen::Matrix2d second = Eigen::Matrix2d::Zero();
  for (int mm = 0; mm <= N; ++mm) {
    const int S = N - mm;
    const Eigen::VectorXd k = Eigen::VectorXd::LinSpaced(S + 1, 0.0, S);
    const Eigen::VectorXd k2 = Eigen::VectorXd::Constant(S + 1, S) - k;
    const Eigen::VectorXd p = r.blocks[mm].matrix().diagonal().real();
    const Eigen::VectorXd pp = rp.blocks[mm].matrix().diagonal().real();
    const Eigen::VectorXd pe = re.blocks[mm].matrix().diagonal().real();
    m.means += Eigen::Vector2d(p.dot(k), p.dot(k2));
    m.d_phi += Eigen::Vector2d(pp.dot(k), pp.dot(k2));
    m.d_eta += Eigen::Vector2d(pe.dot(k), pe.dot(k2));
    second(0, 0) += p.dot(k.cwiseProduct(k));
    second(1, 1) += p.dot(k2.cwiseProduct(k2));
    second(0, 1) += p.dot(k.cwiseProduct(k2));
  }
  second(1, 0) = second(0, 1);
  m.cov = second - m.means * m.means.transpose();
  return m;
}

MomentSet moments(const FockProbe& probe, const ChannelParams& params, const DetectionScheme& scheme) {
  if (scheme.kind == DetectionKind::Homodyne)
    throw Unsupported("homodyne detection is only implemented for Gaussian states");
  return counting_moments(probe, params, scheme);
}

Variances error_propagation(const MomentSet& m) {
  const Eigen::Matrix2d C = 0.5 * (m.cov + m.cov.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(C);
  const double top = std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(1)));
  // derivatives at rounding level of the means count as zero signal
  const double floor = 1e-12 * std::max(1.0, m.means.cwiseAbs().maxCoeff());
  auto one = [&](const Eigen::Vector2d& g) {
    const double gscale = g.norm();
    if (gscale <= floor) return kInf;
    double info = 0.0;
    for (int k = 0; k < 2; ++k) {
      const double lam = es.eigenvalues()(k);
      const double proj = es.eigenvectors().col(k).dot(g);
      if (lam > 1e-12 * top) {
        info += proj * proj / lam;
      } else if (std::abs(proj) > 1e-9 * gscale) {
        return 0.0;  // signal in a noiseless direction
      }
    }
    return info > 0.0 ? 1.0 / info : kInf;
  };
  if (top == 0.0) return {m.d_phi.norm() > floor ? 0.0 : kInf, m.d_eta.norm() > floor ? 0.0 : kInf};
  return {one(m.d_phi), one(m.d_eta)};
}

double scheme_incompatibility(const Variances& v, double c_s, double fmax_phi, double fmax_eta) {
  const double cost = fmax_phi * v.var_phi + fmax_eta * v.var_eta;
  if (std::isinf(cost)) return 1.0;
  if (!(cost > 0.0)) throw InvalidInput("scheme_incompatibility: variances must be positive");
  return 1.0 - c_s / cost;
}

Variances half_photon_strategy(const MomentSet& phi_experiment, const MomentSet& eta_experiment) {
  return {error_propagation(phi_experiment).var_phi, error_propagation(eta_experiment).var_eta};
}

}  // namespace phaseloss::measurement
