// gaussian.cpp
#include "phaseloss/gaussian.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "phaseloss/error.hpp"

namespace phaseloss::gaussian {

using linalg::cplx;
using linalg::CMatrix;
using linalg::CVector;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Matrix4cd omega() {
  Matrix4cd o = Matrix4cd::Zero();
  o.diagonal() << 1.0, 1.0, -1.0, -1.0;
  return o;
}

// diag(U, conj(U)) for the 2x2 mode transformation U.
Matrix4cd lift(const Eigen::Matrix2cd& u) {
  Matrix4cd big = Matrix4cd::Zero();
  big.topLeftCorner<2, 2>() = u;
  big.bottomRightCorner<2, 2>() = u.conjugate();
  return big;
}

Eigen::Matrix2cd interferometer(double phi, double tau_in) {
  const double t = std::sqrt(tau_in), s = std::sqrt(1.0 - tau_in);
  Eigen::Matrix2cd bs;
  bs << t, cplx(0.0, s), cplx(0.0, s), t;
  Eigen::Matrix2cd ph = Eigen::Matrix2cd::Identity();
  ph(0, 0) = std::polar(1.0, phi);
  return ph * bs;
}

void check_channel(const ChannelParams& p, double tau_in) {
  if (!(p.eta > 0.0 && p.eta <= 1.0)) throw InvalidInput("gaussian: eta must lie in (0,1]");
  if (!(tau_in >= 0.0 && tau_in <= 1.0)) throw InvalidInput("gaussian: tau_in must lie in [0,1]");
  if (!std::isfinite(p.phi)) throw InvalidInput("gaussian: phi is not finite");
}

// Moore-Penrose inverse of a Hermitian matrix, relative cut `tol`.
CMatrix hermitian_pinv(const CMatrix& m, double tol) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double cut = tol * ev.cwiseAbs().maxCoeff();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > cut) inv(i) = 1.0 / ev(i);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double GaussianState::physicality_margin() const {
  const Matrix4cd s = sigma + omega();
  Eigen::SelfAdjointEigenSolver<Matrix4cd> es(0.5 * (s + s.adjoint()));
  return es.eigenvalues()(0);
}

double GaussianProbeSpec::n_r() const {
  const double s = std::sinh(r);
  return family == Family::SingleModeDisplacedSqueezed ? s * s : 2.0 * s * s;
}

void GaussianProbeSpec::validate() const {
  for (double v : {alpha, mu, r, theta, theta1, theta2, chi, tau_in})
    if (!std::isfinite(v)) throw InvalidInput("GaussianProbeSpec: non-finite field");
  if (alpha < 0.0) throw InvalidInput("GaussianProbeSpec: alpha must be >= 0");
  if (r < 0.0) throw InvalidInput("GaussianProbeSpec: r must be >= 0");
  if (chi < 0.0 || chi > std::numbers::pi / 2 + 1e-12) throw InvalidInput("GaussianProbeSpec: chi outside [0, pi/2]");
  if (tau_in < 0.0 || tau_in > 1.0) throw InvalidInput("GaussianProbeSpec: tau_in outside [0,1]");
  if (family == Family::TwoModeChiSqueezedDisplaced && r > 0.0) {
    const double c = std::cos(chi), s = std::sin(chi);
    if (c * s > 1e-12) {
      // Off-diagonal of R R^dag is cs (e^{i(theta1-theta)} + e^{i(theta-theta2)}).
      const cplx off = c * s * (std::polar(1.0, theta1 - theta) + std::polar(1.0, theta - theta2));
      if (std::abs(off) > 1e-9)
        throw InvalidInput("GaussianProbeSpec: for 0 < chi < pi/2 need theta1 + theta2 - 2 theta = pi (mod 2pi)");
    }
  }
}

double EnergySplit::n_alpha() const {
  const double small = std::pow(n_total, p);
  return regime == Regime::StrongDisplacement ? n_total - small : small;
}

double EnergySplit::n_r() const {
  const double small = std::pow(n_total, p);
  return regime == Regime::StrongDisplacement ? small : n_total - small;
}

double EnergySplit::tau_in() const { return q ? 1.0 - 1.0 / std::pow(n_total, *q) : 1.0; }

GaussianProbeSpec apply_split(GaussianProbeSpec base, const EnergySplit& split) {
  if (!(split.n_total > 0.0)) throw InvalidInput("EnergySplit: n_total must be positive");
  if (!(split.p > 0.0 && split.p < 1.0)) throw InvalidInput("EnergySplit: p must lie in (0,1)");
  if (split.q && !(*split.q > 0.0 && *split.q < 1.0)) throw InvalidInput("EnergySplit: q must lie in (0,1)");
  const double na = split.n_alpha(), nr = split.n_r();
  if (na < 0.0 || nr < 0.0) throw InvalidInput("EnergySplit: N^p exceeds N (use N > 1)");
  base.alpha = std::sqrt(na);
  const double per_mode = base.family == Family::SingleModeDisplacedSqueezed ? nr : nr / 2.0;
  base.r = std::asinh(std::sqrt(per_mode));
  base.tau_in = split.tau_in();
  return base;
}

GaussianState make_probe(const GaussianProbeSpec& spec) {
  spec.validate();
  Eigen::Matrix2cd R = Eigen::Matrix2cd::Zero();
  if (spec.family == Family::SingleModeDisplacedSqueezed) {
    R(0, 0) = std::polar(1.0, spec.theta1);
  } else {
    const double c = std::cos(spec.chi), s = std::sin(spec.chi);
    R << c * std::polar(1.0, spec.theta1), s * std::polar(1.0, spec.theta), s * std::polar(1.0, spec.theta),
        c * std::polar(1.0, spec.theta2);
  }
  Eigen::Matrix2cd diag = Eigen::Matrix2cd::Identity();
  if (spec.family == Family::SingleModeDisplacedSqueezed) diag(0, 0) = std::cosh(2.0 * spec.r);
  else diag *= std::cosh(2.0 * spec.r);

  GaussianState st;
  st.sigma.topLeftCorner<2, 2>() = diag;
  st.sigma.bottomRightCorner<2, 2>() = diag;
  st.sigma.topRightCorner<2, 2>() = -std::sinh(2.0 * spec.r) * R;
  st.sigma.bottomLeftCorner<2, 2>() = -std::sinh(2.0 * spec.r) * R.conjugate();
  const cplx d1 = std::polar(spec.alpha, spec.mu);
  st.d << d1, 0.0, std::conj(d1), 0.0;
  return st;
}

GaussianState evolve(const GaussianState& in, const ChannelParams& params, double tau_in) {
  check_channel(params, tau_in);
  const Matrix4cd U = lift(interferometer(params.phi, tau_in));
  Vector4cd se;
  se << std::sqrt(params.eta), 1.0, std::sqrt(params.eta), 1.0;
  const Matrix4cd S = U * in.sigma * U.adjoint();
  GaussianState out;
  out.sigma = se.asDiagonal() * (S - Matrix4cd::Identity()) * se.asDiagonal();
  out.sigma += Matrix4cd::Identity();
  out.sigma = 0.5 * (out.sigma + out.sigma.adjoint()).eval();
  out.d = se.asDiagonal() * (U * in.d);
  return out;
}

StateDerivatives evolve_derivatives(const GaussianState& in, const ChannelParams& params, double tau_in) {
  check_channel(params, tau_in);
  const Matrix4cd U = lift(interferometer(params.phi, tau_in));
  const Matrix4cd S = U * in.sigma * U.adjoint();
  const Vector4cd Ud = U * in.d;
  const double se = std::sqrt(params.eta);
  Vector4cd sq, dsq;
  sq << se, 1.0, se, 1.0;
  dsq << 0.5 / se, 0.0, 0.5 / se, 0.0;
  // dU/dphi = G U with G = diag(i, 0, -i, 0).
  Matrix4cd G = Matrix4cd::Zero();
  G(0, 0) = cplx(0.0, 1.0);
  G(2, 2) = cplx(0.0, -1.0);

  StateDerivatives dv;
  dv.dsigma_phi = sq.asDiagonal() * (G * S + S * G.adjoint()) * sq.asDiagonal();
  const Matrix4cd Sm = S - Matrix4cd::Identity();
  dv.dsigma_eta = dsq.asDiagonal() * Sm * sq.asDiagonal() + sq.asDiagonal() * Sm * dsq.asDiagonal();
  dv.dd_phi = sq.asDiagonal() * (G * Ud);
  dv.dd_eta = dsq.asDiagonal() * Ud;
  return dv;
}

qfi::QfiReport gaussian_qfi(const GaussianState& out, const StateDerivatives& dv) {
  const Matrix4cd O = omega();
  const CMatrix sig = out.sigma;
  const CMatrix M = linalg::kron(sig.conjugate(), sig) - linalg::kron(O, O);
  const CMatrix Minv = hermitian_pinv(M, 1e-10);
  const CMatrix siginv = out.sigma.inverse();
  const CMatrix K = linalg::kron(sig.conjugate(), O) - linalg::kron(O, sig);

  const CVector vs[2] = {linalg::vec(dv.dsigma_phi), linalg::vec(dv.dsigma_eta)};
  const CVector dd[2] = {dv.dd_phi, dv.dd_eta};
  const CVector mv[2] = {Minv * vs[0], Minv * vs[1]};

  Eigen::Matrix2cd F, T;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      F(i, j) = 0.5 * vs[i].dot(mv[j]) + 2.0 * dd[i].dot(siginv * dd[j]);
      T(i, j) = 4.0 * dd[i].dot(siginv * O * siginv * dd[j]) + mv[i].dot(K * mv[j]);
    }
  }
  qfi::QfiReport r;
  r.F(0, 0) = F(0, 0).real();
  r.F(1, 1) = F(1, 1).real();
  r.F(0, 1) = r.F(1, 0) = 0.5 * (F(0, 1).real() + F(1, 0).real());
  r.i_phieta = 0.5 * T(0, 1).imag();
  return r;
}

qfi::QfiReport gaussian_qfi(const GaussianState& in, const ChannelParams& params, double tau_in) {
  return gaussian_qfi(evolve(in, params, tau_in), evolve_derivatives(in, params, tau_in));
}

PhotonMoments photon_moments(const GaussianState& st) {
  // With N = <da^dag da>, M = <da da>: Var n = N^2 + N + |M|^2 + |d|^2 (2N+1) + 2 Re(conj(d)^2 M).
  PhotonMoments pm;
  const double n1 = 0.5 * (st.sigma(0, 0).real() - 1.0);
  const double n2 = 0.5 * (st.sigma(1, 1).real() - 1.0);
  const cplx m1 = 0.5 * st.sigma(0, 2);
  const cplx d1 = st.d(0);
  pm.mean_n1 = n1 + std::norm(d1);
  pm.mean_n2 = n2 + std::norm(st.d(1));
  pm.var_n1 = n1 * n1 + n1 + std::norm(m1) + std::norm(d1) * (2.0 * n1 + 1.0) +
              2.0 * (std::conj(d1) * std::conj(d1) * m1).real();
  return pm;
}

AsymptoticLimits asymptotic_limits(const GaussianProbeSpec& ph, const EnergySplit& split, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidInput("asymptotic_limits: eta must lie in (0,1)");
  AsymptoticLimits out{kNaN, kNaN, kNaN, kNaN};
  const double half = 0.5 * (ph.theta1 - 2.0 * ph.mu);
  const double s2 = std::sin(half) * std::sin(half), c2 = std::cos(half) * std::cos(half);
  const bool disp = split.regime == Regime::StrongDisplacement;
  const double pi2 = std::numbers::pi / 2;

  auto set = [&](double fp, double fe) {
    out.f_phi_norm = fp;
    out.f_eta_norm = fe;
    out.f_norm = 0.5 * (fp + fe);
  };

  if (ph.family == Family::SingleModeDisplacedSqueezed) {
    if (disp) set(s2, c2);
    else set(1.0, 0.0);
    return out;
  }
  if (!disp) {
    // Half the photons sit in the reference mode.
    out.f_norm = 0.5;
    return out;
  }
  if (std::abs(ph.chi - pi2) < 1e-12) {
    set(1.0, 1.0);
    out.i_norm = 1.0 / eta;
    return out;
  }
  if (std::abs(ph.chi) < 1e-12) {
    const double dq = split.q ? *split.q - split.p : 1.0;  // no q: tau_in = 1, the q > p behaviour
    const double ct = std::cos(ph.theta1 - ph.theta2);
    if (std::abs(dq) < 1e-12) {
      const double den = 1.0 + (1.0 - eta) * ct;
      set(1.0 - eta * c2 / den, 1.0 - eta * s2 / den);
      out.i_norm = eta * ((1.0 - eta) * ct + 1.0) / ((1.0 - eta) * (ct + 1.0));
    } else if (dq < 0.0) {
      set(1.0, 1.0);
      out.i_norm = 1.0 / eta;
    } else {
      set(s2, c2);
      out.i_norm = 0.0;
    }
  }
  return out;
}

}  // namespace phaseloss::gaussian
