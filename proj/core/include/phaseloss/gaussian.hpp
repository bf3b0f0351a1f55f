// gaussian.hpp - two-mode Gaussian states in complex coordinates
//
// Coordinates A = (a1, a2, a1^dag, a2^dag), Omega = diag(1, 1, -1, -1).
// sigma_ij = <{A_i, A_j^dag}> - 2 <A_i><A_j^dag>, so the vacuum has sigma = I4.
// Mode 1 is the sensing mode (phase and loss act on it after the input
// beamsplitter), mode 2 the lossless reference.
#pragma once

#include <optional>

#include "phaseloss/channel.hpp"
#include "phaseloss/qfi.hpp"

namespace phaseloss::gaussian {

using channel::ChannelParams;
using Matrix4cd = Eigen::Matrix4cd;
using Vector4cd = Eigen::Vector4cd;

struct GaussianState {
  Matrix4cd sigma = Matrix4cd::Identity();
  Vector4cd d = Vector4cd::Zero();

  static GaussianState vacuum() { return {}; }
  // Smallest eigenvalue of sigma + Omega (>= 0 for physical states).
  double physicality_margin() const;
};

enum class Family { SingleModeDisplacedSqueezed, TwoModeChiSqueezedDisplaced };
enum class Regime { StrongDisplacement, StrongSqueezing };

struct GaussianProbeSpec {
  Family family = Family::SingleModeDisplacedSqueezed;
  double alpha = 0.0;  // displacement amplitude on mode 1
  double mu = 0.0;     // displacement phase
  double r = 0.0;      // squeezing strength
  double theta = 0.0;  // two-mode squeezing phase
  double theta1 = 0.0;
  double theta2 = 0.0;
  double chi = 0.0;     // 0: two single-mode squeezers, pi/2: two-mode squeezer
  double tau_in = 1.0;  // input beamsplitter transmissivity

  double n_alpha() const { return alpha * alpha; }
  // sinh^2 r (single-mode) or 2 sinh^2 r (two-mode family).
  double n_r() const;
  double n_total() const { return n_alpha() + n_r(); }
  void validate() const;
};

struct EnergySplit {
  double n_total = 1.0;
  double p = 0.5;
  std::optional<double> q;  // tau_in = 1 - 1/N^q when set, else 1
  Regime regime = Regime::StrongDisplacement;

  double n_alpha() const;
  double n_r() const;
  double tau_in() const;
};

// Fills alpha, r and tau_in of `base` from the split.
GaussianProbeSpec apply_split(GaussianProbeSpec base, const EnergySplit& split);

// Probe covariance and displacement before the input beamsplitter. The
// squeezing block is sigma_13 = -sinh(2r) R with R = e^{i theta1} (single
// mode) or R_chi (two-mode family); see README for the sign convention. For
// 0 < chi < pi/2 the phases must satisfy theta1 + theta2 - 2 theta = pi (mod
// 2 pi), otherwise R_chi is not unitary and the matrix is not a pure state.
GaussianState make_probe(const GaussianProbeSpec& spec);

// Input beamsplitter (tau_in), phase phi and loss eta on mode 1.
GaussianState evolve(const GaussianState& in, const ChannelParams& params, double tau_in);

struct StateDerivatives {
  Matrix4cd dsigma_phi = Matrix4cd::Zero();
  Matrix4cd dsigma_eta = Matrix4cd::Zero();
  Vector4cd dd_phi = Vector4cd::Zero();
  Vector4cd dd_eta = Vector4cd::Zero();
};

// Analytic derivatives of evolve(in, params, tau_in) with respect to phi, eta.
StateDerivatives evolve_derivatives(const GaussianState& in, const ChannelParams& params, double tau_in);

// QFI matrix and I_phieta = (1/2) Tr(rho [L_phi, L_eta]) of the output state.
// C_S / C_H_bar are left unset (see qfi::with_weights). eta = 1 uses a
// pseudo-inverse of M with relative tolerance 1e-10.
qfi::QfiReport gaussian_qfi(const GaussianState& in, const ChannelParams& params, double tau_in);
qfi::QfiReport gaussian_qfi(const GaussianState& out, const StateDerivatives& deriv);

struct PhotonMoments {
  double mean_n1 = 0.0;
  double mean_n2 = 0.0;
  double var_n1 = 0.0;
};

PhotonMoments photon_moments(const GaussianState& state);

// Closed-form large-N limits. Entries the closed forms do not cover are NaN.
struct AsymptoticLimits {
  double f_phi_norm;  // F_phiphi / F^max_phi
  double f_eta_norm;  // F_etaeta / F^max_eta
  double f_norm;      // (f_phi_norm + f_eta_norm) / 2
  double i_norm;      // Im(I_phieta) / F^max_phi
};

AsymptoticLimits asymptotic_limits(const GaussianProbeSpec& phases, const EnergySplit& split, double eta);

}  // namespace phaseloss::gaussian
