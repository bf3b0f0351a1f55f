// measurement.hpp - photon counting and homodyne behind an output beamsplitter
//
// The detection modes are c = B b with
//   B = [[sqrt(tau_out), -i sqrt(1-tau_out)], [-i sqrt(1-tau_out), sqrt(tau_out)]].
// Counting measures O_j = c_j^dag c_j, homodyne the quadratures
//   X_j(xi) = i e^{i xi} c_j^dag - i e^{-i xi} c_j,
// whose phase reference puts the phase signal of a displacement e^{i mu} at
// cos(mu - xi). Parameters are estimated from the means of (O_1, O_2) only.
#pragma once

#include "phaseloss/channel.hpp"
#include "phaseloss/gaussian.hpp"

namespace phaseloss::measurement {

using channel::BlockDensity;
using channel::ChannelParams;
using channel::FockProbe;
using gaussian::GaussianState;
using gaussian::StateDerivatives;

enum class DetectionKind { PhotonCounting, Homodyne };

struct DetectionScheme {
  DetectionKind kind = DetectionKind::PhotonCounting;
  double tau_out = 1.0;
  double xi = 0.0;  // homodyne only

  void validate() const;
};

struct MomentSet {
  Eigen::Vector2d means = Eigen::Vector2d::Zero();
  Eigen::Vector2d d_phi = Eigen::Vector2d::Zero();
  Eigen::Vector2d d_eta = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();  // symmetrized covariance C_V
};

// The 2x2 mode matrix B.
Eigen::Matrix2cd output_beamsplitter(double tau_out);

GaussianState output_transform(const DetectionScheme& scheme, const GaussianState& state);
StateDerivatives output_transform(const DetectionScheme& scheme, const StateDerivatives& deriv);

// exp(-i theta (b1^dag b2 + b2^dag b1)) with cos(theta) = sqrt(tau_out) on the
// sector of `total` photons, basis |k, total-k>, k = 0..total.
linalg::CMatrix sector_unitary(int total, double tau_out);

// Applies sector_unitary blockwise to a two-mode channel output (block m is
// the sector with N - m photons, indexed by the sensing-mode count).
BlockDensity output_transform(const DetectionScheme& scheme, const BlockDensity& rho);

// Gaussian probe (before the input beamsplitter) sent through the channel.
MomentSet counting_moments(const GaussianState& probe, const ChannelParams& params, double tau_in,
                           const DetectionScheme& scheme);
MomentSet homodyne_moments(const GaussianState& probe, const ChannelParams& params, double tau_in,
                           const DetectionScheme& scheme);
// Dispatches on scheme.kind.
MomentSet moments(const GaussianState& probe, const ChannelParams& params, double tau_in,
                  const DetectionScheme& scheme);

// Fock probe through the channel. Single-mode probes have no second mode to
// mix, so tau_out is ignored and O_2 = 0. Homodyne throws Unsupported.
MomentSet counting_moments(const FockProbe& probe, const ChannelParams& params, const DetectionScheme& scheme);
MomentSet moments(const FockProbe& probe, const ChannelParams& params, const DetectionScheme& scheme);

struct Variances {
  double var_phi = 0.0;
  double var_eta = 0.0;
};

// [g_i^T C_V^+ g_i]^-1 per parameter. A zero signal gives +inf; a signal
// along a noiseless direction of C_V gives 0.
Variances error_propagation(const MomentSet& m);

// 1 - C_S / (Fmax_phi var_phi + Fmax_eta var_eta).
double scheme_incompatibility(const Variances& v, double c_s, double fmax_phi, double fmax_eta);

// Half the photons go to an experiment tuned for phi, half to one tuned for
// eta; each parameter takes the variance of its own experiment.
Variances half_photon_strategy(const MomentSet& phi_experiment, const MomentSet& eta_experiment);

}  // namespace phaseloss::measurement
