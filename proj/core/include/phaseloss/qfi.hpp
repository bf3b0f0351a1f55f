// qfi.hpp - QFI matrix, SLD commutator term, CRB-type bounds and quantifiers
//
// Parameter order is (phi, eta) in every 2x2 matrix.
#pragma once

#include <limits>

#include "phaseloss/channel.hpp"

namespace phaseloss::qfi {

using channel::BlockDensity;
using channel::FockProbe;
using channel::KrausFamily;
using linalg::cplx;
using linalg::CVector;
using linalg::HermitianMatrix;

// Block-structured Hermitian operator with the layout of a BlockDensity.
using BlockOperator = BlockDensity;

struct SldSet {
  BlockOperator phi;
  BlockOperator eta;
};

struct QfiReport {
  Eigen::Matrix2d F = Eigen::Matrix2d::Zero();
  // I_phieta = (1/2) Tr(rho [L_phi, L_eta]) is purely imaginary; this is its
  // imaginary part.
  double i_phieta = 0.0;
  double c_s = std::numeric_limits<double>::quiet_NaN();
  double c_h_bar = std::numeric_limits<double>::quiet_NaN();
  Eigen::Matrix2d W = Eigen::Matrix2d::Identity();

  cplx I_phieta() const { return {0.0, i_phieta}; }
};

// Eigenbasis SLDs for every block.
SldSet compute_slds(const BlockDensity& rho, const BlockDensity& drho_phi, const BlockDensity& drho_eta,
                    double rank_tol = linalg::kDefaultRankTol);

// Closed-form SLDs for pure blocks rho_m = |v><v| with dv = Gamma v:
//   L = (2/t)(dv v^dag + v dv^dag) - (Tr d rho_m / t^2) |v><v|,  t = <v|v>.
// Requires the two-mode scenario. Blocks with t = 0 get L = 0.
SldSet analytic_two_mode_slds(const FockProbe& probe, const KrausFamily& kraus);

// F_ij = (1/2) Tr(rho {L_i, L_j}) and I = (1/2) Tr(rho [L_phi, L_eta]),
// summed over blocks. Throws InvalidState if a block of rho has an eigenvalue
// below -1e-10 (relative to max(1, largest eigenvalue)).
QfiReport qfi_matrix(const BlockDensity& rho, const BlockDensity& drho_phi, const BlockDensity& drho_eta,
                     double rank_tol = linalg::kDefaultRankTol);
QfiReport qfi_matrix(const HermitianMatrix& rho, const HermitianMatrix& drho_phi,
                     const HermitianMatrix& drho_eta, double rank_tol = linalg::kDefaultRankTol);
QfiReport qfi_from_slds(const BlockDensity& rho, const SldSet& slds);

enum class SldMethod { Eigenbasis, Analytic };

// QFI of the channel output for a Fock probe. Analytic is only available for
// two-mode probes and evaluates the pure-block formula from the branch
// vectors K_m psi in O(N^2); single-mode probes always use the eigenbasis.
QfiReport probe_qfi(const FockProbe& probe, const KrausFamily& kraus, SldMethod method = SldMethod::Analytic,
                    double rank_tol = linalg::kDefaultRankTol);

// Tr(W F^-1). Throws SingularInformation when cond(F) >= 1e12.
double scalar_crb(const Eigen::Matrix2d& F, const Eigen::Matrix2d& W);

// C_S + || sqrt(W) F^-1 I F^-1 sqrt(W) ||_1 with I = [[0, i x], [-i x, 0]].
double hcrb_upper(const Eigen::Matrix2d& F, double i_phieta, const Eigen::Matrix2d& W);

// (F_phiphi / Fmax_phi + F_etaeta / Fmax_eta) / 2.
double probe_quantifier(const Eigen::Matrix2d& F, double fmax_phi, double fmax_eta);
inline constexpr double kQuantifierSlack = 1e-6;
inline bool exceeds_unit_bound(double quantifier) { return quantifier > 1.0 + kQuantifierSlack; }

// Fills W, C_S and C_H_bar. Leaves them NaN if F is singular.
QfiReport with_weights(QfiReport report, const Eigen::Matrix2d& W);
Eigen::Matrix2d normalization_weights(double fmax_phi, double fmax_eta);

// R_H_bar = C_S / C_H_bar. Requires with_weights to have been applied.
double meas_quantifiers(const QfiReport& report);

}  // namespace phaseloss::qfi
