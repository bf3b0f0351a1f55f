// channel.hpp - phase + loss channel on truncated Fock spaces
//
// Single-mode probes live on span{|0>..|N>}. Two-mode probes are
// sum_n c_n |n>|N-n>, indexed by the sensing-mode photon number n; the
// reference mode is lossless. Losing m photons sends input n to n-m, so the
// output of a two-mode probe splits into orthogonal sectors labelled by m.
#pragma once

#include <vector>

#include "phaseloss/linalg.hpp"

namespace phaseloss::channel {

using linalg::cplx;
using linalg::CMatrix;
using linalg::CVector;
using linalg::HermitianMatrix;
using linalg::RVector;

enum class Scenario { SingleMode, TwoMode };
enum class Param { Phi, Eta };

struct ChannelParams {
  double phi = 0.0;
  double eta = 0.5;  // transmissivity
  int n_max = 1;     // photon cutoff N

  // Throws InvalidInput unless eta in (0,1) and n_max >= 1.
  void validate() const;
};

class FockProbe {
 public:
  FockProbe() = default;
  // Requires sum |c_n|^2 = 1 to 1e-12.
  FockProbe(Scenario scenario, CVector coeffs);
  // Rescales coeffs to unit norm first.
  static FockProbe normalized(Scenario scenario, CVector coeffs);
  // |n> (single-mode) or |n>|N-n> (two-mode).
  static FockProbe fock(Scenario scenario, int n_max, int n);

  Scenario scenario() const { return scenario_; }
  const CVector& coeffs() const { return coeffs_; }
  int n_max() const { return static_cast<int>(coeffs_.size()) - 1; }

 private:
  Scenario scenario_ = Scenario::SingleMode;
  CVector coeffs_;
};

// C(n,m) eta^(n-m) (1-eta)^m, the probability of losing m of n photons.
double binomial_loss_coeff(int n, int m, double eta);

// K_m |n> = sqrt(B^n_m) e^{i n phi} |n-m> for n >= m, zero otherwise.
// Derivatives are diagonal rescalings on the input index:
//   dK_m/dphi |n> = (i n)                              K_m |n>
//   dK_m/deta |n> = (n(1-eta) - m) / (2 eta (1-eta))   K_m |n>
// Storage is per-m amplitude vectors; dense matrices are built on request.
class KrausFamily {
 public:
  KrausFamily(const ChannelParams& params, Scenario scenario);

  Scenario scenario() const { return scenario_; }
  const ChannelParams& params() const { return params_; }
  int n_max() const { return params_.n_max; }
  int count() const { return params_.n_max + 1; }

  // Rows of K_m: N+1 (single-mode, zero padded) or N-m+1 (two-mode).
  Eigen::Index output_dim(int m) const;

  cplx amplitude(int m, int n) const;
  double gamma_eta(int m, int n) const;
  cplx gamma(Param p, int m, int n) const;

  CMatrix matrix(int m) const;
  CMatrix derivative(int m, Param p) const;

  CVector apply(int m, const CVector& psi) const;
  CVector apply_derivative(int m, Param p, const CVector& psi) const;

 private:
  ChannelParams params_;
  Scenario scenario_;
  std::vector<RVector> sqrt_b_;  // sqrt_b_[m](n) = sqrt(B^n_m), zero for n < m
  CVector phase_;                // e^{i n phi}
};

// Output state. Single-mode: one (N+1)x(N+1) block. Two-mode: blocks m = 0..N
// of size N-m+1 forming a direct sum.
struct BlockDensity {
  Scenario scenario = Scenario::SingleMode;
  std::vector<HermitianMatrix> blocks;

  double trace() const;
  Eigen::Index total_dim() const;
  // Direct sum as one dense matrix (tests and small N only).
  CMatrix dense() const;
};

struct DensityDerivatives {
  BlockDensity phi;
  BlockDensity eta;
};

// K_m psi for every m (vectors of length output_dim(m)).
std::vector<CVector> branch_states(const FockProbe& probe, const KrausFamily& kraus);

BlockDensity apply_channel(const FockProbe& probe, const KrausFamily& kraus);
DensityDerivatives apply_channel_derivatives(const FockProbe& probe, const KrausFamily& kraus);

}  // namespace phaseloss::channel
