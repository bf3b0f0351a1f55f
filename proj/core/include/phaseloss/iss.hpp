// iss.hpp - iterative see-saw (ISS) probe optimization
//
// Objective: sum_j pre_qfi_j(psi, L_j) / omega_j. Each iteration refreshes the
// SLDs for the current probe, then replaces the probe by the top eigenvector
// of M = sum_j M_j / omega_j.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "phaseloss/qfi.hpp"

namespace phaseloss::iss {

using channel::ChannelParams;
using channel::FockProbe;
using channel::KrausFamily;
using channel::Param;
using channel::Scenario;
using linalg::CVector;
using linalg::HermitianMatrix;
using qfi::BlockOperator;
using qfi::SldSet;

struct IssConfig {
  // Objective weights. +infinity removes a parameter from the objective.
  // Non-positive values mean "use the fundamental limit F^max" for that
  // parameter (the normalized objective).
  double omega_phi = 0.0;
  double omega_eta = 0.0;
  int max_iters = 2000;
  int conv_window = 5;
  double conv_rel_tol = 1e-3;
  int restarts = 1;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
  // Starting probe for restart 0 (later restarts stay random).
  std::optional<CVector> initial;

  void validate() const;
};

struct RestartOutcome {
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct IssResult {
  FockProbe probe;
  std::vector<double> objective_trace;
  bool converged = false;
  int iterations = 0;
  qfi::QfiReport final_qfi;  // weighted with W = diag(Fmax_phi, Fmax_eta)
  std::vector<RestartOutcome> restarts;
  int best_restart = 0;
};

struct ProbeStatistics {
  double mean_n1 = 0.0;
  double var_n1 = 0.0;
};

// 2 Tr(drho A) - Tr(rho A^2) for parameter `which`. A has the block layout of
// the channel output (one block for single-mode, N+1 blocks for two-mode).
double pre_qfi(const FockProbe& probe, const BlockOperator& A, const KrausFamily& kraus, Param which);

// sum_j (1/omega_j) [2 sum_m (dK_m^dag L_j K_m + K_m^dag L_j dK_m) - sum_m K_m^dag L_j^2 K_m],
// assembled from the diagonal structure of K_m and Gamma. An infinite omega
// skips that parameter.
HermitianMatrix build_m_matrix(const FockProbe& probe, const SldSet& slds, const KrausFamily& kraus,
                               double omega_phi, double omega_eta);

IssResult optimize(const IssConfig& config, const ChannelParams& params, Scenario scenario);

// Multiplies by a global phase so the largest-magnitude coefficient is real
// positive (first index wins ties).
FockProbe fix_phase_gauge(const FockProbe& probe);

// Mean and variance of the sensing-mode photon number.
ProbeStatistics probe_statistics(const FockProbe& probe);

}  // namespace phaseloss::iss
