// bounds.hpp - single-parameter limits and the channel-level probe bound
//
// The phase bound uses the equivalent single-mode Kraus family
//   K_m = e^{-i phi beta} sqrt((1-eta)^m / m!) e^{i phi (n - alpha m)} eta^{n/2} b^m
// with real gauge parameters (alpha, beta). Minimizing the expectation of
// sum_m dK_m^dag dK_m over the gauge leaves a function of <n> and Var(n) only.
#pragma once

#include "phaseloss/channel.hpp"
#include "phaseloss/gaussian.hpp"

namespace phaseloss::bounds {

struct FundamentalLimits {
  double f_phi_max_s12 = 0.0;  // 4 eta N / (1 - eta), scenarios (1) and (2)
  double f_phi_max_s3 = 0.0;   // eta N / (1 - eta), loss on both modes
  double f_eta_max = 0.0;      // N / (eta (1 - eta))
  double n = 0.0;
  double eta = 0.0;
};

// Throws DegenerateChannel for eta in {0, 1} and InvalidInput for n <= 0 or
// eta outside [0, 1].
FundamentalLimits fundamental_limits(double n, double eta);

struct KrausGauge {
  double alpha = 0.0;
  double beta = 0.0;
};

enum class BoundFlag {
  None,
  FockLimit,  // Var(n) <= 0: no phase information, value 0
  Lossless,   // eta = 1: bound diverges, value +inf
};

struct PhaseBound {
  double value = 0.0;
  KrausGauge gauge;
  BoundFlag flag = BoundFlag::None;
};

// 4 eta <n> / (1 - eta + eta <n> / Var(n)) at the optimal gauge.
PhaseBound phase_qnd_bound(double mean_n, double var_n, double eta);

// 4 <sum_m dK_m^dag dK_m> for the gauge-transformed phase Kraus family,
// the quantity phase_qnd_bound minimizes. mean_n2 = <n^2>.
double phase_gauge_objective(const KrausGauge& gauge, double mean_n, double mean_n2, double eta);

// (1/2)(<n>/N)(1 / (1 + (<n>/Var(n)) (eta/(1-eta))) + 1).
double probe_incomp_bound(double mean_n, double var_n, double n_budget, double eta);
// Moments of the sensing mode, n_budget = N.
double probe_incomp_bound(const channel::FockProbe& probe, double eta);

// Coefficient 1/(4 eta (1-eta)) of <n> in sum_m d_eta K_m^dag d_eta K_m.
double loss_kraus_term(double eta);

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments sensing_moments(const channel::FockProbe& probe);
// Sensing-mode moments of a Gaussian probe after the input beamsplitter.
Moments sensing_moments(const gaussian::GaussianState& probe, double tau_in);

// Moments of (|N> + |N - k>)/sqrt(2) with k = ceil(N^exponent).
Moments witness_moments(double n, double exponent);

}  // namespace phaseloss::bounds
