// bounds.cpp
#include "phaseloss/bounds.hpp"

#include <cmath>
#include <limits>

#include "phaseloss/error.hpp"

namespace phaseloss::bounds {

namespace {

void check_eta(double eta, const char* who) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidInput(std::string(who) + ": eta must lie in [0,1]");
  if (eta == 0.0 || eta == 1.0) throw DegenerateChannel(std::string(who) + ": eta at channel endpoint");
}

}  // namespace

FundamentalLimits fundamental_limits(double n, double eta) {
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidInput("fundamental_limits: n must be positive");
  check_eta(eta, "fundamental_limits");
  FundamentalLimits f;
  f.n = n;
  f.eta = eta;
  f.f_phi_max_s12 = 4.0 * eta * n / (1.0 - eta);
  f.f_phi_max_s3 = eta * n / (1.0 - eta);
  f.f_eta_max = n / (eta * (1.0 - eta));
  return f;
}

PhaseBound phase_qnd_bound(double mean_n, double var_n, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0) || !(mean_n >= 0.0)) throw InvalidInput("phase_qnd_bound: bad arguments");
  PhaseBound b;
  if (!(var_n > 0.0)) {
    b.flag = BoundFlag::FockLimit;
    return b;
  }
  if (eta == 1.0) {
    b.flag = BoundFlag::Lossless;
    b.value = std::numeric_limits<double>::infinity();
    return b;
  }
  const double den = var_n * (1.0 - eta) + mean_n * eta;
  b.value = 4.0 * eta * mean_n / (1.0 - eta + eta * mean_n / var_n);
  if (den > 0.0) {
    b.gauge.alpha = eta * (var_n - mean_n) / den;
    b.gauge.beta = mean_n * mean_n * eta / den;
  }
  return b;
}

double phase_gauge_objective(const KrausGauge& g, double mean_n, double mean_n2, double eta) {
  const double a = eta - g.alpha * (1.0 - eta);
  const double lin = eta * (1.0 - eta) * (1.0 + g.alpha) * (1.0 + g.alpha) +
                     2.0 * g.beta * (g.alpha * (1.0 - eta) - eta);
  return 4.0 * (a * a * mean_n2 + lin * mean_n + g.beta * g.beta);
}

double probe_incomp_bound(double mean_n, double var_n, double n_budget, double eta) {
  if (!(mean_n > 0.0 && mean_n <= n_budget * (1.0 + 1e-12)))
    throw InvalidInput("probe_incomp_bound: need 0 < <n> <= N");
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidInput("probe_incomp_bound: eta must lie in (0,1)");
  // Var(n) -> 0 sends the phase term to zero; Var(n) = inf leaves 1.
  double phase = 0.0;
  if (var_n > 0.0) phase = 1.0 / (1.0 + (mean_n / var_n) * (eta / (1.0 - eta)));
  return 0.5 * (mean_n / n_budget) * (phase + 1.0);
}

double probe_incomp_bound(const channel::FockProbe& probe, double eta) {
  const Moments m = sensing_moments(probe);
  return probe_incomp_bound(m.mean, m.var, probe.n_max(), eta);
}

double loss_kraus_term(double eta) {
  check_eta(eta, "loss_kraus_term");
  return 1.0 / (4.0 * eta * (1.0 - eta));
}

Moments sensing_moments(const channel::FockProbe& probe) {
  const Eigen::VectorXd p = probe.coeffs().cwiseAbs2();
  const Eigen::VectorXd n = Eigen::VectorXd::LinSpaced(p.size(), 0.0, p.size() - 1.0);
  Moments m;
  m.mean = p.dot(n);
  m.var = std::max(0.0, p.dot(n.cwiseProduct(n)) - m.mean * m.mean);
  return m;
}

Moments sensing_moments(const gaussian::GaussianState& probe, double tau_in) {
  channel::ChannelParams lossless;
  lossless.eta = 1.0;
  const gaussian::PhotonMoments pm = gaussian::photon_moments(gaussian::evolve(probe, lossless, tau_in));
  return {pm.mean_n1, pm.var_n1};
}

Moments witness_moments(double n, double exponent) {
  const double k = std::ceil(std::pow(n, exponent));
  if (!(k <= n)) throw InvalidInput("witness_moments: N^exponent exceeds N");
  return {n - 0.5 * k, 0.25 * k * k};
}

}  // namespace phaseloss::bounds
