// run_config.cpp
#include "cli/run_config.hpp"

#include <cmath>
#include <map>

#include "phaseloss/error.hpp"

namespace phaseloss::cli {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

}  // namespace

void RunConfig::validate() const {
  require(!n_values.empty() && !eta_values.empty(), "--n and --eta need at least one value");
  for (double n : n_values) require(n > 0.0 && std::isfinite(n), "--n values must be positive");
  for (double e : eta_values) require(e > 0.0 && e < 1.0, "--eta values must lie in (0,1)");
  if (command == Command::Optimize || (command == Command::Measure && probe == ProbeKind::Fock))
    for (double n : n_values) {
      require(n == std::floor(n) && n >= 1, "--n must be integers >= 1 for Fock probes");
      // the ISS iteration holds dense (N+1) x (N+1) matrices
      require(n <= kMaxFockN, "--n above " + std::to_string(kMaxFockN) + " is too large for Fock probes");
    }
  require(!chi_values.empty(), "--chi needs at least one value");
  for (double c : chi_values) require(c >= 0.0 && c <= std::numbers::pi / 2 + 1e-12, "--chi must lie in [0, pi/2]");
  require(p > 0.0 && p < 1.0, "--p must lie in (0,1)");
  if (q) require(*q > 0.0 && *q < 1.0, "--q must lie in (0,1)");
  require(!tau_out_values.empty() && !xi_values.empty(), "--tau-out and --xi need at least one value");
  for (double t : tau_out_values) require(t >= 0.0 && t <= 1.0, "--tau-out values must lie in [0,1]");
  require(!(strategy == Strategy::HalfPhoton && scheme == measurement::DetectionKind::Homodyne),
          "--strategy half is defined for photon counting only");
  for (double w : witness_exponents) require(w > 0.0 && w < 1.0, "--witness exponents must lie in (0,1)");
  require(threads >= 0, "--threads must be >= 0");
  iss.validate();
}

double RunConfig::working_phi() const {
  if (phi) return *phi;
  return scheme == measurement::DetectionKind::PhotonCounting ? std::numbers::pi / 2 : 0.0;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::Optimize: return "optimize";
    case Command::GaussianScan: return "gaussian-scan";
    case Command::Measure: return "measure";
    case Command::Bounds: return "bounds";
  }
  return "?";
}

void configure(CLI::App& app, RunConfig& cfg) {
  app.set_config("--config", "", "Flat key=value file with option defaults");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--n", cfg.n_values, "Photon numbers N (or mean energies for Gaussian probes)")->delimiter(',');
  app.add_option("--eta", cfg.eta_values, "Transmissivities")->delimiter(',');
  app.add_option("--scenario", cfg.scenario, "single | two")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, channel::Scenario>{{"single", channel::Scenario::SingleMode},
                                                   {"two", channel::Scenario::TwoMode}}));
  app.add_option("--chi", cfg.chi_values, "Two-mode squeezing mixing angles")->delimiter(',');
  app.add_option("--p", cfg.p, "Energy split exponent");
  app.add_option("--q", cfg.q, "Input transmissivity exponent, tau_in = 1 - 1/N^q");
  app.add_option("--regime", cfg.regime, "disp | sq")
      ->transform(CLI::CheckedTransformer(std::map<std::string, gaussian::Regime>{
          {"disp", gaussian::Regime::StrongDisplacement}, {"sq", gaussian::Regime::StrongSqueezing}}));
  app.add_option("--theta1", cfg.theta1, "Squeezing phase, mode 1");
  app.add_option("--theta2", cfg.theta2, "Squeezing phase, mode 2");
  app.add_option("--theta", cfg.theta, "Two-mode squeezing phase");
  app.add_option("--mu", cfg.mu, "Displacement phase");
  app.add_option("--scheme", cfg.scheme, "counting | homodyne")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, measurement::DetectionKind>{{"counting", measurement::DetectionKind::PhotonCounting},
                                                            {"homodyne", measurement::DetectionKind::Homodyne}}));
  app.add_option("--tau-out", cfg.tau_out_values, "Output beamsplitter transmissivities")->delimiter(',');
  app.add_option("--xi", cfg.xi_values, "Homodyne quadrature phases")->delimiter(',');
  app.add_option("--probe", cfg.probe, "gaussian | fock")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, ProbeKind>{{"gaussian", ProbeKind::Gaussian}, {"fock", ProbeKind::Fock}}));
  app.add_option("--strategy", cfg.strategy, "simultaneous | half")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Strategy>{
          {"simultaneous", Strategy::Simultaneous}, {"half", Strategy::HalfPhoton}}));
  app.add_option("--phi", cfg.phi, "Phase working point for measure (default pi/2 counting, 0 homodyne)");
  app.add_option("--witness", cfg.witness_exponents, "Witness-state exponents for bounds")->delimiter(',');

  app.add_option("--seed", cfg.iss.seed, "ISS random seed");
  app.add_option("--restarts", cfg.iss.restarts, "ISS random restarts");
  app.add_option("--max-iters", cfg.iss.max_iters, "ISS iteration cap");
  app.add_option("--conv-window", cfg.iss.conv_window, "Iterations the objective must stay flat");
  app.add_option("--conv-tol", cfg.iss.conv_rel_tol, "Relative objective change counted as flat");
  app.add_option("--omega-phi", cfg.iss.omega_phi, "ISS phase weight (<= 0: F^max, inf: drop)");
  app.add_option("--omega-eta", cfg.iss.omega_eta, "ISS loss weight (<= 0: F^max, inf: drop)");

  app.add_option("--threads", cfg.threads, "Worker threads (0: hardware concurrency)");
  app.add_option("--out", cfg.out, "Output file (default stdout)");
  app.add_option("--coeffs", cfg.coeffs, "Coefficient sidecar for optimize");
  app.add_option("--format", cfg.format, "csv | json")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"csv", Format::Csv}, {"json", Format::Json}}));
  app.add_flag("--quiet", cfg.quiet, "No progress on stderr");
  app.set_version_flag("--version", kVersion);

  auto sub = [&](const char* name, const char* desc, Command c) {
    app.add_subcommand(name, desc)->callback([&cfg, c] { cfg.command = c; });
  };
  sub("optimize", "ISS probe optimization over (N, eta)", Command::Optimize);
  sub("gaussian-scan", "Gaussian-probe QFI over (chi, N, eta)", Command::GaussianScan);
  sub("measure", "Photon counting / homodyne error propagation", Command::Measure);
  sub("bounds", "Fundamental limits and the probe-incompatibility bound", Command::Bounds);
}

}  // namespace phaseloss::cli
