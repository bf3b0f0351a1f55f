// run_config.hpp - sweep configuration shared by all subcommands
#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phaseloss/gaussian.hpp"
#include "phaseloss/iss.hpp"
#include "phaseloss/measurement.hpp"

namespace phaseloss::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kMaxFockN = 2000;

enum class Command { Optimize, GaussianScan, Measure, Bounds };
enum class Format { Csv, Json };
enum class ProbeKind { Gaussian, Fock };
enum class Strategy { Simultaneous, HalfPhoton };

struct RunConfig {
  Command command = Command::Optimize;
  std::vector<double> n_values{10};
  std::vector<double> eta_values{0.5};
  channel::Scenario scenario = channel::Scenario::TwoMode;

  // gaussian-scan / measure
  std::vector<double> chi_values{std::numbers::pi / 2};
  double p = 0.5;
  std::optional<double> q;
  gaussian::Regime regime = gaussian::Regime::StrongDisplacement;
  double theta1 = std::numbers::pi;
  double theta2 = std::numbers::pi;
  double theta = std::numbers::pi / 2;
  double mu = 0.0;

  // measure
  measurement::DetectionKind scheme = measurement::DetectionKind::PhotonCounting;
  std::vector<double> tau_out_values{1.0};
  std::vector<double> xi_values{0.0};
  ProbeKind probe = ProbeKind::Gaussian;
  Strategy strategy = Strategy::Simultaneous;
  std::optional<double> phi;  // default: pi/2 for counting, 0 for homodyne

  // bounds
  std::vector<double> witness_exponents{0.7};

  iss::IssConfig iss;
  int threads = 0;
  std::string out;     // empty: stdout
  std::string coeffs;  // optimize sidecar; default <out>.coeffs.csv
  Format format = Format::Csv;
  bool quiet = false;

  // Throws InvalidInput.
  void validate() const;
  double working_phi() const;
};

// Registers options and subcommands on `app`, writing into `cfg`. Options
// live on the top-level app so a flat key=value config file (--config) can
// set any of them; command-line flags override the file.
void configure(CLI::App& app, RunConfig& cfg);

const char* command_name(Command c);

}  // namespace phaseloss::cli
