// commands.cpp
#include "cli/commands.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <thread>

#include "phaseloss/bounds.hpp"
#include "phaseloss/error.hpp"

namespace phaseloss::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Rows = std::vector<std::vector<Value>>;

// Runs task(i) for i < count on a small pool; results keep index order.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, int threads, F task, const ProgressFn& progress) {
  std::vector<R> out(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        out[i] = task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
      std::lock_guard<std::mutex> lock(mu);
      ++done;
      if (progress) progress(done, count);
    }
  };
  int n = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n = static_cast<int>(std::clamp<std::size_t>(static_cast<std::size_t>(std::max(n, 1)), 1, std::max<std::size_t>(count, 1)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

struct Point {
  double n;
  double eta;
};

std::vector<Point> grid(const RunConfig& cfg) {
  std::vector<Point> pts;
  for (double n : cfg.n_values)
    for (double e : cfg.eta_values) pts.push_back({n, e});
  return pts;
}

Rows flatten(std::vector<Rows> parts) {
  Rows all;
  for (auto& p : parts)
    for (auto& r : p) all.push_back(std::move(r));
  return all;
}

double r_h_bar(const qfi::QfiReport& rep) {
  return std::isfinite(rep.c_s) && std::isfinite(rep.c_h_bar) ? rep.c_s / rep.c_h_bar : kNaN;
}

const char* scenario_name(channel::Scenario s) { return s == channel::Scenario::SingleMode ? "single" : "two"; }

iss::IssConfig inner_iss(const RunConfig& cfg, std::size_t points) {
  iss::IssConfig c = cfg.iss;
  c.threads = points > 1 ? 1 : cfg.threads;
  return c;
}

gaussian::GaussianProbeSpec gaussian_spec(const RunConfig& cfg, double chi, double n_total) {
  gaussian::GaussianProbeSpec base;
  base.family = cfg.scenario == channel::Scenario::SingleMode ? gaussian::Family::SingleModeDisplacedSqueezed
                                                              : gaussian::Family::TwoModeChiSqueezedDisplaced;
  base.mu = cfg.mu;
  base.theta = cfg.theta;
  base.theta1 = cfg.theta1;
  base.theta2 = cfg.theta2;
  base.chi = base.family == gaussian::Family::SingleModeDisplacedSqueezed ? 0.0 : chi;
  gaussian::EnergySplit split;
  split.n_total = n_total;
  split.p = cfg.p;
  split.q = cfg.q;
  split.regime = cfg.regime;
  return gaussian::apply_split(base, split);
}

channel::ChannelParams params_at(double phi, double eta, int n_max = 1) {
  channel::ChannelParams p;
  p.phi = phi;
  p.eta = eta;
  p.n_max = n_max;
  return p;
}

}  // namespace

CommandOutput cmd_optimize(const RunConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const auto pts = grid(cfg);
  struct Res {
    Rows rows, coeffs;
  };
  auto task = [&](std::size_t i) {
    const int N = static_cast<int>(pts[i].n);
    const double eta = pts[i].eta;
    const iss::IssResult r = iss::optimize(inner_iss(cfg, pts.size()), params_at(0.0, eta, N), cfg.scenario);
    const auto lim = bounds::fundamental_limits(N, eta);
    const auto st = iss::probe_statistics(r.probe);
    Res res;
    res.rows.push_back({std::int64_t{N}, eta, r.final_qfi.F(0, 0), r.final_qfi.F(1, 1), r.final_qfi.F(0, 1),
                        qfi::probe_quantifier(r.final_qfi.F, lim.f_phi_max_s12, lim.f_eta_max), st.mean_n1,
                        st.var_n1, r_h_bar(r.final_qfi), r.converged, std::int64_t{r.iterations}});
    const auto& c = r.probe.coeffs();
    for (Eigen::Index n = 0; n < c.size(); ++n)
      res.coeffs.push_back({std::int64_t{N}, eta, std::int64_t{n}, c(n).real(), c(n).imag(), std::norm(c(n))});
    return res;
  };
  auto parts = parallel_map<Res>(pts.size(), cfg.threads, task, progress);
  CommandOutput out;
  out.table.columns = {"N", "eta", "F_phiphi", "F_etaeta", "F_phieta", "F_norm", "mean_n1", "var_n1", "R_H_bar",
                       "converged", "iters"};
  Table coeffs;
  coeffs.columns = {"N", "eta", "n", "re", "im", "abs2"};
  for (auto& p : parts) {
    for (auto& r : p.rows) out.table.rows.push_back(std::move(r));
    for (auto& r : p.coeffs) coeffs.rows.push_back(std::move(r));
  }
  out.coefficients = std::move(coeffs);
  return out;
}

CommandOutput cmd_gaussian_scan(const RunConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  struct Item {
    double chi, n, eta;
  };
  std::vector<Item> items;
  const std::vector<double> chis =
      cfg.scenario == channel::Scenario::SingleMode ? std::vector<double>{0.0} : cfg.chi_values;
  for (double chi : chis)
    for (const auto& p : grid(cfg)) items.push_back({chi, p.n, p.eta});

  auto task = [&](std::size_t i) {
    const Item& it = items[i];
    const auto spec = gaussian_spec(cfg, it.chi, it.n);
    const auto lim = bounds::fundamental_limits(it.n, it.eta);
    auto rep = gaussian::gaussian_qfi(gaussian::make_probe(spec), params_at(0.0, it.eta), spec.tau_in);
    rep = qfi::with_weights(rep, qfi::normalization_weights(lim.f_phi_max_s12, lim.f_eta_max));
    const double fp = rep.F(0, 0) / lim.f_phi_max_s12, fe = rep.F(1, 1) / lim.f_eta_max;
    return std::vector<Value>{std::string(scenario_name(cfg.scenario)),
                              it.chi,
                              it.n,
                              it.eta,
                              cfg.p,
                              cfg.q ? *cfg.q : kNaN,
                              std::string(cfg.regime == gaussian::Regime::StrongDisplacement ? "disp" : "sq"),
                              spec.tau_in,
                              spec.theta1,
                              spec.theta2,
                              spec.theta,
                              spec.mu,
                              rep.F(0, 0),
                              rep.F(1, 1),
                              rep.F(0, 1),
                              rep.i_phieta,
                              fp,
                              fe,
                              0.5 * (fp + fe),
                              r_h_bar(rep)};
  };
  CommandOutput out;
  out.table.columns = {"family",   "chi",      "N",        "eta",      "p",         "q",
                       "regime",   "tau_in",   "theta1",   "theta2",   "theta",     "mu",
                       "F_phiphi", "F_etaeta", "F_phieta", "I_phieta_imag", "F_phi_norm", "F_eta_norm",
                       "F_norm",   "R_H_bar"};
  out.table.rows = parallel_map<std::vector<Value>>(items.size(), cfg.threads, task, progress);
  return out;
}

CommandOutput cmd_measure(const RunConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const auto pts = grid(cfg);
  const bool counting = cfg.scheme == measurement::DetectionKind::PhotonCounting;
  const double phi = cfg.working_phi();
  const std::string probe_name = cfg.probe == ProbeKind::Fock ? "fock" : "gaussian";
  const std::string scheme_name = counting ? "counting" : "homodyne";
  const std::string strategy_name = cfg.strategy == Strategy::HalfPhoton ? "half" : "simultaneous";
  const std::vector<double> xis = counting ? std::vector<double>{kNaN} : cfg.xi_values;

  auto row = [&](double n, double eta, double tau, double xi, const measurement::Variances& v, double c_s,
                 double rh, const bounds::FundamentalLimits& lim, const char* status) {
    const double r = std::string(status) == "ok" && std::isfinite(c_s)
                         ? measurement::scheme_incompatibility(v, c_s, lim.f_phi_max_s12, lim.f_eta_max)
                         : kNaN;
    return std::vector<Value>{probe_name, scheme_name, strategy_name, n, eta, phi, tau, xi,
                              v.var_phi * lim.f_phi_max_s12, v.var_eta * lim.f_eta_max, r, rh,
                              std::string(status)};
  };

  auto task = [&](std::size_t i) {
    const double n = pts[i].n, eta = pts[i].eta;
    const auto lim = bounds::fundamental_limits(n, eta);
    Rows rows;
    if (cfg.probe == ProbeKind::Gaussian) {
      const double chi = cfg.chi_values.front();
      const auto spec = gaussian_spec(cfg, chi, n);
      const auto probe = gaussian::make_probe(spec);
      auto rep = gaussian::gaussian_qfi(probe, params_at(phi, eta), spec.tau_in);
      rep = qfi::with_weights(rep, qfi::normalization_weights(lim.f_phi_max_s12, lim.f_eta_max));
      if (cfg.strategy == Strategy::HalfPhoton) {
        const auto half = gaussian_spec(cfg, chi, 0.5 * n);
        const auto hp = gaussian::make_probe(half);
        measurement::DetectionScheme sp{measurement::DetectionKind::PhotonCounting, 0.5, 0.0};
        measurement::DetectionScheme se{measurement::DetectionKind::PhotonCounting, 1.0, 0.0};
        const auto v = measurement::half_photon_strategy(
            measurement::moments(hp, params_at(phi, eta), half.tau_in, sp),
            measurement::moments(hp, params_at(phi, eta), half.tau_in, se));
        rows.push_back(row(n, eta, kNaN, kNaN, v, rep.c_s, r_h_bar(rep), lim, "ok"));
        return rows;
      }
      for (double tau : cfg.tau_out_values)
        for (double xi : xis) {
          measurement::DetectionScheme s{cfg.scheme, tau, std::isnan(xi) ? 0.0 : xi};
          const auto v = measurement::error_propagation(measurement::moments(probe, params_at(phi, eta), spec.tau_in, s));
          rows.push_back(row(n, eta, tau, xi, v, rep.c_s, r_h_bar(rep), lim, "ok"));
        }
      return rows;
    }

    // Fock probe: ISS-optimized at the requested cutoff.
    const int N = static_cast<int>(n);
    auto optimized = [&](int cutoff) {
      return iss::optimize(inner_iss(cfg, pts.size()), params_at(0.0, eta, cutoff), cfg.scenario);
    };
    const iss::IssResult best = optimized(N);
    const double c_s = best.final_qfi.c_s, rh = r_h_bar(best.final_qfi);
    if (!counting) {
      for (double tau : cfg.tau_out_values)
        for (double xi : xis) rows.push_back(row(n, eta, tau, xi, {kNaN, kNaN}, c_s, rh, lim, "unsupported"));
      return rows;
    }
    if (cfg.strategy == Strategy::HalfPhoton) {
      const int h = std::max(1, N / 2);
      const iss::IssResult hr = h == N ? best : optimized(h);
      measurement::DetectionScheme sp{measurement::DetectionKind::PhotonCounting, 0.5, 0.0};
      measurement::DetectionScheme se{measurement::DetectionKind::PhotonCounting, 1.0, 0.0};
      const auto v = measurement::half_photon_strategy(
          measurement::moments(hr.probe, params_at(phi, eta, h), sp),
          measurement::moments(hr.probe, params_at(phi, eta, h), se));
      rows.push_back(row(n, eta, kNaN, kNaN, v, c_s, rh, lim, "ok"));
      return rows;
    }
    for (double tau : cfg.tau_out_values) {
      measurement::DetectionScheme s{cfg.scheme, tau, 0.0};
      const auto v = measurement::error_propagation(measurement::moments(best.probe, params_at(phi, eta, N), s));
      rows.push_back(row(n, eta, tau, kNaN, v, c_s, rh, lim, "ok"));
    }
    return rows;
  };
  CommandOutput out;
  out.table.columns = {"probe", "scheme", "strategy", "N", "eta", "phi", "tau_out", "xi", "var_phi_Fmax",
                       "var_eta_Fmax", "R_scheme", "R_H_bar", "status"};
  out.table.rows = flatten(parallel_map<Rows>(pts.size(), cfg.threads, task, progress));
  return out;
}

CommandOutput cmd_bounds(const RunConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const auto pts = grid(cfg);
  auto task = [&](std::size_t i) {
    const double n = pts[i].n, eta = pts[i].eta;
    const auto lim = bounds::fundamental_limits(n, eta);
    Rows rows;
    auto add = [&](const char* probe, double exponent, const bounds::Moments& m) {
      rows.push_back({n, eta, std::string(probe), exponent, lim.f_phi_max_s12, lim.f_phi_max_s3, lim.f_eta_max,
                      m.mean, m.var, bounds::phase_qnd_bound(m.mean, m.var, eta).value,
                      bounds::probe_incomp_bound(m.mean, m.var, n, eta)});
    };
    add("fock", kNaN, {n, 0.0});
    for (double e : cfg.witness_exponents) add("witness", e, bounds::witness_moments(n, e));
    return rows;
  };
  CommandOutput out;
  out.table.columns = {"N",         "eta",     "probe",  "witness_exponent", "f_phi_max", "f_phi_max_s3",
                       "f_eta_max", "mean_n", "var_n", "phase_bound",      "bound_value"};
  out.table.rows = flatten(parallel_map<Rows>(pts.size(), cfg.threads, task, progress));
  return out;
}

CommandOutput run_command(const RunConfig& cfg, const ProgressFn& progress) {
  switch (cfg.command) {
    case Command::Optimize: return cmd_optimize(cfg, progress);
    case Command::GaussianScan: return cmd_gaussian_scan(cfg, progress);
    case Command::Measure: return cmd_measure(cfg, progress);
    case Command::Bounds: return cmd_bounds(cfg, progress);
  }
  throw InvalidInput("unknown command");
}

nlohmann::json config_echo(const RunConfig& cfg) {
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(std::to_string(x)); };
  nlohmann::json j;
  j["command"] = command_name(cfg.command);
  j["n"] = cfg.n_values;
  j["eta"] = cfg.eta_values;
  j["scenario"] = scenario_name(cfg.scenario);
  j["chi"] = cfg.chi_values;
  j["p"] = cfg.p;
  j["q"] = cfg.q ? nlohmann::json(*cfg.q) : nlohmann::json();
  j["regime"] = cfg.regime == gaussian::Regime::StrongDisplacement ? "disp" : "sq";
  j["theta1"] = cfg.theta1;
  j["theta2"] = cfg.theta2;
  j["theta"] = cfg.theta;
  j["mu"] = cfg.mu;
  j["scheme"] = cfg.scheme == measurement::DetectionKind::PhotonCounting ? "counting" : "homodyne";
  j["tau_out"] = cfg.tau_out_values;
  j["xi"] = cfg.xi_values;
  j["probe"] = cfg.probe == ProbeKind::Fock ? "fock" : "gaussian";
  j["strategy"] = cfg.strategy == Strategy::HalfPhoton ? "half" : "simultaneous";
  j["phi"] = cfg.working_phi();
  j["witness"] = cfg.witness_exponents;
  j["restarts"] = cfg.iss.restarts;
  j["max_iters"] = cfg.iss.max_iters;
  j["conv_window"] = cfg.iss.conv_window;
  j["conv_tol"] = cfg.iss.conv_rel_tol;
  j["omega_phi"] = num(cfg.iss.omega_phi);
  j["omega_eta"] = num(cfg.iss.omega_eta);
  return j;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"phaseloss: precision limits for joint phase and loss estimation"};
  configure(app, cfg);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    cfg.validate();
    std::ofstream file;
    if (!cfg.out.empty()) {
      file.open(cfg.out);
      if (!file) throw IoError("cannot open output file " + cfg.out);
    }
    std::ostream& sink = cfg.out.empty() ? out : file;

    ProgressFn progress;
    if (!cfg.quiet)
      progress = [&err](std::size_t done, std::size_t total) {
        err << "[" << done << "/" << total << "] sweep points done\n";
      };
    const CommandOutput res = run_command(cfg, progress);

    if (cfg.format == Format::Csv) {
      write_csv(sink, res.table);
    } else {
      const nlohmann::json meta = {{"version", kVersion},
                                   {"command", command_name(cfg.command)},
                                   {"seed", cfg.iss.seed},
                                   {"config", config_echo(cfg)}};
      sink << to_json(res.table, meta).dump(2) << '\n';
    }
    if (!sink) throw IoError("failed writing output");

    if (res.coefficients) {
      std::string path = cfg.coeffs;
      if (path.empty() && !cfg.out.empty()) path = cfg.out + ".coeffs.csv";
      if (!path.empty()) {
        std::ofstream cf(path);
        if (!cf) throw IoError("cannot open coefficient file " + path);
        write_csv(cf, *res.coefficients);
      }
    }
    return 0;
  } catch (const InvalidInput& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace phaseloss::cli
