#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "phaseloss/channel.hpp"
#include "phaseloss/gaussian.hpp"
#include "phaseloss/iss.hpp"
#include "phaseloss/linalg.hpp"
#include "phaseloss/qfi.hpp"

using namespace phaseloss;

namespace {

channel::ChannelParams params(double eta, int n) {
  channel::ChannelParams p;
  p.phi = 0.3;
  p.eta = eta;
  p.n_max = n;
  return p;
}

channel::FockProbe random_probe(channel::Scenario s, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  linalg::CVector c(n + 1);
  for (auto& x : c) x = {g(rng), g(rng)};
  return channel::FockProbe::normalized(s, c);
}

}  // namespace

// Eigenbasis SLD of a dense single-mode channel output.
void BM_SolveSld(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto probe = random_probe(channel::Scenario::SingleMode, n, 1);
  const channel::KrausFamily k(params(0.4, n), channel::Scenario::SingleMode);
  const auto rho = channel::apply_channel(probe, k);
  const auto d = channel::apply_channel_derivatives(probe, k);
  for (auto _ : state) benchmark::DoNotOptimize(linalg::solve_sld(rho.blocks[0], d.eta.blocks[0]));
}
BENCHMARK(BM_SolveSld)->Arg(10)->Arg(50)->Arg(100);

void BM_ProbeQfiTwoMode(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto probe = random_probe(channel::Scenario::TwoMode, n, 2);
  const channel::KrausFamily k(params(0.4, n), channel::Scenario::TwoMode);
  for (auto _ : state) benchmark::DoNotOptimize(qfi::probe_qfi(probe, k));
}
BENCHMARK(BM_ProbeQfiTwoMode)->Arg(10)->Arg(50)->Arg(100);

// Fixed number of ISS iterations from a seeded start.
void BM_IssIterations(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  iss::IssConfig c;
  c.threads = 1;
  c.max_iters = 10;
  c.conv_rel_tol = 1e-15;
  for (auto _ : state) benchmark::DoNotOptimize(iss::optimize(c, params(0.1, n), static_cast<channel::Scenario>(state.range(1))));
}
BENCHMARK(BM_IssIterations)
    ->Args({20, static_cast<int>(channel::Scenario::SingleMode)})
    ->Args({20, static_cast<int>(channel::Scenario::TwoMode)})
    ->Args({60, static_cast<int>(channel::Scenario::TwoMode)})
    ->Unit(benchmark::kMillisecond);

void BM_GaussianQfi(benchmark::State& state) {
  gaussian::GaussianProbeSpec s;
  s.family = gaussian::Family::TwoModeChiSqueezedDisplaced;
  s.chi = 0.6;
  s.alpha = 30.0;
  s.r = 1.2;
  s.theta1 = 0.4;
  s.theta = 1.0;
  s.theta2 = std::numbers::pi + 2 * s.theta - s.theta1;
  s.tau_in = 0.9;
  const auto probe = gaussian::make_probe(s);
  for (auto _ : state) benchmark::DoNotOptimize(gaussian::gaussian_qfi(probe, params(0.3, 1), s.tau_in));
}
BENCHMARK(BM_GaussianQfi);
BENCHMARK_MAIN();
