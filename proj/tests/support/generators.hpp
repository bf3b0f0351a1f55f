// generators.hpp - seeded random inputs for property tests
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "phaseloss/channel.hpp"
#include "phaseloss/gaussian.hpp"

namespace phaseloss::testing {

using linalg::cplx;
using linalg::CMatrix;
using linalg::CVector;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>()(rng_); }
  cplx cnormal() { return {normal(), normal()}; }

  CVector cvector(Eigen::Index n) {
    CVector v(n);
    for (auto& x : v) x = cnormal();
    return v;
  }
  CMatrix cmatrix(Eigen::Index n) {
    CMatrix m(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) m(i, j) = cnormal();
    return m;
  }
  CMatrix hermitian(Eigen::Index n) {
    const CMatrix a = cmatrix(n);
    return 0.5 * (a + a.adjoint());
  }
  CMatrix unitary(Eigen::Index n) { return Eigen::HouseholderQR<CMatrix>(cmatrix(n)).householderQ(); }
  // Full-rank density matrix with spectrum bounded away from zero.
  CMatrix density(Eigen::Index n) {
    const CMatrix a = cmatrix(n);
    CMatrix rho = a * a.adjoint() + 0.1 * CMatrix::Identity(n, n);
    return rho / rho.trace().real();
  }
  // Traceless Hermitian perturbation.
  CMatrix traceless_hermitian(Eigen::Index n) {
    CMatrix h = hermitian(n);
    h.diagonal().array() -= h.trace() / static_cast<double>(n);
    return h;
  }

  channel::FockProbe probe(channel::Scenario s, int n_max) {
    return channel::FockProbe::normalized(s, cvector(n_max + 1));
  }

  // Gaussian spec with mean energy about `n_scale` or less.
  gaussian::GaussianProbeSpec gaussian_spec(double n_scale) {
    gaussian::GaussianProbeSpec s;
    const bool two = uniform() < 0.6;
    s.family = two ? gaussian::Family::TwoModeChiSqueezedDisplaced : gaussian::Family::SingleModeDisplacedSqueezed;
    const double na = uniform(0.0, n_scale * 0.7);
    const double nr = uniform(0.0, n_scale * 0.3);
    s.alpha = std::sqrt(na);
    s.r = two ? std::asinh(std::sqrt(nr / 2.0)) : std::asinh(std::sqrt(nr));
    s.mu = uniform(0.0, 2 * std::numbers::pi);
    s.theta1 = uniform(0.0, 2 * std::numbers::pi);
    s.theta2 = uniform(0.0, 2 * std::numbers::pi);
    s.theta = uniform(0.0, 2 * std::numbers::pi);
    s.tau_in = uniform(0.2, 1.0);
    if (two) {
      const int pick = integer(0, 2);
      s.chi = pick == 0 ? 0.0 : pick == 1 ? std::numbers::pi / 2 : uniform(0.1, 1.4);
      // intermediate chi needs theta1 + theta2 - 2 theta = pi for a pure state
      if (pick == 2) s.theta2 = std::numbers::pi + 2 * s.theta - s.theta1;
    }
    return s;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace phaseloss::testing
