// fock_oracle.hpp - Gaussian probes rebuilt in a truncated two-mode Fock space
//
// Independent of the covariance-matrix code: the state is generated by
// exponentiating the squeezing and displacement generators on the vacuum,
// then pushed through the loss Kraus operators mode by mode.
#pragma once

#include "phaseloss/gaussian.hpp"
#include "phaseloss/qfi.hpp"

namespace phaseloss::testing {

struct FockOracleResult {
  qfi::QfiReport qfi;
  double mean_n1 = 0.0;
  double mean_n2 = 0.0;
  double var_n1 = 0.0;
  int cutoff = 0;
  double tail_weight = 0.0;
};

// Two-mode state amplitudes psi(n1, n2) (column-major, n1 fastest) of the
// probe after the input beamsplitter, cutoff `dim` photons per mode.
linalg::CVector gaussian_fock_state(const gaussian::GaussianProbeSpec& spec, int dim);

// QFI and photon moments of the channel output, starting at `min_cutoff`
// and growing the cutoff until the weight on the top five Fock levels of
// either mode is below 1e-12.
FockOracleResult fock_oracle(const gaussian::GaussianProbeSpec& spec, const channel::ChannelParams& params,
                             int min_cutoff = 40);

}  // namespace phaseloss::testing
