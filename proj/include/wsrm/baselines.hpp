#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "wsrm/network.hpp"

namespace wsrm::baselines {

/// Zero-forcing directions from the pseudo-inverse of the stacked channel
/// matrix, powers by weighted water-filling under the single BS budget.
/// Requires B = 1 and K <= N; throws InvalidArgument otherwise or when the
/// channel matrix is rank deficient.
BeamformerSet zero_forcing(const NetworkConfig& config, const ChannelSet& channels);

/// Maximizes sum_k a_k log2(1 + g_k p_k) over p >= 0, sum p <= budget.
/// Solution p_k = max(0, a_k mu - 1 / g_k) with the level mu found by bisection.
std::vector<double> water_filling(const std::vector<double>& gains, const std::vector<double>& weights,
                                  double budget);

enum class WmmseInit { Mrt, Random };

struct WmmseConfig {
  double stop_tol = 1e-2;
  int max_iters = 1000;
  WmmseInit init = WmmseInit::Mrt;
  /// Bisection on the per-BS multiplier stops when the power is within this
  /// relative distance of the budget.
  double power_tol = 1e-10;
};

struct WmmseState {
  std::vector<std::complex<double>> u;  // receive scalars
  std::vector<double> v;                // MSE weights, > 0
  BeamformerSet beams;
  std::vector<double> trace;
};

struct WmmseResult {
  BeamformerSet beams;
  std::vector<double> trace;  // weighted sum rate after each update
  int iterations = 0;
  bool converged = false;
  std::vector<double> seconds_per_iter;
  WmmseState final_state;
};

/// Random start: i.i.d. CN(0,1) beams scaled so every BS spends its budget.
BeamformerSet random_beamformers(const NetworkConfig& config, std::uint64_t seed);

/// Weighted MMSE alternating optimization with per-BS power constraints.
/// Stops when two consecutive weighted sum rates differ by less than stop_tol.
WmmseResult wmmse(const NetworkConfig& config, const ChannelSet& channels, const WmmseConfig& wmmse_config,
                  std::uint64_t seed = 0);

/// One full pass (receivers, weights, transmit beams) from the given beams.
WmmseState wmmse_step(const NetworkConfig& config, const ChannelSet& channels, const BeamformerSet& beams,
                      double power_tol = 1e-10);

}  // namespace wsrm::baselines
