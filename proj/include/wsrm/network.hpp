#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "wsrm/error.hpp"

namespace wsrm {

using cdouble = std::complex<double>;

/// Multicell MISO downlink topology.
///
/// B base stations with N antennas each serve K single-antenna users. User k
/// is served only by BS assignment[k]. Power budgets are linear scale.
struct NetworkConfig {
  int num_bs = 1;
  int num_antennas = 1;
  int num_users = 1;
  std::vector<int> assignment;       // user -> serving BS
  std::vector<double> power_budget;  // per BS
  double noise_var = 1.0;
  std::vector<double> weights;  // per user, > 0

  /// Throws InvalidArgument naming the first violated invariant.
  void validate() const;

  /// Users served by BS b, in increasing order.
  std::vector<int> users_of(int b) const;

  /// B=1 config with every user on BS 0, unit noise and unit weights.
  static NetworkConfig single_cell(int num_antennas, int num_users, double power);

  /// B cells with contiguous user blocks: users [b*K/B, (b+1)*K/B) on BS b.
  static NetworkConfig multi_cell(int num_bs, int num_antennas, int num_users,
                                  double power_per_bs);
};

/// Channel row vectors h_{b,k} for every (BS, user) pair.
struct ChannelSet {
  int num_bs = 0;
  int num_users = 0;
  int num_antennas = 0;
  std::vector<Eigen::RowVectorXcd> h;  // index b * num_users + k

  ChannelSet() = default;
  ChannelSet(int num_bs, int num_users, int num_antennas);

  const Eigen::RowVectorXcd& at(int b, int k) const { return h[index(b, k)]; }
  Eigen::RowVectorXcd& at(int b, int k) { return h[index(b, k)]; }

  /// Throws if dimensions disagree with config or any entry is not finite.
  void validate(const NetworkConfig& config) const;

 private:
  std::size_t index(int b, int k) const {
    return static_cast<std::size_t>(b) * static_cast<std::size_t>(num_users) +
           static_cast<std::size_t>(k);
  }
};

/// One complex beamformer per user.
struct BeamformerSet {
  std::vector<Eigen::VectorXcd> w;

  BeamformerSet() = default;
  BeamformerSet(int num_users, int num_antennas);

  void validate(const NetworkConfig& config) const;
};

/// i.i.d. CN(0,1) entries, deterministic in seed.
ChannelSet generate_rayleigh_channels(const NetworkConfig& config, std::uint64_t seed);

/// |h_{b_k,k} w_k|^2 / (sigma^2 + sum_{i != k} |h_{b_i,k} w_i|^2)
double sinr(const NetworkConfig& config, const ChannelSet& channels,
            const BeamformerSet& beams, int k);

std::vector<double> sinr_all(const NetworkConfig& config, const ChannelSet& channels,
                             const BeamformerSet& beams);

/// sigma^2 + sum_{i != k} |h_{b_i,k} w_i|^2
double interference_plus_noise(const NetworkConfig& config, const ChannelSet& channels,
                               const BeamformerSet& beams, int k);

/// sum_k alpha_k log2(1 + gamma_k), bits/s/Hz.
double weighted_sum_rate(const NetworkConfig& config, const ChannelSet& channels,
                         const BeamformerSet& beams);

/// Same with explicit weights (used when scoring under unscaled weights).
double weighted_sum_rate(const NetworkConfig& config, const ChannelSet& channels,
                         const BeamformerSet& beams, const std::vector<double>& weights);

double per_bs_power(const NetworkConfig& config, const BeamformerSet& beams, int b);

bool is_power_feasible(const NetworkConfig& config, const BeamformerSet& beams, double tol);

/// Maximum-ratio start: w_k = sqrt(P_b / |U_b|) h_{b_k,k}^H / ||h_{b_k,k}||.
BeamformerSet mrt_beamformers(const NetworkConfig& config, const ChannelSet& channels);

/// Power budget in linear scale for a dB value relative to the noise variance.
double db_to_power(double power_db, double noise_var);

}  // namespace wsrm
