#include "wsrm/network.hpp"

#include <cmath>
#include <sstream>

#include "wsrm/rng.hpp"

namespace wsrm {

namespace {

[[noreturn]] void fail(const std::string& what) { throw InvalidArgument(what); }

}  // namespace

void NetworkConfig::validate() const {
  if (num_bs < 1) fail("num_bs must be positive");
  if (num_antennas < 1) fail("num_antennas must be positive");
  if (num_users < 1) fail("num_users must be positive");
  if (assignment.size() != static_cast<std::size_t>(num_users))
    fail("assignment must have one entry per user");
  for (std::size_t k = 0; k < assignment.size(); ++k) {
    if (assignment[k] < 0 || assignment[k] >= num_bs) {
      std::ostringstream os;
      os << "assignment[" << k << "] = " << assignment[k] << " is not a BS index";
      fail(os.str());
    }
  }
  if (power_budget.size() != static_cast<std::size_t>(num_bs))
    fail("power_budget must have one entry per BS");
  for (double p : power_budget)
    if (!(p >= 0.0) || !std::isfinite(p)) fail("power_budget entries must be finite and >= 0");
  if (!(noise_var > 0.0) || !std::isfinite(noise_var)) fail("noise_var must be > 0");
  if (weights.size() != static_cast<std::size_t>(num_users))
    fail("weights must have one entry per user");
  for (double a : weights)
    if (!(a > 0.0) || !std::isfinite(a)) fail("weights must be finite and > 0");
}

std::vector<int> NetworkConfig::users_of(int b) const {
  std::vector<int> users;
  for (int k = 0; k < num_users; ++k)
    if (assignment[static_cast<std::size_t>(k)] == b) users.push_back(k);
  return users;
}

NetworkConfig NetworkConfig::single_cell(int num_antennas, int num_users, double power) {
  return multi_cell(1, num_antennas, num_users, power);
}

NetworkConfig NetworkConfig::multi_cell(int num_bs, int num_antennas, int num_users,
                                        double power_per_bs) {
  NetworkConfig c;
  c.num_bs = num_bs;
  c.num_antennas = num_antennas;
  c.num_users = num_users;
  c.assignment.resize(static_cast<std::size_t>(num_users));
  for (int k = 0; k < num_users; ++k)
    c.assignment[static_cast<std::size_t>(k)] = k * num_bs / num_users;
  c.power_budget.assign(static_cast<std::size_t>(num_bs), power_per_bs);
  c.noise_var = 1.0;
  c.weights.assign(static_cast<std::size_t>(num_users), 1.0);
  return c;
}

ChannelSet::ChannelSet(int num_bs_, int num_users_, int num_antennas_)
    : num_bs(num_bs_), num_users(num_users_), num_antennas(num_antennas_) {
  h.assign(static_cast<std::size_t>(num_bs) * static_cast<std::size_t>(num_users),
           Eigen::RowVectorXcd::Zero(num_antennas));
}

void ChannelSet::validate(const NetworkConfig& config) const {
  if (num_bs != config.num_bs || num_users != config.num_users ||
      num_antennas != config.num_antennas)
    fail("channel set dimensions do not match the network config");
  if (h.size() != static_cast<std::size_t>(num_bs) * static_cast<std::size_t>(num_users))
    fail("channel set must hold B*K vectors");
  for (const auto& row : h) {
    if (row.size() != num_antennas) fail("channel vector length must equal num_antennas");
    if (!row.allFinite()) fail("channel entries must be finite");
  }
}

BeamformerSet::BeamformerSet(int num_users, int num_antennas)
    : w(static_cast<std::size_t>(num_users), Eigen::VectorXcd::Zero(num_antennas)) {}

void BeamformerSet::validate(const NetworkConfig& config) const {
  if (w.size() != static_cast<std::size_t>(config.num_users))
    fail("beamformer set must hold one vector per user");
  for (const auto& v : w) {
    if (v.size() != config.num_antennas) fail("beamformer length must equal num_antennas");
    if (!v.allFinite()) fail("beamformer entries must be finite");
  }
}

ChannelSet generate_rayleigh_channels(const NetworkConfig& config, std::uint64_t seed) {
  config.validate();
  ChannelSet ch(config.num_bs, config.num_users, config.num_antennas);
  Rng rng(seed);
  // Fill order: BS-major, then user, then antenna.
  for (int b = 0; b < config.num_bs; ++b)
    for (int k = 0; k < config.num_users; ++k)
      for (int n = 0; n < config.num_antennas; ++n) ch.at(b, k)(n) = rng.complex_normal();
  return ch;
}

namespace {

cdouble gain(const NetworkConfig& config, const ChannelSet& channels, const BeamformerSet& beams,
             int from_user, int at_user) {
  const int b = config.assignment[static_cast<std::size_t>(from_user)];
  return (channels.at(b, at_user) * beams.w[static_cast<std::size_t>(from_user)]).value();
}

}  // namespace

double interference_plus_noise(const NetworkConfig& config, const ChannelSet& channels,
                               const BeamformerSet& beams, int k) {
  double denom = config.noise_var;
  for (int i = 0; i < config.num_users; ++i) {
    if (i == k) continue;
    denom += std::norm(gain(config, channels, beams, i, k));
  }
  return denom;
}

double sinr(const NetworkConfig& config, const ChannelSet& channels, const BeamformerSet& beams,
            int k) {
  if (k < 0 || k >= config.num_users) throw InvalidArgument("user index out of range");
  const double signal = std::norm(gain(config, channels, beams, k, k));
  return signal / interference_plus_noise(config, channels, beams, k);
}

std::vector<double> sinr_all(const NetworkConfig& config, const ChannelSet& channels,
                             const BeamformerSet& beams) {
  std::vector<double> g(static_cast<std::size_t>(config.num_users));
  for (int k = 0; k < config.num_users; ++k)
    g[static_cast<std::size_t>(k)] = sinr(config, channels, beams, k);
  return g;
}

double weighted_sum_rate(const NetworkConfig& config, const ChannelSet& channels,
                         const BeamformerSet& beams, const std::vector<double>& weights) {
  double total = 0.0;
  for (int k = 0; k < config.num_users; ++k)
    total += weights[static_cast<std::size_t>(k)] *
             std::log2(1.0 + sinr(config, channels, beams, k));
  return total;
}

double weighted_sum_rate(const NetworkConfig& config, const ChannelSet& channels,
                         const BeamformerSet& beams) {
  return weighted_sum_rate(config, channels, beams, config.weights);
}

double per_bs_power(const NetworkConfig& config, const BeamformerSet& beams, int b) {
  if (b < 0 || b >= config.num_bs) throw InvalidArgument("BS index out of range");
  double p = 0.0;
  for (int k = 0; k < config.num_users; ++k)
    if (config.assignment[static_cast<std::size_t>(k)] == b)
      p += beams.w[static_cast<std::size_t>(k)].squaredNorm();
  return p;
}

bool is_power_feasible(const NetworkConfig& config, const BeamformerSet& beams, double tol) {
  for (int b = 0; b < config.num_bs; ++b)
    if (per_bs_power(config, beams, b) > config.power_budget[static_cast<std::size_t>(b)] + tol)
      return false;
  return true;
}

BeamformerSet mrt_beamformers(const NetworkConfig& config, const ChannelSet& channels) {
  BeamformerSet beams(config.num_users, config.num_antennas);
  for (int b = 0; b < config.num_bs; ++b) {
    const auto users = config.users_of(b);
    if (users.empty()) continue;
    const double p =
        config.power_budget[static_cast<std::size_t>(b)] / static_cast<double>(users.size());
    for (int k : users) {
      const Eigen::RowVectorXcd& h = channels.at(b, k);
      const double norm = h.norm();
      if (norm > 0.0) beams.w[static_cast<std::size_t>(k)] = std::sqrt(p) * h.adjoint() / norm;
    }
  }
  return beams;
}

double db_to_power(double power_db, double noise_var) {
  return noise_var * std::pow(10.0, power_db / 10.0);
}

}  // namespace wsrm
