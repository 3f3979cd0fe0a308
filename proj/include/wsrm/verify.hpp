#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wsrm/network.hpp"

namespace wsrm::verify {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Options {
  std::uint64_t seed = 1;
  /// Forwarded to the SCA runs of the monotonicity suite. Empty keeps the
  /// correct update; a wrong rule is the mutation fixture.
  std::function<double(double x, double beta)> phi_rule;
};

/// network, cones, solver, amgm, linearization, monotonicity, oracles, baselines
const std::vector<std::string>& suite_names();

/// Runs every suite whose name equals filter (all when filter is empty).
/// Throws InvalidArgument for an unknown name.
std::vector<SuiteResult> run_suites(const std::string& filter, const Options& options);

SuiteResult network_suite(std::uint64_t seed);
/// Hyperbolic cones and geometric-mean trees (leaf counts 1..8) against
/// direct arithmetic at `samples` random points each.
SuiteResult cone_membership_suite(int samples, std::uint64_t seed);
/// Reference problems: relative objective error <= 1e-6, gap <= 1e-8.
SuiteResult solver_library_suite();
/// Dominance, tangency and gradient match of the AM-GM overestimate.
SuiteResult amgm_suite(int samples, std::uint64_t seed);
/// Dominance and tangency of the power linearization for alpha > 1.
SuiteResult linearization_suite(int samples, std::uint64_t seed);
/// SCA traces nondecreasing within 1e-6 on mixed single- and two-cell instances.
SuiteResult monotonicity_suite(int instances, std::uint64_t seed,
                               const std::function<double(double, double)>& phi_rule = {});
/// Closed-form single-user capacity for SCA and WMMSE; ZF on orthonormal channels.
SuiteResult oracle_suite(std::uint64_t seed);
/// ZF nulling and feasibility, WMMSE monotonicity and feasibility.
SuiteResult baselines_suite(int instances, std::uint64_t seed);

/// N = 1, B = 1, K = 2 with real N(0, 1) channels.
struct TinyInstance {
  NetworkConfig config;
  ChannelSet channels;
};
TinyInstance tiny_instance(std::uint64_t seed, double power_db);

/// Grid maximum of the weighted sum rate over beam amplitudes
/// a_1, a_2 in {0, step, 2 step, ...} with a_1^2 + a_2^2 <= P.
double brute_force_wsr(const NetworkConfig& config, const ChannelSet& channels, double step);

/// Best converged SCA value over `restarts` random-beam starts.
double best_of_restarts(const NetworkConfig& config, const ChannelSet& channels, int restarts,
                        std::uint64_t seed);

}  // namespace wsrm::verify
