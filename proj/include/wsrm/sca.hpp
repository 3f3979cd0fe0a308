#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wsrm/conic.hpp"
#include "wsrm/network.hpp"

namespace wsrm::sca {

enum class WeightScaleMode {
  ScaleAbove1,  // multiply all weights by 1.01 / min(alpha)
  Raw,          // multiply by ScaConfig::scale_factor; every product must exceed 1
};

enum class InitMode {
  MrtStart,        // maximum-ratio beams, slacks tight at that point
  RandomFeasible,  // phi ~ U(0.1, 10) capped for feasibility, t = 1
  RandomBeams,     // CN(0, 1) beams at full budget, slacks tight at that point
};

struct ScaConfig {
  double stop_tol = 1e-2;
  int max_outer_iters = 100;
  WeightScaleMode weight_scale_mode = WeightScaleMode::ScaleAbove1;
  InitMode init_mode = InitMode::MrtStart;
  double scale_factor = 1.0;
  conic::SolverOptions solver;
  /// Subproblems that stop at MaxIterations or NumericalFailure are still
  /// used when all their residuals are below this value.
  double inexact_accept_tol = 1e-6;
  /// Re-inserts each iterate into the next subproblem and records the worst
  /// constraint violation in ScaResult::max_carryover_violation.
  bool check_feasibility_carryover = false;
  /// After each update, reset (t, x, beta, phi) to the values the new beams
  /// attain instead of keeping the subproblem optimum. Off by default.
  bool tighten_slacks = false;
  /// When non-empty, every subproblem is written there as iter_<n>.cone.
  std::string dump_dir;
  /// Replaces phi = sqrt(x) / beta. Test hook for mutation checks.
  std::function<double(double x, double beta)> phi_rule;
};

inline constexpr double kPhiMin = 1e-6;
inline constexpr double kPhiMax = 1e6;
inline constexpr double kTrefFloor = 1e-9;

/// Per-user iterates of the outer loop.
struct ScaState {
  std::vector<double> t, beta, x, phi;
  int iter = 0;
  std::vector<double> objective_trace;
  BeamformerSet beams;
};

/// Index map of the real embedding. Variables are ordered: Re(w_k) for all
/// users, Im(w_k) for all users, then t_k, x_k, beta_k, then the rest
/// (geometric-mean tree nodes and exact-tower nodes).
struct VariableMap {
  int num_users = 0;
  int num_antennas = 0;

  int re(int k, int n) const { return k * num_antennas + n; }
  int im(int k, int n) const { return (num_users + k) * num_antennas + n; }
  int t(int k) const { return 2 * num_users * num_antennas + k; }
  int x(int k) const { return 2 * num_users * num_antennas + num_users + k; }
  int beta(int k) const { return 2 * num_users * num_antennas + 2 * num_users + k; }
  int first_aux() const { return 2 * num_users * num_antennas + 3 * num_users; }

  int root = -1;
  std::vector<int> tree_cones;
  std::vector<int> amgm_cones;          // per user, rotated form of G <= Re(hw)
  std::vector<int> rate_cones;          // per user, L(t) <= x + 1 (linearized only)
  std::vector<int> interference_cones;  // per user
  std::vector<int> power_cones;         // per BS with positive budget
  std::vector<int> signal_imag_rows;    // per user, Im(h w) = 0
};

enum class RateConstraint {
  Linearized,  // first-order bound on t^(1/alpha), alpha > 1
  ExactTower,  // exact SOC representation of t^(1/alpha) <= x + 1, alpha <= 1 rational
};

struct Subproblem {
  conic::ConeProgram program;
  VariableMap map;
};

/// c * alpha with c = 1.01 / min(alpha).
std::vector<double> scale_weights(const std::vector<double>& weights);

/// G(x, beta, phi) = phi/2 beta^2 + x / (2 phi) >= sqrt(x) beta.
double amgm_overestimate(double x, double beta, double phi);

/// Tangent line of the concave t^(1/alpha) at t_ref.
struct PowerLinearization {
  double slope = 0.0;
  double intercept = 0.0;
  double operator()(double t) const { return intercept + slope * t; }
};

/// Throws InvalidArgument unless alpha > 1 and t_ref > 0.
PowerLinearization linearize_power(double t_ref, double alpha);

/// Affine form of h_{b_i,k} w_i in the real embedding (real and imaginary part).
std::pair<conic::AffineExpr, conic::AffineExpr> channel_gain(const VariableMap& map,
                                                             const Eigen::RowVectorXcd& h,
                                                             int user);

/// Assembles one outer-iteration SOCP around (state.phi, state.t).
/// `weights` are the already-scaled weights the rate constraints use.
Subproblem build_iteration_socp(const NetworkConfig& config, const ChannelSet& channels,
                                const ScaState& state, const std::vector<double>& weights,
                                RateConstraint rate = RateConstraint::Linearized);

/// Beamformers stored in a subproblem point.
BeamformerSet extract_beams(const VariableMap& map, const Eigen::VectorXd& y);

/// Copies (t*, beta*, x*) and sets phi = sqrt(x) / beta clamped to
/// [kPhiMin, kPhiMax]; appends the weighted sum rate of the new beams
/// (under config.weights) to the trace.
ScaState update_state(const NetworkConfig& config, const ChannelSet& channels,
                      const conic::ConeSolution& solution, const VariableMap& map,
                      const ScaState& state,
                      const std::function<double(double, double)>& phi_rule = {});

/// Sets x = SINR, beta = sqrt(interference + noise), t = (1 + SINR)^weight
/// and the matched phi at state.beams, so every surrogate is tight there.
void tighten_slacks(const NetworkConfig& config, const ChannelSet& channels,
                    const std::vector<double>& weights, ScaState& state);

/// Initial state per ScaConfig::init_mode. `weights` are the scaled weights.
ScaState initial_state(const NetworkConfig& config, const ChannelSet& channels,
                       const std::vector<double>& weights, InitMode mode, std::uint64_t seed);

struct ScaResult {
  BeamformerSet beams;
  std::vector<double> trace;  // weighted sum rate after each solved subproblem
  /// Subproblem optimum in rate units, sum log2 t_k * alpha_k / scaled alpha_k.
  /// A lower bound on trace, nondecreasing because each optimum stays
  /// feasible for the next subproblem.
  std::vector<double> surrogate_trace;
  int iterations = 0;
  bool converged = false;
  double kkt_residual = -1.0;  // negative when not evaluated
  double max_carryover_violation = 0.0;
  std::vector<double> seconds_per_iter;

  // What kkt_residual needs: the last subproblem's operating point and solution.
  RateConstraint rate = RateConstraint::Linearized;
  std::vector<double> scaled_weights;
  ScaState final_operating_point;
  conic::ConeSolution final_solution;
};

/// Outer loop: solve, update, repeat until |WSR(n+1) - WSR(n)| < stop_tol.
/// Throws SolverError (with the iteration number) on an unusable subproblem.
ScaResult run(const NetworkConfig& config, const ChannelSet& channels, const ScaConfig& sca_config,
              std::uint64_t seed = 0);

/// Same outer loop with the exact SOC tower for t^(1/alpha) <= x + 1.
/// Weights are scaled to max 1; every max(alpha)/alpha_k must be a rational
/// m/n with m <= kMaxTowerNumerator, otherwise InvalidArgument is thrown.
ScaResult run_exact_variant(const NetworkConfig& config, const ChannelSet& channels,
                            const ScaConfig& sca_config, std::uint64_t seed = 0);

inline constexpr int kMaxTowerNumerator = 64;

/// Exponent 1/alpha as a reduced fraction m/n (m >= n), or {0, 0} if none
/// with m <= kMaxTowerNumerator matches to 1e-9.
std::pair<int, int> rational_exponent(double alpha);

/// Weights for the exact variant: alpha / max(alpha).
std::vector<double> exact_variant_weights(const std::vector<double>& weights);

/// Adds t^(m/n) <= s, t >= 0, for integers m >= n >= 1, as t <= the geometric
/// mean of (n copies of s, M - m copies of t, m - n ones) with M = 2^ceil(log2 m).
/// For m == n this is the single linear constraint t <= s.
void add_power_tower(conic::ConeProgram& program, int t, const conic::AffineExpr& s, int m, int n);

/// Max-norm KKT residual of the lifted WSRM problem (product objective,
/// exact constraints Re(h w) >= sqrt(x) beta and x + 1 >= t^(1/alpha)) at the
/// returned beams and final slacks, with multipliers taken from the final
/// subproblem. Stationarity and complementarity are divided by
/// s_d = max(100, mean |multiplier|) / 100.
double kkt_residual(const NetworkConfig& config, const ChannelSet& channels,
                    const ScaResult& result);

}  // namespace wsrm::sca
