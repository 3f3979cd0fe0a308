#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wsrm/baselines.hpp"
#include "wsrm/io.hpp"
#include "wsrm/network.hpp"
#include "wsrm/sca.hpp"

namespace wsrm::experiment {

enum class Scenario { SingleCellSweep, TwoCellConvergence, Custom };
enum class Algorithm { Sca, ScaExact, Wmmse, Zf };

std::string to_string(Scenario s);
std::string to_string(Algorithm a);  // "SCA", "SCA_EXACT", "WMMSE", "ZF"
Scenario scenario_from_string(const std::string& s);
Algorithm algorithm_from_string(const std::string& s);
bool is_iterative(Algorithm a);

struct ExperimentSpec {
  Scenario scenario = Scenario::Custom;
  /// Power budgets are overwritten per grid point; everything else is used as is.
  NetworkConfig config;
  std::vector<double> power_db;  // per-BS budget in dB relative to the noise variance
  int num_trials = 1;
  std::vector<Algorithm> algorithms;
  std::uint64_t master_seed = 1;
  sca::ScaConfig sca;
  baselines::WmmseConfig wmmse;

  /// Single cell, N = 4, K = 4, unit noise and weights, 0..30 dB in 5 dB steps.
  static ExperimentSpec single_cell_sweep(int num_trials = 200);
  /// Two cells, N = 8, two users each, 12 dB, weights (0.14, 0.21, 0.28, 0.36).
  static ExperimentSpec two_cell_convergence(int num_trials = 100);

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

/// Spec file schema (JSON, power in dB):
///   {"scenario": "SingleCellSweep" | "TwoCellConvergence" | "Custom",
///    "network": {"num_bs", "num_antennas", "num_users", "noise_var"?, "weights"?, "assignment"?},
///    "power_db": [...], "num_trials": n, "algorithms": ["SCA", "SCA_EXACT", "WMMSE", "ZF"],
///    "master_seed": s,
///    "sca": {"stop_tol"?, "max_outer_iters"?, "init"?: "MrtStart" | "RandomFeasible" | "RandomBeams"}?,
///    "wmmse": {"stop_tol"?, "max_iters"?, "init"?: "Mrt" | "Random"}?}
ExperimentSpec spec_from_json(const io::json& j);
io::json spec_to_json(const ExperimentSpec& spec);

/// One algorithm on one (power point, trial).
struct TrialRecord {
  Algorithm algorithm = Algorithm::Sca;
  int power_index = 0;
  double power_db = 0.0;
  int trial = 0;
  bool ok = false;
  std::string error;  // set when !ok
  double wsr = 0.0;
  int iterations = 0;
  bool converged = false;
  double seconds_per_iter = 0.0;  // median over iterations
  std::vector<double> trace;
};

struct PointSummary {
  double power_db = 0.0;
  int successes = 0;
  int failures = 0;
  double mean_wsr = 0.0;
  double ci95 = 0.0;  // half-width, 1.96 standard errors
};

struct AlgorithmSummary {
  Algorithm algorithm = Algorithm::Sca;
  std::vector<PointSummary> points;
  double iterations_median = 0.0, iterations_q1 = 0.0, iterations_q3 = 0.0;
  double median_seconds_per_iter = 0.0;
};

struct ExperimentResult {
  ExperimentSpec spec;
  /// Ordered by power point, then trial, then the spec's algorithm order.
  std::vector<TrialRecord> records;
  std::vector<AlgorithmSummary> summaries;  // spec's algorithm order
  int total_failures = 0;
};

struct RunOptions {
  /// Worker count; 0 reads WSRM_THREADS and falls back to the OpenMP default.
  int threads = 0;
};

/// Channels for trial i: generate_rayleigh_channels(config, substream_seed(master, i, 0)),
/// shared by every algorithm and power point. Initializations use entity 1.
std::uint64_t channel_seed(const ExperimentSpec& spec, int trial);
std::uint64_t init_seed(const ExperimentSpec& spec, int trial);

/// Runs one work item. Solver failures are caught and recorded.
TrialRecord run_trial(const ExperimentSpec& spec, Algorithm algorithm, int power_index, int trial);

/// Trials run on an OpenMP worker pool; the fold is ordered by trial index so
/// the result does not depend on scheduling.
ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

/// Single-threaded reference with identical output.
ExperimentResult run_experiment_serial(const ExperimentSpec& spec);

/// Aggregates records in their stored order.
ExperimentResult aggregate(const ExperimentSpec& spec, std::vector<TrialRecord> records);

struct IterationRow {
  Algorithm algorithm = Algorithm::Sca;
  int runs = 0;
  double median = 0.0, q1 = 0.0, q3 = 0.0;
};

/// Iteration statistics of the iterative algorithms, spec order.
std::vector<IterationRow> iteration_comparison(const ExperimentResult& result);

/// Linear-interpolation quantile of a sample (q in [0, 1]).
double quantile(std::vector<double> v, double q);

/// File contents; `timing` controls whether wall-clock columns are filled
/// (they are zero otherwise so that outputs are reproducible byte for byte).
std::string results_csv(const ExperimentResult& result, bool timing);
std::string traces_json(const ExperimentResult& result);
std::string summary_json(const ExperimentResult& result, bool timing);

/// Writes results.csv, traces.json and summary.json atomically into dir.
void write_outputs(const ExperimentResult& result, const std::string& dir, bool timing);

/// Build identification stamped into summary.json.
std::string version_string();

}  // namespace wsrm::experiment
