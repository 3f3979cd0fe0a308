#include "wsrm/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "wsrm/rng.hpp"

#ifndef WSRM_VERSION
#define WSRM_VERSION "unknown"
#endif

namespace wsrm::experiment {

using io::json;

namespace {

const char* init_name(sca::InitMode m) {
  switch (m) {
    case sca::InitMode::MrtStart: return "MrtStart";
    case sca::InitMode::RandomFeasible: return "RandomFeasible";
    case sca::InitMode::RandomBeams: return "RandomBeams";
  }
  return "MrtStart";
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::SingleCellSweep: return "SingleCellSweep";
    case Scenario::TwoCellConvergence: return "TwoCellConvergence";
    case Scenario::Custom: return "Custom";
  }
  return "Custom";
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Sca: return "SCA";
    case Algorithm::ScaExact: return "SCA_EXACT";
    case Algorithm::Wmmse: return "WMMSE";
    case Algorithm::Zf: return "ZF";
  }
  return "SCA";
}

Scenario scenario_from_string(const std::string& s) {
  for (auto v : {Scenario::SingleCellSweep, Scenario::TwoCellConvergence, Scenario::Custom})
    if (to_string(v) == s) return v;
  throw InvalidArgument("unknown scenario '" + s + "' (expected SingleCellSweep, TwoCellConvergence or Custom)");
}

Algorithm algorithm_from_string(const std::string& s) {
  for (auto v : {Algorithm::Sca, Algorithm::ScaExact, Algorithm::Wmmse, Algorithm::Zf})
    if (to_string(v) == s) return v;
  throw InvalidArgument("unknown algorithm '" + s + "' (expected SCA, SCA_EXACT, WMMSE or ZF)");
}

bool is_iterative(Algorithm a) { return a != Algorithm::Zf; }

ExperimentSpec ExperimentSpec::single_cell_sweep(int num_trials) {
  ExperimentSpec s;
  s.scenario = Scenario::SingleCellSweep;
  s.config = NetworkConfig::single_cell(4, 4, 1.0);
  s.power_db = {0, 5, 10, 15, 20, 25, 30};
  s.num_trials = num_trials;
  s.algorithms = {Algorithm::Sca, Algorithm::Wmmse, Algorithm::Zf};
  return s;
}

ExperimentSpec ExperimentSpec::two_cell_convergence(int num_trials) {
  ExperimentSpec s;
  s.scenario = Scenario::TwoCellConvergence;
  s.config = NetworkConfig::multi_cell(2, 8, 4, 1.0);
  s.config.weights = {0.14, 0.21, 0.28, 0.36};
  s.power_db = {12};
  s.num_trials = num_trials;
  s.algorithms = {Algorithm::Sca, Algorithm::ScaExact, Algorithm::Wmmse};
  s.wmmse.init = baselines::WmmseInit::Random;
  return s;
}

void ExperimentSpec::validate() const {
  config.validate();
  if (num_trials < 1) throw InvalidArgument("num_trials: must be at least 1");
  if (power_db.empty()) throw InvalidArgument("power_db: needs at least one point");
  for (double p : power_db)
    if (!std::isfinite(p)) throw InvalidArgument("power_db: values must be finite");
  if (algorithms.empty()) throw InvalidArgument("algorithms: needs at least one algorithm");
  for (std::size_t i = 0; i < algorithms.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (algorithms[i] == algorithms[j]) throw InvalidArgument("algorithms: duplicate " + to_string(algorithms[i]));
  if (!(sca.stop_tol > 0.0)) throw InvalidArgument("sca.stop_tol: must be positive");
  if (sca.max_outer_iters < 1) throw InvalidArgument("sca.max_outer_iters: must be at least 1");
  if (!(wmmse.stop_tol > 0.0)) throw InvalidArgument("wmmse.stop_tol: must be positive");
  if (wmmse.max_iters < 1) throw InvalidArgument("wmmse.max_iters: must be at least 1");
}

ExperimentSpec spec_from_json(const json& j) {
  const std::string root = "spec";
  if (!j.is_object()) throw InvalidArgument("spec: expected a JSON object");
  static const std::vector<std::string> known = {"scenario", "network", "power_db", "num_trials",
                                                 "algorithms", "master_seed", "sca", "wmmse"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw InvalidArgument("spec." + key + ": unknown field");

  ExperimentSpec s;
  s.scenario = scenario_from_string(io::require_string(j, "scenario", root));
  s.config = io::network_from_json(io::require(j, "network", root), root + ".network");
  s.power_db = io::require_numbers(j, "power_db", root);
  s.num_trials = io::require_int(j, "num_trials", root);
  const json& algs = io::require(j, "algorithms", root);
  if (!algs.is_array()) throw InvalidArgument("spec.algorithms: expected an array of names");
  for (std::size_t i = 0; i < algs.size(); ++i) {
    if (!algs[i].is_string()) throw InvalidArgument("spec.algorithms[" + std::to_string(i) + "]: expected a string");
    try {
      s.algorithms.push_back(algorithm_from_string(algs[i].get<std::string>()));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("spec.algorithms[" + std::to_string(i) + "]: " + e.what());
    }
  }
  const json& seed = io::require(j, "master_seed", root);
  if (!seed.is_number_unsigned()) throw InvalidArgument("spec.master_seed: expected a non-negative integer");
  s.master_seed = seed.get<std::uint64_t>();

  if (j.contains("sca")) {
    const json& c = j["sca"];
    const std::string w = root + ".sca";
    if (!c.is_object()) throw InvalidArgument(w + ": expected an object");
    if (c.contains("stop_tol")) s.sca.stop_tol = io::require_number(c, "stop_tol", w);
    if (c.contains("max_outer_iters")) s.sca.max_outer_iters = io::require_int(c, "max_outer_iters", w);
    if (c.contains("init")) {
      const auto init = io::require_string(c, "init", w);
      if (init == "MrtStart") s.sca.init_mode = sca::InitMode::MrtStart;
      else if (init == "RandomFeasible") s.sca.init_mode = sca::InitMode::RandomFeasible;
      else if (init == "RandomBeams") s.sca.init_mode = sca::InitMode::RandomBeams;
      else throw InvalidArgument(w + ".init: expected MrtStart, RandomFeasible or RandomBeams");
    }
  }
  if (j.contains("wmmse")) {
    const json& c = j["wmmse"];
    const std::string w = root + ".wmmse";
    if (!c.is_object()) throw InvalidArgument(w + ": expected an object");
    if (c.contains("stop_tol")) s.wmmse.stop_tol = io::require_number(c, "stop_tol", w);
    if (c.contains("max_iters")) s.wmmse.max_iters = io::require_int(c, "max_iters", w);
    if (c.contains("init")) {
      const auto init = io::require_string(c, "init", w);
      if (init == "Mrt") s.wmmse.init = baselines::WmmseInit::Mrt;
      else if (init == "Random") s.wmmse.init = baselines::WmmseInit::Random;
      else throw InvalidArgument(w + ".init: expected Mrt or Random");
    }
  }
  s.validate();
  return s;
}

json spec_to_json(const ExperimentSpec& spec) {
  json algs = json::array();
  for (auto a : spec.algorithms) algs.push_back(to_string(a));
  return {{"scenario", to_string(spec.scenario)},
          {"network", io::network_to_json(spec.config)},
          {"power_db", spec.power_db},
          {"num_trials", spec.num_trials},
          {"algorithms", algs},
          {"master_seed", spec.master_seed},
          {"sca",
           {{"stop_tol", spec.sca.stop_tol},
            {"max_outer_iters", spec.sca.max_outer_iters},
            {"init", init_name(spec.sca.init_mode)}}},
          {"wmmse",
           {{"stop_tol", spec.wmmse.stop_tol},
            {"max_iters", spec.wmmse.max_iters},
            {"init", spec.wmmse.init == baselines::WmmseInit::Mrt ? "Mrt" : "Random"}}}};
}

std::uint64_t channel_seed(const ExperimentSpec& spec, int trial) {
  return substream_seed(spec.master_seed, static_cast<std::uint64_t>(trial), 0);
}

std::uint64_t init_seed(const ExperimentSpec& spec, int trial) {
  return substream_seed(spec.master_seed, static_cast<std::uint64_t>(trial), 1);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

TrialRecord run_trial(const ExperimentSpec& spec, Algorithm algorithm, int power_index, int trial) {
  TrialRecord rec;
  rec.algorithm = algorithm;
  rec.power_index = power_index;
  rec.power_db = spec.power_db[static_cast<std::size_t>(power_index)];
  rec.trial = trial;
  try {
    NetworkConfig config = spec.config;
    std::fill(config.power_budget.begin(), config.power_budget.end(), db_to_power(rec.power_db, config.noise_var));
    const ChannelSet ch = generate_rayleigh_channels(config, channel_seed(spec, trial));
    const std::uint64_t seed = init_seed(spec, trial);
    BeamformerSet beams;
    std::vector<double> seconds;
    switch (algorithm) {
      case Algorithm::Sca:
      case Algorithm::ScaExact: {
        const auto r = algorithm == Algorithm::Sca ? sca::run(config, ch, spec.sca, seed)
                                                   : sca::run_exact_variant(config, ch, spec.sca, seed);
        beams = r.beams;
        rec.trace = r.trace;
        rec.iterations = r.iterations;
        rec.converged = r.converged;
        seconds = r.seconds_per_iter;
        break;
      }
      case Algorithm::Wmmse: {
        const auto r = baselines::wmmse(config, ch, spec.wmmse, seed);
        beams = r.beams;
        rec.trace = r.trace;
        rec.iterations = r.iterations;
        rec.converged = r.converged;
        seconds = r.seconds_per_iter;
        break;
      }
      case Algorithm::Zf: {
        beams = baselines::zero_forcing(config, ch);
        rec.trace = {weighted_sum_rate(config, ch, beams)};
        rec.converged = true;
        break;
      }
    }
    const double budget = *std::max_element(config.power_budget.begin(), config.power_budget.end());
    if (!is_power_feasible(config, beams, 1e-8 * std::max(1.0, budget)))
      throw SolverError("returned beams exceed the power budget");
    rec.wsr = rec.trace.empty() ? 0.0 : rec.trace.back();
    rec.seconds_per_iter = quantile(seconds, 0.5);
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
    rec.trace.clear();
    rec.wsr = 0.0;
  }
  return rec;
}

ExperimentResult aggregate(const ExperimentSpec& spec, std::vector<TrialRecord> records) {
  ExperimentResult out;
  out.spec = spec;
  out.records = std::move(records);
  for (auto alg : spec.algorithms) {
    AlgorithmSummary s;
    s.algorithm = alg;
    std::vector<double> iters, secs;
    for (std::size_t p = 0; p < spec.power_db.size(); ++p) {
      PointSummary pt;
      pt.power_db = spec.power_db[p];
      double sum = 0.0;
      std::vector<double> vals;
      for (const auto& r : out.records) {
        if (r.algorithm != alg || r.power_index != static_cast<int>(p)) continue;
        if (!r.ok) {
          ++pt.failures;
          continue;
        }
        vals.push_back(r.wsr);
        sum += r.wsr;
        iters.push_back(r.iterations);
        secs.push_back(r.seconds_per_iter);
      }
      pt.successes = static_cast<int>(vals.size());
      if (!vals.empty()) pt.mean_wsr = sum / static_cast<double>(vals.size());
      if (vals.size() >= 2) {
        double ss = 0.0;
        for (double v : vals) ss += (v - pt.mean_wsr) * (v - pt.mean_wsr);
        const double sd = std::sqrt(ss / static_cast<double>(vals.size() - 1));
        pt.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(vals.size()));
      }
      out.total_failures += pt.failures;
      s.points.push_back(pt);
    }
    if (is_iterative(alg)) {
      s.iterations_median = quantile(iters, 0.5);
      s.iterations_q1 = quantile(iters, 0.25);
      s.iterations_q3 = quantile(iters, 0.75);
    }
    s.median_seconds_per_iter = quantile(secs, 0.5);
    out.summaries.push_back(std::move(s));
  }
  return out;
}

namespace {

int worker_count(const RunOptions& options) {
  if (options.threads > 0) return options.threads;
  if (const char* env = std::getenv("WSRM_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(n);
  }
  return omp_get_max_threads();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  spec.validate();
  const int P = static_cast<int>(spec.power_db.size());
  const int T = spec.num_trials;
  const int A = static_cast<int>(spec.algorithms.size());
  std::vector<TrialRecord> records(static_cast<std::size_t>(P) * static_cast<std::size_t>(T) * static_cast<std::size_t>(A));
  const int items = P * T;
  // Each item writes only its own slots, so the layout is schedule independent.
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count(options))
  for (int item = 0; item < items; ++item) {
    const int p = item / T, t = item % T;
    for (int a = 0; a < A; ++a)
      records[static_cast<std::size_t>(item) * static_cast<std::size_t>(A) + static_cast<std::size_t>(a)] =
          run_trial(spec, spec.algorithms[static_cast<std::size_t>(a)], p, t);
  }
  return aggregate(spec, std::move(records));
}

ExperimentResult run_experiment_serial(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<TrialRecord> records;
  for (int p = 0; p < static_cast<int>(spec.power_db.size()); ++p)
    for (int t = 0; t < spec.num_trials; ++t)
      for (auto alg : spec.algorithms) records.push_back(run_trial(spec, alg, p, t));
  return aggregate(spec, std::move(records));
}

std::vector<IterationRow> iteration_comparison(const ExperimentResult& result) {
  std::vector<IterationRow> rows;
  for (const auto& s : result.summaries) {
    if (!is_iterative(s.algorithm)) continue;
    IterationRow row;
    row.algorithm = s.algorithm;
    for (const auto& r : result.records) row.runs += r.algorithm == s.algorithm && r.ok;
    row.median = s.iterations_median;
    row.q1 = s.iterations_q1;
    row.q3 = s.iterations_q3;
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string results_csv(const ExperimentResult& result, bool timing) {
  std::ostringstream os;
  os << "scenario,algorithm,power_db,trial,wsr,iterations,seconds_per_iter\n";
  const std::string scenario = to_string(result.spec.scenario);
  for (const auto& r : result.records) {
    os << scenario << ',' << to_string(r.algorithm) << ',' << fmt(r.power_db) << ',' << r.trial << ',';
    // Failed trials keep their row with empty measurements.
    if (r.ok) os << fmt(r.wsr) << ',' << r.iterations << ',' << fmt(timing ? r.seconds_per_iter : 0.0);
    else os << ",,";
    os << '\n';
  }
  return os.str();
}

std::string traces_json(const ExperimentResult& result) {
  json traces = json::array();
  for (const auto& r : result.records) {
    json e = {{"algorithm", to_string(r.algorithm)},
              {"power_db", r.power_db},
              {"trial", r.trial},
              {"ok", r.ok},
              {"converged", r.converged},
              {"iterations", r.iterations},
              {"trace", r.trace}};
    if (!r.ok) e["error"] = r.error;
    traces.push_back(std::move(e));
  }
  return json{{"scenario", to_string(result.spec.scenario)}, {"traces", std::move(traces)}}.dump(1) + "\n";
}

std::string summary_json(const ExperimentResult& result, bool timing) {
  json algs = json::array();
  for (const auto& s : result.summaries) {
    json points = json::array();
    for (const auto& p : s.points)
      points.push_back({{"power_db", p.power_db},
                        {"mean_wsr", p.mean_wsr},
                        {"ci95", p.ci95},
                        {"successes", p.successes},
                        {"failures", p.failures}});
    json a = {{"algorithm", to_string(s.algorithm)}, {"points", std::move(points)}};
    a["iterations"] = is_iterative(s.algorithm)
                          ? json{{"median", s.iterations_median}, {"q1", s.iterations_q1}, {"q3", s.iterations_q3}}
                          : json(nullptr);
    a["median_seconds_per_iter"] = timing ? json(s.median_seconds_per_iter) : json(nullptr);
    algs.push_back(std::move(a));
  }
  json table = json::array();
  for (const auto& row : iteration_comparison(result))
    table.push_back({{"algorithm", to_string(row.algorithm)},
                     {"runs", row.runs},
                     {"median", row.median},
                     {"q1", row.q1},
                     {"q3", row.q3}});
  json out = {{"version", version_string()},
              {"spec", spec_to_json(result.spec)},
              {"total_failures", result.total_failures},
              {"algorithms", std::move(algs)},
              {"iteration_comparison", std::move(table)}};
  return out.dump(2) + "\n";
}

void write_outputs(const ExperimentResult& result, const std::string& dir, bool timing) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  io::write_file_atomic((d / "results.csv").string(), results_csv(result, timing));
  io::write_file_atomic((d / "traces.json").string(), traces_json(result));
  io::write_file_atomic((d / "summary.json").string(), summary_json(result, timing));
}

std::string version_string() { return "wsrm " WSRM_VERSION; }

}  // namespace wsrm::experiment
