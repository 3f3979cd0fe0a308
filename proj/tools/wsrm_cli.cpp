#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wsrm/baselines.hpp"
#include "wsrm/experiment.hpp"
#include "wsrm/io.hpp"
#include "wsrm/sca.hpp"
#include "wsrm/verify.hpp"

#ifndef WSRM_PRESET_DIR
#define WSRM_PRESET_DIR "presets"
#endif

namespace fs = std::filesystem;
using namespace wsrm;
using experiment::Algorithm;
using experiment::ExperimentSpec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitIterationCap = 2;

// Built-in names resolve to the checked-in spec files when present.
ExperimentSpec load_preset(const std::string& name) {
  std::string file = name;
  if (name == "single-cell" || name == "paper-fig1") file = "paper-fig1";
  if (name == "two-cell" || name == "paper-fig2") file = "paper-fig2";
  if (file == "paper-fig1" || file == "paper-fig2") {
    for (const fs::path dir : {fs::path("presets"), fs::path(WSRM_PRESET_DIR)}) {
      const auto path = dir / (file + ".json");
      if (fs::exists(path)) return experiment::spec_from_json(io::json::parse(io::read_file(path.string())));
    }
    return file == "paper-fig1" ? ExperimentSpec::single_cell_sweep() : ExperimentSpec::two_cell_convergence();
  }
  throw InvalidArgument("unknown preset '" + name + "' (expected single-cell, two-cell, paper-fig1 or paper-fig2)");
}

ExperimentSpec load_spec_file(const std::string& path) {
  if (!fs::exists(path)) throw InvalidArgument("spec file not found: " + path);
  io::json j;
  try {
    j = io::json::parse(io::read_file(path));
  } catch (const io::json::parse_error& e) {
    throw InvalidArgument(path + ": malformed JSON: " + e.what());
  }
  try {
    return experiment::spec_from_json(j);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

std::vector<Algorithm> parse_algorithms(const std::string& list) {
  std::vector<Algorithm> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(experiment::algorithm_from_string(item));
  if (out.empty()) throw InvalidArgument("--algorithms: empty list");
  return out;
}

struct Common {
  std::string preset;
  std::string spec_file;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double tol = 0.0;
  int max_iters = 0;
  std::string algorithms;
};

ExperimentSpec resolve_spec(const Common& c, const std::string& default_preset) {
  if (!c.preset.empty() && !c.spec_file.empty()) throw InvalidArgument("use either --preset or --spec, not both");
  ExperimentSpec spec = !c.spec_file.empty() ? load_spec_file(c.spec_file)
                                             : load_preset(c.preset.empty() ? default_preset : c.preset);
  if (c.seed_set) spec.master_seed = c.seed;
  if (c.tol > 0.0) spec.sca.stop_tol = spec.wmmse.stop_tol = c.tol;
  if (c.max_iters > 0) {
    spec.sca.max_outer_iters = c.max_iters;
    spec.wmmse.max_iters = c.max_iters;
  }
  if (!c.algorithms.empty()) spec.algorithms = parse_algorithms(c.algorithms);
  spec.validate();
  return spec;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--preset", c.preset, "single-cell, two-cell, paper-fig1 or paper-fig2");
  cmd->add_option("--spec", c.spec_file, "experiment spec file (JSON)");
  cmd->add_option("--seed", c.seed, "master seed (overrides the spec)")->each([&](const std::string&) { c.seed_set = true; });
  cmd->add_option("--tol", c.tol, "stopping tolerance on the weighted sum rate change")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", c.max_iters, "iteration cap for the iterative algorithms")->check(CLI::PositiveNumber);
  cmd->add_option("--algorithms", c.algorithms, "comma-separated subset of SCA,SCA_EXACT,WMMSE,ZF");
}

int cmd_solve(const Common& c, double power_db, bool power_set, const std::string& channels_file,
              const std::string& out_dir, bool verbose) {
  ExperimentSpec spec = resolve_spec(c, "single-cell");
  if (c.algorithms.empty()) spec.algorithms = {Algorithm::Sca};
  NetworkConfig config = spec.config;
  const double pdb = power_set ? power_db : spec.power_db.front();
  std::fill(config.power_budget.begin(), config.power_budget.end(), db_to_power(pdb, config.noise_var));

  ChannelSet ch;
  if (!channels_file.empty()) {
    if (!fs::exists(channels_file)) throw InvalidArgument("channels file not found: " + channels_file);
    try {
      ch = io::channels_from_json(io::json::parse(io::read_file(channels_file)));
      ch.validate(config);
    } catch (const io::json::parse_error& e) {
      throw InvalidArgument(channels_file + ": malformed JSON: " + e.what());
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(channels_file + ": " + e.what());
    }
  } else {
    ch = generate_rayleigh_channels(config, experiment::channel_seed(spec, 0));
  }
  const auto init = experiment::init_seed(spec, 0);

  io::json results = io::json::array();
  bool capped = false;
  for (auto alg : spec.algorithms) {
    const std::string name = experiment::to_string(alg);
    io::json r;
    switch (alg) {
      case Algorithm::Sca:
      case Algorithm::ScaExact: {
        const auto res = alg == Algorithm::Sca ? sca::run(config, ch, spec.sca, init)
                                               : sca::run_exact_variant(config, ch, spec.sca, init);
        r = io::result_to_json(name, res);
        capped |= !res.converged;
        if (verbose)
          for (std::size_t i = 0; i < res.trace.size(); ++i) std::printf("  %s iter %zu wsr %.6f\n", name.c_str(), i + 1, res.trace[i]);
        break;
      }
      case Algorithm::Wmmse: {
        const auto res = baselines::wmmse(config, ch, spec.wmmse, init);
        r = io::result_to_json(name, res);
        capped |= !res.converged;
        if (verbose)
          for (std::size_t i = 0; i < res.trace.size(); ++i) std::printf("  %s iter %zu wsr %.6f\n", name.c_str(), i + 1, res.trace[i]);
        break;
      }
      case Algorithm::Zf: {
        const auto beams = baselines::zero_forcing(config, ch);
        r = io::result_to_json(name, beams, weighted_sum_rate(config, ch, beams));
        break;
      }
    }
    std::printf("%-10s wsr %.6f  iterations %d  converged %s", name.c_str(), r["wsr"].get<double>(),
                r["iterations"].get<int>(), r["converged"].get<bool>() ? "yes" : "no");
    if (!r["kkt_residual"].is_null()) std::printf("  kkt %.2e", r["kkt_residual"].get<double>());
    std::printf("\n");
    results.push_back(std::move(r));
  }

  const io::json doc = {{"network", io::network_to_json(config)},
                        {"power_db", pdb},
                        {"channels", io::channels_to_json(ch)},
                        {"results", results}};
  fs::create_directories(out_dir);
  const auto path = (fs::path(out_dir) / "result.json").string();
  io::write_file_atomic(path, doc.dump(2) + "\n");
  std::printf("wrote %s\n", path.c_str());
  return capped ? kExitIterationCap : kExitOk;
}

int cmd_experiment(const Common& c, int trials, const std::string& out_dir, bool timing) {
  ExperimentSpec spec = resolve_spec(c, "paper-fig1");
  if (trials > 0) spec.num_trials = trials;
  const auto start = std::chrono::steady_clock::now();
  const auto result = experiment::run_experiment(spec);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  experiment::write_outputs(result, out_dir, timing);

  std::printf("%s: %d trials x %zu power points, %.1f s\n", experiment::to_string(spec.scenario).c_str(),
              spec.num_trials, spec.power_db.size(), secs);
  for (const auto& s : result.summaries) {
    std::printf("%-10s", experiment::to_string(s.algorithm).c_str());
    for (const auto& p : s.points) std::printf("  %g dB: %.4f +- %.4f", p.power_db, p.mean_wsr, p.ci95);
    std::printf("\n");
  }
  for (const auto& row : experiment::iteration_comparison(result))
    std::printf("iterations %-10s median %.1f  quartiles [%.1f, %.1f]  runs %d\n",
                experiment::to_string(row.algorithm).c_str(), row.median, row.q1, row.q3, row.runs);
  if (result.total_failures > 0) {
    std::printf("failed trials: %d\n", result.total_failures);
    for (const auto& r : result.records)
      if (!r.ok)
        std::fprintf(stderr, "  %s %g dB trial %d: %s\n", experiment::to_string(r.algorithm).c_str(), r.power_db, r.trial,
                     r.error.c_str());
  }
  std::printf("wrote %s/{results.csv,traces.json,summary.json}\n", out_dir.c_str());
  return result.total_failures == static_cast<int>(result.records.size()) ? kExitError : kExitOk;
}

int cmd_verify(const std::string& filter, std::uint64_t seed, bool inject_bug) {
  verify::Options opt;
  opt.seed = seed;
  // Mutation fixture: doubles phi, so the surrogate stops touching sqrt(x) beta.
  if (inject_bug) opt.phi_rule = [](double x, double beta) { return 2.0 * std::sqrt(x) / beta; };
  const auto results = verify::run_suites(filter, opt);
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%-14s %s  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitError;
}

int cmd_bench(std::uint64_t seed, int trials) {
  // Per-iteration solve time of the iterative algorithms on the two preset setups.
  for (auto spec : {ExperimentSpec::single_cell_sweep(trials), ExperimentSpec::two_cell_convergence(trials)}) {
    spec.master_seed = seed;
    if (spec.scenario == experiment::Scenario::SingleCellSweep) spec.power_db = {10};
    spec.algorithms = {Algorithm::Sca, Algorithm::ScaExact, Algorithm::Wmmse};
    const auto result = experiment::run_experiment_serial(spec);
    for (const auto& s : result.summaries)
      std::printf("%-18s %-10s median %.3e s/iter  median iterations %.1f\n",
                  experiment::to_string(spec.scenario).c_str(), experiment::to_string(s.algorithm).c_str(),
                  s.median_seconds_per_iter, s.iterations_median);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted sum-rate maximization for multicell MISO downlink beamforming"};
  app.require_subcommand(1);

  Common solve_opts, exp_opts;
  double power_db = 0.0;
  std::string channels_file, solve_out = ".", exp_out;
  bool verbose = false, timing = false, inject_bug = false;
  int trials = 0, bench_trials = 10;
  std::string filter;
  std::uint64_t verify_seed = 1, bench_seed = 1;

  auto* solve = app.add_subcommand("solve", "solve one instance and write result.json");
  add_common(solve, solve_opts);
  auto* power_opt = solve->add_option("--power-db", power_db, "per-BS power budget in dB (default: first grid point)");
  solve->add_option("--channels", channels_file, "channel file (JSON); default draws from --seed");
  solve->add_option("--out", solve_out, "output directory");
  solve->add_flag("-v,--verbose", verbose, "print every iteration");

  auto* exp = app.add_subcommand("experiment", "run a Monte Carlo experiment");
  add_common(exp, exp_opts);
  exp->add_option("--trials", trials, "override the number of trials")->check(CLI::PositiveNumber);
  exp->add_option("--out", exp_out, "output directory")->required();
  exp->add_flag("--timing", timing, "fill the wall-clock columns (outputs are then not reproducible)");

  auto* ver = app.add_subcommand("verify", "run the invariant suites");
  ver->add_option("--filter", filter, "run only this suite");
  ver->add_option("--seed", verify_seed, "seed of the random samples");
  ver->add_flag("--inject-phi-bug", inject_bug, "test fixture: run with a wrong phi update");

  auto* bench = app.add_subcommand("bench", "per-iteration timing of the iterative algorithms");
  bench->add_option("--seed", bench_seed, "master seed");
  bench->add_option("--trials", bench_trials, "instances per setup")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*solve) return cmd_solve(solve_opts, power_db, power_opt->count() > 0, channels_file, solve_out, verbose);
    if (*exp) return cmd_experiment(exp_opts, trials, exp_out, timing);
    if (*ver) return cmd_verify(filter, verify_seed, inject_bug);
    if (*bench) return cmd_bench(bench_seed, bench_trials);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
