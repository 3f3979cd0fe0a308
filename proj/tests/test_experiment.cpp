#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "wsrm/experiment.hpp"
#include "wsrm/io.hpp"

using namespace wsrm;
using namespace wsrm::experiment;

namespace {

ExperimentSpec small_spec() {
  auto s = ExperimentSpec::single_cell_sweep(3);
  s.power_db = {0, 10};
  s.master_seed = 11;
  return s;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("names round trip") {
  for (auto a : {Algorithm::Sca, Algorithm::ScaExact, Algorithm::Wmmse, Algorithm::Zf})
    CHECK(algorithm_from_string(to_string(a)) == a);
  for (auto s : {Scenario::SingleCellSweep, Scenario::TwoCellConvergence, Scenario::Custom})
    CHECK(scenario_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(algorithm_from_string("SIN"), InvalidArgument);
  CHECK(is_iterative(Algorithm::Wmmse));
  CHECK_FALSE(is_iterative(Algorithm::Zf));
}

TEST_CASE("reference setups") {
  const auto a = ExperimentSpec::single_cell_sweep();
  CHECK(a.config.num_antennas == 4);
  CHECK(a.config.num_users == 4);
  CHECK(a.power_db == std::vector<double>{0, 5, 10, 15, 20, 25, 30});
  CHECK(a.num_trials == 200);
  const auto b = ExperimentSpec::two_cell_convergence();
  CHECK(b.config.num_bs == 2);
  CHECK(b.config.num_antennas == 8);
  CHECK(b.config.users_of(1) == std::vector<int>{2, 3});
  CHECK(b.config.weights == std::vector<double>{0.14, 0.21, 0.28, 0.36});
  CHECK(b.power_db == std::vector<double>{12});
}

TEST_CASE("checked-in presets match the built-in setups") {
  for (const auto& [file, builtin] :
       {std::pair{"paper-fig1.json", ExperimentSpec::single_cell_sweep()},
        std::pair{"paper-fig2.json", ExperimentSpec::two_cell_convergence()}}) {
    const auto path = std::filesystem::path(WSRM_SOURCE_DIR) / "presets" / file;
    const auto spec = spec_from_json(io::json::parse(io::read_file(path.string())));
    CHECK(spec_to_json(spec) == spec_to_json(builtin));
  }
}

TEST_CASE("spec parsing names the offending field") {
  const io::json good = spec_to_json(small_spec());
  CHECK(spec_to_json(spec_from_json(good)) == good);

  auto expect = [](io::json j, const std::string& field) {
    try {
      spec_from_json(j);
      FAIL("accepted a bad spec, expected error on " << field);
    } catch (const InvalidArgument& e) {
      CHECK_MESSAGE(std::string(e.what()).find(field) != std::string::npos, e.what());
    }
  };
  auto j = good;
  j.erase("num_trials");
  expect(j, "spec.num_trials");
  j = good;
  j["network"]["num_users"] = "four";
  expect(j, "spec.network.num_users");
  j = good;
  j["power_db"][1] = "high";
  expect(j, "spec.power_db[1]");
  j = good;
  j["algorithms"] = {"SCA", "BB"};
  expect(j, "spec.algorithms[1]");
  j = good;
  j["wmmse"]["init"] = "zero";
  expect(j, "spec.wmmse.init");
  j = good;
  j["colour"] = 1;
  expect(j, "spec.colour");
  j = good;
  j["num_trials"] = 0;
  expect(j, "num_trials");
  j = good;
  j["network"]["weights"] = {1, 1};
  expect(j, "spec.network.weights");
}

TEST_CASE("all algorithms of a trial see the same channels") {
  auto s = small_spec();
  s.num_trials = 1;
  s.power_db = {10};
  s.algorithms = {Algorithm::Sca, Algorithm::Zf};
  const auto r = run_experiment(s);
  REQUIRE(r.records.size() == 2);
  // Recompute both from the documented channel seed.
  NetworkConfig c = s.config;
  c.power_budget = {db_to_power(10, 1)};
  const auto ch = generate_rayleigh_channels(c, channel_seed(s, 0));
  CHECK(r.records[1].wsr == weighted_sum_rate(c, ch, baselines::zero_forcing(c, ch)));
  CHECK(r.records[0].wsr == sca::run(c, ch, s.sca, init_seed(s, 0)).trace.back());
  CHECK(channel_seed(s, 0) != channel_seed(s, 1));
  CHECK(channel_seed(s, 0) != init_seed(s, 0));
}

TEST_CASE("parallel run equals the serial reference") {
  const auto s = small_spec();
  const auto a = run_experiment(s, RunOptions{3});
  const auto b = run_experiment_serial(s);
  CHECK(results_csv(a, false) == results_csv(b, false));
  CHECK(traces_json(a) == traces_json(b));
  CHECK(summary_json(a, false) == summary_json(b, false));
  const auto c = run_experiment(s, RunOptions{1});
  CHECK(results_csv(a, false) == results_csv(c, false));
}

TEST_CASE("outputs have the documented shape") {
  const auto s = small_spec();
  const auto r = run_experiment(s);
  const auto csv = results_csv(r, false);
  CHECK(csv.rfind("scenario,algorithm,power_db,trial,wsr,iterations,seconds_per_iter\n", 0) == 0);
  CHECK(count_lines(csv) == 1 + 2 * 3 * 3);
  CHECK(csv.find(",0\n") != std::string::npos);  // timing column zero without --timing

  const auto traces = io::json::parse(traces_json(r));
  CHECK(traces["traces"].size() == 18);
  CHECK(traces["traces"][0]["trace"].size() == static_cast<std::size_t>(r.records[0].iterations));

  const auto summary = io::json::parse(summary_json(r, false));
  CHECK(summary["version"].get<std::string>().rfind("wsrm ", 0) == 0);
  CHECK(summary["spec"] == spec_to_json(s));
  CHECK(summary["algorithms"].size() == 3);
  CHECK(summary["algorithms"][2]["iterations"].is_null());  // ZF

  for (const auto& sum : r.summaries)
    for (const auto& p : sum.points) {
      CHECK(p.successes == 3);
      CHECK(p.failures == 0);
    }
  double manual = 0.0;
  for (const auto& rec : r.records)
    if (rec.algorithm == Algorithm::Sca && rec.power_index == 1) manual += rec.wsr;
  CHECK(r.summaries[0].points[1].mean_wsr == doctest::Approx(manual / 3.0).epsilon(1e-15));
}

TEST_CASE("failed trials are counted, not dropped") {
  auto s = small_spec();
  s.config = NetworkConfig::single_cell(2, 3, 1.0);  // ZF needs K <= N
  s.power_db = {5};
  s.algorithms = {Algorithm::Sca, Algorithm::Zf};
  const auto r = run_experiment(s);
  CHECK(r.total_failures == 3);
  CHECK(r.summaries[0].points[0].successes == 3);
  CHECK(r.summaries[1].points[0].failures == 3);
  for (const auto& rec : r.records)
    if (rec.algorithm == Algorithm::Zf) {
      CHECK_FALSE(rec.ok);
      CHECK(rec.error.find("K <= N") != std::string::npos);
    }
  CHECK(count_lines(results_csv(r, false)) == 1 + 6);
}

TEST_CASE("iteration comparison") {
  auto s = small_spec();
  s.power_db = {10};
  s.num_trials = 4;
  const auto r = run_experiment(s);
  const auto rows = iteration_comparison(r);
  REQUIRE(rows.size() == 2);  // ZF is not iterative
  CHECK(rows[0].algorithm == Algorithm::Sca);
  CHECK(rows[0].runs == 4);
  CHECK(rows[0].q1 <= rows[0].median);
  CHECK(rows[0].median <= rows[0].q3);

  s.algorithms = {Algorithm::Sca};
  CHECK(iteration_comparison(run_experiment(s)).size() == 1);
}

TEST_CASE("quantiles") {
  CHECK(quantile({}, 0.5) == 0.0);
  CHECK(quantile({3, 1, 2}, 0.5) == 2.0);
  CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(quantile({1, 2, 3, 4, 5}, 0.25) == 2.0);
}

TEST_CASE("written files are identical across runs") {
  namespace fs = std::filesystem;
  const auto base = fs::temp_directory_path() / "wsrm_test_experiment";
  fs::remove_all(base);
  auto s = ExperimentSpec::two_cell_convergence(2);
  write_outputs(run_experiment(s), (base / "a").string(), false);
  write_outputs(run_experiment(s), (base / "b").string(), false);
  for (const char* f : {"results.csv", "traces.json", "summary.json"}) {
    CHECK(io::read_file((base / "a" / f).string()) == io::read_file((base / "b" / f).string()));
  }
  for (const auto& e : fs::directory_iterator(base / "a")) CHECK(e.path().string().find(".tmp") == std::string::npos);
  fs::remove_all(base);
}
