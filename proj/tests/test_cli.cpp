#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "wsrm/io.hpp"

namespace fs = std::filesystem;

namespace {

// Exit status of the CLI with the given arguments; stdout and stderr discarded.
int run(const std::string& args) {
  const std::string cmd = std::string("\"") + WSRM_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("wsrm_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("help and parse errors") {
  CHECK(run("--help") == 0);
  CHECK(run("solve --help") == 0);
  CHECK(run("solve --no-such-flag") == 1);
  CHECK(run("solve --tol -1") == 1);
  CHECK(run("solve --spec /nonexistent/spec.json") == 1);
  CHECK(run("solve --preset nowhere") == 1);
  CHECK(run("solve --algorithms SCA,BOGUS") == 1);
}

TEST_CASE("solve writes a result and reports the iteration cap") {
  const auto dir = scratch("solve");
  CHECK(run("solve --preset single-cell --seed 7 --algorithms SCA,WMMSE,ZF --out " + dir.string()) == 0);
  const auto j = wsrm::io::json::parse(wsrm::io::read_file((dir / "result.json").string()));
  CHECK(j["results"].size() == 3);
  CHECK(j["results"][0]["algorithm"] == "SCA");
  CHECK(j["results"][0]["converged"] == true);

  CHECK(run("solve --preset single-cell --seed 7 --algorithms SCA --max-iters 1 --out " + dir.string()) == 2);

  // Reading the drawn channels back reproduces the same answer.
  const auto ch = dir / "channels.json";
  wsrm::io::write_file_atomic(ch.string(), j["channels"].dump());
  const auto dir2 = scratch("solve2");
  CHECK(run("solve --preset single-cell --algorithms SCA --channels " + ch.string() + " --out " + dir2.string()) == 0);
  const auto j2 = wsrm::io::json::parse(wsrm::io::read_file((dir2 / "result.json").string()));
  CHECK(j2["results"][0]["wsr"] == j["results"][0]["wsr"]);
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("verify passes and catches the injected phi bug") {
  CHECK(run("verify --filter amgm") == 0);
  CHECK(run("verify --filter cones") == 0);
  CHECK(run("verify --filter nosuch") == 1);
  CHECK(run("verify --filter monotonicity") == 0);
  CHECK(run("verify --filter monotonicity --inject-phi-bug") != 0);
}

TEST_CASE("repeated experiments are byte-identical") {
  const auto a = scratch("exp_a");
  const auto b = scratch("exp_b");
  const std::string common = "experiment --preset paper-fig2 --trials 2 --out ";
  CHECK(run(common + a.string()) == 0);
  CHECK(run(common + b.string()) == 0);
  for (const char* f : {"results.csv", "traces.json", "summary.json"})
    CHECK(wsrm::io::read_file((a / f).string()) == wsrm::io::read_file((b / f).string()));
  CHECK(run("experiment --preset single-cell") == 1);  // --out is required
  fs::remove_all(a);
  fs::remove_all(b);
}
