#include <doctest.h>

#include <cmath>

#include "wsrm/baselines.hpp"
#include "wsrm/network.hpp"
#include "wsrm/sca.hpp"

using namespace wsrm;
using namespace wsrm::baselines;

namespace {

bool nondecreasing(const std::vector<double>& trace, double tol) {
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i] < trace[i - 1] - tol) return false;
  return true;
}

}  // namespace

TEST_CASE("water filling") {
  SUBCASE("equal channels share equally") {
    const auto p = water_filling({1, 1, 1}, {1, 1, 1}, 3.0);
    for (double v : p) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("weak channel is switched off") {
    // Level mu: 1/g = (0.1, 10); budget 1 lands below the second floor.
    const auto p = water_filling({10.0, 0.1}, {1, 1}, 1.0);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == 0.0);
  }
  SUBCASE("weights tilt the levels") {
    // p_k = a_k mu - 1: with a = (1, 2), budget 4 gives mu = 2, p = (1, 3).
    const auto p = water_filling({1, 1}, {1, 2}, 4.0);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == doctest::Approx(3.0));
  }
  SUBCASE("zero budget") {
    for (double v : water_filling({1, 2}, {1, 1}, 0.0)) CHECK(v == 0.0);
  }
  CHECK_THROWS_AS(water_filling({1, 0}, {1, 1}, 1.0), InvalidArgument);
}

TEST_CASE("zero forcing on orthonormal channels") {
  const int K = 3;
  auto c = NetworkConfig::single_cell(K, K, static_cast<double>(K));
  ChannelSet ch(1, K, K);
  for (int k = 0; k < K; ++k) {
    ch.at(0, k) = Eigen::RowVectorXcd::Zero(K);
    ch.at(0, k)(k) = 1.0;
  }
  const auto w = zero_forcing(c, ch);
  for (int k = 0; k < K; ++k) {
    CHECK(w.w[static_cast<std::size_t>(k)].norm() == doctest::Approx(1.0));
    CHECK(std::abs(w.w[static_cast<std::size_t>(k)](k)) == doctest::Approx(1.0));
  }
  CHECK(weighted_sum_rate(c, ch, w) == doctest::Approx(static_cast<double>(K)));
}

TEST_CASE("zero forcing nulls interference on random channels") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto c = NetworkConfig::single_cell(4, 1 + static_cast<int>(seed % 4), db_to_power(30.0, 1.0));
    const auto ch = generate_rayleigh_channels(c, seed);
    const auto w = zero_forcing(c, ch);
    CHECK(is_power_feasible(c, w, 1e-8));
    for (int j = 0; j < c.num_users; ++j)
      for (int k = 0; k < c.num_users; ++k)
        if (j != k) CHECK(std::abs((ch.at(0, j) * w.w[static_cast<std::size_t>(k)]).value()) <= 1e-8);
  }
}

TEST_CASE("zero forcing rate vanishes with the budget") {
  auto c = NetworkConfig::single_cell(4, 4, 1e-9);
  const auto ch = generate_rayleigh_channels(c, 3);
  CHECK(weighted_sum_rate(c, ch, zero_forcing(c, ch)) < 1e-6);
  c.power_budget[0] = 0.0;
  CHECK(weighted_sum_rate(c, ch, zero_forcing(c, ch)) == 0.0);
}

TEST_CASE("zero forcing rejects unsupported inputs") {
  auto wide = NetworkConfig::single_cell(2, 3, 1.0);
  CHECK_THROWS_AS(zero_forcing(wide, generate_rayleigh_channels(wide, 0)), InvalidArgument);
  auto two = NetworkConfig::multi_cell(2, 4, 2, 1.0);
  CHECK_THROWS_AS(zero_forcing(two, generate_rayleigh_channels(two, 0)), InvalidArgument);
  auto c = NetworkConfig::single_cell(3, 2, 1.0);
  auto ch = generate_rayleigh_channels(c, 0);
  ch.at(0, 1) = 2.0 * ch.at(0, 0);
  CHECK_THROWS_AS(zero_forcing(c, ch), InvalidArgument);
}

TEST_CASE("WMMSE with one user reaches the MRT rate") {
  auto c = NetworkConfig::single_cell(2, 1, 1.0);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto ch = generate_rayleigh_channels(c, seed);
    for (auto init : {WmmseInit::Mrt, WmmseInit::Random}) {
      WmmseConfig wc;
      wc.init = init;
      const auto r = wmmse(c, ch, wc, seed);
      CHECK(r.converged);
      CHECK(r.trace.back() == doctest::Approx(std::log2(1.0 + ch.at(0, 0).squaredNorm())).epsilon(1e-3));
    }
  }
}

TEST_CASE("WMMSE trace is monotone and beams are feasible") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto c = seed % 2 == 0 ? NetworkConfig::single_cell(4, 4, db_to_power(3.0 * static_cast<double>(seed), 1.0))
                           : NetworkConfig::multi_cell(2, 8, 4, db_to_power(12.0, 1.0));
    if (seed % 2 == 1) c.weights = {0.14, 0.21, 0.28, 0.36};
    const auto ch = generate_rayleigh_channels(c, seed);
    WmmseConfig wc;
    wc.init = seed % 4 < 2 ? WmmseInit::Mrt : WmmseInit::Random;
    wc.stop_tol = 1e-6;
    const auto r = wmmse(c, ch, wc, seed);
    CHECK(nondecreasing(r.trace, 1e-6));
    CHECK(is_power_feasible(c, r.beams, 1e-8));
    for (double v : r.final_state.v) CHECK(v > 0.0);
    CHECK(r.trace.size() == static_cast<std::size_t>(r.iterations));
  }
}

TEST_CASE("WMMSE fixed point from zero forcing matches SCA") {
  // Started at the ZF point, WMMSE climbs to the stationary point SCA finds.
  auto c = NetworkConfig::single_cell(4, 4, db_to_power(25.0, 1.0));
  const auto ch = generate_rayleigh_channels(c, 5);
  auto beams = zero_forcing(c, ch);
  for (int i = 0; i < 200; ++i) beams = wmmse_step(c, ch, beams).beams;
  const auto s = sca::run(c, ch, sca::ScaConfig{}, 5);
  CHECK(std::abs(weighted_sum_rate(c, ch, beams) - s.trace.back()) < 5e-2);
}

TEST_CASE("WMMSE iteration cap and deterministic random start") {
  auto c = NetworkConfig::single_cell(4, 4, db_to_power(20.0, 1.0));
  const auto ch = generate_rayleigh_channels(c, 2);
  WmmseConfig wc;
  wc.max_iters = 1;
  const auto r = wmmse(c, ch, wc);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);

  const auto a = random_beamformers(c, 9), b = random_beamformers(c, 9);
  CHECK(per_bs_power(c, a, 0) == doctest::Approx(c.power_budget[0]));
  for (int k = 0; k < 4; ++k) CHECK((a.w[static_cast<std::size_t>(k)].array() == b.w[static_cast<std::size_t>(k)].array()).all());

  wc.stop_tol = 0.0;
  CHECK_THROWS_AS(wmmse(c, ch, wc), InvalidArgument);
}
