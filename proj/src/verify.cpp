#include "wsrm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wsrm/baselines.hpp"
#include "wsrm/conic.hpp"
#include "wsrm/cone_library.hpp"
#include "wsrm/rng.hpp"
#include "wsrm/sca.hpp"

namespace wsrm::verify {

namespace {

std::string sci(double v) {
  std::ostringstream os;
  os.precision(2);
  os << std::scientific << v;
  return os.str();
}

bool nondecreasing(const std::vector<double>& trace, double tol) {
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i] < trace[i - 1] - tol) return false;
  return true;
}

NetworkConfig mixed_instance(int i) {
  if (i % 2 == 0) return NetworkConfig::single_cell(4, 4, db_to_power(5.0 * ((i / 2) % 7), 1.0));
  auto c = NetworkConfig::multi_cell(2, 8, 4, db_to_power(12.0, 1.0));
  c.weights = {0.14, 0.21, 0.28, 0.36};
  return c;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"network", "cones",        "solver",  "amgm",
                                                 "linearization", "monotonicity", "oracles", "baselines"};
  return names;
}

std::vector<SuiteResult> run_suites(const std::string& filter, const Options& options) {
  const auto& names = suite_names();
  if (!filter.empty() && std::find(names.begin(), names.end(), filter) == names.end())
    throw InvalidArgument("unknown suite '" + filter + "'");
  std::vector<SuiteResult> out;
  auto want = [&](const char* n) { return filter.empty() || filter == n; };
  if (want("network")) out.push_back(network_suite(options.seed));
  if (want("cones")) out.push_back(cone_membership_suite(2000, options.seed));
  if (want("solver")) out.push_back(solver_library_suite());
  if (want("amgm")) out.push_back(amgm_suite(20000, options.seed));
  if (want("linearization")) out.push_back(linearization_suite(20000, options.seed));
  if (want("monotonicity")) out.push_back(monotonicity_suite(10, options.seed, options.phi_rule));
  if (want("oracles")) out.push_back(oracle_suite(options.seed));
  if (want("baselines")) out.push_back(baselines_suite(10, options.seed));
  return out;
}

SuiteResult network_suite(std::uint64_t seed) {
  SuiteResult r{"network", true, ""};
  Rng rng(seed);
  auto c = NetworkConfig::multi_cell(2, 3, 4, 2.0);
  const auto ch = generate_rayleigh_channels(c, seed);
  BeamformerSet w(4, 3);
  for (auto& v : w.w)
    for (Eigen::Index n = 0; n < v.size(); ++n) v(n) = rng.complex_normal();
  const auto base = sinr_all(c, ch, w);
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) {
    auto rot = w;
    rot.w[static_cast<std::size_t>(k)] *= std::polar(1.0, rng.uniform(0.0, 2.0 * std::numbers::pi));
    const auto g = sinr_all(c, ch, rot);
    for (int i = 0; i < 4; ++i)
      worst = std::max(worst, std::abs(g[static_cast<std::size_t>(i)] - base[static_cast<std::size_t>(i)]) /
                                  base[static_cast<std::size_t>(i)]);
  }
  // gamma = |h w|^2 / (sigma^2 + I) recomputed by hand for user 0.
  const cdouble s = (ch.at(0, 0) * w.w[0]).value();
  double interference = c.noise_var;
  for (int i = 1; i < 4; ++i)
    interference += std::norm((ch.at(c.assignment[static_cast<std::size_t>(i)], 0) * w.w[static_cast<std::size_t>(i)]).value());
  const double hand = std::abs(std::norm(s) / interference - base[0]) / base[0];
  r.passed = worst <= 1e-12 && hand <= 1e-12;
  r.detail = "phase invariance " + sci(worst) + ", hand sinr " + sci(hand);
  return r;
}

SuiteResult cone_membership_suite(int samples, std::uint64_t seed) {
  SuiteResult r{"cones", true, ""};
  Rng rng(seed);
  using conic::AffineExpr;
  int wrong = 0;

  {
    conic::ConeProgram p;
    const int u = p.add_variable(), v = p.add_variable(), z = p.add_variable();
    conic::add_hyperbolic(p, u, v, z);
    for (int i = 0; i < samples; ++i) {
      const double uu = std::exp(rng.uniform(-5.0, 5.0)), vv = std::exp(rng.uniform(-5.0, 5.0));
      // z on either side of the boundary sqrt(u v), away from it by a relative margin.
      const double zz = std::sqrt(uu * vv) * std::exp(rng.uniform(-1.0, 1.0)) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
      const bool inside = uu * vv >= zz * zz;
      if (std::abs(uu * vv - zz * zz) <= 1e-6 * uu * vv) continue;
      const double viol = p.max_violation(Eigen::Vector3d(uu, vv, zz));
      if (inside != (viol <= 1e-12 * (uu + vv))) ++wrong;
    }
  }

  double worst_root = 0.0;
  for (int k = 1; k <= 8; ++k) {
    conic::ConeProgram p;
    const int first = p.add_variables(k);
    std::vector<int> leaves;
    for (int i = 0; i < k; ++i) leaves.push_back(first + i);
    const auto tree = conic::add_geometric_mean_tree(p, leaves);
    for (int s = 0; s < samples / 8; ++s) {
      Eigen::VectorXd y = Eigen::VectorXd::Zero(p.num_vars());
      std::vector<double> level;
      double log_prod = 0.0;
      for (int i = 0; i < k; ++i) {
        const double val = std::exp(rng.uniform(-4.0, 4.0));
        y(first + i) = val;
        level.push_back(val);
        log_prod += std::log(val);
      }
      // Internal nodes, level by level, pair by pair: the construction order.
      level.resize(static_cast<std::size_t>(tree.padded_leaves), 1.0);
      std::size_t next_var = 0;
      while (level.size() > 1) {
        std::vector<double> up;
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
          up.push_back(std::sqrt(level[i] * level[i + 1]));
          y(tree.tree_vars[next_var++]) = up.back();
        }
        level = std::move(up);
      }
      const double expected = std::exp(log_prod / tree.padded_leaves);
      worst_root = std::max(worst_root, std::abs(y(tree.root) - expected) / expected);
      const double scale = 1.0 + y.cwiseAbs().maxCoeff();
      if (p.max_violation(y) > 1e-12 * scale) ++wrong;
      if (k > 1) {
        y(tree.root) *= 1.0 + 1e-6;
        if (p.max_violation(y) <= 0.0) ++wrong;
      }
    }
  }
  r.passed = wrong == 0 && worst_root <= 1e-12;
  r.detail = std::to_string(samples) + " hyperbolic and " + std::to_string(samples / 8 * 8) +
             " tree points, misclassified " + std::to_string(wrong) + ", root error " + sci(worst_root);
  return r;
}

SuiteResult solver_library_suite() {
  SuiteResult r{"solver", true, ""};
  int checked = 0, bad = 0;
  double worst_obj = 0.0, worst_gap = 0.0;
  for (const auto& prob : testing::cone_library()) {
    const auto sol = conic::solve(prob.program);
    ++checked;
    if (sol.status != prob.expected_status) {
      ++bad;
      continue;
    }
    if (prob.expected_status != conic::SolveStatus::Optimal) continue;
    const double rel = std::abs(sol.objective_value - prob.expected_objective) /
                       std::max(1.0, std::abs(prob.expected_objective));
    worst_obj = std::max(worst_obj, rel);
    worst_gap = std::max(worst_gap, sol.kkt.gap);
    if (rel > 1e-6 || sol.kkt.gap > 1e-8) ++bad;
  }
  r.passed = bad == 0 && checked >= 20;
  r.detail = std::to_string(checked) + " problems, " + std::to_string(bad) + " wrong, objective error " +
             sci(worst_obj) + ", gap " + sci(worst_gap);
  return r;
}

SuiteResult amgm_suite(int samples, std::uint64_t seed) {
  SuiteResult r{"amgm", true, ""};
  Rng rng(seed);
  int dominance = 0;
  double tangent = 0.0, grad = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = std::exp(rng.uniform(-6.0, 6.0));
    const double beta = std::exp(rng.uniform(-6.0, 6.0));
    const double phi = std::exp(rng.uniform(-8.0, 8.0));
    const double f = std::sqrt(x) * beta;
    const double g = sca::amgm_overestimate(x, beta, phi);
    if (g < f - 1e-15 * g) ++dominance;

    const double pm = std::sqrt(x) / beta;
    tangent = std::max(tangent, std::abs(sca::amgm_overestimate(x, beta, pm) - f) / f);
    const double hx = 1e-6 * x, hb = 1e-6 * beta;
    const double gx = (sca::amgm_overestimate(x + hx, beta, pm) - sca::amgm_overestimate(x - hx, beta, pm)) / (2 * hx);
    const double gb = (sca::amgm_overestimate(x, beta + hb, pm) - sca::amgm_overestimate(x, beta - hb, pm)) / (2 * hb);
    const double fx = (std::sqrt(x + hx) * beta - std::sqrt(x - hx) * beta) / (2 * hx);
    const double fb = (std::sqrt(x) * (beta + hb) - std::sqrt(x) * (beta - hb)) / (2 * hb);
    grad = std::max({grad, std::abs(gx - fx) / std::abs(fx), std::abs(gb - fb) / std::abs(fb)});
  }
  r.passed = dominance == 0 && tangent <= 1e-12 && grad <= 1e-6;
  r.detail = std::to_string(samples) + " triples, dominance violations " + std::to_string(dominance) +
             ", tangency " + sci(tangent) + ", gradient " + sci(grad);
  return r;
}

SuiteResult linearization_suite(int samples, std::uint64_t seed) {
  SuiteResult r{"linearization", true, ""};
  Rng rng(seed);
  int dominance = 0;
  double tangent = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double alpha = 1.0 + std::exp(rng.uniform(-5.0, 2.0));
    const double tr = std::exp(rng.uniform(-8.0, 12.0));
    const double t = std::exp(rng.uniform(-8.0, 12.0));
    const auto lin = sca::linearize_power(tr, alpha);
    const double exact = std::pow(t, 1.0 / alpha);
    if (lin(t) < exact * (1.0 - 1e-12)) ++dominance;
    const double at = std::pow(tr, 1.0 / alpha);
    tangent = std::max(tangent, std::abs(lin(tr) - at) / at);
  }
  r.passed = dominance == 0 && tangent <= 1e-12;
  r.detail = std::to_string(samples) + " pairs, dominance violations " + std::to_string(dominance) + ", tangency " +
             sci(tangent);
  return r;
}

SuiteResult monotonicity_suite(int instances, std::uint64_t seed,
                               const std::function<double(double, double)>& phi_rule) {
  SuiteResult r{"monotonicity", true, ""};
  int bad = 0, errors = 0, max_iters = 0;
  for (int i = 0; i < instances; ++i) {
    const auto c = mixed_instance(i);
    const auto s = substream_seed(seed, static_cast<std::uint64_t>(i), 0);
    sca::ScaConfig sc;
    sc.phi_rule = phi_rule;
    try {
      const auto res = sca::run(c, generate_rayleigh_channels(c, s), sc, s);
      if (!nondecreasing(res.trace, 1e-6) || !res.converged) ++bad;
      max_iters = std::max(max_iters, res.iterations);
    } catch (const std::exception&) {
      ++errors;
    }
  }
  r.passed = bad == 0 && errors == 0;
  r.detail = std::to_string(instances) + " instances, non-monotone or unconverged " + std::to_string(bad) +
             ", solver errors " + std::to_string(errors) + ", max iterations " + std::to_string(max_iters);
  return r;
}

SuiteResult oracle_suite(std::uint64_t seed) {
  SuiteResult r{"oracles", true, ""};
  double worst = 0.0;
  auto c = NetworkConfig::single_cell(2, 1, 1.0);
  for (int i = 0; i < 3; ++i) {
    const auto s = substream_seed(seed, static_cast<std::uint64_t>(i), 0);
    const auto ch = generate_rayleigh_channels(c, s);
    const double capacity = std::log2(1.0 + ch.at(0, 0).squaredNorm() / c.noise_var);
    const auto a = sca::run(c, ch, {}, s);
    const auto b = baselines::wmmse(c, ch, {}, s);
    worst = std::max({worst, std::abs(a.trace.back() - capacity) / capacity,
                      std::abs(b.trace.back() - capacity) / capacity});
  }
  auto o = NetworkConfig::single_cell(3, 3, 3.0);
  ChannelSet ch(1, 3, 3);
  for (int k = 0; k < 3; ++k) {
    ch.at(0, k) = Eigen::RowVectorXcd::Zero(3);
    ch.at(0, k)(k) = 1.0;
  }
  const double zf = weighted_sum_rate(o, ch, baselines::zero_forcing(o, ch));
  r.passed = worst <= 1e-3 && std::abs(zf - 3.0) <= 1e-9;
  r.detail = "single-user capacity error " + sci(worst) + ", orthonormal ZF rate " + std::to_string(zf);
  return r;
}

SuiteResult baselines_suite(int instances, std::uint64_t seed) {
  SuiteResult r{"baselines", true, ""};
  double nulling = 0.0;
  int bad = 0;
  for (int i = 0; i < instances; ++i) {
    const auto s = substream_seed(seed, static_cast<std::uint64_t>(i), 0);
    auto c = NetworkConfig::single_cell(4, 4, db_to_power(5.0 * (i % 7), 1.0));
    const auto ch = generate_rayleigh_channels(c, s);
    const auto z = baselines::zero_forcing(c, ch);
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        if (j != k) nulling = std::max(nulling, std::abs((ch.at(0, j) * z.w[static_cast<std::size_t>(k)]).value()));
    if (!is_power_feasible(c, z, 1e-8)) ++bad;
    const auto mc = mixed_instance(i);
    baselines::WmmseConfig wc;
    wc.init = i % 2 == 0 ? baselines::WmmseInit::Mrt : baselines::WmmseInit::Random;
    const auto w = baselines::wmmse(mc, generate_rayleigh_channels(mc, s), wc, s);
    if (!nondecreasing(w.trace, 1e-6) || !is_power_feasible(mc, w.beams, 1e-8)) ++bad;
  }
  r.passed = bad == 0 && nulling <= 1e-8;
  r.detail = std::to_string(instances) + " instances, ZF leakage " + sci(nulling) + ", failures " + std::to_string(bad);
  return r;
}

TinyInstance tiny_instance(std::uint64_t seed, double power_db) {
  TinyInstance t{NetworkConfig::single_cell(1, 2, db_to_power(power_db, 1.0)), ChannelSet(1, 2, 1)};
  Rng rng(seed);
  for (int k = 0; k < 2; ++k) t.channels.at(0, k)(0) = rng.normal();
  return t;
}

double brute_force_wsr(const NetworkConfig& config, const ChannelSet& channels, double step) {
  if (config.num_bs != 1 || config.num_antennas != 1 || config.num_users != 2)
    throw InvalidArgument("brute_force_wsr: needs N = 1, B = 1, K = 2");
  const double P = config.power_budget[0], s2 = config.noise_var;
  const double g1 = std::norm(channels.at(0, 0)(0)), g2 = std::norm(channels.at(0, 1)(0));
  const double a1 = config.weights[0], a2 = config.weights[1];
  const int n = static_cast<int>(std::floor(std::sqrt(P) / step + 1e-9));
  double best = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double p1 = (i * step) * (i * step);
    for (int j = 0; j <= n; ++j) {
      const double p2 = (j * step) * (j * step);
      if (p1 + p2 > P * (1.0 + 1e-12)) break;
      const double rate = a1 * std::log2(1.0 + g1 * p1 / (s2 + g1 * p2)) + a2 * std::log2(1.0 + g2 * p2 / (s2 + g2 * p1));
      best = std::max(best, rate);
    }
  }
  return best;
}

double best_of_restarts(const NetworkConfig& config, const ChannelSet& channels, int restarts,
                        std::uint64_t seed) {
  sca::ScaConfig sc;
  sc.init_mode = sca::InitMode::RandomBeams;
  double best = 0.0;
  for (int i = 0; i < restarts; ++i) {
    const auto r = sca::run(config, channels, sc, substream_seed(seed, static_cast<std::uint64_t>(i), 1));
    best = std::max(best, r.trace.back());
  }
  return best;
}

}  // namespace wsrm::verify
