#include "wsrm/sca.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "wsrm/error.hpp"
#include "wsrm/rng.hpp"

namespace wsrm::sca {

using conic::AffineExpr;
using conic::ConeProgram;
using conic::ConeSolution;
using conic::SolveStatus;

std::vector<double> scale_weights(const std::vector<double>& weights) {
  if (weights.empty()) throw InvalidArgument("scale_weights: empty weight vector");
  for (double a : weights)
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("scale_weights: weights must be > 0");
  const double c = 1.01 / *std::min_element(weights.begin(), weights.end());
  std::vector<double> out(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k) out[k] = c * weights[k];
  return out;
}

double amgm_overestimate(double x, double beta, double phi) {
  return 0.5 * phi * beta * beta + x / (2.0 * phi);
}

PowerLinearization linearize_power(double t_ref, double alpha) {
  if (!(alpha > 1.0)) throw InvalidArgument("linearize_power: alpha must be > 1");
  if (!(t_ref > 0.0)) throw InvalidArgument("linearize_power: t_ref must be > 0");
  const double p = 1.0 / alpha;
  const double value = std::pow(t_ref, p);
  PowerLinearization lin;
  lin.slope = p * value / t_ref;
  lin.intercept = value - lin.slope * t_ref;
  return lin;
}

std::pair<AffineExpr, AffineExpr> channel_gain(const VariableMap& map,
                                               const Eigen::RowVectorXcd& h, int user) {
  // (a + ib)(u + iv) = (au - bv) + i(av + bu)
  AffineExpr re, im;
  for (int n = 0; n < map.num_antennas; ++n) {
    const double a = h(n).real(), b = h(n).imag();
    if (a != 0.0) {
      re.add(map.re(user, n), a);
      im.add(map.im(user, n), a);
    }
    if (b != 0.0) {
      re.add(map.im(user, n), -b);
      im.add(map.re(user, n), b);
    }
  }
  return {re, im};
}

namespace {

AffineExpr var(int j, double c = 1.0) { return AffineExpr::var(j, c); }

void check_state(const NetworkConfig& config, const ScaState& state) {
  const auto K = static_cast<std::size_t>(config.num_users);
  if (state.phi.size() != K || state.t.size() != K)
    throw InvalidArgument("SCA state does not match the number of users");
  for (std::size_t k = 0; k < K; ++k) {
    if (!(state.phi[k] > 0.0)) throw InvalidArgument("SCA state: phi must be > 0");
    if (!(state.t[k] > 0.0)) throw InvalidArgument("SCA state: t must be > 0");
  }
}

}  // namespace

std::pair<int, int> rational_exponent(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) return {0, 0};
  const double p = 1.0 / alpha;
  for (int n = 1; n <= kMaxTowerNumerator; ++n) {
    const double mn = p * n;
    const double m = std::round(mn);
    if (m < 1.0 || m > kMaxTowerNumerator) continue;
    if (std::abs(mn - m) <= 1e-9 * mn) {
      const int mi = static_cast<int>(m);
      const int g = std::gcd(mi, n);
      return {mi / g, n / g};
    }
  }
  return {0, 0};
}

std::vector<double> exact_variant_weights(const std::vector<double>& weights) {
  if (weights.empty()) throw InvalidArgument("exact variant: empty weight vector");
  for (double a : weights)
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("exact variant: weights must be > 0");
  const double top = *std::max_element(weights.begin(), weights.end());
  std::vector<double> out(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k) out[k] = weights[k] / top;
  return out;
}

void add_power_tower(ConeProgram& program, int t, const AffineExpr& s, int m, int n) {
  if (n < 1 || m < n || m > kMaxTowerNumerator)
    throw InvalidArgument("power tower: need 1 <= n <= m <= " + std::to_string(kMaxTowerNumerator));
  program.add_nonneg(var(t));
  if (m == n) {
    program.add_nonneg(s - var(t));
    return;
  }
  int width = 1;
  while (width < m) width *= 2;
  // t^M <= s^n t^(M-m) 1^(m-n)  <=>  t^m <= s^n
  std::vector<AffineExpr> leaves;
  for (int i = 0; i < n; ++i) leaves.push_back(s);
  for (int i = 0; i < width - m; ++i) leaves.push_back(var(t));
  for (int i = 0; i < m - n; ++i) leaves.emplace_back(1.0);
  const auto tree = conic::add_geometric_mean_tree(program, leaves);
  program.add_nonneg(var(tree.root) - var(t));
}

Subproblem build_iteration_socp(const NetworkConfig& config, const ChannelSet& channels,
                                const ScaState& state, const std::vector<double>& weights,
                                RateConstraint rate) {
  config.validate();
  channels.validate(config);
  check_state(config, state);
  const int K = config.num_users;
  const int N = config.num_antennas;
  if (weights.size() != static_cast<std::size_t>(K))
    throw InvalidArgument("SCA: weight vector does not match the number of users");

  Subproblem sp;
  auto& prog = sp.program;
  auto& map = sp.map;
  map.num_users = K;
  map.num_antennas = N;
  prog.add_variables(map.first_aux());

  std::vector<int> leaves(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) leaves[static_cast<std::size_t>(k)] = map.t(k);
  const auto tree = conic::add_geometric_mean_tree(prog, leaves);
  map.root = tree.root;
  map.tree_cones = tree.cones;
  prog.set_objective(conic::Sense::Maximize, var(map.root));

  const double sigma = std::sqrt(config.noise_var);
  for (int k = 0; k < K; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const int b = config.assignment[ks];
    const auto [sig_re, sig_im] = channel_gain(map, channels.at(b, k), k);

    // (phi/2) beta^2 <= q with q = Re(h w) - x / (2 phi), rotated into an SOC.
    const double phi = state.phi[ks];
    const AffineExpr q = sig_re - var(map.x(k), 0.5 / phi);
    map.amgm_cones.push_back(
        prog.add_soc({0.5 * (q - 1.0), var(map.beta(k), std::sqrt(0.5 * phi))}, 0.5 * (q + 1.0)));

    if (rate == RateConstraint::Linearized) {
      const auto lin = linearize_power(std::max(state.t[ks], kTrefFloor), weights[ks]);
      // x + 1 - L(t) >= 0
      AffineExpr e = var(map.x(k)) - var(map.t(k), lin.slope);
      e.constant = 1.0 - lin.intercept;
      map.rate_cones.push_back(prog.add_nonneg(e));
    } else {
      const auto [m, n] = rational_exponent(weights[ks]);
      if (m == 0)
        throw InvalidArgument("exact variant: weight of user " + std::to_string(k) +
                              " gives no supported rational exponent");
      add_power_tower(prog, map.t(k), var(map.x(k)) + 1.0, m, n);
    }

    std::vector<AffineExpr> lhs;
    lhs.emplace_back(sigma);
    for (int i = 0; i < K; ++i) {
      if (i == k) continue;
      auto [re, im] = channel_gain(map, channels.at(config.assignment[static_cast<std::size_t>(i)], k), i);
      lhs.push_back(std::move(re));
      lhs.push_back(std::move(im));
    }
    map.interference_cones.push_back(prog.add_soc(std::move(lhs), var(map.beta(k))));

    map.signal_imag_rows.push_back(prog.add_equality(sig_im));
    prog.add_nonneg(var(map.x(k)));
  }

  for (int b = 0; b < config.num_bs; ++b) {
    const double P = config.power_budget[static_cast<std::size_t>(b)];
    const auto users = config.users_of(b);
    if (users.empty()) continue;
    if (P <= 0.0) {
      for (int k : users)
        for (int n = 0; n < N; ++n) {
          prog.add_equality(var(map.re(k, n)));
          prog.add_equality(var(map.im(k, n)));
        }
      continue;
    }
    std::vector<AffineExpr> lhs;
    for (int k : users)
      for (int n = 0; n < N; ++n) {
        lhs.push_back(var(map.re(k, n)));
        lhs.push_back(var(map.im(k, n)));
      }
    map.power_cones.push_back(prog.add_soc(std::move(lhs), AffineExpr(std::sqrt(P))));
  }
  return sp;
}

BeamformerSet extract_beams(const VariableMap& map, const Eigen::VectorXd& y) {
  BeamformerSet beams(map.num_users, map.num_antennas);
  for (int k = 0; k < map.num_users; ++k)
    for (int n = 0; n < map.num_antennas; ++n)
      beams.w[static_cast<std::size_t>(k)](n) = cdouble(y(map.re(k, n)), y(map.im(k, n)));
  return beams;
}

namespace {

double default_phi(double x, double beta) {
  if (!(beta > 0.0)) return kPhiMax;
  return std::sqrt(std::max(x, 0.0)) / beta;
}

double clamp_phi(double phi) {
  if (!std::isfinite(phi)) return kPhiMax;
  return std::clamp(phi, kPhiMin, kPhiMax);
}

// Interior-point iterates may overshoot a power budget by the solver
// tolerance; scale such a BS back onto its budget.
void project_power(const NetworkConfig& config, BeamformerSet& beams) {
  for (int b = 0; b < config.num_bs; ++b) {
    const double P = config.power_budget[static_cast<std::size_t>(b)];
    const double used = per_bs_power(config, beams, b);
    if (used <= P) continue;
    const double s = P > 0.0 ? std::sqrt(P / used) : 0.0;
    for (int k : config.users_of(b)) beams.w[static_cast<std::size_t>(k)] *= s;
  }
}

}  // namespace

ScaState update_state(const NetworkConfig& config, const ChannelSet& channels,
                      const ConeSolution& solution, const VariableMap& map, const ScaState& state,
                      const std::function<double(double, double)>& phi_rule) {
  ScaState next = state;
  const int K = map.num_users;
  const Eigen::VectorXd& y = solution.primal;
  for (int k = 0; k < K; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    next.t[ks] = std::max(y(map.t(k)), kTrefFloor);
    next.x[ks] = std::max(y(map.x(k)), 0.0);
    next.beta[ks] = y(map.beta(k));
    const double phi = phi_rule ? phi_rule(next.x[ks], next.beta[ks])
                                : default_phi(next.x[ks], next.beta[ks]);
    next.phi[ks] = clamp_phi(phi);
  }
  next.beams = extract_beams(map, y);
  project_power(config, next.beams);
  next.iter = state.iter + 1;
  next.objective_trace.push_back(weighted_sum_rate(config, channels, next.beams));
  return next;
}

ScaState initial_state(const NetworkConfig& config, const ChannelSet& channels,
                       const std::vector<double>& weights, InitMode mode, std::uint64_t seed) {
  const int K = config.num_users;
  const auto Ks = static_cast<std::size_t>(K);
  ScaState s;
  s.t.assign(Ks, 1.0);
  s.beta.assign(Ks, 0.0);
  s.x.assign(Ks, 0.0);
  s.phi.assign(Ks, 1.0);
  if (mode == InitMode::RandomFeasible) {
    Rng rng(seed);
    for (auto& p : s.phi) p = rng.uniform(0.1, 10.0);
    // A draw above 2 Re(h w) / beta^2 at every power-feasible w leaves the
    // first subproblem without a feasible point, since x = 0 does not remove
    // the phi beta^2 / 2 term. Capping phi at half that value for the MRT
    // beams keeps (MRT, x = 0, t = 1) strictly feasible.
    const auto mrt = mrt_beamformers(config, channels);
    for (int k = 0; k < K; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      const double gain = (channels.at(config.assignment[ks], k) * mrt.w[ks]).value().real();
      const double cap = gain / interference_plus_noise(config, channels, mrt, k);
      s.phi[ks] = clamp_phi(std::min(s.phi[ks], cap));
    }
    s.beams = BeamformerSet(K, config.num_antennas);
    return s;
  }
  if (mode == InitMode::RandomBeams) {
    // CN(0, 1) beams, each BS scaled to its full budget.
    Rng rng(seed);
    s.beams = BeamformerSet(K, config.num_antennas);
    for (auto& w : s.beams.w)
      for (Eigen::Index n = 0; n < w.size(); ++n) w(n) = rng.complex_normal();
    for (int b = 0; b < config.num_bs; ++b) {
      double used = 0.0;
      for (int k : config.users_of(b)) used += s.beams.w[static_cast<std::size_t>(k)].squaredNorm();
      const double scale = used > 0.0 ? std::sqrt(config.power_budget[static_cast<std::size_t>(b)] / used) : 0.0;
      for (int k : config.users_of(b)) s.beams.w[static_cast<std::size_t>(k)] *= scale;
    }
  } else {
    s.beams = mrt_beamformers(config, channels);
  }
  tighten_slacks(config, channels, weights, s);
  return s;
}

void tighten_slacks(const NetworkConfig& config, const ChannelSet& channels,
                    const std::vector<double>& weights, ScaState& state) {
  for (int k = 0; k < config.num_users; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const double g = sinr(config, channels, state.beams, k);
    state.x[ks] = g;
    state.beta[ks] = std::sqrt(interference_plus_noise(config, channels, state.beams, k));
    state.t[ks] = std::max(std::pow(1.0 + g, weights[ks]), kTrefFloor);
    state.phi[ks] = clamp_phi(default_phi(state.x[ks], state.beta[ks]));
  }
}

namespace {

bool usable(const ConeSolution& sol, double tol) {
  if (sol.status == SolveStatus::Optimal) return true;
  if (sol.status != SolveStatus::MaxIterations && sol.status != SolveStatus::NumericalFailure)
    return false;
  return sol.primal.size() > 0 && sol.kkt.primal_res <= tol && sol.kkt.dual_res <= tol &&
         sol.kkt.gap <= tol;
}

// The previous optimum with w, t, x, beta and all auxiliary variables kept.
double carryover_violation(const Subproblem& next, const Eigen::VectorXd& previous) {
  if (previous.size() != next.program.num_vars()) return 0.0;
  return std::max(0.0, next.program.max_violation(previous));
}

ScaResult outer_loop(const NetworkConfig& config, const ChannelSet& channels,
                     const ScaConfig& sc, std::uint64_t seed, const std::vector<double>& weights,
                     RateConstraint rate) {
  if (!(sc.stop_tol > 0.0)) throw InvalidArgument("SCA: stop_tol must be > 0");
  if (sc.max_outer_iters < 1) throw InvalidArgument("SCA: max_outer_iters must be >= 1");
  config.validate();
  channels.validate(config);

  ScaResult result;
  result.rate = rate;
  result.scaled_weights = weights;
  ScaState state = initial_state(config, channels, weights, sc.init_mode, seed);
  Eigen::VectorXd previous;

  for (int it = 0; it < sc.max_outer_iters; ++it) {
    const Subproblem sp = build_iteration_socp(config, channels, state, weights, rate);
    if (!sc.dump_dir.empty()) {
      std::filesystem::create_directories(sc.dump_dir);
      std::ofstream os(std::filesystem::path(sc.dump_dir) / ("iter_" + std::to_string(it) + ".cone"));
      sp.program.write(os);
    }
    if (sc.check_feasibility_carryover && it > 0)
      result.max_carryover_violation =
          std::max(result.max_carryover_violation, carryover_violation(sp, previous));

    const auto start = std::chrono::steady_clock::now();
    ConeSolution sol = conic::solve(sp.program, sc.solver);
    const auto stop = std::chrono::steady_clock::now();
    result.seconds_per_iter.push_back(std::chrono::duration<double>(stop - start).count());

    if (!usable(sol, sc.inexact_accept_tol)) {
      std::ostringstream os;
      os << "SCA iteration " << it + 1 << ": subproblem solver returned "
         << conic::to_string(sol.status);
      throw SolverError(os.str());
    }
    result.final_operating_point = state;
    state = update_state(config, channels, sol, sp.map, state, sc.phi_rule);
    // sum log2 t_k / c <= WSR, with c the common weight scale. This is the
    // quantity the previous-optimum-stays-feasible argument makes monotone.
    double surrogate = 0.0;
    for (int k = 0; k < config.num_users; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      surrogate += std::log2(std::max(sol.primal(sp.map.t(k)), kTrefFloor)) *
                   config.weights[ks] / weights[ks];
    }
    result.surrogate_trace.push_back(surrogate);
    if (sc.tighten_slacks) tighten_slacks(config, channels, weights, state);
    previous = sol.primal;
    result.final_solution = std::move(sol);

    const auto& trace = state.objective_trace;
    if (trace.size() >= 2 && std::abs(trace.back() - trace[trace.size() - 2]) < sc.stop_tol) {
      result.converged = true;
      break;
    }
  }

  result.beams = state.beams;
  result.trace = state.objective_trace;
  result.iterations = state.iter;
  return result;
}

}  // namespace

ScaResult run(const NetworkConfig& config, const ChannelSet& channels, const ScaConfig& sc,
              std::uint64_t seed) {
  config.validate();
  std::vector<double> weights;
  if (sc.weight_scale_mode == WeightScaleMode::ScaleAbove1) {
    weights = scale_weights(config.weights);
  } else {
    if (!(sc.scale_factor > 0.0)) throw InvalidArgument("SCA: scale_factor must be > 0");
    weights = config.weights;
    for (auto& a : weights) {
      a *= sc.scale_factor;
      if (!(a > 1.0))
        throw InvalidArgument("SCA: Raw weight scaling leaves a weight <= 1; use ScaleAbove1");
    }
  }
  ScaResult r = outer_loop(config, channels, sc, seed, weights, RateConstraint::Linearized);
  if (r.converged) r.kkt_residual = kkt_residual(config, channels, r);
  return r;
}

ScaResult run_exact_variant(const NetworkConfig& config, const ChannelSet& channels,
                            const ScaConfig& sc, std::uint64_t seed) {
  config.validate();
  const auto weights = exact_variant_weights(config.weights);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (rational_exponent(weights[k]).first == 0) {
      std::ostringstream os;
      os << "exact variant: max(alpha)/alpha_" << k << " = " << 1.0 / weights[k]
         << " is not a ratio m/n with m <= " << kMaxTowerNumerator;
      throw InvalidArgument(os.str());
    }
  }
  ScaResult r = outer_loop(config, channels, sc, seed, weights, RateConstraint::ExactTower);
  if (r.converged) r.kkt_residual = kkt_residual(config, channels, r);
  return r;
}

namespace {

// Accumulates  sum_j coef_j e_j  of an affine row into a dense gradient.
void add_gradient(Eigen::VectorXd& g, const AffineExpr& e, double scale) {
  for (const auto& [j, c] : e.terms) g(j) += scale * c;
}

}  // namespace

double kkt_residual(const NetworkConfig& config, const ChannelSet& channels,
                    const ScaResult& result) {
  const auto& sol = result.final_solution;
  if (sol.primal.size() == 0) throw InvalidArgument("kkt_residual: result holds no solution");
  const Subproblem sp = build_iteration_socp(config, channels, result.final_operating_point,
                                             result.scaled_weights, result.rate);
  const auto& prog = sp.program;
  const auto& map = sp.map;
  const int K = map.num_users;
  const int nv = prog.num_vars();
  if (sol.primal.size() != nv || static_cast<int>(sol.dual_cone.size()) != static_cast<int>(prog.cones().size()))
    throw InvalidArgument("kkt_residual: solution does not match the final subproblem");

  // Point: returned beams, final slacks and auxiliaries.
  Eigen::VectorXd y = sol.primal;
  for (int k = 0; k < K; ++k)
    for (int n = 0; n < map.num_antennas; ++n) {
      const cdouble w = result.beams.w[static_cast<std::size_t>(k)](n);
      y(map.re(k, n)) = w.real();
      y(map.im(k, n)) = w.imag();
    }

  std::vector<int> surrogate(prog.cones().size(), -1);  // cone -> 0 amgm, 1 rate
  std::vector<int> owner(prog.cones().size(), -1);
  for (int k = 0; k < K; ++k) {
    surrogate[static_cast<std::size_t>(map.amgm_cones[static_cast<std::size_t>(k)])] = 0;
    owner[static_cast<std::size_t>(map.amgm_cones[static_cast<std::size_t>(k)])] = k;
    if (!map.rate_cones.empty()) {
      surrogate[static_cast<std::size_t>(map.rate_cones[static_cast<std::size_t>(k)])] = 1;
      owner[static_cast<std::size_t>(map.rate_cones[static_cast<std::size_t>(k)])] = k;
    }
  }

  Eigen::VectorXd stat = Eigen::VectorXd::Zero(nv);
  // Minimization form of max root.
  stat(map.root) -= 1.0;

  double primal = 0.0, compl_res = 0.0, mult_l1 = 0.0;
  int mult_count = 0;

  const auto& eqs = prog.equalities();
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    const double nu = sol.dual_eq(static_cast<Eigen::Index>(i));
    add_gradient(stat, eqs[i], nu);
    primal = std::max(primal, std::abs(eqs[i].eval(y)) / (1.0 + std::abs(eqs[i].constant)));
    mult_l1 += std::abs(nu);
    ++mult_count;
  }

  const auto& cones = prog.cones();
  for (std::size_t j = 0; j < cones.size(); ++j) {
    const auto& z = sol.dual_cone[j];
    const auto& rows = cones[j].rows;
    mult_l1 += z.lpNorm<1>();
    mult_count += static_cast<int>(z.size());
    if (surrogate[j] < 0) {
      Eigen::VectorXd s(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        s(static_cast<Eigen::Index>(r)) = rows[r].eval(y);
        add_gradient(stat, rows[r], -z(static_cast<Eigen::Index>(r)));
      }
      const double viol = s.size() > 1 ? s.tail(s.size() - 1).norm() - s(0) : -s(0);
      primal = std::max(primal, std::max(0.0, viol) / (1.0 + std::abs(s(0))));
      compl_res = std::max(compl_res, std::abs(s.dot(z)));
      continue;
    }
    const int k = owner[j];
    const double x = std::max(y(map.x(k)), 0.0);
    const double beta = y(map.beta(k));
    if (surrogate[j] == 0) {
      // Re(h w) - G(x, beta, phi_m) >= 0 with the matched phi_m = sqrt(x) / beta.
      // Inside the clamp range G and its gradient equal sqrt(x) beta and its
      // gradient; a muted user (phi_m at the lower clamp) keeps a finite gradient.
      const auto sig = channel_gain(map, channels.at(config.assignment[static_cast<std::size_t>(k)], k), k).first;
      const double phi_m = clamp_phi(default_phi(x, beta));
      const double c = sig.eval(y) - amgm_overestimate(x, beta, phi_m);
      // Multiplier: least-squares fit of mu grad(c) to the cone's J^T z.
      Eigen::VectorXd jz = Eigen::VectorXd::Zero(nv);
      for (std::size_t r = 0; r < rows.size(); ++r) add_gradient(jz, rows[r], z(static_cast<Eigen::Index>(r)));
      Eigen::VectorXd gc = Eigen::VectorXd::Zero(nv);
      add_gradient(gc, sig, 1.0);
      gc(map.x(k)) -= 1.0 / (2.0 * phi_m);
      gc(map.beta(k)) -= phi_m * beta;
      const double mu = gc.dot(jz) / gc.squaredNorm();
      stat -= mu * gc;
      primal = std::max(primal, std::max(0.0, -c) / (1.0 + std::abs(sig.eval(y))));
      compl_res = std::max(compl_res, std::abs(mu * c));
    } else {
      // x + 1 - t^(1/alpha) >= 0
      const double mu = z(0);
      const double p = 1.0 / result.scaled_weights[static_cast<std::size_t>(k)];
      const double t = std::max(y(map.t(k)), kTrefFloor);
      const double tp = std::pow(t, p);
      const double c = y(map.x(k)) + 1.0 - tp;
      stat(map.x(k)) -= mu;
      stat(map.t(k)) += mu * p * tp / t;
      primal = std::max(primal, std::max(0.0, -c) / (1.0 + tp));
      compl_res = std::max(compl_res, std::abs(mu * c));
    }
  }

  const double s_d = std::max(100.0, mult_count > 0 ? mult_l1 / mult_count : 0.0) / 100.0;
  return std::max({stat.lpNorm<Eigen::Infinity>() / s_d, compl_res / s_d, primal});
}

}  // namespace wsrm::sca
