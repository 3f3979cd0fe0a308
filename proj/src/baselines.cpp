#include "wsrm/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "wsrm/rng.hpp"

namespace wsrm::baselines {

std::vector<double> water_filling(const std::vector<double>& gains, const std::vector<double>& weights,
                                  double budget) {
  if (gains.size() != weights.size()) throw InvalidArgument("water_filling: gains and weights differ in length");
  std::vector<double> p(gains.size(), 0.0);
  if (budget <= 0.0 || gains.empty()) return p;
  double inv_sum = 0.0, min_weight = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < gains.size(); ++k) {
    if (!(gains[k] > 0.0) || !(weights[k] > 0.0))
      throw InvalidArgument("water_filling: gains and weights must be positive");
    inv_sum += 1.0 / gains[k];
    min_weight = std::min(min_weight, weights[k]);
  }
  auto fill = [&](double mu) {
    double total = 0.0;
    for (std::size_t k = 0; k < gains.size(); ++k) {
      p[k] = std::max(0.0, weights[k] * mu - 1.0 / gains[k]);
      total += p[k];
    }
    return total;
  };
  // At mu_hi every user is active and the total is at least the budget.
  double lo = 0.0, hi = (budget + inv_sum) / min_weight;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fill(mid) > budget ? hi : lo) = mid;
  }
  fill(lo);  // the lower level never overspends
  return p;
}

BeamformerSet zero_forcing(const NetworkConfig& config, const ChannelSet& channels) {
  config.validate();
  channels.validate(config);
  const int K = config.num_users, N = config.num_antennas;
  if (config.num_bs != 1) throw InvalidArgument("zero_forcing: only single-cell (B = 1) is supported");
  if (K > N) throw InvalidArgument("zero_forcing: needs K <= N, got K = " + std::to_string(K) + ", N = " + std::to_string(N));

  Eigen::MatrixXcd H(K, N);
  for (int k = 0; k < K; ++k) H.row(k) = channels.at(0, k);
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(H);
  const auto& sv = svd.singularValues();
  if (sv(K - 1) <= 1e-10 * sv(0)) throw InvalidArgument("zero_forcing: channel matrix is rank deficient");

  // Columns satisfy h_j pinv_k = delta_jk.
  const Eigen::MatrixXcd pinv = H.completeOrthogonalDecomposition().pseudoInverse();
  std::vector<double> gains(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) gains[static_cast<std::size_t>(k)] = 1.0 / (pinv.col(k).squaredNorm() * config.noise_var);
  const auto p = water_filling(gains, config.weights, config.power_budget[0]);

  BeamformerSet beams(K, N);
  for (int k = 0; k < K; ++k) {
    const Eigen::VectorXcd d = pinv.col(k) / pinv.col(k).norm();
    beams.w[static_cast<std::size_t>(k)] = std::sqrt(p[static_cast<std::size_t>(k)]) * d;
  }
  return beams;
}

BeamformerSet random_beamformers(const NetworkConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  BeamformerSet beams(config.num_users, config.num_antennas);
  for (auto& w : beams.w)
    for (Eigen::Index n = 0; n < w.size(); ++n) w(n) = rng.complex_normal();
  for (int b = 0; b < config.num_bs; ++b) {
    const double used = per_bs_power(config, beams, b);
    if (used <= 0.0) continue;
    const double s = std::sqrt(config.power_budget[static_cast<std::size_t>(b)] / used);
    for (int k : config.users_of(b)) beams.w[static_cast<std::size_t>(k)] *= s;
  }
  return beams;
}

namespace {

// Transmit update of one BS: w_k = (A + mu I)^{-1} r_k, with mu >= 0 the
// smallest multiplier whose beams fit the budget.
void transmit_update(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& R, double budget, double power_tol,
                     Eigen::MatrixXcd& W) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(A);
  const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXcd Q = eig.eigenvectors().adjoint() * R;
  // Every r_k lies in the range of A; drop round-off in its null space.
  const double floor = 1e-12 * std::max(lambda.maxCoeff(), 0.0);
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (lambda(i) <= floor) Q.row(i).setZero();
  const Eigen::VectorXd q2 = Q.rowwise().squaredNorm();
  auto power = [&](double mu) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      if (q2(i) == 0.0) continue;
      const double d = lambda(i) + mu;
      if (d <= 0.0) return std::numeric_limits<double>::infinity();
      total += q2(i) / (d * d);
    }
    return total;
  };
  auto apply = [&](double mu) {
    Eigen::MatrixXcd scaled = Q;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      const double d = lambda(i) + mu;
      scaled.row(i) = d > 0.0 ? Eigen::RowVectorXcd(Q.row(i) / d) : Eigen::RowVectorXcd::Zero(Q.cols());
    }
    W = eig.eigenvectors() * scaled;
  };

  if (budget <= 0.0 || q2.sum() == 0.0) {
    W = Eigen::MatrixXcd::Zero(R.rows(), R.cols());
    return;
  }
  if (power(0.0) <= budget) {
    apply(0.0);
    return;
  }
  double lo = 0.0, hi = std::max(1e-12, 1e-6 * lambda.maxCoeff());
  while (power(hi) > budget) {
    lo = hi;
    hi *= 2.0;
  }
  // power(mu) decreases in mu; hi always stays feasible.
  for (int it = 0; it < 500; ++it) {
    if (budget - power(hi) <= power_tol * budget || hi - lo <= 1e-16 * hi) break;
    const double mid = 0.5 * (lo + hi);
    (power(mid) > budget ? lo : hi) = mid;
  }
  apply(hi);
}

}  // namespace

WmmseState wmmse_step(const NetworkConfig& config, const ChannelSet& channels, const BeamformerSet& beams,
                      double power_tol) {
  const int K = config.num_users, N = config.num_antennas;
  WmmseState st;
  st.u.resize(static_cast<std::size_t>(K));
  st.v.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const cdouble signal = (channels.at(config.assignment[ku], k) * beams.w[ku]).value();
    const double noise_int = interference_plus_noise(config, channels, beams, k);
    const double total = noise_int + std::norm(signal);
    st.u[ku] = signal / total;
    // 1 / MSE = total / (interference + noise) = 1 + sinr
    st.v[ku] = total / noise_int;
  }

  st.beams = BeamformerSet(K, N);
  for (int b = 0; b < config.num_bs; ++b) {
    const auto users = config.users_of(b);
    if (users.empty()) continue;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(N, N);
    for (int j = 0; j < K; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const Eigen::RowVectorXcd& h = channels.at(b, j);
      A += config.weights[ju] * st.v[ju] * std::norm(st.u[ju]) * (h.adjoint() * h);
    }
    A = 0.5 * (A + A.adjoint()).eval();
    Eigen::MatrixXcd R(N, static_cast<Eigen::Index>(users.size()));
    for (std::size_t i = 0; i < users.size(); ++i) {
      const auto ku = static_cast<std::size_t>(users[i]);
      R.col(static_cast<Eigen::Index>(i)) =
          config.weights[ku] * st.v[ku] * channels.at(b, users[i]).adjoint() * st.u[ku];
    }
    Eigen::MatrixXcd W;
    transmit_update(A, R, config.power_budget[static_cast<std::size_t>(b)], power_tol, W);
    for (std::size_t i = 0; i < users.size(); ++i)
      st.beams.w[static_cast<std::size_t>(users[i])] = W.col(static_cast<Eigen::Index>(i));
  }
  return st;
}

WmmseResult wmmse(const NetworkConfig& config, const ChannelSet& channels, const WmmseConfig& wmmse_config,
                  std::uint64_t seed) {
  config.validate();
  channels.validate(config);
  if (!(wmmse_config.stop_tol > 0.0)) throw InvalidArgument("wmmse: stop_tol must be positive");
  if (wmmse_config.max_iters < 1) throw InvalidArgument("wmmse: max_iters must be at least 1");

  BeamformerSet beams = wmmse_config.init == WmmseInit::Mrt ? mrt_beamformers(config, channels)
                                                             : random_beamformers(config, seed);
  WmmseResult result;
  for (int it = 0; it < wmmse_config.max_iters; ++it) {
    const auto start = std::chrono::steady_clock::now();
    WmmseState st = wmmse_step(config, channels, beams, wmmse_config.power_tol);
    const auto stop = std::chrono::steady_clock::now();
    result.seconds_per_iter.push_back(std::chrono::duration<double>(stop - start).count());
    beams = st.beams;
    result.trace.push_back(weighted_sum_rate(config, channels, beams));
    result.iterations = it + 1;
    st.trace = result.trace;
    result.final_state = std::move(st);
    const std::size_t n = result.trace.size();
    if (n >= 2 && std::abs(result.trace[n - 1] - result.trace[n - 2]) < wmmse_config.stop_tol) {
      result.converged = true;
      break;
    }
  }
  result.beams = beams;
  return result;
}

}  // namespace wsrm::baselines
