#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "wsrm/conic.hpp"

namespace wsrm::conic {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Block {
  int offset = 0;
  int dim = 0;
};

// Standard form: minimize c^T x  s.t.  A x = b,  G x + s = h,  s in K.
struct StandardForm {
  int n = 0;
  int p = 0;
  int m = 0;
  MatrixXd A, G;
  VectorXd b, c, h;
  double c0 = 0.0;
  std::vector<Block> blocks;
};

StandardForm to_standard_form(const ConeProgram& prog) {
  StandardForm sf;
  sf.n = prog.num_vars();
  sf.p = static_cast<int>(prog.equalities().size());
  sf.m = prog.cone_rows();
  sf.A = MatrixXd::Zero(sf.p, sf.n);
  sf.b = VectorXd::Zero(sf.p);
  sf.G = MatrixXd::Zero(sf.m, sf.n);
  sf.h = VectorXd::Zero(sf.m);
  sf.c = VectorXd::Zero(sf.n);

  const double sign = prog.sense() == Sense::Maximize ? -1.0 : 1.0;
  for (const auto& [j, v] : prog.objective().terms) sf.c(j) += sign * v;
  sf.c0 = sign * prog.objective().constant;

  for (int i = 0; i < sf.p; ++i) {
    const auto& e = prog.equalities()[static_cast<std::size_t>(i)];
    for (const auto& [j, v] : e.terms) sf.A(i, j) += v;
    sf.b(i) = -e.constant;
  }
  int r = 0;
  for (const auto& cone : prog.cones()) {
    sf.blocks.push_back({r, cone.dim()});
    for (const auto& e : cone.rows) {
      for (const auto& [j, v] : e.terms) sf.G(r, j) -= v;
      sf.h(r) = e.constant;
      ++r;
    }
  }
  return sf;
}

// ---- second-order cone algebra on one block ------------------------------

// sqrt(u0^2 - ||u1||^2), or a nonpositive value when u is outside the interior.
double soc_residual(const Eigen::Ref<const VectorXd>& u) {
  const double n1 = u.tail(u.size() - 1).norm();
  const double a = u(0) - n1;
  if (a <= 0.0) return a;
  return std::sqrt(a * (u(0) + n1));
}

// u0 - ||u1||, the smallest Jordan eigenvalue.
double soc_min_eig(const Eigen::Ref<const VectorXd>& u) {
  return u(0) - u.tail(u.size() - 1).norm();
}

// u o v
VectorXd jordan_product(const Eigen::Ref<const VectorXd>& u, const Eigen::Ref<const VectorXd>& v) {
  VectorXd out(u.size());
  out(0) = u.dot(v);
  const auto d = u.size() - 1;
  out.tail(d) = u(0) * v.tail(d) + v(0) * u.tail(d);
  return out;
}

// x with lambda o x = d
VectorXd jordan_solve(const Eigen::Ref<const VectorXd>& lambda,
                      const Eigen::Ref<const VectorXd>& d) {
  const auto k = lambda.size() - 1;
  const double rho = lambda(0) * lambda(0) - lambda.tail(k).squaredNorm();
  VectorXd x(lambda.size());
  x(0) = (lambda(0) * d(0) - lambda.tail(k).dot(d.tail(k))) / rho;
  x.tail(k) = (d.tail(k) - x(0) * lambda.tail(k)) / lambda(0);
  return x;
}

// Largest alpha with lambda + alpha d in K (lambda interior).
double max_step(const Eigen::Ref<const VectorXd>& lambda, const Eigen::Ref<const VectorXd>& d) {
  const auto k = lambda.size() - 1;
  const double lnorm = soc_residual(lambda);
  const double lb0 = lambda(0) / lnorm;
  const double r0 = (lb0 * d(0) - lambda.tail(k).dot(d.tail(k)) / lnorm) / lnorm;
  const double factor = (r0 + d(0) / lnorm) / (lb0 + 1.0);
  const double sigma = (d.tail(k) / lnorm - factor * lambda.tail(k) / lnorm).norm() - r0;
  return sigma > 0.0 ? 1.0 / sigma : std::numeric_limits<double>::infinity();
}

// Nesterov-Todd scaling W = eta * [w0 w1^T; w1 I + w1 w1^T / (1 + w0)] with
// W z = W^{-1} s = lambda.
struct NtScaling {
  double eta = 1.0;
  VectorXd w;

  VectorXd apply(const Eigen::Ref<const VectorXd>& v) const {
    const auto k = w.size() - 1;
    VectorXd out(v.size());
    const double t = w.tail(k).dot(v.tail(k));
    out(0) = w(0) * v(0) + t;
    out.tail(k) = v.tail(k) + (v(0) + t / (1.0 + w(0))) * w.tail(k);
    return eta * out;
  }

  VectorXd apply_inverse(const Eigen::Ref<const VectorXd>& v) const {
    const auto k = w.size() - 1;
    VectorXd out(v.size());
    const double t = w.tail(k).dot(v.tail(k));
    out(0) = w(0) * v(0) - t;
    out.tail(k) = v.tail(k) + (-v(0) + t / (1.0 + w(0))) * w.tail(k);
    return out / eta;
  }

  // W^{-1} applied to every column of a dense block of rows.
  MatrixXd apply_inverse_rows(const Eigen::Ref<const MatrixXd>& rows) const {
    const auto k = w.size() - 1;
    MatrixXd out(rows.rows(), rows.cols());
    const Eigen::RowVectorXd t = w.tail(k).transpose() * rows.bottomRows(k);
    out.row(0) = w(0) * rows.row(0) - t;
    out.bottomRows(k) =
        rows.bottomRows(k) + w.tail(k) * (-rows.row(0) + t / (1.0 + w(0)));
    return out / eta;
  }
};

NtScaling nt_scaling(const Eigen::Ref<const VectorXd>& s, const Eigen::Ref<const VectorXd>& z) {
  const auto k = s.size() - 1;
  const double sr = soc_residual(s);
  const double zr = soc_residual(z);
  const VectorXd sb = s / sr;
  const VectorXd zb = z / zr;
  const double gamma = std::sqrt((1.0 + sb.dot(zb)) / 2.0);
  NtScaling W;
  W.w.resize(s.size());
  W.w(0) = (sb(0) + zb(0)) / (2.0 * gamma);
  W.w.tail(k) = (sb.tail(k) - zb.tail(k)) / (2.0 * gamma);
  W.eta = std::sqrt(sr / zr);
  return W;
}

// Pushes u into the interior of every cone: u + (1 + alpha) e if needed.
void shift_interior(VectorXd& u, const std::vector<Block>& blocks) {
  double alpha = -std::numeric_limits<double>::infinity();
  for (const auto& bl : blocks)
    alpha = std::max(alpha, -soc_min_eig(u.segment(bl.offset, bl.dim)));
  if (blocks.empty()) return;
  if (alpha >= 0.0) {
    for (const auto& bl : blocks) u(bl.offset) += 1.0 + alpha;
  }
}

double cone_violation(const VectorXd& u, const std::vector<Block>& blocks) {
  double worst = 0.0;
  for (const auto& bl : blocks) worst = std::max(worst, -soc_min_eig(u.segment(bl.offset, bl.dim)));
  return worst;
}

double inf_norm(const VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

// Relative KKT solve error above which the normal-equations path is abandoned.
constexpr double kExpandedSwitch = 1e-10;

// ---- the interior point method ------------------------------------------

class Ipm {
 public:
  Ipm(StandardForm sf, const SolverOptions& opts) : sf_(std::move(sf)), opts_(opts) {}

  ConeSolution run();

 private:
  void equilibrate();
  void compute_scaling();
  bool factor();
  // Solves [0 A^T G^T; A 0 0; G 0 -V] (dx, dy, dz) = (r1, r2, r3), V = W^2.
  void solve_kkt(const VectorXd& r1, const VectorXd& r2, const VectorXd& r3, VectorXd& dx,
                 VectorXd& dy, VectorXd& dz) const;
  void solve_reduced(const VectorXd& r1, const VectorXd& r2, const VectorXd& r3, VectorXd& dx,
                     VectorXd& dy, VectorXd& dz) const;
  void solve_expanded(const VectorXd& r1, const VectorXd& r2, const VectorXd& r3, VectorXd& dx,
                      VectorXd& dy, VectorXd& dz) const;
  void factor_expanded() const;
  double kkt_error(const VectorXd& r1, const VectorXd& r2, const VectorXd& r3, const VectorXd& dx,
                   const VectorXd& dy, const VectorXd& dz) const;
  VectorXd apply_W(const VectorXd& v) const;
  VectorXd apply_Winv(const VectorXd& v) const;
  VectorXd jordan_product_all(const VectorXd& u, const VectorXd& v) const;
  VectorXd jordan_solve_all(const VectorXd& l, const VectorXd& d) const;
  double max_step_all(const VectorXd& l, const VectorXd& d) const;
  void initialize();
  void fill_solution(ConeSolution& sol, bool scale_by_tau) const;

  StandardForm sf_;   // equilibrated data
  StandardForm raw_;  // original data, for reporting
  SolverOptions opts_;
  VectorXd D_, E_, F_;  // column, equality-row, cone-row scalings

  VectorXd x_, y_, z_, s_;
  double tau_ = 1.0, kappa_ = 1.0;
  std::vector<NtScaling> W_;
  VectorXd lambda_;
  MatrixXd kkt_;
  Eigen::PartialPivLU<MatrixXd> lu_;
  // Unreduced system [dI A^T G^T; A -dI 0; G 0 -V-dI], used once the
  // normal-equations solve stops reaching the refinement target.
  mutable bool use_expanded_ = false;
  mutable bool expanded_ready_ = false;
  mutable Eigen::PartialPivLU<MatrixXd> lu_expanded_;
};

void Ipm::equilibrate() {
  const int n = sf_.n, p = sf_.p;
  D_ = VectorXd::Ones(n);
  E_ = VectorXd::Ones(p);
  F_ = VectorXd::Ones(sf_.m);
  if (!opts_.equilibrate) return;
  auto clamp = [](double v) { return std::clamp(v, 1e-4, 1e4); };
  for (int pass = 0; pass < 10; ++pass) {
    VectorXd dcol(n);
    for (int j = 0; j < n; ++j) {
      double cn = 0.0;
      if (p) cn = sf_.A.col(j).cwiseAbs().maxCoeff();
      if (sf_.m) cn = std::max(cn, sf_.G.col(j).cwiseAbs().maxCoeff());
      dcol(j) = cn > 0.0 ? 1.0 / std::sqrt(cn) : 1.0;
    }
    VectorXd erow(p);
    for (int i = 0; i < p; ++i) {
      const double rn = sf_.A.row(i).cwiseAbs().maxCoeff();
      erow(i) = rn > 0.0 ? 1.0 / std::sqrt(rn) : 1.0;
    }
    VectorXd frow(sf_.m);
    for (const auto& bl : sf_.blocks) {
      const double bn = sf_.G.middleRows(bl.offset, bl.dim).cwiseAbs().maxCoeff();
      frow.segment(bl.offset, bl.dim).setConstant(bn > 0.0 ? 1.0 / std::sqrt(bn) : 1.0);
    }
    for (int j = 0; j < n; ++j) dcol(j) = clamp(D_(j) * dcol(j)) / D_(j);
    for (int i = 0; i < p; ++i) erow(i) = clamp(E_(i) * erow(i)) / E_(i);
    for (int r = 0; r < sf_.m; ++r) frow(r) = clamp(F_(r) * frow(r)) / F_(r);
    D_ = D_.cwiseProduct(dcol);
    E_ = E_.cwiseProduct(erow);
    F_ = F_.cwiseProduct(frow);
    sf_.A = erow.asDiagonal() * sf_.A * dcol.asDiagonal();
    sf_.G = frow.asDiagonal() * sf_.G * dcol.asDiagonal();
  }
  sf_.c = D_.cwiseProduct(raw_.c);
  sf_.b = E_.cwiseProduct(raw_.b);
  sf_.h = F_.cwiseProduct(raw_.h);
}

VectorXd Ipm::apply_W(const VectorXd& v) const {
  VectorXd out(v.size());
  for (std::size_t i = 0; i < W_.size(); ++i) {
    const auto& bl = sf_.blocks[i];
    out.segment(bl.offset, bl.dim) = W_[i].apply(v.segment(bl.offset, bl.dim));
  }
  return out;
}

VectorXd Ipm::apply_Winv(const VectorXd& v) const {
  VectorXd out(v.size());
  for (std::size_t i = 0; i < W_.size(); ++i) {
    const auto& bl = sf_.blocks[i];
    out.segment(bl.offset, bl.dim) = W_[i].apply_inverse(v.segment(bl.offset, bl.dim));
  }
  return out;
}

VectorXd Ipm::jordan_product_all(const VectorXd& u, const VectorXd& v) const {
  VectorXd out(u.size());
  for (const auto& bl : sf_.blocks)
    out.segment(bl.offset, bl.dim) =
        jordan_product(u.segment(bl.offset, bl.dim), v.segment(bl.offset, bl.dim));
  return out;
}

VectorXd Ipm::jordan_solve_all(const VectorXd& l, const VectorXd& d) const {
  VectorXd out(l.size());
  for (const auto& bl : sf_.blocks)
    out.segment(bl.offset, bl.dim) =
        jordan_solve(l.segment(bl.offset, bl.dim), d.segment(bl.offset, bl.dim));
  return out;
}

double Ipm::max_step_all(const VectorXd& l, const VectorXd& d) const {
  double alpha = std::numeric_limits<double>::infinity();
  for (const auto& bl : sf_.blocks)
    alpha = std::min(alpha, max_step(l.segment(bl.offset, bl.dim), d.segment(bl.offset, bl.dim)));
  return alpha;
}

void Ipm::compute_scaling() {
  W_.clear();
  lambda_.resize(sf_.m);
  for (const auto& bl : sf_.blocks) {
    W_.push_back(nt_scaling(s_.segment(bl.offset, bl.dim), z_.segment(bl.offset, bl.dim)));
    lambda_.segment(bl.offset, bl.dim) = W_.back().apply(z_.segment(bl.offset, bl.dim));
  }
}

bool Ipm::factor() {
  const int n = sf_.n, p = sf_.p;
  kkt_ = MatrixXd::Zero(n + p, n + p);
  auto H = kkt_.topLeftCorner(n, n);
  for (std::size_t i = 0; i < W_.size(); ++i) {
    const auto& bl = sf_.blocks[i];
    const MatrixXd B = W_[i].apply_inverse_rows(sf_.G.middleRows(bl.offset, bl.dim));
    H.noalias() += B.transpose() * B;
  }
  H.diagonal().array() += opts_.static_reg;
  kkt_.topRightCorner(n, p) = sf_.A.transpose();
  kkt_.bottomLeftCorner(p, n) = sf_.A;
  kkt_.bottomRightCorner(p, p).diagonal().setConstant(-opts_.static_reg);
  expanded_ready_ = false;
  if (use_expanded_) {
    factor_expanded();
    return kkt_.allFinite();
  }
  lu_.compute(kkt_);
  return kkt_.allFinite();
}

void Ipm::factor_expanded() const {
  const int n = sf_.n, p = sf_.p, m = sf_.m;
  MatrixXd K = MatrixXd::Zero(n + p + m, n + p + m);
  const double d = opts_.static_reg;
  K.topLeftCorner(n, n).diagonal().setConstant(d);
  K.block(0, n, n, p) = sf_.A.transpose();
  K.block(0, n + p, n, m) = sf_.G.transpose();
  K.block(n, 0, p, n) = sf_.A;
  K.block(n, n, p, p).diagonal().setConstant(-d);
  K.block(n + p, 0, m, n) = sf_.G;
  for (std::size_t i = 0; i < W_.size(); ++i) {
    const auto& bl = sf_.blocks[i];
    MatrixXd V(bl.dim, bl.dim);
    for (int j = 0; j < bl.dim; ++j) {
      VectorXd e = VectorXd::Zero(bl.dim);
      e(j) = 1.0;
      V.col(j) = W_[i].apply(W_[i].apply(e));
    }
    K.block(n + p + bl.offset, n + p + bl.offset, bl.dim, bl.dim) = -V;
  }
  K.bottomRightCorner(m, m).diagonal().array() -= d;
  lu_expanded_.compute(K);
  expanded_ready_ = true;
}

void Ipm::solve_expanded(const VectorXd& r1, const VectorXd& r2, const VectorXd& r3,
                         VectorXd& dx, VectorXd& dy, VectorXd& dz) const {
  const int n = sf_.n, p = sf_.p, m = sf_.m;
  VectorXd rhs(n + p + m);
  rhs << r1, r2, r3;
  const VectorXd sol = lu_expanded_.solve(rhs);
  dx = sol.head(n);
  dy = sol.segment(n, p);
  dz = sol.tail(m);
}

double Ipm::kkt_error(const VectorXd& r1, const VectorXd& r2, const VectorXd& r3,
                      const VectorXd& dx, const VectorXd& dy, const VectorXd& dz) const {
  const double e = std::max({inf_norm(r1 - sf_.A.transpose() * dy - sf_.G.transpose() * dz),
                             inf_norm(r2 - sf_.A * dx),
                             inf_norm(r3 - sf_.G * dx + apply_W(apply_W(dz)))});
  return e / std::max({1.0, inf_norm(r1), inf_norm(r2), inf_norm(r3)});
}

void Ipm::solve_reduced(const VectorXd& r1, const VectorXd& r2, const VectorXd& r3, VectorXd& dx,
                        VectorXd& dy, VectorXd& dz) const {
  const int n = sf_.n, p = sf_.p;
  // dz = V^{-1} (G dx - r3);  (G^T V^{-1} G) dx + A^T dy = r1 + G^T V^{-1} r3
  const VectorXd vr3 = apply_Winv(apply_Winv(r3));
  VectorXd rhs(n + p);
  rhs.head(n) = r1 + sf_.G.transpose() * vr3;
  rhs.tail(p) = r2;
  const VectorXd sol = lu_.solve(rhs);
  dx = sol.head(n);
  dy = sol.tail(p);
  dz = apply_Winv(apply_Winv(sf_.G * dx - r3));
}

void Ipm::solve_kkt(const VectorXd& r1, const VectorXd& r2, const VectorXd& r3, VectorXd& dx,
                    VectorXd& dy, VectorXd& dz) const {
  auto refine = [&](auto&& base) {
    base(r1, r2, r3, dx, dy, dz);
    for (int it = 0; it < opts_.refine_steps; ++it) {
      const VectorXd e1 = r1 - sf_.A.transpose() * dy - sf_.G.transpose() * dz;
      const VectorXd e2 = r2 - sf_.A * dx;
      const VectorXd e3 = r3 - sf_.G * dx + apply_W(apply_W(dz));
      VectorXd cx, cy, cz;
      base(e1, e2, e3, cx, cy, cz);
      dx += cx;
      dy += cy;
      dz += cz;
    }
  };
  if (!use_expanded_) {
    refine([this](auto&&... a) { solve_reduced(a...); });
    if (kkt_error(r1, r2, r3, dx, dy, dz) <= kExpandedSwitch) return;
    use_expanded_ = true;
  }
  if (!expanded_ready_) factor_expanded();
  refine([this](auto&&... a) { solve_expanded(a...); });
}

void Ipm::initialize() {
  const int n = sf_.n, p = sf_.p, m = sf_.m;
  W_.clear();
  for (const auto& bl : sf_.blocks) {
    NtScaling I;
    I.w = VectorXd::Zero(bl.dim);
    I.w(0) = 1.0;
    W_.push_back(I);
  }
  factor();
  VectorXd dx, dy, dz;
  // Primal: minimize ||G x - h|| s.t. A x = b;  s = h - G x.
  solve_kkt(VectorXd::Zero(n), sf_.b, sf_.h, dx, dy, dz);
  x_ = dx;
  s_ = -dz;
  shift_interior(s_, sf_.blocks);
  // Dual: minimize ||z|| s.t. A^T y + G^T z + c = 0.
  solve_kkt(-sf_.c, VectorXd::Zero(p), VectorXd::Zero(m), dx, dy, dz);
  y_ = dy;
  z_ = dz;
  shift_interior(z_, sf_.blocks);
  tau_ = 1.0;
  kappa_ = 1.0;
}

void Ipm::fill_solution(ConeSolution& sol, bool scale_by_tau) const {
  const double t = scale_by_tau ? tau_ : 1.0;
  sol.primal = D_.cwiseProduct(x_) / t;
  sol.dual_eq = E_.cwiseProduct(y_) / t;
  const VectorXd z = F_.cwiseProduct(z_) / t;
  const VectorXd s = s_.cwiseQuotient(F_) / t;
  sol.dual_cone.clear();
  sol.slack.clear();
  for (const auto& bl : raw_.blocks) {
    sol.dual_cone.push_back(z.segment(bl.offset, bl.dim));
    sol.slack.push_back(raw_.h.segment(bl.offset, bl.dim) -
                        raw_.G.middleRows(bl.offset, bl.dim) * sol.primal);
  }
}

ConeSolution Ipm::run() {
  raw_ = sf_;
  equilibrate();
  const double nu = static_cast<double>(sf_.blocks.size());

  ConeSolution sol;
  initialize();

  const double bnorm = inf_norm(raw_.b), hnorm = inf_norm(raw_.h), cnorm = inf_norm(raw_.c);
  int stalls = 0;
  // Best iterate by max(pres, dres, gap); returned when the method stops early.
  ConeSolution best;
  double best_merit = std::numeric_limits<double>::infinity();

  for (int iter = 0;; ++iter) {
    sol.iterations = iter;
    // Residuals of the embedding (equilibrated space).
    const VectorXd rx = sf_.A.transpose() * y_ + sf_.G.transpose() * z_ + sf_.c * tau_;
    const VectorXd ry = -sf_.A * x_ + sf_.b * tau_;
    const VectorXd rz = -sf_.G * x_ + sf_.h * tau_ - s_;
    const double rt = -sf_.c.dot(x_) - sf_.b.dot(y_) - sf_.h.dot(z_) - kappa_;
    const double mu = (s_.dot(z_) + tau_ * kappa_) / (nu + 1.0);

    // Convergence in the original space.
    const VectorXd xo = D_.cwiseProduct(x_);
    const VectorXd yo = E_.cwiseProduct(y_);
    const VectorXd zo = F_.cwiseProduct(z_);
    const VectorXd so = s_.cwiseQuotient(F_);
    {
      const VectorXd xu = xo / tau_, yu = yo / tau_, zu = zo / tau_, su = so / tau_;
      const double pcost = raw_.c.dot(xu);
      const VectorXd hg = raw_.h - raw_.G * xu;
      const double pres = std::max(
          {inf_norm(raw_.A * xu - raw_.b) / (1.0 + bnorm), inf_norm(su - hg) / (1.0 + hnorm),
           cone_violation(hg, raw_.blocks) / (1.0 + hnorm)});
      const double dres =
          inf_norm(raw_.c + raw_.A.transpose() * yu + raw_.G.transpose() * zu) / (1.0 + cnorm);
      const double gap = std::abs(su.dot(zu)) / std::max(1.0, std::abs(pcost + raw_.c0));
      sol.kkt = {pres, dres, gap};
      if (opts_.verbose)
        std::fprintf(stderr, "ipm %3d pres %.2e dres %.2e gap %.2e tau %.2e kappa %.2e\n", iter,
                     pres, dres, gap, tau_, kappa_);
      if (pres <= opts_.feas_tol && dres <= opts_.feas_tol && gap <= opts_.gap_tol) {
        sol.status = SolveStatus::Optimal;
        fill_solution(sol, true);
        sol.objective_value = raw_.c.dot(sol.primal) + raw_.c0;
        return sol;
      }
      const double merit = std::max({pres, dres, gap});
      if (merit < best_merit) {
        best_merit = merit;
        best = sol;
        fill_solution(best, true);
        best.objective_value = raw_.c.dot(best.primal) + raw_.c0;
      }
    }
    {
      const double btyhz = raw_.b.dot(yo) + raw_.h.dot(zo);
      if (btyhz < 0.0 &&
          inf_norm(raw_.A.transpose() * yo + raw_.G.transpose() * zo) / -btyhz <= opts_.feas_tol) {
        sol.status = SolveStatus::Infeasible;
        fill_solution(sol, false);
        sol.dual_eq /= -btyhz;
        for (auto& zb : sol.dual_cone) zb /= -btyhz;
        sol.primal.resize(0);
        return sol;
      }
      const double ctx = raw_.c.dot(xo);
      if (ctx < 0.0 &&
          std::max(inf_norm(raw_.A * xo), inf_norm(raw_.G * xo + so)) / -ctx <= opts_.feas_tol) {
        sol.status = SolveStatus::Unbounded;
        fill_solution(sol, false);
        sol.primal /= -ctx;
        return sol;
      }
    }
    if (iter >= opts_.max_iters) {
      best.status = SolveStatus::MaxIterations;
      return best;
    }

    compute_scaling();
    if (!factor() || !lambda_.allFinite()) break;

    VectorXd x1, y1, z1;
    solve_kkt(-sf_.c, sf_.b, sf_.h, x1, y1, z1);
    const double denom_base = -sf_.c.dot(x1) - sf_.b.dot(y1) - sf_.h.dot(z1);

    struct Direction {
      VectorXd dx, dy, dz, ds, ds_scaled, dz_scaled;
      double dtau = 0.0, dkappa = 0.0;
    };
    auto direction = [&](double scale, const VectorXd& ds, double dk) {
      Direction d;
      const VectorXd lds = jordan_solve_all(lambda_, ds);
      VectorXd x2, y2, z2;
      solve_kkt(-scale * rx, scale * ry, scale * rz - apply_W(lds), x2, y2, z2);
      const double dt_rhs = -scale * rt;
      d.dtau = (dt_rhs + dk / tau_ + sf_.c.dot(x2) + sf_.b.dot(y2) + sf_.h.dot(z2)) /
               (kappa_ / tau_ + denom_base);
      d.dx = x2 + d.dtau * x1;
      d.dy = y2 + d.dtau * y1;
      d.dz = z2 + d.dtau * z1;
      d.dz_scaled = apply_W(d.dz);
      // ds from the linear row itself; the complementarity form
      // lds - W dz loses the row residual when W is badly conditioned.
      d.ds = -sf_.G * d.dx + sf_.h * d.dtau + scale * rz;
      d.ds_scaled = apply_Winv(d.ds);
      d.dkappa = (dk - kappa_ * d.dtau) / tau_;
      return d;
    };
    auto step_length = [&](const Direction& d) {
      double a = std::min(max_step_all(lambda_, d.ds_scaled), max_step_all(lambda_, d.dz_scaled));
      if (d.dtau < 0.0) a = std::min(a, -tau_ / d.dtau);
      if (d.dkappa < 0.0) a = std::min(a, -kappa_ / d.dkappa);
      return a;
    };

    // Predictor. Note the sign convention: the linear rows target -r.
    const VectorXd ll = jordan_product_all(lambda_, lambda_);
    const Direction aff = direction(1.0, -ll, -tau_ * kappa_);
    const double alpha_aff = std::min(1.0, step_length(aff));
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);

    // Corrector.
    VectorXd ds = -ll - jordan_product_all(aff.ds_scaled, aff.dz_scaled);
    for (const auto& bl : sf_.blocks) ds(bl.offset) += sigma * mu;
    const double dk = -tau_ * kappa_ - aff.dtau * aff.dkappa + sigma * mu;
    const Direction dir = direction(1.0 - sigma, ds, dk);
    const double alpha = std::min(1.0, 0.99 * step_length(dir));

    if (!std::isfinite(alpha) || !dir.dx.allFinite() || !dir.dz.allFinite()) break;
    if (alpha < 1e-10) {
      if (++stalls >= 3) break;
    } else {
      stalls = 0;
    }

    x_ += alpha * dir.dx;
    y_ += alpha * dir.dy;
    z_ += alpha * dir.dz;
    s_ += alpha * dir.ds;
    tau_ += alpha * dir.dtau;
    kappa_ += alpha * dir.dkappa;
  }

  best.status = SolveStatus::NumericalFailure;
  return best;
}

}  // namespace

ConeSolution solve(const ConeProgram& program, const SolverOptions& options) {
  program.validate();
  Ipm ipm(to_standard_form(program), options);
  ConeSolution sol = ipm.run();
  if (program.sense() == Sense::Maximize &&
      (sol.status == SolveStatus::Optimal || sol.status == SolveStatus::MaxIterations ||
       sol.status == SolveStatus::NumericalFailure))
    sol.objective_value = -sol.objective_value;
  return sol;
}

}  // namespace wsrm::conic
