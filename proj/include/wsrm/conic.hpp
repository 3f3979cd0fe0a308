#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace wsrm::conic {

/// Sparse affine form  sum_j coef_j * y_j + constant.
struct AffineExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  AffineExpr() = default;
  AffineExpr(double c) : constant(c) {}  // NOLINT: constants convert implicitly
  static AffineExpr var(int j, double coef = 1.0) {
    AffineExpr e;
    e.terms.emplace_back(j, coef);
    return e;
  }

  AffineExpr& add(int j, double coef) {
    terms.emplace_back(j, coef);
    return *this;
  }
  AffineExpr& operator+=(const AffineExpr& o);
  AffineExpr& operator-=(const AffineExpr& o);
  AffineExpr& operator*=(double s);

  double eval(const Eigen::VectorXd& y) const;
};

AffineExpr operator+(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a, const AffineExpr& b);
AffineExpr operator*(double s, AffineExpr a);

enum class Sense { Minimize, Maximize };

/// One second-order cone  ||(rows[1], ..., rows[d-1])||_2 <= rows[0].
/// A cone of dimension 1 is the half-line rows[0] >= 0.
struct SocConstraint {
  std::vector<AffineExpr> rows;
  int dim() const { return static_cast<int>(rows.size()); }
};

/// Real SOCP over a free variable vector y:
///
///   optimize  c^T y   (Sense::Maximize or Sense::Minimize)
///   s.t.      a_i^T y + d_i = 0
///             ||F_j y + g_j||_2 <= f_j^T y + e_j
class ConeProgram {
 public:
  int add_variable();
  int add_variables(int count);  // returns index of the first new variable
  int num_vars() const { return num_vars_; }

  void set_objective(Sense sense, const AffineExpr& objective);
  Sense sense() const { return sense_; }
  const AffineExpr& objective() const { return objective_; }

  /// expr == 0. Returns the equality row index.
  int add_equality(const AffineExpr& expr);

  /// ||lhs||_2 <= rhs. Returns the cone index.
  int add_soc(std::vector<AffineExpr> lhs, AffineExpr rhs);

  /// expr >= 0, as a 1-dimensional cone. Returns the cone index.
  int add_nonneg(const AffineExpr& expr);

  const std::vector<AffineExpr>& equalities() const { return equalities_; }
  const std::vector<SocConstraint>& cones() const { return cones_; }

  /// Total cone dimension m.
  int cone_rows() const;

  /// Throws wsrm::InvalidArgument if any term references a missing variable
  /// or a cone is empty.
  void validate() const;

  /// Largest violation at y: |equality| or max(0, ||lhs|| - rhs) over cones.
  double max_violation(const Eigen::VectorXd& y) const;

  /// Sparse-triplet text format, documented in docs/cone_format.md.
  void write(std::ostream& os) const;
  static ConeProgram read(std::istream& is);

 private:
  void check_terms(const AffineExpr& e) const;

  int num_vars_ = 0;
  Sense sense_ = Sense::Minimize;
  AffineExpr objective_;
  std::vector<AffineExpr> equalities_;
  std::vector<SocConstraint> cones_;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIterations, NumericalFailure };

std::string to_string(SolveStatus s);

struct SolverOptions {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iters = 100;
  /// Static KKT regularization and refinement passes.
  double static_reg = 1e-10;
  int refine_steps = 3;
  bool equilibrate = true;
  bool verbose = false;
};

struct KktResiduals {
  /// max(|Ay - b|_inf / (1 + |b|_inf), cone violation / (1 + |h|_inf))
  double primal_res = 0.0;
  /// |c + A^T nu + G^T z|_inf / (1 + |c|_inf), minimization form
  double dual_res = 0.0;
  /// s^T z / max(1, |objective|)
  double gap = 0.0;
};

struct ConeSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  /// y. When Unbounded: an improving ray (c^T y = -1 in minimization form).
  Eigen::VectorXd primal;
  /// Multipliers of the minimization form, stationarity
  ///   c_min + sum_i nu_i grad(eq_i) - sum_j J_j^T z_j = 0
  /// with J_j the Jacobian of cone j's rows. When Infeasible these hold a
  /// Farkas certificate normalized to b^T nu + h^T z = -1.
  Eigen::VectorXd dual_eq;
  std::vector<Eigen::VectorXd> dual_cone;
  std::vector<Eigen::VectorXd> slack;  // cone rows evaluated at y: (rhs, lhs...)
  double objective_value = 0.0;        // in the program's own sense
  KktResiduals kkt;
  int iterations = 0;
};

/// Primal-dual interior point method on the homogeneous self-dual embedding,
/// Nesterov-Todd scaling, Mehrotra predictor-corrector, dense reduced KKT.
///
/// Internally the program is put in the form
///   minimize c^T x  s.t.  A x = b,  G x + s = h,  s in K,
/// with each SOC row block of G, h built from the program's affine rows.
ConeSolution solve(const ConeProgram& program, const SolverOptions& options = {});

/// uv >= z^2, u, v >= 0 as ||(2z, u - v)|| <= u + v. Returns the cone index.
int add_hyperbolic(ConeProgram& program, const AffineExpr& u, const AffineExpr& v,
                   const AffineExpr& z);
int add_hyperbolic(ConeProgram& program, int u, int v, int z);

struct GeometricMeanTree {
  int root = -1;                  // variable index of z^(0)
  std::vector<int> cones;         // hyperbolic cone indices, leaf level first
  std::vector<int> tree_vars;     // internal node variables, leaf level first
  int padded_leaves = 0;          // 2^ceil(log2 K)
};

/// Pads the leaves with constant 1 to the next power of two and chains
/// hyperbolic constraints pairwise up to a single root, so that at any
/// feasible point root <= (prod leaves)^(1/2^q). One leaf yields the leaf
/// variable itself and no constraints.
GeometricMeanTree add_geometric_mean_tree(ConeProgram& program, const std::vector<int>& leaves);

/// Same over affine leaves. With a single non-variable leaf a fresh variable
/// is tied to it by equality.
GeometricMeanTree add_geometric_mean_tree(ConeProgram& program,
                                          const std::vector<AffineExpr>& leaves);

}  // namespace wsrm::conic
