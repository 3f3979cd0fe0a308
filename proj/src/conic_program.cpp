#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "wsrm/conic.hpp"
#include "wsrm/error.hpp"

namespace wsrm::conic {

AffineExpr& AffineExpr::operator+=(const AffineExpr& o) {
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  constant += o.constant;
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& o) {
  for (const auto& [j, v] : o.terms) terms.emplace_back(j, -v);
  constant -= o.constant;
  return *this;
}

AffineExpr& AffineExpr::operator*=(double s) {
  for (auto& t : terms) t.second *= s;
  constant *= s;
  return *this;
}

double AffineExpr::eval(const Eigen::VectorXd& y) const {
  double v = constant;
  for (const auto& [j, c] : terms) v += c * y(j);
  return v;
}

AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
AffineExpr operator*(double s, AffineExpr a) { return a *= s; }

int ConeProgram::add_variable() { return num_vars_++; }

int ConeProgram::add_variables(int count) {
  const int first = num_vars_;
  num_vars_ += count;
  return first;
}

void ConeProgram::set_objective(Sense sense, const AffineExpr& objective) {
  check_terms(objective);
  sense_ = sense;
  objective_ = objective;
}

int ConeProgram::add_equality(const AffineExpr& expr) {
  check_terms(expr);
  equalities_.push_back(expr);
  return static_cast<int>(equalities_.size()) - 1;
}

int ConeProgram::add_soc(std::vector<AffineExpr> lhs, AffineExpr rhs) {
  SocConstraint cone;
  cone.rows.reserve(lhs.size() + 1);
  cone.rows.push_back(std::move(rhs));
  for (auto& e : lhs) cone.rows.push_back(std::move(e));
  for (const auto& e : cone.rows) check_terms(e);
  cones_.push_back(std::move(cone));
  return static_cast<int>(cones_.size()) - 1;
}

int ConeProgram::add_nonneg(const AffineExpr& expr) { return add_soc({}, expr); }

int ConeProgram::cone_rows() const {
  int m = 0;
  for (const auto& c : cones_) m += c.dim();
  return m;
}

void ConeProgram::check_terms(const AffineExpr& e) const {
  for (const auto& [j, v] : e.terms) {
    if (j < 0 || j >= num_vars_) {
      std::ostringstream os;
      os << "affine term references variable " << j << " but the program has " << num_vars_;
      throw InvalidArgument(os.str());
    }
    if (!std::isfinite(v)) throw InvalidArgument("affine coefficient is not finite");
  }
  if (!std::isfinite(e.constant)) throw InvalidArgument("affine constant is not finite");
}

void ConeProgram::validate() const {
  check_terms(objective_);
  for (const auto& e : equalities_) check_terms(e);
  for (const auto& c : cones_) {
    if (c.dim() < 1) throw InvalidArgument("cone of dimension 0");
    for (const auto& e : c.rows) check_terms(e);
  }
}

double ConeProgram::max_violation(const Eigen::VectorXd& y) const {
  double worst = 0.0;
  for (const auto& e : equalities_) worst = std::max(worst, std::abs(e.eval(y)));
  for (const auto& c : cones_) {
    double lhs2 = 0.0;
    for (std::size_t r = 1; r < c.rows.size(); ++r) {
      const double v = c.rows[r].eval(y);
      lhs2 += v * v;
    }
    worst = std::max(worst, std::sqrt(lhs2) - c.rows[0].eval(y));
  }
  return worst;
}

// Layout (one record per line, '#' starts a comment line):
//
//   WSRM-CONE 1
//   vars <n>
//   sense <min|max>
//   eq_rows <p>
//   cone_dims <count> <d_1> ... <d_count>
//   c <j> <value>          objective coefficient
//   c0 <value>             objective constant
//   A <i> <j> <value>      equality row i:  sum_j A_ij y_j + b_i = 0
//   b <i> <value>
//   F <r> <j> <value>      cone row r (global index), value  sum_j F_rj y_j + g_r
//   g <r> <value>
//   end
//
// Cone k owns rows [sum_{l<k} d_l, sum_{l<=k} d_l); its first row is the
// right-hand side. Repeated (i, j) entries add.
void ConeProgram::write(std::ostream& os) const {
  const auto old_precision = os.precision();
  os << std::setprecision(17);
  os << "WSRM-CONE 1\n";
  os << "vars " << num_vars_ << "\n";
  os << "sense " << (sense_ == Sense::Maximize ? "max" : "min") << "\n";
  os << "eq_rows " << equalities_.size() << "\n";
  os << "cone_dims " << cones_.size();
  for (const auto& c : cones_) os << " " << c.dim();
  os << "\n";
  for (const auto& [j, v] : objective_.terms) os << "c " << j << " " << v << "\n";
  if (objective_.constant != 0.0) os << "c0 " << objective_.constant << "\n";
  for (std::size_t i = 0; i < equalities_.size(); ++i) {
    for (const auto& [j, v] : equalities_[i].terms) os << "A " << i << " " << j << " " << v << "\n";
    if (equalities_[i].constant != 0.0) os << "b " << i << " " << equalities_[i].constant << "\n";
  }
  std::size_t r = 0;
  for (const auto& c : cones_) {
    for (const auto& e : c.rows) {
      for (const auto& [j, v] : e.terms) os << "F " << r << " " << j << " " << v << "\n";
      if (e.constant != 0.0) os << "g " << r << " " << e.constant << "\n";
      ++r;
    }
  }
  os << "end\n";
  os.precision(old_precision);
}

namespace {

[[noreturn]] void parse_error(int line, const std::string& what) {
  std::ostringstream os;
  os << "cone program line " << line << ": " << what;
  throw InvalidArgument(os.str());
}

}  // namespace

ConeProgram ConeProgram::read(std::istream& is) {
  ConeProgram prog;
  std::string line;
  int lineno = 0;
  bool header = false;
  bool ended = false;
  std::vector<std::pair<int, int>> cone_row;  // global row -> (cone, local row)

  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (!header) {
      int version = 0;
      if (key != "WSRM-CONE" || !(ls >> version) || version != 1)
        parse_error(lineno, "expected header 'WSRM-CONE 1'");
      header = true;
      continue;
    }
    auto need = [&](auto& v) {
      if (!(ls >> v)) parse_error(lineno, "malformed '" + key + "' record");
    };
    auto check_var = [&](int j) {
      if (j < 0 || j >= prog.num_vars_) parse_error(lineno, "variable index out of range");
    };
    if (key == "vars") {
      need(prog.num_vars_);
      if (prog.num_vars_ < 0) parse_error(lineno, "negative variable count");
    } else if (key == "sense") {
      std::string s;
      need(s);
      if (s == "max")
        prog.sense_ = Sense::Maximize;
      else if (s == "min")
        prog.sense_ = Sense::Minimize;
      else
        parse_error(lineno, "sense must be min or max");
    } else if (key == "eq_rows") {
      std::size_t p = 0;
      need(p);
      prog.equalities_.assign(p, AffineExpr{});
    } else if (key == "cone_dims") {
      std::size_t count = 0;
      need(count);
      prog.cones_.assign(count, SocConstraint{});
      for (std::size_t k = 0; k < count; ++k) {
        int d = 0;
        need(d);
        if (d < 1) parse_error(lineno, "cone dimension must be >= 1");
        prog.cones_[k].rows.assign(static_cast<std::size_t>(d), AffineExpr{});
        for (int l = 0; l < d; ++l) cone_row.emplace_back(static_cast<int>(k), l);
      }
    } else if (key == "c") {
      int j = 0;
      double v = 0;
      need(j);
      need(v);
      check_var(j);
      prog.objective_.add(j, v);
    } else if (key == "c0") {
      need(prog.objective_.constant);
    } else if (key == "A" || key == "b") {
      std::size_t i = 0;
      need(i);
      if (i >= prog.equalities_.size()) parse_error(lineno, "equality row out of range");
      if (key == "A") {
        int j = 0;
        double v = 0;
        need(j);
        need(v);
        check_var(j);
        prog.equalities_[i].add(j, v);
      } else {
        need(prog.equalities_[i].constant);
      }
    } else if (key == "F" || key == "g") {
      std::size_t r = 0;
      need(r);
      if (r >= cone_row.size()) parse_error(lineno, "cone row out of range");
      auto& e = prog.cones_[static_cast<std::size_t>(cone_row[r].first)]
                    .rows[static_cast<std::size_t>(cone_row[r].second)];
      if (key == "F") {
        int j = 0;
        double v = 0;
        need(j);
        need(v);
        check_var(j);
        e.add(j, v);
      } else {
        need(e.constant);
      }
    } else if (key == "end") {
      ended = true;
      break;
    } else {
      parse_error(lineno, "unknown record '" + key + "'");
    }
  }
  if (!header) throw InvalidArgument("cone program: missing header");
  if (!ended) throw InvalidArgument("cone program: missing 'end'");
  return prog;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::Infeasible:
      return "Infeasible";
    case SolveStatus::Unbounded:
      return "Unbounded";
    case SolveStatus::MaxIterations:
      return "MaxIterations";
    case SolveStatus::NumericalFailure:
      return "NumericalFailure";
  }
  return "Unknown";
}

int add_hyperbolic(ConeProgram& program, const AffineExpr& u, const AffineExpr& v,
                   const AffineExpr& z) {
  return program.add_soc({2.0 * z, u - v}, u + v);
}

int add_hyperbolic(ConeProgram& program, int u, int v, int z) {
  return add_hyperbolic(program, AffineExpr::var(u), AffineExpr::var(v), AffineExpr::var(z));
}

GeometricMeanTree add_geometric_mean_tree(ConeProgram& program,
                                          const std::vector<AffineExpr>& leaves) {
  if (leaves.empty()) throw InvalidArgument("geometric mean tree needs at least one leaf");
  GeometricMeanTree tree;
  std::size_t width = 1;
  while (width < leaves.size()) width *= 2;
  tree.padded_leaves = static_cast<int>(width);

  if (leaves.size() == 1) {
    const auto& leaf = leaves.front();
    if (leaf.terms.size() == 1 && leaf.terms[0].second == 1.0 && leaf.constant == 0.0) {
      tree.root = leaf.terms[0].first;
    } else {
      tree.root = program.add_variable();
      program.add_equality(leaf - AffineExpr::var(tree.root));
      tree.tree_vars.push_back(tree.root);
    }
    return tree;
  }

  std::vector<AffineExpr> level(leaves);
  level.resize(width, AffineExpr(1.0));
  while (level.size() > 1) {
    std::vector<AffineExpr> next;
    next.reserve(level.size() / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      const int z = program.add_variable();
      tree.tree_vars.push_back(z);
      tree.cones.push_back(add_hyperbolic(program, level[i], level[i + 1], AffineExpr::var(z)));
      next.push_back(AffineExpr::var(z));
    }
    level = std::move(next);
  }
  tree.root = tree.tree_vars.back();
  return tree;
}

GeometricMeanTree add_geometric_mean_tree(ConeProgram& program, const std::vector<int>& leaves) {
  std::vector<AffineExpr> exprs;
  exprs.reserve(leaves.size());
  for (int j : leaves) exprs.push_back(AffineExpr::var(j));
  return add_geometric_mean_tree(program, exprs);
}

}  // namespace wsrm::conic
