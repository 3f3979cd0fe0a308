#pragma once

// Hand-checkable SOCPs with independently derived optimal values.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "wsrm/conic.hpp"

namespace wsrm::testing {

struct LibraryProblem {
  std::string name;
  conic::ConeProgram program;
  conic::SolveStatus expected_status = conic::SolveStatus::Optimal;
  double expected_objective = 0.0;
};

inline std::vector<LibraryProblem> cone_library() {
  using conic::AffineExpr;
  using conic::ConeProgram;
  using conic::Sense;
  using conic::SolveStatus;
  auto v = [](int j, double c = 1.0) { return AffineExpr::var(j, c); };
  std::vector<LibraryProblem> lib;

  {  // max y s.t. ||y|| <= 1
    ConeProgram p;
    const int y = p.add_variable();
    p.add_soc({v(y)}, 1.0);
    p.set_objective(Sense::Maximize, v(y));
    lib.push_back({"one_dim_cone", p, SolveStatus::Optimal, 1.0});
  }
  {  // min ||y|| s.t. y1 + y2 = 2  -> sqrt(2)
    ConeProgram p;
    const int y = p.add_variables(2);
    const int t = p.add_variable();
    p.add_equality(v(y) + v(y + 1) - 2.0);
    p.add_soc({v(y), v(y + 1)}, v(t));
    p.set_objective(Sense::Minimize, v(t));
    lib.push_back({"least_norm_2d", p, SolveStatus::Optimal, std::sqrt(2.0)});
  }
  {  // min ||y|| s.t. A y = b, 2x3; value from the pseudo-inverse
    Eigen::MatrixXd A(2, 3);
    A << 1, 2, 3, -1, 0, 4;
    Eigen::Vector2d b(1, 2);
    const Eigen::VectorXd ystar = A.completeOrthogonalDecomposition().pseudoInverse() * b;
    ConeProgram p;
    const int y = p.add_variables(3);
    const int t = p.add_variable();
    for (int i = 0; i < 2; ++i) {
      AffineExpr row(-b(i));
      for (int j = 0; j < 3; ++j) row.add(y + j, A(i, j));
      p.add_equality(row);
    }
    p.add_soc({v(y), v(y + 1), v(y + 2)}, v(t));
    p.set_objective(Sense::Minimize, v(t));
    lib.push_back({"least_norm_pinv", p, SolveStatus::Optimal, ystar.norm()});
  }
  {  // y1 = 1 and y1 = 2
    ConeProgram p;
    const int y = p.add_variable();
    p.add_equality(v(y) - 1.0);
    p.add_equality(v(y) - 2.0);
    p.set_objective(Sense::Minimize, v(y));
    lib.push_back({"conflicting_equalities", p, SolveStatus::Infeasible, 0.0});
  }
  {  // LP: max x1 + x2, x1 + 2x2 <= 4, 3x1 + x2 <= 6, x >= 0 -> 14/5
    ConeProgram p;
    const int x = p.add_variables(2);
    p.add_nonneg(4.0 - v(x) - v(x + 1, 2.0));
    p.add_nonneg(6.0 - v(x, 3.0) - v(x + 1));
    p.add_nonneg(v(x));
    p.add_nonneg(v(x + 1));
    p.set_objective(Sense::Maximize, v(x) + v(x + 1));
    lib.push_back({"lp_vertex", p, SolveStatus::Optimal, 14.0 / 5.0});
  }
  {  // LP: min x1 + 2x2 + 3x3 on the simplex -> 1
    ConeProgram p;
    const int x = p.add_variables(3);
    p.add_equality(v(x) + v(x + 1) + v(x + 2) - 1.0);
    for (int j = 0; j < 3; ++j) p.add_nonneg(v(x + j));
    p.set_objective(Sense::Minimize, v(x) + v(x + 1, 2.0) + v(x + 2, 3.0));
    lib.push_back({"lp_simplex", p, SolveStatus::Optimal, 1.0});
  }
  {  // min x s.t. x >= 3
    ConeProgram p;
    const int x = p.add_variable();
    p.add_nonneg(v(x) - 3.0);
    p.set_objective(Sense::Minimize, v(x));
    lib.push_back({"lp_bound", p, SolveStatus::Optimal, 3.0});
  }
  {  // max y s.t. y >= 0
    ConeProgram p;
    const int y = p.add_variable();
    p.add_nonneg(v(y));
    p.set_objective(Sense::Maximize, v(y));
    lib.push_back({"lp_unbounded", p, SolveStatus::Unbounded, 0.0});
  }
  {  // projection of (3,4) on the unit ball: distance 4
    ConeProgram p;
    const int y = p.add_variables(2);
    const int t = p.add_variable();
    p.add_soc({v(y), v(y + 1)}, 1.0);
    p.add_soc({v(y) - 3.0, v(y + 1) - 4.0}, v(t));
    p.set_objective(Sense::Minimize, v(t));
    lib.push_back({"ball_projection", p, SolveStatus::Optimal, 4.0});
  }
  {  // max c^T y on the ball of radius 2, c = (1,2,2): 2 * ||c|| = 6
    ConeProgram p;
    const int y = p.add_variables(3);
    p.add_soc({v(y), v(y + 1), v(y + 2)}, 2.0);
    p.set_objective(Sense::Maximize, v(y) + v(y + 1, 2.0) + v(y + 2, 2.0));
    lib.push_back({"linear_over_ball", p, SolveStatus::Optimal, 6.0});
  }
  {  // distance from (1,3) to the halfplane y1 + y2 >= 5: 1/sqrt(2)
    ConeProgram p;
    const int y = p.add_variables(2);
    const int t = p.add_variable();
    p.add_nonneg(v(y) + v(y + 1) - 5.0);
    p.add_soc({v(y) - 1.0, v(y + 1) - 3.0}, v(t));
    p.set_objective(Sense::Minimize, v(t));
    lib.push_back({"halfplane_distance", p, SolveStatus::Optimal, 1.0 / std::sqrt(2.0)});
  }
  {  // min (y-2)^2 s.t. y <= 1 via t * 1 >= (y-2)^2 -> 1
    ConeProgram p;
    const int y = p.add_variable();
    const int t = p.add_variable();
    p.add_nonneg(1.0 - v(y));
    conic::add_hyperbolic(p, v(t), 1.0, v(y) - 2.0);
    p.set_objective(Sense::Minimize, v(t));
    lib.push_back({"constrained_square", p, SolveStatus::Optimal, 1.0});
  }
  {  // min x + y s.t. xy >= 1 -> 2
    ConeProgram p;
    const int x = p.add_variable();
    const int y = p.add_variable();
    conic::add_hyperbolic(p, v(x), v(y), 1.0);
    p.set_objective(Sense::Minimize, v(x) + v(y));
    lib.push_back({"rotated_cone", p, SolveStatus::Optimal, 2.0});
  }
  {  // max sqrt(xy) s.t. x + y <= 2 -> 1
    ConeProgram p;
    const int x = p.add_variable();
    const int y = p.add_variable();
    const int z = p.add_variable();
    conic::add_hyperbolic(p, x, y, z);
    p.add_nonneg(2.0 - v(x) - v(y));
    p.set_objective(Sense::Maximize, v(z));
    lib.push_back({"geometric_mean_pair", p, SolveStatus::Optimal, 1.0});
  }
  {  // fixed leaves (8, 2, 1), padded to 4: root = 16^(1/4) = 2
    ConeProgram p;
    const int t = p.add_variables(3);
    p.add_equality(v(t) - 8.0);
    p.add_equality(v(t + 1) - 2.0);
    p.add_equality(v(t + 2) - 1.0);
    const auto tree = conic::add_geometric_mean_tree(p, std::vector<int>{t, t + 1, t + 2});
    p.set_objective(Sense::Maximize, v(tree.root));
    lib.push_back({"geomean_tree_k3", p, SolveStatus::Optimal, 2.0});
  }
  {  // max (t1 t2 t3 t4)^(1/4) s.t. sum t = 4 -> 1
    ConeProgram p;
    const int t = p.add_variables(4);
    p.add_nonneg(4.0 - v(t) - v(t + 1) - v(t + 2) - v(t + 3));
    const auto tree = conic::add_geometric_mean_tree(p, std::vector<int>{t, t + 1, t + 2, t + 3});
    p.set_objective(Sense::Maximize, v(tree.root));
    lib.push_back({"geomean_tree_amgm", p, SolveStatus::Optimal, 1.0});
  }
  {  // max y1 + y2 s.t. ||y|| <= 1, y1 <= 1/2 -> 1/2 + sqrt(3)/2
    ConeProgram p;
    const int y = p.add_variables(2);
    p.add_soc({v(y), v(y + 1)}, 1.0);
    p.add_nonneg(0.5 - v(y));
    p.set_objective(Sense::Maximize, v(y) + v(y + 1));
    lib.push_back({"ball_and_halfplane", p, SolveStatus::Optimal, 0.5 + std::sqrt(3.0) / 2.0});
  }
  {  // ||y|| <= 1 and y1 >= 2
    ConeProgram p;
    const int y = p.add_variables(2);
    p.add_soc({v(y), v(y + 1)}, 1.0);
    p.add_nonneg(v(y) - 2.0);
    p.set_objective(Sense::Minimize, v(y + 1));
    lib.push_back({"infeasible_cone", p, SolveStatus::Infeasible, 0.0});
  }
  {  // min -y1 s.t. |y2| <= y1
    ConeProgram p;
    const int y = p.add_variables(2);
    p.add_soc({v(y + 1)}, v(y));
    p.set_objective(Sense::Minimize, -1.0 * v(y));
    lib.push_back({"cone_unbounded", p, SolveStatus::Unbounded, 0.0});
  }
  {  // max t s.t. t <= (x+1)^... : t^2 <= x + 1 with x <= 3 -> t = 2
    ConeProgram p;
    const int t = p.add_variable();
    const int x = p.add_variable();
    conic::add_hyperbolic(p, v(x) + 1.0, 1.0, v(t));
    p.add_nonneg(3.0 - v(x));
    p.set_objective(Sense::Maximize, v(t));
    lib.push_back({"square_root_bound", p, SolveStatus::Optimal, 2.0});
  }
  {  // LP with free variable: min |y - 5| via y - 5 <= t, 5 - y <= t, y <= 2 -> 3
    ConeProgram p;
    const int y = p.add_variable();
    const int t = p.add_variable();
    p.add_nonneg(v(t) - v(y) + 5.0);
    p.add_nonneg(v(t) + v(y) - 5.0);
    p.add_nonneg(2.0 - v(y));
    p.set_objective(Sense::Minimize, v(t));
    lib.push_back({"absolute_value", p, SolveStatus::Optimal, 3.0});
  }
  {  // scaled ball: max y1 s.t. ||(y1 / 10, 100 y2)|| <= 1 -> 10
    ConeProgram p;
    const int y = p.add_variables(2);
    p.add_soc({v(y, 0.1), v(y + 1, 100.0)}, 1.0);
    p.set_objective(Sense::Maximize, v(y));
    lib.push_back({"badly_scaled_ellipse", p, SolveStatus::Optimal, 10.0});
  }
  {  // min ||(y1, y2)|| + ||(y1 - 4, y2)||: any point on the segment, value 4
    ConeProgram p;
    const int y = p.add_variables(2);
    const int t = p.add_variables(2);
    p.add_soc({v(y), v(y + 1)}, v(t));
    p.add_soc({v(y) - 4.0, v(y + 1)}, v(t + 1));
    p.set_objective(Sense::Minimize, v(t) + v(t + 1));
    lib.push_back({"fermat_two_points", p, SolveStatus::Optimal, 4.0});
  }
  return lib;
}

}  // namespace wsrm::testing
