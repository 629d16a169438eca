#pragma once

#include <Eigen/Dense>

namespace gwi::detail {

struct FeasiblePoint {
  bool feasible = false;
  Eigen::VectorXd x;
  // Optimal phase-one objective: the total artificial mass left over.
  double infeasibility = 0.0;
  // max |A x - b| at the returned point.
  double residual = 0.0;
  int pivots = 0;
};

// Searches for x >= 0 with A x = b using a dense phase-one tableau and Bland's
// anti-cycling rule. Redundant equality rows are fine: their artificials stay
// basic at zero.
FeasiblePoint find_feasible_point(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol);

}  // namespace gwi::detail
