#include "simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gwi::detail {
namespace {

constexpr double kPivotEps = 1e-11;

}  // namespace

FeasiblePoint find_feasible_point(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol) {
  if (A.rows() != b.size()) throw std::invalid_argument("find_feasible_point: shape mismatch");
  const Eigen::Index m = A.rows();
  const Eigen::Index nv = A.cols();
  const Eigen::Index cols = nv + m;  // structural + artificial

  // Row i of the tableau holds [A_i | e_i | b_i] with b_i >= 0.
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, cols + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = b(i) < 0 ? -1.0 : 1.0;
    t.row(i).head(nv) = s * A.row(i);
    t(i, nv + i) = 1.0;
    t(i, cols) = s * b(i);
  }
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = nv + i;

  // Reduced costs of min sum(artificials); last entry is -objective.
  Eigen::RowVectorXd cost = Eigen::RowVectorXd::Zero(cols + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    cost.head(nv) -= t.row(i).head(nv);
    cost(cols) -= t(i, cols);
  }

  FeasiblePoint out;
  const int max_pivots = 50 * static_cast<int>(cols + m);
  while (out.pivots < max_pivots) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (cost(j) < -kPivotEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    Eigen::Index leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = t(i, enter);
      if (a <= kPivotEps) continue;
      const double ratio = t(i, cols) / a;
      if (ratio < best_ratio - 1e-15 ||
          (std::abs(ratio - best_ratio) <= 1e-15 &&
           basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave < 0) break;  // unbounded direction; cannot happen for phase one

    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    }
    cost -= cost(enter) * t.row(leave);
    basis[static_cast<std::size_t>(leave)] = enter;
    ++out.pivots;
  }

  out.x = Eigen::VectorXd::Zero(nv);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index j = basis[static_cast<std::size_t>(i)];
    if (j < nv) out.x(j) = std::max(0.0, t(i, cols));
  }
  out.infeasibility = -cost(cols);
  out.residual = (A * out.x - b).cwiseAbs().maxCoeff();
  out.feasible = out.residual <= tol;
  return out;
}

}  // namespace gwi::detail
