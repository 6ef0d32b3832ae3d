#include <Eigen/LU>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

#include "dnet/sampler.h"

namespace dnet {

bool is_row_stochastic(const TransitionMatrix& m, double tolerance) {
  if (m.rows() != m.cols() || (m.array() < 0.0).any()) return false;
  return ((m.rowwise().sum().array() - 1.0).abs() <= tolerance).all();
}

Eigen::VectorXd exact_stationary(const TransitionMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw OracleError("transition matrix must be square and nonempty");
  }
  const Eigen::Index n = m.rows();
  const Eigen::MatrixXd balance =
      m.transpose() - Eigen::MatrixXd::Identity(n, n);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(balance);
  lu.setThreshold(1e-10);
  if (lu.rank() < n - 1) {
    throw UniquenessError("stationary distribution is not unique");
  }

  // Balance equations plus the normalization row.
  Eigen::MatrixXd system(n + 1, n);
  system << balance, Eigen::RowVectorXd::Ones(n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  Eigen::VectorXd pi = system.colPivHouseholderQr().solve(rhs);

  const double tolerance =
      std::max(1e-12, 64.0 * std::numeric_limits<double>::epsilon() *
                          static_cast<double>(n));
  const double residual =
      (m.transpose() * pi - pi).cwiseAbs().maxCoeff();
  if (!(residual < tolerance) || (pi.array() < -tolerance).any()) {
    throw UniquenessError("stationary solve did not converge to a distribution");
  }
  return pi;
}

Eigen::VectorXd power_iteration(const TransitionMatrix& m,
                                Eigen::VectorXd start, double tolerance,
                                std::size_t max_iterations) {
  if (start.size() != m.rows() || (start.array() < 0.0).any() ||
      !(start.sum() > 0.0)) {
    throw OracleError("start must be a nonnegative nonzero vector");
  }
  Eigen::VectorXd pi = start / start.sum();
  const Eigen::MatrixXd mt = m.transpose();
  for (std::size_t it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd next = mt * pi;
    next /= next.sum();
    const double change = (next - pi).lpNorm<1>();
    pi = std::move(next);
    if (change < tolerance) return pi;
  }
  throw OracleError("power iteration did not converge");
}

}  // namespace dnet
