#pragma once

#include <Eigen/Dense>

#include <vector>

namespace nwraman {

struct NnlsResult {
  Eigen::VectorXd x;
  /// ||A x - b|| after every accepted update, starting from x = 0.
  std::vector<double> residual_history;
  /// max_j of |g_j| on the positive set and max(0, -g_j) on the zero set,
  /// with g = A^T (A x - b) evaluated on unit-norm columns and unit-norm b.
  double kkt_residual;
  int iterations;
  bool converged;
};

/// min ||A x - b|| subject to x >= 0, by the Lawson–Hanson active-set
/// method. Columns are scaled to unit norm internally; the returned x is in
/// the original column scaling.
NnlsResult solve_nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double kkt_tolerance = 1e-12,
                      int max_iterations = 0);

/// KKT residual of a candidate x for the same normalization as NnlsResult.
double nnls_kkt_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& x);

}  // namespace nwraman
