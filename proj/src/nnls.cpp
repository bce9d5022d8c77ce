#include "nwraman/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nwraman/errors.hpp"

namespace nwraman {

namespace {

struct Scaled {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd col_norm;
  double b_norm;
};

Scaled scale_problem(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  Scaled s;
  s.col_norm = A.colwise().norm().transpose();
  s.A = A;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    if (s.col_norm[j] > 0.0) s.A.col(j) /= s.col_norm[j];
  }
  s.b_norm = b.norm();
  s.b = s.b_norm > 0.0 ? Eigen::VectorXd(b / s.b_norm) : b;
  return s;
}

double kkt_of(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& x) {
  const Eigen::VectorXd g = A.transpose() * (A * x - b);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    worst = std::max(worst, x[j] > 0.0 ? std::abs(g[j]) : std::max(0.0, -g[j]));
  }
  return worst;
}

// Least squares restricted to the passive columns; zeros elsewhere.
Eigen::VectorXd passive_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const std::vector<bool>& passive) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
  }
  Eigen::MatrixXd sub(A.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = A.col(cols[c]);
  const Eigen::VectorXd zs = sub.colPivHouseholderQr().solve(b);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(A.cols());
  for (std::size_t c = 0; c < cols.size(); ++c) z[cols[c]] = zs[static_cast<Eigen::Index>(c)];
  return z;
}

}  // namespace

double nnls_kkt_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& x) {
  const Scaled s = scale_problem(A, b);
  Eigen::VectorXd xs = x.cwiseProduct(s.col_norm);
  if (s.b_norm > 0.0) xs /= s.b_norm;
  return kkt_of(s.A, s.b, xs);
}

NnlsResult solve_nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double kkt_tolerance,
                      int max_iterations) {
  if (A.rows() != b.size()) throw ValidationError("solve_nnls: A and b row counts differ");
  const Eigen::Index n = A.cols();
  if (max_iterations <= 0) max_iterations = static_cast<int>(3 * n + 30);

  const Scaled s = scale_problem(A, b);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  // Columns that just failed to enter without moving x; skipped until x changes.
  std::vector<bool> stalled(static_cast<std::size_t>(n), false);
  NnlsResult out;
  out.residual_history.push_back((s.A * x - s.b).norm() * s.b_norm);
  out.iterations = 0;
  out.converged = false;

  while (out.iterations < max_iterations) {
    const Eigen::VectorXd w = s.A.transpose() * (s.b - s.A * x);
    Eigen::Index enter = -1;
    double best = kkt_tolerance;
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (!passive[u] && !stalled[u] && s.col_norm[j] > 0.0 && w[j] > best) {
        best = w[j];
        enter = j;
      }
    }
    if (enter < 0) {
      out.converged = true;
      break;
    }
    ++out.iterations;
    passive[static_cast<std::size_t>(enter)] = true;
    const Eigen::VectorXd before = x;

    for (;;) {
      Eigen::VectorXd z = passive_solve(s.A, s.b, passive);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) feasible = false;
      }
      if (feasible) {
        x = z;
        break;
      }
      // Step from x toward z as far as the nonnegativity constraints allow.
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) {
          alpha = std::min(alpha, x[j] / (x[j] - z[j]));
        }
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x[j] <= 1e-300) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
      }
      out.residual_history.push_back((s.A * x - s.b).norm() * s.b_norm);
    }
    if (x == before) {
      stalled[static_cast<std::size_t>(enter)] = true;
    } else {
      std::fill(stalled.begin(), stalled.end(), false);
      out.residual_history.push_back((s.A * x - s.b).norm() * s.b_norm);
    }
  }

  out.kkt_residual = kkt_of(s.A, s.b, x);
  out.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (s.col_norm[j] > 0.0) out.x[j] = x[j] * s.b_norm / s.col_norm[j];
  }
  return out;
}

}  // namespace nwraman
