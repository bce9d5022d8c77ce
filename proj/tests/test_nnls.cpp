#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "nwraman/nnls.hpp"

using namespace nwraman;

namespace {

// Exhaustive oracle: the NNLS optimum is the best nonnegative unconstrained
// least-squares solution over some support set.
Eigen::VectorXd brute_force_nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(A.cols());
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  double best_r = b.squaredNorm();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> idx;
    for (int j = 0; j < n; ++j)
      if (mask & (1 << j)) idx.push_back(j);
    Eigen::MatrixXd sub(A.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
    const Eigen::VectorXd z = sub.completeOrthogonalDecomposition().solve(b);
    if ((z.array() < 0.0).any()) continue;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) x[idx[k]] = z[static_cast<Eigen::Index>(k)];
    const double r = (A * x - b).squaredNorm();
    if (r < best_r) {
      best_r = r;
      best = x;
    }
  }
  return best;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int m, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd A(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = g(rng);
  return A;
}

}  // namespace

TEST_CASE("nnls: unconstrained optimum already nonnegative") {
  Eigen::MatrixXd A(4, 2);
  A << 1, 0, 0, 1, 1, 1, 2, -1;
  const Eigen::Vector2d truth(0.7, 2.5);
  const Eigen::VectorXd b = A * truth;
  const auto r = solve_nnls(A, b);
  CHECK(r.converged);
  CHECK((r.x - truth).norm() < 1e-12);
  CHECK(r.kkt_residual < 1e-10);
}

TEST_CASE("nnls: negative unconstrained coefficient is clamped to zero") {
  Eigen::MatrixXd A(3, 2);
  A << 1, 1, 0, 1, 0, 0;
  Eigen::VectorXd b(3);
  b << 1, -1, 0;
  const auto r = solve_nnls(A, b);
  CHECK(r.x[1] == 0.0);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nnls: zero right-hand side gives zero") {
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(5, 3);
  const auto r = solve_nnls(A, Eigen::VectorXd::Zero(5));
  CHECK(r.x.isZero(0.0));
  CHECK(r.converged);
}

TEST_CASE("nnls: matches exhaustive support enumeration (property)") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 2 + trial % 5;
    const int m = n + 2 + trial % 7;
    const Eigen::MatrixXd A = random_matrix(rng, m, n);
    const Eigen::VectorXd b = random_matrix(rng, m, 1).col(0);
    const auto r = solve_nnls(A, b);
    const auto oracle = brute_force_nnls(A, b);
    CAPTURE(trial);
    CHECK(r.converged);
    CHECK((r.x.array() >= 0.0).all());
    CHECK((A * r.x - b).squaredNorm() <= (A * oracle - b).squaredNorm() * (1.0 + 1e-10) + 1e-14);
    CHECK((r.x - oracle).norm() <= 1e-8 * (1.0 + oracle.norm()));
  }
}

TEST_CASE("nnls: residual history is non-increasing and KKT holds (property)") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + trial % 20;
    const int m = 30 + trial % 50;
    const Eigen::MatrixXd A = random_matrix(rng, m, n).cwiseAbs();
    const Eigen::VectorXd b = random_matrix(rng, m, 1).col(0);
    const auto r = solve_nnls(A, b);
    CAPTURE(trial);
    REQUIRE(!r.residual_history.empty());
    CHECK(r.residual_history.front() == doctest::Approx(b.norm()).epsilon(1e-12));
    for (std::size_t k = 1; k < r.residual_history.size(); ++k) {
      CHECK(r.residual_history[k] <= r.residual_history[k - 1] * (1.0 + 1e-12) + 1e-13 * b.norm());
    }
    CHECK(r.kkt_residual < 1e-10);
    CHECK(nnls_kkt_residual(A, b, r.x) < 1e-10);
    CHECK((r.x.array() >= 0.0).all());
  }
}

TEST_CASE("nnls: nearly collinear columns still terminate") {
  // Smooth overlapping bumps, the same structure as neighbouring model profiles.
  const int m = 400, n = 40;
  Eigen::MatrixXd A(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = (i - 5.0 * j - 100.0) / 60.0;
      A(i, j) = std::exp(-u * u);
    }
  Eigen::VectorXd truth = Eigen::VectorXd::Zero(n);
  truth[10] = 0.4;
  truth[25] = 0.6;
  const auto r = solve_nnls(A, A * truth);
  CHECK(r.converged);
  CHECK((A * r.x - A * truth).norm() < 1e-8 * (A * truth).norm());
  CHECK(r.kkt_residual < 1e-10);
}

TEST_CASE("nnls: kkt residual detects a non-optimal point") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd b(3);
  b << 1, 2, 3;
  CHECK(nnls_kkt_residual(A, b, b) < 1e-15);
  CHECK(nnls_kkt_residual(A, b, Eigen::VectorXd::Zero(3)) > 0.1);
}
