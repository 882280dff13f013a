#include <doctest.h>

#include <random>

#include "core/error.hpp"
#include "ident/lstsq.hpp"

using namespace koopflow;

namespace {

Eigen::MatrixXd seeded_random(int rows, int cols, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = dist(gen);
  return m;
}

}  // namespace

TEST_CASE("identity regression recovers the identity operator") {
  Eigen::MatrixXd x = seeded_random(6, 30, 11);
  LstsqResult res = solve_least_squares(x, x, 1e-10);
  CHECK(res.rank == 6);
  CHECK_FALSE(res.degenerate);
  CHECK((res.G - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("all-zero regressors yield the zero operator and a warning") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 12);
  Eigen::MatrixXd y = seeded_random(3, 12, 5);
  LstsqResult res = solve_least_squares(y, x, 1e-10);
  CHECK(res.degenerate);
  CHECK(res.rank == 0);
  CHECK(res.G.rows() == 3);
  CHECK(res.G.cols() == 4);
  CHECK(res.G.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random LTI operator is recovered from rich data") {
  Eigen::MatrixXd g0 = seeded_random(8, 8, 42);
  Eigen::MatrixXd x = seeded_random(8, 64, 43);
  Eigen::MatrixXd y = g0 * x;
  LstsqResult res = solve_least_squares(y, x, 1e-10);
  CHECK(res.rank == 8);
  CHECK((res.G - g0).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((res.G * x - y).norm() / y.norm() < 1e-12);
}

TEST_CASE("minimum-norm solution splits collinear regressors by magnitude") {
  // Two proportional rows of X admit infinitely many exact fits; the SVD
  // pseudoinverse picks the smallest one, which weights each row by its own
  // magnitude: g = d / (c1^2 + c2^2) * (c1, c2).
  const int k = 20;
  const double c1 = 3.0, c2 = 4.0, d = 6.0;
  Eigen::MatrixXd x(2, k);
  x.row(0).setConstant(c1);
  x.row(1).setConstant(c2);
  Eigen::MatrixXd y = Eigen::MatrixXd::Constant(1, k, d);
  LstsqResult res = solve_least_squares(y, x, 1e-10);
  CHECK(res.rank == 1);
  CHECK(res.G(0, 0) == doctest::Approx(d * c1 / (c1 * c1 + c2 * c2)));  // 0.72
  CHECK(res.G(0, 1) == doctest::Approx(d * c2 / (c1 * c1 + c2 * c2)));  // 0.96
}

TEST_CASE("rank-deficient data truncates instead of exploding") {
  // Third row is the sum of the first two; a naive normal-equation solve
  // would be singular.
  Eigen::MatrixXd base = seeded_random(2, 40, 7);
  Eigen::MatrixXd x(3, 40);
  x.row(0) = base.row(0);
  x.row(1) = base.row(1);
  x.row(2) = base.row(0) + base.row(1);
  Eigen::MatrixXd g0 = seeded_random(2, 3, 8);
  Eigen::MatrixXd y = g0 * x;
  LstsqResult res = solve_least_squares(y, x, 1e-10);
  CHECK(res.rank == 2);
  CHECK(res.G.allFinite());
  CHECK((res.G * x - y).norm() / y.norm() < 1e-10);
}

TEST_CASE("singular values are reported in descending order") {
  Eigen::MatrixXd x = seeded_random(5, 25, 99);
  LstsqResult res = solve_least_squares(x, x, 1e-10);
  REQUIRE(res.singular_values.size() == 5);
  for (int i = 1; i < 5; ++i) CHECK(res.singular_values(i) <= res.singular_values(i - 1));
  CHECK(res.sigma_max == res.singular_values(0));
  CHECK(res.sigma_min_kept == res.singular_values(4));
}

TEST_CASE("mismatched snapshot counts are rejected") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 10);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(2, 11);
  CHECK_THROWS_AS(solve_least_squares(y, x, 1e-10), Error);
  CHECK_THROWS_AS(solve_least_squares(x, x, 0.0), Error);
}
