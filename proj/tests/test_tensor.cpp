#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "landscape/tensor.hpp"
#include "support/generators.hpp"

namespace {

using namespace landscape;

double rank1_ref(const WeightedPointTensor& t, const std::vector<double>& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double ip = 0.0;
    for (std::size_t k = 0; k < t.dim(); ++k) ip += u[k] * t.point(i)[k];
    s += t.coefficients()[i] * std::pow(ip, t.order());
  }
  return s;
}

TEST(Tensor, ConstructionChecks) {
  EXPECT_THROW(WeightedPointTensor(2, 2, {1.0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(WeightedPointTensor(-1, 1, {1.0}, {1.0}), std::invalid_argument);
  EXPECT_NO_THROW(WeightedPointTensor(3, 1, {}, {}));
}

TEST(Tensor, MagnitudeScale) {
  const WeightedPointTensor t(2, 2, {2.0, -0.5}, {3.0, 4.0, 0.1, 0.0});
  EXPECT_DOUBLE_EQ(t.magnitude_scale(), 2.0 * 25.0 + 0.5 * 1.0);
}

TEST(Tensor, LiftedPointsAppendOne) {
  const AugmentedPoint p(std::vector<double>{2.0, -1.0});
  EXPECT_EQ(std::vector<double>(p.coords().begin(), p.coords().end()), (std::vector<double>{2.0, -1.0, 1.0}));
  const auto t = lifted_tensor(2, 1, {1.0, 1.0}, std::vector<double>{3.0, -3.0});
  EXPECT_EQ(t.dim(), 2u);
  EXPECT_EQ(t.point(1)[0], -3.0);
  EXPECT_EQ(t.point(1)[1], 1.0);
}

TEST(Tensor, EvalRank1MatchesDirectSum) {
  testgen::Rng rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = rng.integer(0, 5);
    const std::size_t d = static_cast<std::size_t>(rng.integer(1, 4));
    const auto t = testgen::random_tensor(rng, k, d, static_cast<std::size_t>(rng.integer(1, 6)));
    const auto u = testgen::random_unit(rng, d);
    EXPECT_NEAR(eval_rank1(t, u), rank1_ref(t, u), 1e-12);
  }
  const WeightedPointTensor t(2, 2, {1.0}, {1.0, 0.0});
  EXPECT_THROW((void)eval_rank1(t, std::vector<double>{1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW((void)eval_rank1(t, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Tensor, DenseMaterializeContractsToRank1) {
  testgen::Rng rng(52);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = rng.integer(1, 4);
    const std::size_t d = static_cast<std::size_t>(rng.integer(1, 3));
    const auto t = testgen::random_tensor(rng, k, d, static_cast<std::size_t>(rng.integer(1, 5)));
    const auto dense = dense_materialize(t);
    const auto u = testgen::random_unit(rng, d);
    EXPECT_NEAR(dense.contract(u), rank1_ref(t, u), 1e-12);
  }
  // T = 2 (1, 3)^{(x)2}: entry (0, 1) is 2 * 1 * 3.
  const auto dense = dense_materialize(WeightedPointTensor(2, 2, {2.0}, {1.0, 3.0}));
  EXPECT_EQ(dense.at(std::vector<std::size_t>{0, 1}), 6.0);
  EXPECT_EQ(dense.at(std::vector<std::size_t>{1, 1}), 18.0);
  EXPECT_THROW((void)dense_materialize(WeightedPointTensor(7, 8, {1.0}, std::vector<double>(8, 1.0))),
               std::invalid_argument);
}

TEST(SymMax, OrderZeroAndOne) {
  const WeightedPointTensor t0(0, 3, {0.5, -2.0}, std::vector<double>(6, 1.0));
  EXPECT_EQ(sym_max(t0).value, 1.5);
  // Order 1: max_u |u^T sum_i c_i x_i| is the norm of sum_i c_i x_i.
  testgen::Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = static_cast<std::size_t>(rng.integer(1, 4));
    const auto t = testgen::random_tensor(rng, 1, d, 4);
    std::vector<double> v(d, 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (std::size_t k = 0; k < d; ++k) v[k] += t.coefficients()[i] * t.point(i)[k];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    EXPECT_NEAR(sym_max(t).value, std::sqrt(norm), 1e-10);
  }
}

TEST(SymMax, MatrixCaseIsLargestAbsoluteEigenvalue) {
  testgen::Rng rng(54);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = static_cast<std::size_t>(rng.integer(2, 5));
    const auto t = testgen::random_tensor(rng, 2, d, static_cast<std::size_t>(rng.integer(1, 8)));
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < t.size(); ++i) {
      const Eigen::Map<const Eigen::VectorXd> x(t.point(i).data(), static_cast<Eigen::Index>(d));
      M += t.coefficients()[i] * x * x.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    const double expected = es.eigenvalues().cwiseAbs().maxCoeff();
    const auto res = sym_max(t);
    EXPECT_NEAR(res.value, expected, 1e-8 * std::max(1.0, expected)) << "trial " << trial;
    EXPECT_NEAR(std::abs(rank1_ref(t, res.argmax)), res.value, 1e-12 * std::max(1.0, expected));
  }
}

TEST(SymMax, PlaneCaseMatchesDenseCircleGrid) {
  testgen::Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = rng.integer(3, 6);
    const auto t = testgen::random_tensor(rng, k, 2, static_cast<std::size_t>(rng.integer(1, 6)));
    double grid = 0.0;
    for (int j = 0; j < 10000; ++j) {
      const double th = std::numbers::pi * j / 10000.0;
      grid = std::max(grid, std::abs(rank1_ref(t, {std::cos(th), std::sin(th)})));
    }
    const auto res = sym_max(t);
    EXPECT_GE(res.value, grid - 1e-12);
    EXPECT_LE(res.value, grid + 1e-3 * std::max(1.0, grid)) << "order " << k;
  }
}

TEST(SymMax, NeverExceedsTheTriangleBound) {
  testgen::Rng rng(56);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = rng.integer(1, 5);
    const std::size_t d = static_cast<std::size_t>(rng.integer(1, 4));
    const auto t = testgen::random_tensor(rng, k, d, static_cast<std::size_t>(rng.integer(1, 6)));
    double bound = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      double n2 = 0.0;
      for (double x : t.point(i)) n2 += x * x;
      bound += std::abs(t.coefficients()[i]) * std::pow(std::sqrt(n2), k);
    }
    EXPECT_LE(sym_max(t).value, bound * (1.0 + 1e-12));
  }
}

TEST(SymMax, DeterministicForFixedSeed) {
  testgen::Rng rng(57);
  const auto t = testgen::random_tensor(rng, 4, 3, 5);
  const auto a = sym_max(t, 8, 11);
  const auto b = sym_max(t, 8, 11);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.argmax, b.argmax);
  EXPECT_THROW((void)sym_max(t, 0), std::invalid_argument);
}

TEST(ZeroTensor, CancellingTermsAreZero) {
  // x and -x with equal weights cancel at odd order and double at even order.
  testgen::Rng rng(58);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = static_cast<std::size_t>(rng.integer(1, 4));
    const auto x = rng.vector(d, -1.5, 1.5);
    std::vector<double> pts = x;
    for (double v : x) pts.push_back(-v);
    const int k = 2 * rng.integer(0, 2) + 1;
    EXPECT_TRUE(is_zero_tensor(WeightedPointTensor(k, d, {0.7, 0.7}, pts), 1e-12));
    EXPECT_FALSE(is_zero_tensor(WeightedPointTensor(k + 1, d, {0.7, 0.7}, pts), 1e-12));
  }
  EXPECT_TRUE(is_zero_tensor(WeightedPointTensor(3, 2, {}, {}), 1e-15));
  EXPECT_THROW((void)is_zero_tensor(WeightedPointTensor(3, 2, {}, {}), 0.0), std::invalid_argument);
}

}  // namespace
