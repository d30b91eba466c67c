#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "landscape/loss.hpp"
#include "support/generators.hpp"

namespace {

using namespace landscape;

TEST(Hinge, ValueExamples) {
  EXPECT_EQ(hinge_value(-1.0, 3), 0.0);
  EXPECT_EQ(hinge_value(0.0, 3), 1.0);
  EXPECT_EQ(hinge_value(1.5, 4), 39.0625);
  EXPECT_EQ(hinge_value(-7.0, 5), 0.0);
}

TEST(Hinge, DerivativeExamples) {
  EXPECT_EQ(hinge_grad(-2.0, 3), 0.0);
  EXPECT_EQ(hinge_hess(-2.0, 3), 0.0);
  EXPECT_EQ(hinge_grad(0.0, 3), 3.0);
  EXPECT_EQ(hinge_hess(0.0, 3), 6.0);
}

TEST(Hinge, RejectsPowerBelowThree) {
  EXPECT_THROW(hinge_value(0.0, 2), std::invalid_argument);
  EXPECT_THROW(hinge_grad(0.0, 1), std::invalid_argument);
  EXPECT_THROW(hinge_hess(0.0, 0), std::invalid_argument);
  EXPECT_THROW(HingeLoss(2), std::invalid_argument);
}

TEST(Hinge, GradMatchesCentralDifference) {
  testgen::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int p = rng.integer(3, 6);
    const double z = rng.uniform(-3.0, 3.0);
    const double h = 1e-6;
    const double fd = (hinge_value(z + h, p) - hinge_value(z - h, p)) / (2 * h);
    const double g = hinge_grad(z, p);
    EXPECT_NEAR(g, fd, 1e-8 * std::max(1.0, std::abs(g))) << "z=" << z << " p=" << p;
    const double fd2 = (hinge_grad(z + h, p) - hinge_grad(z - h, p)) / (2 * h);
    EXPECT_NEAR(hinge_hess(z, p), fd2, 1e-6 * std::max(1.0, std::abs(fd2))) << "z=" << z << " p=" << p;
  }
}

TEST(Hinge, MonotoneAndZeroExactlyOnFlatRegion) {
  testgen::Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const int p = rng.integer(3, 6);
    const double z = rng.uniform(-4.0, 2.0);
    EXPECT_GE(hinge_grad(z, p), 0.0);
    EXPECT_EQ(hinge_grad(z, p) == 0.0, z <= -1.0);
    EXPECT_LE(hinge_value(z, p), hinge_value(z + 0.1, p));
  }
}

TEST(EmpiricalLoss, Examples) {
  const HingeLoss loss(3);
  const std::vector<int> labels{1, -1, 1};
  const std::vector<double> safe{2.0, -2.0, 2.0};
  EXPECT_EQ(empirical_loss(safe, labels, loss), 0.0);
  const std::vector<double> one{0.0};
  const std::vector<int> plus{1};
  EXPECT_EQ(empirical_loss(one, plus, loss), 1.0);
}

TEST(EmpiricalLoss, MatchesPerSampleSum) {
  testgen::Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = rng.integer(3, 5);
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 6));
    std::vector<double> scores = rng.vector(n, -3.0, 3.0);
    std::vector<int> labels(n);
    for (auto& y : labels) y = rng.sign();
    double expected = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = -labels[i] * scores[i];
      expected += z > -1.0 ? std::pow(z + 1.0, p) : 0.0;
    }
    EXPECT_NEAR(empirical_loss(scores, labels, HingeLoss(p)), expected, 1e-12 * std::max(1.0, expected));
  }
}

TEST(EmpiricalLoss, LengthMismatch) {
  const std::vector<double> scores{1.0, 2.0};
  const std::vector<int> labels{1};
  EXPECT_THROW(empirical_loss(scores, labels, HingeLoss(3)), std::invalid_argument);
  EXPECT_THROW(misclassification_rate(scores, labels), std::invalid_argument);
}

TEST(Misclassification, Examples) {
  const std::vector<int> labels{1, -1, 1};
  EXPECT_EQ(misclassification_rate(std::vector<double>{0.3, -0.1, 5.0}, labels), 0.0);
  EXPECT_EQ(misclassification_rate(std::vector<double>{-0.3, 0.1, -5.0}, labels), 1.0);
  EXPECT_EQ(misclassification_rate(std::vector<double>{0.5, -0.5}, std::vector<int>{1, 1}), 0.5);
}

TEST(Misclassification, ZeroScorePredictsPlus) {
  EXPECT_EQ(misclassification_rate(std::vector<double>{0.0}, std::vector<int>{1}), 0.0);
  EXPECT_EQ(misclassification_rate(std::vector<double>{0.0}, std::vector<int>{-1}), 1.0);
}

TEST(LossConfig, LambdaRules) {
  EmpiricalLossConfig cfg;
  cfg.lambda = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.lambda = 0.0;
  cfg.augmentation = Augmentation::skip_exp();
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.lambda = 0.1;
  EXPECT_NO_THROW(cfg.validate());
  cfg.lambda = 0.0;
  cfg.augmentation = Augmentation::none();
  EXPECT_NO_THROW(cfg.validate());
}

}  // namespace
