#include "landscape/loss.hpp"

#include <stdexcept>
#include <string>

namespace landscape {

namespace {

void check_power(int p) {
  if (p < 3) {
    throw std::invalid_argument("hinge power must be >= 3 for a C^2 loss, got " + std::to_string(p));
  }
}

void check_lengths(std::size_t scores, std::size_t labels) {
  if (scores != labels) {
    throw std::invalid_argument("score/label length mismatch: " + std::to_string(scores) + " vs " +
                                std::to_string(labels));
  }
}

}  // namespace

double hinge_value(double z, int p) {
  check_power(p);
  return z <= -1.0 ? 0.0 : ad::ipow(z + 1.0, p);
}

double hinge_grad(double z, int p) {
  check_power(p);
  return z <= -1.0 ? 0.0 : p * ad::ipow(z + 1.0, p - 1);
}

double hinge_hess(double z, int p) {
  check_power(p);
  return z <= -1.0 ? 0.0 : p * (p - 1) * ad::ipow(z + 1.0, p - 2);
}

HingeLoss::HingeLoss(int power) : power_(power) { check_power(power); }

void EmpiricalLossConfig::validate() const {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
  if (augmentation.augmented() && !(lambda > 0.0)) {
    throw std::invalid_argument("lambda must be positive when an augmentation is active");
  }
}

double empirical_loss(std::span<const double> scores, std::span<const int> labels,
                      const HingeLoss& loss) {
  check_lengths(scores.size(), labels.size());
  if (scores.empty()) throw std::invalid_argument("empirical_loss needs at least one sample");
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) total += loss.value(-labels[i] * scores[i]);
  return total;
}

double misclassification_rate(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores.size(), labels.size());
  if (scores.empty()) throw std::invalid_argument("misclassification_rate needs at least one sample");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != sign_label(scores[i])) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(scores.size());
}

}  // namespace landscape
