#pragma once

// Polynomial hinge loss l(z) = max(z + 1, 0)^p, p >= 3, and the empirical
// loss / misclassification rate of a vector of scores.

#include <span>

#include "landscape/ad/dual.hpp"
#include "landscape/mode.hpp"

namespace landscape {

double hinge_value(double z, int p);
double hinge_grad(double z, int p);
double hinge_hess(double z, int p);

class HingeLoss {
 public:
  static constexpr int kDefaultPower = 3;

  explicit HingeLoss(int power = kDefaultPower);

  [[nodiscard]] int power() const { return power_; }

  [[nodiscard]] double value(double z) const { return hinge_value(z, power_); }
  [[nodiscard]] double grad(double z) const { return hinge_grad(z, power_); }
  [[nodiscard]] double hess(double z) const { return hinge_hess(z, power_); }

  /// Differentiable evaluation for any AD scalar. The flat branch returns a
  /// constant, so every derivative vanishes for z <= -1.
  template <class S>
  S operator()(const S& z) const {
    using ad::ipow;
    using ad::primal;
    if (primal(z) <= -1.0) return S(0.0);
    return ipow(z + 1.0, power_);
  }

 private:
  int power_;
};

struct EmpiricalLossConfig {
  HingeLoss base_loss{};
  double lambda = 0.0;
  Augmentation augmentation{};

  /// Throws std::invalid_argument when lambda is negative, or not positive
  /// while an augmentation is active.
  void validate() const;
};

/// Sum over samples of l(-y_i * score_i). No 1/n factor.
double empirical_loss(std::span<const double> scores, std::span<const int> labels,
                      const HingeLoss& loss);

/// Fraction of samples with y_i != sgn(score_i), where sgn(0) = +1.
double misclassification_rate(std::span<const double> scores, std::span<const int> labels);

inline int sign_label(double score) { return score >= 0.0 ? 1 : -1; }

}  // namespace landscape
