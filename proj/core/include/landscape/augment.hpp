#pragma once

// Special-neuron augmentations of a base network and their regularized
// training losses.
//
//   skip_exp       f~(x) = f(x) + a exp(w^T x + b),      reg = lambda a^2 / 2
//   skip_monomial  f~(x) = f(x) + a (w^T x + b)^p,       reg = lambda a^2 / 2
//   per_layer_exp  one exponential neuron appended to every hidden layer,
//                  reg = lambda/2 sum_{l=2..L+1} ||w~_l||_{2L}^{2L}
//
// where w~_l is the row of weights leaving the exponential neuron of layer
// l-1. The generic templates below are shared by plain evaluation and the
// AD objectives.

#include <span>
#include <vector>

#include "landscape/ad/dual.hpp"
#include "landscape/autodiff.hpp"
#include "landscape/dataset.hpp"
#include "landscape/loss.hpp"
#include "landscape/network.hpp"

namespace landscape {

struct SkipAugmentation {
  double a = 0.0;
  std::vector<double> w;
  double b = 0.0;
  Augmentation kind = Augmentation::skip_exp();

  static SkipAugmentation from(const ParamVector& params);
};

/// Output of the special neuron alone: exp(w^T x + b) or (w^T x + b)^p.
double special_response(const SkipAugmentation& aug, std::span<const double> x);

double skip_forward(double base_score, const SkipAugmentation& aug, std::span<const double> x);

/// Network output in per-layer mode (params must use a per_layer_exp layout).
double per_layer_forward(const ParamVector& params, std::span<const double> x);

double per_layer_regularizer(const ParamVector& params, double lambda);

/// A complete training objective: data, parameterization and loss settings.
struct TrainingProblem {
  Dataset data;
  ParamLayout layout;
  EmpiricalLossConfig loss;

  TrainingProblem(Dataset d, ParamLayout l, EmpiricalLossConfig c);
};

double skip_regularized_loss(const Dataset& data, const ParamVector& params, const EmpiricalLossConfig& cfg);

/// Dispatches on cfg.augmentation; throws if it disagrees with the layout of params.
double total_augmented_loss(const Dataset& data, const ParamVector& params, const EmpiricalLossConfig& cfg);

/// Scores of the full (augmented) model on every sample.
std::vector<double> augmented_scores(const TrainingProblem& problem, std::span<const double> params);

/// Scores of the base network f(x; theta) with the special neurons removed.
std::vector<double> base_scores(const TrainingProblem& problem, std::span<const double> params);

class AugmentedObjective final : public Objective {
 public:
  explicit AugmentedObjective(TrainingProblem problem);

  [[nodiscard]] const TrainingProblem& problem() const { return problem_; }

  [[nodiscard]] std::size_t dimension() const override { return problem_.layout.size(); }
  [[nodiscard]] double value(std::span<const double> params) const override;
  [[nodiscard]] GradVar record(std::span<const GradVar> params) const override;
  [[nodiscard]] HvpVar record(std::span<const HvpVar> params) const override;
  [[nodiscard]] bool smooth() const override { return problem_.layout.spec().activation.smooth(); }

 private:
  TrainingProblem problem_;
};

// ---------------------------------------------------------------------------
// Generic evaluation

template <class S>
S skip_unit(const ParamLayout& layout, std::span<const S> params, std::span<const double> x) {
  using ad::ipow;
  const Block w = layout.skip_w();
  S pre = params[layout.skip_b()];
  for (std::size_t k = 0; k < w.cols; ++k) pre = pre + params[w.offset + k] * x[k];
  if (layout.mode().kind == AugmentationKind::skip_exp) return guarded_exp(pre);
  return ipow(pre, layout.mode().degree);
}

template <class S>
S augmented_output(const ParamLayout& layout, std::span<const S> params, std::span<const double> x) {
  const S base = network_output<S>(layout, params, x);
  if (!layout.mode().is_skip()) return base;
  return base + params[layout.skip_a()] * skip_unit<S>(layout, params, x);
}

template <class S>
S augmentation_regularizer(const ParamLayout& layout, std::span<const S> params, double lambda) {
  using ad::ipow;
  switch (layout.mode().kind) {
    case AugmentationKind::none:
      return S(0.0);
    case AugmentationKind::skip_exp:
    case AugmentationKind::skip_monomial: {
      const S& a = params[layout.skip_a()];
      return (0.5 * lambda) * (a * a);
    }
    case AugmentationKind::per_layer_exp: {
      const int power = 2 * static_cast<int>(layout.depth());
      S sum(0.0);
      for (std::size_t i : layout.all_exp_exit_indices()) sum = sum + ipow(params[i], power);
      return (0.5 * lambda) * sum;
    }
  }
  return S(0.0);
}

template <class S>
S training_loss(const TrainingProblem& problem, std::span<const S> params) {
  const auto& data = problem.data;
  const auto& hinge = problem.loss.base_loss;
  S total(0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    try {
      const S score = augmented_output<S>(problem.layout, params, data.row(i));
      total = total + hinge(S(-static_cast<double>(data.label(i))) * score);
    } catch (const ExpOverflowError& e) {
      throw ExpOverflowError(e.exponent(), static_cast<long>(i));
    }
  }
  return total + augmentation_regularizer<S>(problem.layout, params, problem.loss.lambda);
}

}  // namespace landscape
