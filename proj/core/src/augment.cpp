#include "landscape/augment.hpp"

#include <stdexcept>
#include <string>

namespace landscape {

namespace {

void check_input(std::span<const double> x, std::size_t d) {
  if (x.size() != d) {
    throw std::invalid_argument("input has dimension " + std::to_string(x.size()) + ", expected " +
                                std::to_string(d));
  }
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("regularizer weight lambda must be positive");
}

}  // namespace

SkipAugmentation SkipAugmentation::from(const ParamVector& params) {
  const auto& layout = params.layout();
  if (!layout.mode().is_skip()) {
    throw std::invalid_argument("parameters are not in a skip-neuron layout (mode " + layout.mode().name() + ")");
  }
  const auto w = params.w();
  return {params.a(), std::vector<double>(w.begin(), w.end()), params.b(), layout.mode()};
}

double special_response(const SkipAugmentation& aug, std::span<const double> x) {
  check_input(x, aug.w.size());
  double pre = aug.b;
  for (std::size_t k = 0; k < x.size(); ++k) pre += aug.w[k] * x[k];
  switch (aug.kind.kind) {
    case AugmentationKind::skip_exp:
      return guarded_exp(pre);
    case AugmentationKind::skip_monomial:
      return ad::ipow(pre, aug.kind.degree);
    default:
      throw std::invalid_argument("special_response needs a skip augmentation, got " + aug.kind.name());
  }
}

double skip_forward(double base_score, const SkipAugmentation& aug, std::span<const double> x) {
  return base_score + aug.a * special_response(aug, x);
}

double per_layer_forward(const ParamVector& params, std::span<const double> x) {
  const auto& layout = params.layout();
  if (layout.mode().kind != AugmentationKind::per_layer_exp) {
    throw std::invalid_argument("per_layer_forward needs a per_layer_exp layout, got " + layout.mode().name());
  }
  check_input(x, layout.spec().input_dim);
  return network_output<double>(layout, params.values(), x);
}

double per_layer_regularizer(const ParamVector& params, double lambda) {
  check_lambda(lambda);
  if (params.layout().mode().kind != AugmentationKind::per_layer_exp) {
    throw std::invalid_argument("per_layer_regularizer needs a per_layer_exp layout");
  }
  return augmentation_regularizer<double>(params.layout(), params.values(), lambda);
}

TrainingProblem::TrainingProblem(Dataset d, ParamLayout l, EmpiricalLossConfig c)
    : data(std::move(d)), layout(std::move(l)), loss(c) {
  loss.validate();
  if (!(loss.augmentation == layout.mode())) {
    throw std::invalid_argument("loss config augmentation " + loss.augmentation.name() +
                                " does not match parameter layout " + layout.mode().name());
  }
  if (data.dim() != layout.spec().input_dim) {
    throw std::invalid_argument("dataset dimension " + std::to_string(data.dim()) +
                                " does not match network input dimension " +
                                std::to_string(layout.spec().input_dim));
  }
}

double skip_regularized_loss(const Dataset& data, const ParamVector& params, const EmpiricalLossConfig& cfg) {
  if (!params.layout().mode().is_skip()) {
    throw std::invalid_argument("skip_regularized_loss needs a skip-neuron layout");
  }
  check_lambda(cfg.lambda);
  const TrainingProblem problem(data, params.layout(), cfg);
  return training_loss<double>(problem, params.values());
}

double total_augmented_loss(const Dataset& data, const ParamVector& params, const EmpiricalLossConfig& cfg) {
  if (!(cfg.augmentation == params.layout().mode())) {
    throw std::invalid_argument("layout mismatch: config says " + cfg.augmentation.name() +
                                ", parameters are laid out for " + params.layout().mode().name());
  }
  const TrainingProblem problem(data, params.layout(), cfg);
  return training_loss<double>(problem, params.values());
}

std::vector<double> augmented_scores(const TrainingProblem& problem, std::span<const double> params) {
  std::vector<double> out;
  out.reserve(problem.data.size());
  for (std::size_t i = 0; i < problem.data.size(); ++i) {
    out.push_back(augmented_output<double>(problem.layout, params, problem.data.row(i)));
  }
  return out;
}

std::vector<double> base_scores(const TrainingProblem& problem, std::span<const double> params) {
  const ParamVector full(problem.layout, std::vector<double>(params.begin(), params.end()));
  const auto base = extract_base_params(full);
  return forward_batch(problem.layout.spec(), base, problem.data.features());
}

AugmentedObjective::AugmentedObjective(TrainingProblem problem) : problem_(std::move(problem)) {}

double AugmentedObjective::value(std::span<const double> params) const {
  return training_loss<double>(problem_, params);
}

GradVar AugmentedObjective::record(std::span<const GradVar> params) const {
  return training_loss<GradVar>(problem_, params);
}

HvpVar AugmentedObjective::record(std::span<const HvpVar> params) const {
  return training_loss<HvpVar>(problem_, params);
}

}  // namespace landscape
