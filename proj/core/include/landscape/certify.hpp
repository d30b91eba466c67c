#pragma once

// Numerical certificates for candidate minima of the augmented losses.
//
// A certificate collects the preconditions (gradient norm, smallest Hessian
// eigenvalue or a first-order probe for kinked activations) and the
// conclusions expected at a true local minimum: the special neurons are
// inactive, the weighted moment tensors vanish, and the base network attains
// the smallest achievable training error.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "landscape/augment.hpp"
#include "landscape/dataset.hpp"
#include "landscape/loss.hpp"
#include "landscape/optimize.hpp"
#include "landscape/tensor.hpp"

namespace landscape {

struct Thresholds {
  double grad = 1e-8;
  double hessian = 1e-4;
  double inactivity = 1e-3;
  /// Residual of order k passes when it is <= tensor_rel * sum_i |c_i| max(1, ||x_i||)^k.
  double tensor_rel = 1e-4;
  int max_order = 4;
  double probe_c = 10.0;
  double probe_radius = 0.1;
  int probe_dirs = 16;
  std::uint64_t probe_seed = 0;
  int restarts = kDefaultRestarts;

  void validate() const;
};

struct InactivityReport {
  /// |a| in skip modes; largest |exit weight| of any exponential neuron in per-layer mode.
  double magnitude = 0.0;
  bool pass = true;
};

InactivityReport inactivity_check(const ParamVector& params, const Augmentation& mode, double tol);

struct MomentResiduals {
  std::vector<double> residuals;  // sym_max value per order 0..P
  std::vector<double> scales;     // sum_i |c_i| max(1, ||x_i||)^k per order

  [[nodiscard]] double max_residual() const;
  /// Largest residual / scale (orders with zero scale contribute 0).
  [[nodiscard]] double max_ratio() const;
  [[nodiscard]] bool pass(double tensor_rel) const;
};

/// Orders 0..P of sum_i c_i x_i^{(x)k} with c_i = l'(-y_i s_i) y_i exp(w^T x_i + b).
MomentResiduals moment_residuals(const Dataset& data, std::span<const double> scores, std::span<const double> w,
                                 double b, const HingeLoss& loss, int max_order, int restarts = kDefaultRestarts);

/// Orders 0..P of sum_i c_i (x_i, 1)^{(x)k} with c_i = l'(-y_i s_i) y_i, the
/// affine moment condition used for per-layer and monomial neurons.
MomentResiduals affine_moment_residuals(const Dataset& data, std::span<const double> scores, const HingeLoss& loss,
                                        int max_order, int restarts = kDefaultRestarts);

/// Sum over groups of identical feature vectors of the minority count, over n.
double majority_vote_oracle(const Dataset& data);

struct StationarityOrder {
  int order = 1;
  double c = 10.0;
  double radius = 0.1;
  int n_dirs = 16;
  bool pass = true;
  /// min over probes of L(theta0 + delta) - L(theta0) + C ||delta||^{k+1}; negative means a violation.
  double worst_slack = 0.0;
};

/// Samples n_dirs random unit directions at 8 magnitudes log-spaced over
/// [radius / 1000, radius] and checks L(theta) >= L(theta0) - C ||theta - theta0||^{k+1}.
StationarityOrder kth_order_probe(const Objective& f, std::span<const double> params, int k, double c, double radius,
                                  int n_dirs, std::uint64_t seed);

enum class Verdict { certified_global, stationary_only, failed };

std::string_view to_string(Verdict v);

struct Certificate {
  double loss = 0.0;
  double grad_norm = 0.0;
  /// Empty for nonsmooth activations ("nonsmooth-skipped").
  std::optional<double> min_hessian_eig;
  /// Present for nonsmooth activations.
  std::optional<StationarityOrder> probe;
  double inactivity = 0.0;
  MomentResiduals moments;
  double train_error = 0.0;
  double oracle_error = 0.0;
  Verdict verdict = Verdict::failed;
  /// Names of the failing fields, most specific first.
  std::vector<std::string> failures;
};

/// Certifies `params` as a minimum of the problem's augmented loss. Train
/// error is measured on the base network with the special neurons removed.
Certificate full_certificate(const TrainingProblem& problem, std::span<const double> params, const Thresholds& th);

Certificate full_certificate(const TrainingProblem& problem, const RunResult& run, const Thresholds& th);

/// Verdict implied by the numeric fields of a certificate under `th`.
Verdict judge(const Certificate& cert, const Thresholds& th, std::vector<std::string>* failures = nullptr);

}  // namespace landscape
