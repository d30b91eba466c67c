#pragma once

// Deterministic full-batch gradient descent for small training objectives.
//
// Steps are chosen by Armijo backtracking (halving on rejection, doubling
// after an accepted step). Near stationary points of smooth objectives the
// dense Hessian is inspected; a strongly negative eigenvalue triggers a
// fixed-size perturbation along its eigenvector, after which descent
// resumes. A run is only reported converged when the gradient is below
// grad_tol and, for smooth objectives, the Hessian is numerically PSD.
//
// The hinge tails make the objectives badly conditioned near their minima
// (curvature spreads over ~9 decades), so after `polish_after` gradient
// steps smooth objectives switch to Newton directions built from |H|,
// shifted by sqrt(|grad|), still under the same Armijo line search.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "landscape/autodiff.hpp"
#include "landscape/mode.hpp"
#include "landscape/network.hpp"

namespace landscape {

struct OptimizerConfig {
  std::size_t max_iters = 20000;
  double grad_tol = 1e-8;
  double init_scale = 0.01;
  /// Length of a saddle-escape perturbation.
  double perturb_radius = 1e-3;
  int max_perturbations = 10;
  /// Iterations between Hessian inspections while 10 * grad_tol > |grad| > grad_tol.
  std::size_t patience = 100;
  double hessian_tol = 1e-4;
  double armijo = 1e-4;
  double initial_step = 1.0;
  double max_step = 1e8;
  /// Plain gradient steps before second-order directions are used
  /// (smooth objectives with at most kMaxDenseHessianParams parameters).
  std::size_t polish_after = 500;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class Termination { converged, max_iters, overflow };

std::string_view to_string(Termination t);

struct RunResult {
  std::vector<double> params;
  double loss = 0.0;
  double grad_norm = 0.0;
  /// Smallest Hessian eigenvalue at the final point; NaN when not computed
  /// (nonsmooth objective, or the run ended before a stationary point).
  double min_hessian_eig = std::numeric_limits<double>::quiet_NaN();
  std::size_t iterations = 0;
  Termination termination = Termination::max_iters;
  int perturbations = 0;
  std::uint64_t seed = 0;
  std::string diagnostic;
};

/// Uniform(-scale, scale) entries. The base-network portion is drawn first,
/// in base layout order, so every augmentation mode shares it for a given
/// seed. The output weight of the special neuron (a, or the exit weight of
/// the last exponential neuron in per-layer mode) is exactly 0.
ParamVector random_init(const NetworkSpec& spec, const Augmentation& mode, double scale, std::uint64_t seed);

RunResult minimize(const Objective& f, std::span<const double> init, const OptimizerConfig& cfg);

/// Runs minimize from random_init(seed) for seeds offset .. offset+n_seeds-1.
/// Results are in seed order regardless of `threads`.
std::vector<RunResult> multi_start(const Objective& f, const ParamLayout& layout, std::size_t n_seeds,
                                   const OptimizerConfig& cfg, std::size_t threads = 1,
                                   std::uint64_t seed_offset = 0);

struct RunSummary {
  std::size_t runs = 0;
  std::size_t converged = 0;
  std::size_t max_iters = 0;
  std::size_t overflow = 0;
  double mean_loss = 0.0;
  double min_loss = 0.0;
  double max_loss = 0.0;
  double mean_iterations = 0.0;
};

RunSummary summarize(std::span<const RunResult> runs);

}  // namespace landscape
