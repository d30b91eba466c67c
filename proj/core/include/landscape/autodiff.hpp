#pragma once

// Differentiation of scalar objectives over a flat parameter vector.
//
// An Objective is evaluated at three scalar types: plain doubles (values),
// Var<double> (reverse-mode gradient) and Var<Dual> (forward-over-reverse
// Hessian-vector products). make_objective() wraps one generic callable so
// all three share a single definition of the function.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "landscape/ad/dual.hpp"
#include "landscape/ad/tape.hpp"

namespace landscape {

using GradVar = ad::Var<double>;
using HvpVar = ad::Var<ad::Dual>;

class Objective {
 public:
  virtual ~Objective() = default;

  [[nodiscard]] virtual std::size_t dimension() const = 0;
  [[nodiscard]] virtual double value(std::span<const double> params) const = 0;
  [[nodiscard]] virtual GradVar record(std::span<const GradVar> params) const = 0;
  [[nodiscard]] virtual HvpVar record(std::span<const HvpVar> params) const = 0;

  /// False when the objective contains kinks (relu family); second-order
  /// checks are skipped for such objectives.
  [[nodiscard]] virtual bool smooth() const { return true; }
};

template <class F>
class GenericObjective final : public Objective {
 public:
  GenericObjective(std::size_t dim, F f, bool smooth) : dim_(dim), f_(std::move(f)), smooth_(smooth) {}

  [[nodiscard]] std::size_t dimension() const override { return dim_; }
  [[nodiscard]] double value(std::span<const double> p) const override { return f_(p); }
  [[nodiscard]] GradVar record(std::span<const GradVar> p) const override { return f_(p); }
  [[nodiscard]] HvpVar record(std::span<const HvpVar> p) const override { return f_(p); }
  [[nodiscard]] bool smooth() const override { return smooth_; }

 private:
  std::size_t dim_;
  F f_;
  bool smooth_;
};

/// `f` must be callable as S f(std::span<const S>) for S in {double, GradVar, HvpVar}.
template <class F>
GenericObjective<F> make_objective(std::size_t dim, F f, bool smooth = true) {
  return GenericObjective<F>(dim, std::move(f), smooth);
}

struct ValueAndGradient {
  double value = 0.0;
  std::vector<double> gradient;
};

/// Largest problem for which dense Hessians are formed.
inline constexpr std::size_t kMaxDenseHessianParams = 600;

ValueAndGradient value_and_grad(const Objective& f, std::span<const double> params);
std::vector<double> grad(const Objective& f, std::span<const double> params);

/// H(params) * direction by forward-over-reverse differentiation.
std::vector<double> hvp(const Objective& f, std::span<const double> params,
                        std::span<const double> direction);

/// Symmetrized dense Hessian built column by column from HVPs.
Eigen::MatrixXd dense_hessian(const Objective& f, std::span<const double> params);

/// Same, but also reports the largest |H - H^T| entry seen before symmetrizing.
Eigen::MatrixXd dense_hessian(const Objective& f, std::span<const double> params,
                              double& asymmetry);

double min_eigenvalue(const Eigen::MatrixXd& symmetric);

// Finite-difference oracles. Central differences with per-coordinate step
// h_i = rel_step * max(1, |params_i|).

inline constexpr double kFdRelStep = 1e-5;

std::vector<double> fd_gradient(const Objective& f, std::span<const double> params,
                                double rel_step = kFdRelStep);

/// Dense Hessian from central differences of values only (four-point stencil).
Eigen::MatrixXd fd_hessian(const Objective& f, std::span<const double> params,
                           double rel_step = 1e-4);

double l2_norm(std::span<const double> v);

}  // namespace landscape
