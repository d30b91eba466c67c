#pragma once

// Dense feedforward networks
//
//   f(x) = W_{L+1}^T s(W_L^T s(... s(W_1^T x + b_1) ...) + b_L) + b_{L+1}
//
// with every W_l stored as an (in x out) matrix, row-major, inside one flat
// parameter vector. The same layout machinery also describes the augmented
// parameterizations: a skip neuron appends (a, w, b) after the base block,
// and the per-layer variant widens every hidden layer by one exponential
// neuron sitting at the last index of that layer.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "landscape/ad/dual.hpp"
#include "landscape/mode.hpp"

namespace landscape {

inline constexpr std::size_t kMaxInputDim = 32;
inline constexpr std::size_t kMaxParams = 5000;
/// Exponents beyond this magnitude are reported instead of evaluated.
inline constexpr double kExpGuard = 40.0;

enum class ActivationKind { relu, leaky_relu, tanh, sigmoid };

struct Activation {
  ActivationKind kind = ActivationKind::tanh;
  double slope = 0.01;  // leaky_relu only

  [[nodiscard]] bool smooth() const {
    return kind == ActivationKind::tanh || kind == ActivationKind::sigmoid;
  }
  [[nodiscard]] std::string name() const;
  /// Accepts relu, tanh, sigmoid, leaky_relu and leaky_relu(<slope>).
  static Activation parse(std::string_view text);

  friend bool operator==(const Activation&, const Activation&) = default;
};

struct NetworkSpec {
  std::size_t input_dim = 1;
  std::vector<std::size_t> widths;  // hidden layer widths M_1..M_L
  Activation activation{};

  [[nodiscard]] std::size_t depth() const { return widths.size(); }
  void validate() const;
};

std::size_t param_count(const NetworkSpec& spec);

/// Thrown when an exponential unit would be evaluated outside [-kExpGuard, kExpGuard].
class ExpOverflowError : public std::runtime_error {
 public:
  explicit ExpOverflowError(double exponent, long sample = -1);

  [[nodiscard]] double exponent() const { return exponent_; }
  [[nodiscard]] long sample() const { return sample_; }

 private:
  double exponent_;
  long sample_;
};

/// Rectangular region of the flat parameter vector.
struct Block {
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;

  [[nodiscard]] std::size_t size() const { return rows * cols; }
  [[nodiscard]] std::size_t index(std::size_t r, std::size_t c) const { return offset + r * cols + c; }
};

class ParamLayout {
 public:
  ParamLayout(NetworkSpec spec, Augmentation mode);

  [[nodiscard]] const NetworkSpec& spec() const { return spec_; }
  [[nodiscard]] const Augmentation& mode() const { return mode_; }
  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] std::size_t depth() const { return spec_.depth(); }

  /// Parameter count of the base (unaugmented) network.
  [[nodiscard]] std::size_t base_size() const { return param_count(spec_); }

  /// Layer widths actually stored (hidden widths + 1 in per-layer mode).
  [[nodiscard]] const std::vector<std::size_t>& stored_widths() const { return widths_; }

  /// l = 1..L+1. weight(L+1) is the (M_L x 1) output vector.
  [[nodiscard]] Block weight(std::size_t layer) const;
  [[nodiscard]] Block bias(std::size_t layer) const;

  // Skip-neuron slots (skip_exp / skip_monomial only).
  [[nodiscard]] std::size_t skip_a() const;
  [[nodiscard]] Block skip_w() const;
  [[nodiscard]] std::size_t skip_b() const;

  /// Flat indices of the row leaving the exponential neuron of layer l-1,
  /// l = 2..L+1 (per-layer mode only). For l = L+1 this is the single output
  /// weight of the last exponential neuron.
  [[nodiscard]] std::vector<std::size_t> exp_exit_row(std::size_t layer) const;
  [[nodiscard]] std::vector<std::size_t> all_exp_exit_indices() const;

 private:
  void require_skip(const char* what) const;

  NetworkSpec spec_;
  Augmentation mode_;
  std::vector<std::size_t> widths_;
  std::vector<Block> weights_;
  std::vector<Block> biases_;
  std::size_t size_ = 0;
};

template <class T>
class MatrixRef {
 public:
  MatrixRef(std::span<T> data, Block block) : data_(data), block_(block) {}

  [[nodiscard]] std::size_t rows() const { return block_.rows; }
  [[nodiscard]] std::size_t cols() const { return block_.cols; }
  T& operator()(std::size_t r, std::size_t c) const { return data_[block_.index(r, c)]; }

 private:
  std::span<T> data_;
  Block block_;
};

/// Flat parameter storage with named views. Views alias the storage.
class ParamVector {
 public:
  explicit ParamVector(ParamLayout layout);
  ParamVector(ParamLayout layout, std::vector<double> values);

  [[nodiscard]] const ParamLayout& layout() const { return layout_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] std::span<double> values() { return values_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] const std::vector<double>& vector() const { return values_; }

  MatrixRef<double> weight(std::size_t layer) { return {values_, layout_.weight(layer)}; }
  MatrixRef<const double> weight(std::size_t layer) const { return {values_, layout_.weight(layer)}; }
  std::span<double> bias(std::size_t layer) { return slice(layout_.bias(layer)); }
  std::span<const double> bias(std::size_t layer) const { return slice(layout_.bias(layer)); }

  double& a() { return values_[layout_.skip_a()]; }
  double a() const { return values_[layout_.skip_a()]; }
  std::span<double> w() { return slice(layout_.skip_w()); }
  std::span<const double> w() const { return slice(layout_.skip_w()); }
  double& b() { return values_[layout_.skip_b()]; }
  double b() const { return values_[layout_.skip_b()]; }

  /// Entries of the exponential-exit row w~_l, l = 2..L+1.
  [[nodiscard]] std::vector<double> exp_exit_row(std::size_t layer) const;

 private:
  std::span<double> slice(Block b) { return std::span<double>(values_).subspan(b.offset, b.size()); }
  std::span<const double> slice(Block b) const {
    return std::span<const double>(values_).subspan(b.offset, b.size());
  }

  ParamLayout layout_;
  std::vector<double> values_;
};

/// Base-network parameters contained in an augmented vector (exponential
/// rows and columns dropped in per-layer mode, skip slots dropped otherwise).
std::vector<double> extract_base_params(const ParamVector& params);

/// Inverse of extract_base_params for the base portion; augmentation slots
/// are taken from `extra` in layout order.
ParamVector embed_base_params(const ParamLayout& layout, std::span<const double> base,
                              std::span<const double> extra);

// ---------------------------------------------------------------------------
// Generic evaluation (double or AD scalars)

template <class S>
S activate(const Activation& act, const S& z) {
  using ad::primal;
  using std::exp;
  using std::tanh;
  switch (act.kind) {
    case ActivationKind::relu:
      return primal(z) > 0.0 ? z : S(0.0);
    case ActivationKind::leaky_relu:
      return primal(z) > 0.0 ? z : z * act.slope;
    case ActivationKind::tanh:
      return tanh(z);
    case ActivationKind::sigmoid:
      if (primal(z) >= 0.0) return 1.0 / (1.0 + exp(-z));
      {
        const S e = exp(z);
        return e / (1.0 + e);
      }
  }
  return z;
}

template <class S>
S guarded_exp(const S& z) {
  using ad::primal;
  using std::exp;
  if (std::abs(primal(z)) > kExpGuard) throw ExpOverflowError(primal(z));
  return exp(z);
}

namespace detail {

template <class S, class In>
std::vector<S> affine(std::span<const S> params, Block w, Block b, std::span<const In> in) {
  std::vector<S> out;
  out.reserve(w.cols);
  for (std::size_t j = 0; j < w.cols; ++j) {
    S acc = params[w.index(0, j)] * in[0];
    for (std::size_t i = 1; i < w.rows; ++i) acc = acc + params[w.index(i, j)] * in[i];
    out.push_back(acc + params[b.offset + j]);
  }
  return out;
}

template <class S>
void activate_layer(const ParamLayout& layout, std::vector<S>& z) {
  const bool exp_last = layout.mode().kind == AugmentationKind::per_layer_exp;
  const std::size_t n = exp_last ? z.size() - 1 : z.size();
  for (std::size_t j = 0; j < n; ++j) z[j] = activate(layout.spec().activation, z[j]);
  if (exp_last) z.back() = guarded_exp(z.back());
}

}  // namespace detail

/// Network output for one input. Covers the base network and the per-layer
/// exponential variant; skip neurons are added separately (see augment.hpp).
template <class S>
S network_output(const ParamLayout& layout, std::span<const S> params, std::span<const double> x) {
  const std::size_t L = layout.depth();
  if (L == 0) {
    return detail::affine<S, double>(params, layout.weight(1), layout.bias(1), x)[0];
  }
  std::vector<S> h = detail::affine<S, double>(params, layout.weight(1), layout.bias(1), x);
  detail::activate_layer(layout, h);
  for (std::size_t l = 2; l <= L; ++l) {
    h = detail::affine<S, S>(params, layout.weight(l), layout.bias(l), h);
    detail::activate_layer(layout, h);
  }
  return detail::affine<S, S>(params, layout.weight(L + 1), layout.bias(L + 1), h)[0];
}

/// Base-network forward pass (no augmentation).
double forward(const NetworkSpec& spec, std::span<const double> params, std::span<const double> x);

/// Row-wise forward over an n x d row-major matrix.
std::vector<double> forward_batch(const NetworkSpec& spec, std::span<const double> params,
                                  std::span<const double> features);

}  // namespace landscape
