#include "landscape/network.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace landscape {

// ----------------------------------------------------------------- Augmentation

Augmentation Augmentation::skip_monomial(int degree) {
  if (degree < 1) throw std::invalid_argument("monomial degree must be >= 1");
  return {AugmentationKind::skip_monomial, degree};
}

std::string Augmentation::name() const {
  switch (kind) {
    case AugmentationKind::none:
      return "none";
    case AugmentationKind::skip_exp:
      return "skip_exp";
    case AugmentationKind::per_layer_exp:
      return "per_layer_exp";
    case AugmentationKind::skip_monomial:
      return "skip_monomial(" + std::to_string(degree) + ")";
  }
  return "?";
}

namespace {

bool parse_parenthesized(std::string_view text, std::string_view head, std::string_view& inner) {
  if (text.size() < head.size() + 2 || text.substr(0, head.size()) != head) return false;
  if (text[head.size()] != '(' || text.back() != ')') return false;
  inner = text.substr(head.size() + 1, text.size() - head.size() - 2);
  return true;
}

}  // namespace

Augmentation Augmentation::parse(std::string_view text, int degree) {
  if (text == "none") return none();
  if (text == "skip_exp") return skip_exp();
  if (text == "per_layer_exp") return per_layer_exp();
  if (text == "skip_monomial") return skip_monomial(degree);
  std::string_view inner;
  if (parse_parenthesized(text, "skip_monomial", inner)) {
    int p = 0;
    auto [ptr, ec] = std::from_chars(inner.data(), inner.data() + inner.size(), p);
    if (ec != std::errc{} || ptr != inner.data() + inner.size()) {
      throw std::invalid_argument("bad monomial degree '" + std::string(inner) + "'");
    }
    return skip_monomial(p);
  }
  throw std::invalid_argument("unknown augmentation mode '" + std::string(text) + "'");
}

// ------------------------------------------------------------------- Activation

std::string Activation::name() const {
  switch (kind) {
    case ActivationKind::relu:
      return "relu";
    case ActivationKind::leaky_relu: {
      std::ostringstream os;
      os << "leaky_relu(" << slope << ")";
      return os.str();
    }
    case ActivationKind::tanh:
      return "tanh";
    case ActivationKind::sigmoid:
      return "sigmoid";
  }
  return "?";
}

Activation Activation::parse(std::string_view text) {
  if (text == "relu") return {ActivationKind::relu, 0.0};
  if (text == "tanh") return {ActivationKind::tanh, 0.0};
  if (text == "sigmoid") return {ActivationKind::sigmoid, 0.0};
  if (text == "leaky_relu") return {ActivationKind::leaky_relu, 0.01};
  std::string_view inner;
  if (parse_parenthesized(text, "leaky_relu", inner)) {
    double slope = 0.0;
    auto [ptr, ec] = std::from_chars(inner.data(), inner.data() + inner.size(), slope);
    if (ec != std::errc{} || ptr != inner.data() + inner.size() || !(slope > 0.0 && slope < 1.0)) {
      throw std::invalid_argument("bad leaky_relu slope '" + std::string(inner) + "'");
    }
    return {ActivationKind::leaky_relu, slope};
  }
  throw std::invalid_argument("unknown activation '" + std::string(text) + "'");
}

// ------------------------------------------------------------------ NetworkSpec

void NetworkSpec::validate() const {
  if (input_dim < 1 || input_dim > kMaxInputDim) {
    throw std::invalid_argument("input dimension must be in [1, " + std::to_string(kMaxInputDim) +
                                "], got " + std::to_string(input_dim));
  }
  for (std::size_t w : widths) {
    if (w < 1) throw std::invalid_argument("layer widths must be positive");
  }
  if (param_count(*this) > kMaxParams) {
    throw std::invalid_argument("network has " + std::to_string(param_count(*this)) +
                                " parameters, limit is " + std::to_string(kMaxParams));
  }
}

std::size_t param_count(const NetworkSpec& spec) {
  std::size_t prev = spec.input_dim;
  std::size_t total = 0;
  for (std::size_t w : spec.widths) {
    total += prev * w + w;
    prev = w;
  }
  return total + prev + 1;
}

ExpOverflowError::ExpOverflowError(double exponent, long sample)
    : std::runtime_error("exp-overflow: exponent " + std::to_string(exponent) +
                         (sample >= 0 ? " at sample " + std::to_string(sample) : std::string{}) +
                         " exceeds guard " + std::to_string(kExpGuard)),
      exponent_(exponent),
      sample_(sample) {}

// ------------------------------------------------------------------ ParamLayout

ParamLayout::ParamLayout(NetworkSpec spec, Augmentation mode) : spec_(std::move(spec)), mode_(mode) {
  spec_.validate();
  if (mode_.kind == AugmentationKind::skip_monomial && mode_.degree < 1) {
    throw std::invalid_argument("monomial degree must be >= 1");
  }
  if (mode_.kind == AugmentationKind::per_layer_exp && spec_.widths.empty()) {
    throw std::invalid_argument("per-layer augmentation needs at least one hidden layer");
  }
  widths_ = spec_.widths;
  if (mode_.kind == AugmentationKind::per_layer_exp) {
    for (auto& w : widths_) ++w;
  }
  std::size_t offset = 0;
  std::size_t prev = spec_.input_dim;
  for (std::size_t l = 0; l <= widths_.size(); ++l) {
    const std::size_t out = l < widths_.size() ? widths_[l] : 1;
    weights_.push_back({offset, prev, out});
    offset += prev * out;
    biases_.push_back({offset, 1, out});
    offset += out;
    prev = out;
  }
  if (mode_.is_skip()) offset += spec_.input_dim + 2;
  size_ = offset;
  if (size_ > kMaxParams) {
    throw std::invalid_argument("augmented network has " + std::to_string(size_) +
                                " parameters, limit is " + std::to_string(kMaxParams));
  }
}

Block ParamLayout::weight(std::size_t layer) const {
  if (layer < 1 || layer > weights_.size()) throw std::out_of_range("weight layer index out of range");
  return weights_[layer - 1];
}

Block ParamLayout::bias(std::size_t layer) const {
  if (layer < 1 || layer > biases_.size()) throw std::out_of_range("bias layer index out of range");
  return biases_[layer - 1];
}

void ParamLayout::require_skip(const char* what) const {
  if (!mode_.is_skip()) {
    throw std::logic_error(std::string(what) + " requested on a layout in mode " + mode_.name());
  }
}

std::size_t ParamLayout::skip_a() const {
  require_skip("skip_a");
  return base_size();
}

Block ParamLayout::skip_w() const {
  require_skip("skip_w");
  return {base_size() + 1, 1, spec_.input_dim};
}

std::size_t ParamLayout::skip_b() const {
  require_skip("skip_b");
  return base_size() + 1 + spec_.input_dim;
}

std::vector<std::size_t> ParamLayout::exp_exit_row(std::size_t layer) const {
  if (mode_.kind != AugmentationKind::per_layer_exp) {
    throw std::logic_error("exp_exit_row requested on a layout in mode " + mode_.name());
  }
  if (layer < 2 || layer > depth() + 1) throw std::out_of_range("exp-exit layer must be in [2, L+1]");
  const Block w = weight(layer);
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < w.cols; ++j) idx.push_back(w.index(w.rows - 1, j));
  return idx;
}

std::vector<std::size_t> ParamLayout::all_exp_exit_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t l = 2; l <= depth() + 1; ++l) {
    const auto row = exp_exit_row(l);
    idx.insert(idx.end(), row.begin(), row.end());
  }
  return idx;
}

// ------------------------------------------------------------------ ParamVector

ParamVector::ParamVector(ParamLayout layout) : layout_(std::move(layout)), values_(layout_.size(), 0.0) {}

ParamVector::ParamVector(ParamLayout layout, std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (values_.size() != layout_.size()) {
    throw std::invalid_argument("parameter vector has " + std::to_string(values_.size()) +
                                " entries, layout expects " + std::to_string(layout_.size()));
  }
}

std::vector<double> ParamVector::exp_exit_row(std::size_t layer) const {
  std::vector<double> out;
  for (std::size_t i : layout_.exp_exit_row(layer)) out.push_back(values_[i]);
  return out;
}

namespace {

// Visits (base_index, augmented_index) pairs in base-layout order.
template <class F>
void for_each_base_slot(const ParamLayout& layout, F&& f) {
  const ParamLayout base(layout.spec(), Augmentation::none());
  for (std::size_t l = 1; l <= layout.depth() + 1; ++l) {
    const Block bw = base.weight(l);
    const Block aw = layout.weight(l);
    for (std::size_t r = 0; r < bw.rows; ++r) {
      for (std::size_t c = 0; c < bw.cols; ++c) f(bw.index(r, c), aw.index(r, c));
    }
    const Block bb = base.bias(l);
    const Block ab = layout.bias(l);
    for (std::size_t c = 0; c < bb.cols; ++c) f(bb.offset + c, ab.offset + c);
  }
}

}  // namespace

std::vector<double> extract_base_params(const ParamVector& params) {
  const auto& layout = params.layout();
  std::vector<double> base(layout.base_size());
  for_each_base_slot(layout, [&](std::size_t bi, std::size_t ai) { base[bi] = params.values()[ai]; });
  return base;
}

ParamVector embed_base_params(const ParamLayout& layout, std::span<const double> base,
                              std::span<const double> extra) {
  if (base.size() != layout.base_size() || base.size() + extra.size() != layout.size()) {
    throw std::invalid_argument("embed_base_params: size mismatch");
  }
  std::vector<double> values(layout.size(), 0.0);
  std::vector<bool> used(layout.size(), false);
  for_each_base_slot(layout, [&](std::size_t bi, std::size_t ai) {
    values[ai] = base[bi];
    used[ai] = true;
  });
  std::size_t k = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!used[i]) values[i] = extra[k++];
  }
  return ParamVector(layout, std::move(values));
}

// ---------------------------------------------------------------------- forward

double forward(const NetworkSpec& spec, std::span<const double> params, std::span<const double> x) {
  const ParamLayout layout(spec, Augmentation::none());
  if (params.size() != layout.size()) {
    throw std::invalid_argument("forward: expected " + std::to_string(layout.size()) +
                                " parameters, got " + std::to_string(params.size()));
  }
  if (x.size() != spec.input_dim) {
    throw std::invalid_argument("forward: input has dimension " + std::to_string(x.size()) +
                                ", network expects " + std::to_string(spec.input_dim));
  }
  return network_output<double>(layout, params, x);
}

std::vector<double> forward_batch(const NetworkSpec& spec, std::span<const double> params,
                                  std::span<const double> features) {
  const std::size_t d = spec.input_dim;
  if (d == 0 || features.size() % d != 0) {
    throw std::invalid_argument("forward_batch: feature matrix is not a multiple of the input dimension");
  }
  const ParamLayout layout(spec, Augmentation::none());
  if (params.size() != layout.size()) {
    throw std::invalid_argument("forward_batch: expected " + std::to_string(layout.size()) +
                                " parameters, got " + std::to_string(params.size()));
  }
  std::vector<double> out;
  out.reserve(features.size() / d);
  for (std::size_t i = 0; i < features.size(); i += d) {
    out.push_back(network_output<double>(layout, params, features.subspan(i, d)));
  }
  return out;
}

}  // namespace landscape
