#pragma once

// Straightforward re-implementations used as oracles.

#include <cmath>
#include <vector>

#include "landscape/network.hpp"

namespace testref {

using landscape::Activation;
using landscape::ActivationKind;
using landscape::NetworkSpec;

inline double act_ref(const Activation& a, double z) {
  switch (a.kind) {
    case ActivationKind::relu:
      return z > 0 ? z : 0.0;
    case ActivationKind::leaky_relu:
      return z > 0 ? z : a.slope * z;
    case ActivationKind::tanh:
      return std::tanh(z);
    case ActivationKind::sigmoid:
      return 1.0 / (1.0 + std::exp(-z));
  }
  return z;
}

// Layer-by-layer re-evaluation from the documented flat layout:
// W_1 (d x M_1, row-major), b_1, ..., W_{L+1} (M_L x 1), b_{L+1}.
// With exp_last, every hidden layer has one extra unit at its end whose
// activation is exp.
inline double forward_ref(const NetworkSpec& spec, const std::vector<double>& p, const std::vector<double>& x,
                   bool exp_last = false) {
  std::vector<double> h = x;
  std::size_t off = 0;
  std::vector<std::size_t> widths = spec.widths;
  if (exp_last) {
    for (auto& w : widths) ++w;
  }
  widths.push_back(1);
  for (std::size_t l = 0; l < widths.size(); ++l) {
    const std::size_t in = h.size();
    const std::size_t out = widths[l];
    std::vector<double> z(out, 0.0);
    for (std::size_t j = 0; j < out; ++j) {
      for (std::size_t i = 0; i < in; ++i) z[j] += p[off + i * out + j] * h[i];
    }
    off += in * out;
    for (std::size_t j = 0; j < out; ++j) z[j] += p[off + j];
    off += out;
    if (l + 1 < widths.size()) {
      for (std::size_t j = 0; j < out; ++j) {
        z[j] = (exp_last && j + 1 == out) ? std::exp(z[j]) : act_ref(spec.activation, z[j]);
      }
    }
    h = z;
  }
  return h[0];
}

}  // namespace testref
