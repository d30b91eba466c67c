#pragma once

#include <string>
#include <string_view>

namespace landscape {

enum class AugmentationKind { none, skip_exp, per_layer_exp, skip_monomial };

/// Which special neuron(s) are attached to the base network.
struct Augmentation {
  AugmentationKind kind = AugmentationKind::none;
  int degree = 0;  // monomial degree, only meaningful for skip_monomial

  static Augmentation none() { return {}; }
  static Augmentation skip_exp() { return {AugmentationKind::skip_exp, 0}; }
  static Augmentation per_layer_exp() { return {AugmentationKind::per_layer_exp, 0}; }
  static Augmentation skip_monomial(int degree);

  [[nodiscard]] bool is_skip() const {
    return kind == AugmentationKind::skip_exp || kind == AugmentationKind::skip_monomial;
  }
  [[nodiscard]] bool augmented() const { return kind != AugmentationKind::none; }

  /// "none", "skip_exp", "per_layer_exp" or "skip_monomial(<p>)".
  [[nodiscard]] std::string name() const;
  /// Inverse of name(); also accepts "skip_monomial" with a separate degree.
  static Augmentation parse(std::string_view text, int degree = 0);

  friend bool operator==(const Augmentation&, const Augmentation&) = default;
};

}  // namespace landscape
