#pragma once

// Labelled binary-classification datasets, synthetic generators with known
// ground truth, and the on-disk CSV format:
//
//   # landscape-lab v1; d=<d>; n=<n>; generator=<name>; t=<t>; seed=<s>
//   x1,...,xd,label
//
// Optional extra header fields (min_error=, margin=, witness=) follow the
// seed field. Numbers are written with 17 significant digits so that a save
// and load round trip is bit exact.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace landscape {

/// Sparse multivariate polynomial, sum of coeff * prod_k x_k^exponents[k].
struct Polynomial {
  struct Term {
    double coeff = 0.0;
    std::vector<int> exponents;
    friend bool operator==(const Term&, const Term&) = default;
  };
  std::vector<Term> terms;

  [[nodiscard]] double operator()(std::span<const double> x) const;
  [[nodiscard]] int degree() const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;
};

struct DatasetMeta {
  std::string generator = "file";
  std::uint64_t seed = 0;
  /// Degree t of a polynomial separating the data, when one is declared.
  std::optional<int> degree;
  /// Declared minimum achievable misclassification rate (conflicting labels).
  std::optional<double> min_error;
  /// Separating polynomial with y_i * P(x_i) >= margin for every sample.
  std::optional<Polynomial> witness;
  double margin = 0.0;

  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

class Dataset {
 public:
  Dataset(std::size_t dim, std::vector<double> features, std::vector<int> labels, DatasetMeta meta = {});

  [[nodiscard]] std::size_t size() const { return labels_.size(); }
  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features_).subspan(i * dim_, dim_);
  }
  [[nodiscard]] std::span<const double> features() const { return features_; }
  [[nodiscard]] std::span<const int> labels() const { return labels_; }
  [[nodiscard]] int label(std::size_t i) const { return labels_[i]; }
  [[nodiscard]] const DatasetMeta& meta() const { return meta_; }

  /// Smallest y_i * P(x_i) over the samples for the stored witness.
  [[nodiscard]] std::optional<double> witness_margin() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t dim_;
  std::vector<double> features_;
  std::vector<int> labels_;
  DatasetMeta meta_;
};

/// Uniform samples in the radius-3 ball, labelled by a random hyperplane;
/// samples closer than `margin` to the plane are redrawn.
Dataset gen_linearly_separable(std::size_t n, std::size_t d, double margin, std::uint64_t seed);

/// The four points (+-1, +-1), labelled by the product of their signs.
Dataset gen_xor();

/// Samples in [-1.5, 1.5]^d labelled by the sign of a random degree-t
/// polynomial normalized to max |P| = 1 on the cloud; |P(x)| < 0.1 is redrawn.
Dataset gen_poly_separable(std::size_t n, std::size_t d, int degree, std::uint64_t seed);

/// Two concentric rings in the plane: radius < 1 labelled +1, radius in
/// (2, 2.8] labelled -1. Separated by 2.25 - |x|^2.
Dataset gen_circles(std::size_t n, std::uint64_t seed);

/// n_groups distinct points in [-2, 2]^2 each repeated `dups` times, with
/// round(flip_fraction * dups) copies carrying the opposite of the group's
/// majority label.
Dataset gen_conflicting(std::size_t n_groups, std::size_t dups, double flip_fraction, std::uint64_t seed);

void save(const Dataset& data, const std::filesystem::path& path);
Dataset load(const std::filesystem::path& path);

/// Serialized text (exactly what save() writes).
std::string to_text(const Dataset& data);
Dataset from_text(const std::string& text);

/// Decimal text with 17 significant digits (parses back to the same double).
std::string format_double(double v);

}  // namespace landscape
