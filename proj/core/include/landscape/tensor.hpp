#pragma once

// Symmetric tensors given in factored form T = sum_i c_i x_i^{(x)k}.
//
// A symmetric tensor is zero iff its rank-1 contraction
// T(u, ..., u) = sum_i c_i (u^T x_i)^k vanishes on the whole unit sphere, so
// the zero test reduces to maximizing |T(u, ..., u)| over unit u.

#include <cstdint>
#include <span>
#include <vector>

namespace landscape {

class WeightedPointTensor {
 public:
  /// `points` is n x d row-major; coefficients has n entries.
  WeightedPointTensor(int order, std::size_t dim, std::vector<double> coefficients, std::vector<double> points);

  [[nodiscard]] int order() const { return order_; }
  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t size() const { return coefficients_.size(); }
  [[nodiscard]] std::span<const double> coefficients() const { return coefficients_; }
  [[nodiscard]] std::span<const double> point(std::size_t i) const {
    return std::span<const double>(points_).subspan(i * dim_, dim_);
  }

  /// sum_i |c_i| * max(1, ||x_i||)^k, the scale used for zero tolerances.
  [[nodiscard]] double magnitude_scale() const;

 private:
  int order_;
  std::size_t dim_;
  std::vector<double> coefficients_;
  std::vector<double> points_;
};

/// A sample lifted to (x, 1), so affine forms u^T x + v become inner products.
class AugmentedPoint {
 public:
  explicit AugmentedPoint(std::span<const double> x);
  [[nodiscard]] std::span<const double> coords() const { return coords_; }

 private:
  std::vector<double> coords_;
};

/// Tensor over the lifted points (x_i, 1); dimension d + 1.
WeightedPointTensor lifted_tensor(int order, std::size_t dim, std::vector<double> coefficients,
                                  std::span<const double> points);

/// sum_i c_i (u^T x_i)^k for a unit vector u (rejects |‖u‖ - 1| > 1e-12).
double eval_rank1(const WeightedPointTensor& t, std::span<const double> u);

struct SymMaxResult {
  double value = 0.0;             // max |T(u,...,u)| found
  std::vector<double> argmax;     // unit vector attaining it
};

inline constexpr int kDefaultRestarts = 32;

/// Maximize |T(u,...,u)| over the unit sphere: projected gradient ascent with
/// backtracking from `restarts` seeded random starts, each polished by
/// Riemannian Newton steps. Order 0 returns |sum_i c_i|.
SymMaxResult sym_max(const WeightedPointTensor& t, int restarts = kDefaultRestarts, std::uint64_t seed = 0);

bool is_zero_tensor(const WeightedPointTensor& t, double tol, int restarts = kDefaultRestarts);

struct DenseTensor {
  int order = 0;
  std::size_t dim = 0;
  std::vector<double> data;  // row-major over (i_1, ..., i_k)

  [[nodiscard]] double at(std::span<const std::size_t> index) const;
  /// Full contraction with u (x) ... (x) u.
  [[nodiscard]] double contract(std::span<const double> u) const;
};

inline constexpr std::size_t kMaxDenseEntries = 1'000'000;

DenseTensor dense_materialize(const WeightedPointTensor& t);

}  // namespace landscape
