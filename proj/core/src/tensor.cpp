#include "landscape/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "landscape/ad/dual.hpp"

namespace landscape {

WeightedPointTensor::WeightedPointTensor(int order, std::size_t dim, std::vector<double> coefficients,
                                         std::vector<double> points)
    : order_(order), dim_(dim), coefficients_(std::move(coefficients)), points_(std::move(points)) {
  if (order_ < 0) throw std::invalid_argument("tensor order must be >= 0");
  if (dim_ == 0) throw std::invalid_argument("tensor dimension must be positive");
  if (points_.size() != coefficients_.size() * dim_) {
    throw std::invalid_argument("tensor has " + std::to_string(coefficients_.size()) + " coefficients but " +
                                std::to_string(points_.size()) + " point entries for dimension " +
                                std::to_string(dim_));
  }
}

double WeightedPointTensor::magnitude_scale() const {
  double total = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    double sq = 0.0;
    for (double x : point(i)) sq += x * x;
    total += std::abs(coefficients_[i]) * ad::ipow(std::max(1.0, std::sqrt(sq)), order_);
  }
  return total;
}

AugmentedPoint::AugmentedPoint(std::span<const double> x) : coords_(x.begin(), x.end()) { coords_.push_back(1.0); }

WeightedPointTensor lifted_tensor(int order, std::size_t dim, std::vector<double> coefficients,
                                  std::span<const double> points) {
  if (dim == 0 || points.size() != coefficients.size() * dim) {
    throw std::invalid_argument("lifted_tensor: point matrix does not match coefficients");
  }
  std::vector<double> lifted;
  lifted.reserve(coefficients.size() * (dim + 1));
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    const AugmentedPoint p(points.subspan(i * dim, dim));
    lifted.insert(lifted.end(), p.coords().begin(), p.coords().end());
  }
  return WeightedPointTensor(order, dim + 1, std::move(coefficients), std::move(lifted));
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double rank1(const WeightedPointTensor& t, std::span<const double> u) {
  double total = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) total += t.coefficients()[i] * ad::ipow(dot(t.point(i), u), t.order());
  return total;
}

bool normalize(std::vector<double>& u) {
  const double n = std::sqrt(dot(u, u));
  if (!(n > 0.0) || !std::isfinite(n)) return false;
  for (auto& x : u) x /= n;
  return true;
}

// Ascent on g(u) = sign * T(u,...,u) restricted to the unit sphere.
class SphereAscent {
 public:
  SphereAscent(const WeightedPointTensor& t, double sign) : t_(t), sign_(sign), d_(t.dim()) {}

  double value(std::span<const double> u) const { return sign_ * rank1(t_, u); }

  // Euclidean gradient.
  std::vector<double> gradient(std::span<const double> u) const {
    std::vector<double> g(d_, 0.0);
    const int k = t_.order();
    for (std::size_t i = 0; i < t_.size(); ++i) {
      const auto x = t_.point(i);
      const double w = sign_ * k * t_.coefficients()[i] * ad::ipow(dot(x, u), k - 1);
      for (std::size_t a = 0; a < d_; ++a) g[a] += w * x[a];
    }
    return g;
  }

  Eigen::MatrixXd hessian(std::span<const double> u) const {
    const auto d = static_cast<Eigen::Index>(d_);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    const int k = t_.order();
    if (k < 2) return h;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      const auto x = t_.point(i);
      const Eigen::Map<const Eigen::VectorXd> xv(x.data(), d);
      h.noalias() += (sign_ * k * (k - 1) * t_.coefficients()[i] * ad::ipow(dot(x, u), k - 2)) * xv * xv.transpose();
    }
    return h;
  }

  std::vector<double> tangent(std::span<const double> u, std::vector<double> g) const {
    const double radial = dot(u, g);
    for (std::size_t a = 0; a < d_; ++a) g[a] -= radial * u[a];
    return g;
  }

  // Projected gradient ascent with an adaptive backtracking step.
  void ascend(std::vector<double>& u, double initial_step) const {
    constexpr int kMaxIters = 2000;
    constexpr double kArmijo = 1e-4;
    double step = initial_step;
    double current = value(u);
    for (int it = 0; it < kMaxIters; ++it) {
      const auto rg = tangent(u, gradient(u));
      const double gn2 = dot(rg, rg);
      if (gn2 == 0.0) return;
      bool accepted = false;
      while (step > 1e-300) {
        std::vector<double> trial(d_);
        for (std::size_t a = 0; a < d_; ++a) trial[a] = u[a] + step * rg[a];
        if (normalize(trial)) {
          const double v = value(trial);
          if (v >= current + kArmijo * step * gn2) {
            const double gain = v - current;
            u = std::move(trial);
            current = v;
            step *= 2.0;
            accepted = true;
            if (gain <= 1e-15 * std::max(1.0, std::abs(current))) return;
            break;
          }
        }
        step *= 0.5;
      }
      if (!accepted) return;
    }
  }

  // Riemannian Newton refinement; keeps only steps that do not decrease g.
  void polish(std::vector<double>& u) const {
    constexpr int kMaxIters = 30;
    const auto d = static_cast<Eigen::Index>(d_);
    double current = value(u);
    for (int it = 0; it < kMaxIters; ++it) {
      const auto g = gradient(u);
      const auto rg = tangent(u, g);
      const Eigen::Map<const Eigen::VectorXd> uv(u.data(), d);
      const Eigen::Map<const Eigen::VectorXd> rgv(rg.data(), d);
      const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(d, d) - uv * uv.transpose();
      const Eigen::MatrixXd riem = proj * hessian(u) * proj - dot(u, g) * proj;
      const Eigen::MatrixXd system = riem + uv * uv.transpose();
      Eigen::VectorXd eta = system.colPivHouseholderQr().solve(-rgv);
      eta -= uv * uv.dot(eta);
      if (!eta.allFinite() || eta.norm() < 1e-16) return;
      std::vector<double> trial(d_);
      for (std::size_t a = 0; a < d_; ++a) trial[a] = u[a] + eta(static_cast<Eigen::Index>(a));
      if (!normalize(trial)) return;
      const double v = value(trial);
      if (!(v >= current)) return;
      u = std::move(trial);
      current = v;
    }
  }

 private:
  const WeightedPointTensor& t_;
  double sign_;
  std::size_t d_;
};

}  // namespace

double eval_rank1(const WeightedPointTensor& t, std::span<const double> u) {
  if (u.size() != t.dim()) {
    throw std::invalid_argument("eval_rank1: direction has dimension " + std::to_string(u.size()) + ", tensor has " +
                                std::to_string(t.dim()));
  }
  if (std::abs(std::sqrt(dot(u, u)) - 1.0) > 1e-12) throw std::invalid_argument("eval_rank1: direction is not a unit vector");
  return rank1(t, u);
}

SymMaxResult sym_max(const WeightedPointTensor& t, int restarts, std::uint64_t seed) {
  const std::size_t d = t.dim();
  std::vector<double> e1(d, 0.0);
  e1[0] = 1.0;
  if (t.order() == 0) return {std::abs(rank1(t, e1)), e1};
  if (restarts < 1) throw std::invalid_argument("sym_max needs at least one restart");

  const double scale = t.magnitude_scale();
  const double initial_step = scale > 0.0 ? 1.0 / (t.order() * scale) : 1.0;
  const bool odd = t.order() % 2 == 1;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SymMaxResult best{-1.0, e1};
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> start(d);
    do {
      for (auto& x : start) x = gauss(rng);
    } while (!normalize(start));
    for (double sign : {1.0, -1.0}) {
      if (odd && sign < 0.0) break;  // T(-u) = -T(u)
      const SphereAscent ascent(t, sign);
      auto u = start;
      ascent.ascend(u, initial_step);
      ascent.polish(u);
      const double v = std::abs(rank1(t, u));
      if (v > best.value) best = {v, u};
    }
  }
  return best;
}

bool is_zero_tensor(const WeightedPointTensor& t, double tol, int restarts) {
  if (!(tol > 0.0)) throw std::invalid_argument("is_zero_tensor: tolerance must be positive");
  return sym_max(t, restarts).value <= tol;
}

double DenseTensor::at(std::span<const std::size_t> index) const {
  if (index.size() != static_cast<std::size_t>(order)) throw std::invalid_argument("DenseTensor::at: wrong index arity");
  std::size_t flat = 0;
  for (std::size_t i : index) {
    if (i >= dim) throw std::out_of_range("DenseTensor::at: index out of range");
    flat = flat * dim + i;
  }
  return data[flat];
}

double DenseTensor::contract(std::span<const double> u) const {
  if (u.size() != dim) throw std::invalid_argument("DenseTensor::contract: dimension mismatch");
  std::vector<double> v = data;
  for (int j = 0; j < order; ++j) {
    std::vector<double> next(v.size() / dim, 0.0);
    for (std::size_t m = 0; m < next.size(); ++m) {
      for (std::size_t a = 0; a < dim; ++a) next[m] += v[m * dim + a] * u[a];
    }
    v = std::move(next);
  }
  return v[0];
}

DenseTensor dense_materialize(const WeightedPointTensor& t) {
  const std::size_t d = t.dim();
  double entries = 1.0;
  for (int j = 0; j < t.order(); ++j) entries *= static_cast<double>(d);
  if (entries > static_cast<double>(kMaxDenseEntries)) {
    throw std::invalid_argument("dense_materialize: d^k = " + std::to_string(entries) + " exceeds " +
                                std::to_string(kMaxDenseEntries));
  }
  DenseTensor out{t.order(), d, std::vector<double>(static_cast<std::size_t>(entries), 0.0)};
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto x = t.point(i);
    std::vector<double> outer{t.coefficients()[i]};
    for (int j = 0; j < t.order(); ++j) {
      std::vector<double> next;
      next.reserve(outer.size() * d);
      for (double o : outer) {
        for (double xa : x) next.push_back(o * xa);
      }
      outer = std::move(next);
    }
    for (std::size_t e = 0; e < outer.size(); ++e) out.data[e] += outer[e];
  }
  return out;
}

}  // namespace landscape
