#include "landscape/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace landscape {

namespace {

void check_dimension(const Objective& f, std::size_t n, const char* what) {
  if (n != f.dimension()) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(f.dimension()) +
                                " parameters, got " + std::to_string(n));
  }
}

double fd_step(double x, double rel) { return rel * std::max(1.0, std::abs(x)); }

}  // namespace

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

ValueAndGradient value_and_grad(const Objective& f, std::span<const double> params) {
  check_dimension(f, params.size(), "grad");
  ad::Tape<double> tape;
  tape.reserve(params.size() * 8);
  std::vector<GradVar> vars;
  vars.reserve(params.size());
  for (double p : params) vars.push_back(tape.variable(p));
  const GradVar out = f.record(vars);
  return {out.value, tape.gradient(out, params.size())};
}

std::vector<double> grad(const Objective& f, std::span<const double> params) {
  return value_and_grad(f, params).gradient;
}

std::vector<double> hvp(const Objective& f, std::span<const double> params,
                        std::span<const double> direction) {
  check_dimension(f, params.size(), "hvp");
  if (direction.size() != params.size()) {
    throw std::invalid_argument("hvp: direction length " + std::to_string(direction.size()) +
                                " != parameter length " + std::to_string(params.size()));
  }
  ad::Tape<ad::Dual> tape;
  tape.reserve(params.size() * 8);
  std::vector<HvpVar> vars;
  vars.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    vars.push_back(tape.variable(ad::Dual(params[i], direction[i])));
  }
  const HvpVar out = f.record(vars);
  const auto adj = tape.gradient(out, params.size());
  std::vector<double> result(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) result[i] = adj[i].d;
  return result;
}

Eigen::MatrixXd dense_hessian(const Objective& f, std::span<const double> params,
                              double& asymmetry) {
  const std::size_t n = params.size();
  if (n > kMaxDenseHessianParams) {
    throw std::invalid_argument("dense_hessian: " + std::to_string(n) +
                                " parameters exceeds the dense limit of " +
                                std::to_string(kMaxDenseHessianParams));
  }
  Eigen::MatrixXd h(n, n);
  std::vector<double> basis(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    basis[j] = 1.0;
    const auto col = hvp(f, params, basis);
    basis[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    }
  }
  asymmetry = n == 0 ? 0.0 : (h - h.transpose()).cwiseAbs().maxCoeff();
  return 0.5 * (h + h.transpose());
}

Eigen::MatrixXd dense_hessian(const Objective& f, std::span<const double> params) {
  double asymmetry = 0.0;
  return dense_hessian(f, params, asymmetry);
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

std::vector<double> fd_gradient(const Objective& f, std::span<const double> params,
                                double rel_step) {
  check_dimension(f, params.size(), "fd_gradient");
  std::vector<double> x(params.begin(), params.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    const double h = fd_step(orig, rel_step);
    x[i] = orig + h;
    const double up = f.value(x);
    x[i] = orig - h;
    const double down = f.value(x);
    x[i] = orig;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd fd_hessian(const Objective& f, std::span<const double> params, double rel_step) {
  check_dimension(f, params.size(), "fd_hessian");
  const std::size_t n = params.size();
  std::vector<double> x(params.begin(), params.end());
  Eigen::MatrixXd h(n, n);
  auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
    const double xi = x[i];
    const double xj = x[j];
    x[i] += di;
    x[j] += dj;
    const double v = f.value(x);
    x[i] = xi;
    x[j] = xj;
    return v;
  };
  const double center = f.value(x);
  for (std::size_t i = 0; i < n; ++i) {
    const double hi = fd_step(x[i], rel_step);
    const auto ii = static_cast<Eigen::Index>(i);
    h(ii, ii) = (at(i, hi, i, 0.0) - 2.0 * center + at(i, -hi, i, 0.0)) / (hi * hi);
    for (std::size_t j = 0; j < i; ++j) {
      const double hj = fd_step(x[j], rel_step);
      const double v = (at(i, hi, j, hj) - at(i, hi, j, -hj) - at(i, -hi, j, hj) + at(i, -hi, j, -hj)) /
                       (4.0 * hi * hj);
      const auto jj = static_cast<Eigen::Index>(j);
      h(ii, jj) = v;
      h(jj, ii) = v;
    }
  }
  return h;
}

}  // namespace landscape
