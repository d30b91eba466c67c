#include "landscape/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

namespace landscape {

void Thresholds::validate() const {
  if (!(grad > 0.0) || !(hessian > 0.0) || !(inactivity > 0.0) || !(tensor_rel > 0.0)) {
    throw std::invalid_argument("certificate tolerances must be positive");
  }
  if (max_order < 0) throw std::invalid_argument("max moment order must be >= 0");
  if (!(probe_c > 0.0)) throw std::invalid_argument("probe constant C must be positive");
  if (!(probe_radius > 0.0 && probe_radius < 1.0)) throw std::invalid_argument("probe radius must lie in (0, 1)");
  if (probe_dirs < 1) throw std::invalid_argument("probe needs at least one direction");
  if (restarts < 1) throw std::invalid_argument("tensor search needs at least one restart");
}

InactivityReport inactivity_check(const ParamVector& params, const Augmentation& mode, double tol) {
  if (!(params.layout().mode() == mode)) {
    throw std::invalid_argument("inactivity_check: parameters are laid out for " + params.layout().mode().name() +
                                ", not " + mode.name());
  }
  InactivityReport r;
  if (mode.is_skip()) {
    r.magnitude = std::abs(params.a());
  } else if (mode.kind == AugmentationKind::per_layer_exp) {
    for (std::size_t i : params.layout().all_exp_exit_indices()) {
      r.magnitude = std::max(r.magnitude, std::abs(params.values()[i]));
    }
  }
  r.pass = r.magnitude <= tol;
  return r;
}

double MomentResiduals::max_residual() const {
  double m = 0.0;
  for (double r : residuals) m = std::max(m, r);
  return m;
}

double MomentResiduals::max_ratio() const {
  double m = 0.0;
  for (std::size_t k = 0; k < residuals.size(); ++k) {
    if (scales[k] > 0.0) m = std::max(m, residuals[k] / scales[k]);
  }
  return m;
}

bool MomentResiduals::pass(double tensor_rel) const {
  for (std::size_t k = 0; k < residuals.size(); ++k) {
    if (residuals[k] > tensor_rel * scales[k]) return false;
  }
  return true;
}

namespace {

void check_scores(const Dataset& data, std::span<const double> scores) {
  if (scores.size() != data.size()) {
    throw std::invalid_argument("expected " + std::to_string(data.size()) + " scores, got " +
                                std::to_string(scores.size()));
  }
}

MomentResiduals residuals_for(std::size_t dim, const std::vector<double>& coeffs, const std::vector<double>& points,
                              int max_order, int restarts) {
  if (max_order < 0) throw std::invalid_argument("max moment order must be >= 0");
  MomentResiduals out;
  for (int k = 0; k <= max_order; ++k) {
    const WeightedPointTensor t(k, dim, coeffs, points);
    out.residuals.push_back(sym_max(t, restarts).value);
    out.scales.push_back(t.magnitude_scale());
  }
  return out;
}

}  // namespace

MomentResiduals moment_residuals(const Dataset& data, std::span<const double> scores, std::span<const double> w,
                                 double b, const HingeLoss& loss, int max_order, int restarts) {
  check_scores(data, scores);
  if (w.size() != data.dim()) throw std::invalid_argument("moment_residuals: w does not match the data dimension");
  std::vector<double> coeffs;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.row(i);
    double pre = b;
    for (std::size_t k = 0; k < x.size(); ++k) pre += w[k] * x[k];
    const double y = data.label(i);
    const double slope = loss.grad(-y * scores[i]);
    // exp is only evaluated where it matters, so flat samples never overflow.
    coeffs.push_back(slope == 0.0 ? 0.0 : slope * y * guarded_exp(pre));
  }
  const auto f = data.features();
  return residuals_for(data.dim(), coeffs, std::vector<double>(f.begin(), f.end()), max_order, restarts);
}

MomentResiduals affine_moment_residuals(const Dataset& data, std::span<const double> scores, const HingeLoss& loss,
                                        int max_order, int restarts) {
  check_scores(data, scores);
  std::vector<double> coeffs;
  std::vector<double> lifted;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double y = data.label(i);
    coeffs.push_back(loss.grad(-y * scores[i]) * y);
    const AugmentedPoint p(data.row(i));
    lifted.insert(lifted.end(), p.coords().begin(), p.coords().end());
  }
  return residuals_for(data.dim() + 1, coeffs, lifted, max_order, restarts);
}

double majority_vote_oracle(const Dataset& data) {
  std::map<std::vector<double>, std::pair<std::size_t, std::size_t>> groups;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.row(i);
    auto& g = groups[std::vector<double>(x.begin(), x.end())];
    (data.label(i) > 0 ? g.first : g.second) += 1;
  }
  std::size_t minority = 0;
  for (const auto& [x, counts] : groups) minority += std::min(counts.first, counts.second);
  return static_cast<double>(minority) / static_cast<double>(data.size());
}

StationarityOrder kth_order_probe(const Objective& f, std::span<const double> params, int k, double c, double radius,
                                  int n_dirs, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("probe order k must be >= 1");
  if (!(radius > 0.0 && radius < 1.0)) throw std::invalid_argument("probe radius must lie in (0, 1)");
  if (n_dirs < 1) throw std::invalid_argument("probe needs at least one direction");
  if (!(c > 0.0)) throw std::invalid_argument("probe constant C must be positive");
  constexpr int kMagnitudes = 8;
  StationarityOrder out{k, c, radius, n_dirs, true, std::numeric_limits<double>::infinity()};
  const double base = f.value(params);
  const std::size_t n = params.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> dir(n);
  std::vector<double> probe(n);
  for (int d = 0; d < n_dirs; ++d) {
    double norm = 0.0;
    while (!(norm > 0.0)) {
      for (auto& v : dir) v = gauss(rng);
      norm = l2_norm(dir);
    }
    for (auto& v : dir) v /= norm;
    for (int j = 0; j < kMagnitudes; ++j) {
      const double r = radius * std::pow(10.0, -3.0 + 3.0 * j / (kMagnitudes - 1));
      for (std::size_t i = 0; i < n; ++i) probe[i] = params[i] + r * dir[i];
      double value = 0.0;
      try {
        value = f.value(probe);
      } catch (const ExpOverflowError&) {
        continue;  // the loss blows up there, which is no descent
      }
      const double slack = value - base + c * std::pow(r, k + 1);
      out.worst_slack = std::min(out.worst_slack, slack);
      if (slack < 0.0) out.pass = false;
    }
  }
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::certified_global:
      return "certified-global";
    case Verdict::stationary_only:
      return "stationary-only";
    case Verdict::failed:
      return "failed";
  }
  return "unknown";
}

Verdict judge(const Certificate& cert, const Thresholds& th, std::vector<std::string>* failures) {
  std::vector<std::string> local;
  auto& fails = failures ? *failures : local;
  fails.clear();
  if (!(cert.inactivity <= th.inactivity)) fails.emplace_back("inactivity");
  if (!cert.moments.pass(th.tensor_rel)) fails.emplace_back("tensor_residual");
  if (cert.train_error != cert.oracle_error) fails.emplace_back("train_error");
  const bool grad_ok = cert.grad_norm <= th.grad;
  if (!grad_ok) fails.emplace_back("grad_norm");
  bool curvature_ok = true;
  if (cert.min_hessian_eig) {
    curvature_ok = *cert.min_hessian_eig >= -th.hessian;
    if (!curvature_ok) fails.emplace_back("hessian");
  } else if (cert.probe) {
    curvature_ok = cert.probe->pass;
    if (!curvature_ok) fails.emplace_back("probe");
  }
  if (fails.empty()) return Verdict::certified_global;
  if (grad_ok && !curvature_ok) return Verdict::stationary_only;
  return Verdict::failed;
}

Certificate full_certificate(const TrainingProblem& problem, std::span<const double> params, const Thresholds& th) {
  th.validate();
  const ParamVector pv(problem.layout, std::vector<double>(params.begin(), params.end()));
  const AugmentedObjective obj(problem);
  const auto& mode = problem.layout.mode();
  const auto& hinge = problem.loss.base_loss;
  Certificate cert;
  cert.oracle_error = majority_vote_oracle(problem.data);
  cert.inactivity = inactivity_check(pv, mode, th.inactivity).magnitude;
  try {
    const auto vg = value_and_grad(obj, params);
    cert.loss = vg.value;
    cert.grad_norm = l2_norm(vg.gradient);
    if (obj.smooth() && params.size() <= kMaxDenseHessianParams) {
      cert.min_hessian_eig = min_eigenvalue(dense_hessian(obj, params));
    } else {
      cert.probe = kth_order_probe(obj, params, 1, th.probe_c, th.probe_radius, th.probe_dirs, th.probe_seed);
    }
    const auto base = base_scores(problem, params);
    cert.train_error = misclassification_rate(base, problem.data.labels());
    switch (mode.kind) {
      case AugmentationKind::skip_exp:
        cert.moments = moment_residuals(problem.data, base, pv.w(), pv.b(), hinge, th.max_order, th.restarts);
        break;
      case AugmentationKind::per_layer_exp:
        cert.moments = affine_moment_residuals(problem.data, augmented_scores(problem, params), hinge, th.max_order,
                                               th.restarts);
        break;
      case AugmentationKind::skip_monomial:
      case AugmentationKind::none:
        cert.moments = affine_moment_residuals(problem.data, base, hinge, th.max_order, th.restarts);
        break;
    }
  } catch (const ExpOverflowError& e) {
    cert.loss = std::numeric_limits<double>::infinity();
    cert.grad_norm = std::numeric_limits<double>::infinity();
    cert.verdict = Verdict::failed;
    cert.failures = {"overflow"};
    return cert;
  }
  cert.verdict = judge(cert, th, &cert.failures);
  return cert;
}

Certificate full_certificate(const TrainingProblem& problem, const RunResult& run, const Thresholds& th) {
  return full_certificate(problem, run.params, th);
}

}  // namespace landscape
