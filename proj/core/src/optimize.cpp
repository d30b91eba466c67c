#include "landscape/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

namespace landscape {

void OptimizerConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(grad_tol, "grad_tol");
  positive(init_scale, "init_scale");
  positive(perturb_radius, "perturb_radius");
  positive(hessian_tol, "hessian_tol");
  positive(initial_step, "initial_step");
  positive(max_step, "max_step");
  if (!(armijo > 0.0 && armijo < 1.0)) throw std::invalid_argument("armijo constant must lie in (0, 1)");
  if (max_iters == 0) throw std::invalid_argument("max_iters must be >= 1");
  if (max_perturbations < 0) throw std::invalid_argument("max_perturbations must be >= 0");
  if (patience == 0) throw std::invalid_argument("patience must be >= 1");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::converged:
      return "converged";
    case Termination::max_iters:
      return "max_iters";
    case Termination::overflow:
      return "overflow";
  }
  return "unknown";
}

ParamVector random_init(const NetworkSpec& spec, const Augmentation& mode, double scale, std::uint64_t seed) {
  if (!(scale > 0.0)) throw std::invalid_argument("init scale must be positive");
  const ParamLayout layout(spec, mode);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-scale, scale);
  std::vector<double> base(layout.base_size());
  for (auto& v : base) v = unif(rng);
  std::vector<double> extra(layout.size() - base.size());
  for (auto& v : extra) v = unif(rng);
  ParamVector out = embed_base_params(layout, base, extra);
  if (mode.is_skip()) {
    out.a() = 0.0;
  } else if (mode.kind == AugmentationKind::per_layer_exp) {
    out.values()[layout.exp_exit_row(layout.depth() + 1).front()] = 0.0;
  }
  return out;
}

namespace {

struct Eigen1 {
  double value;
  Eigen::VectorXd vector;
};

Eigen1 lowest_eigenpair(const Objective& f, std::span<const double> x) {
  const Eigen::MatrixXd h = dense_hessian(f, x);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Hessian eigendecomposition failed");
  return {solver.eigenvalues()(0), solver.eigenvectors().col(0)};
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// -(|H| + sqrt(|g|) I)^{-1} g. The gradient-scaled shift keeps the step
// meaningful on degenerate minima, where curvature and gradient vanish
// together, without letting near-null directions blow up.
std::vector<double> newton_direction(const Objective& f, std::span<const double> x, std::span<const double> g) {
  const Eigen::MatrixXd h = dense_hessian(f, x);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Hessian eigendecomposition failed");
  const Eigen::VectorXd& lam = solver.eigenvalues();
  const Eigen::MatrixXd& q = solver.eigenvectors();
  const double shift = std::sqrt(l2_norm(g)) + 1e-14 * lam.cwiseAbs().maxCoeff();
  const Eigen::Map<const Eigen::VectorXd> gv(g.data(), static_cast<Eigen::Index>(g.size()));
  Eigen::VectorXd coeff = q.transpose() * gv;
  for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff(i) /= std::abs(lam(i)) + shift;
  const Eigen::VectorXd d = -(q * coeff);
  return {d.data(), d.data() + d.size()};
}

void extend_step(const Objective& f, std::span<const double> x, std::span<const double> dir, double f0,
                 double armijo_slope, double& t, double& ft, std::vector<double>& trial) {
  constexpr double kMaxExtension = 64.0;
  std::vector<double> next(x.size());
  while (t < kMaxExtension) {
    const double t2 = 2.0 * t;
    for (std::size_t i = 0; i < x.size(); ++i) next[i] = x[i] + t2 * dir[i];
    double f2 = 0.0;
    try {
      f2 = f.value(next);
    } catch (const ExpOverflowError&) {
      return;
    }
    if (!(f2 < ft && f2 <= f0 + armijo_slope * t2)) return;
    t = t2;
    ft = f2;
    trial.swap(next);
  }
}

// Tries a full Newton step (with extension). Accepts it into (x, vg) and
// returns true if it lowers the loss by at least 0.1%.
bool newton_progress(const Objective& f, std::vector<double>& x, ValueAndGradient& vg, std::vector<double>& trial) {
  if (!(vg.value > 0.0)) return false;
  const auto dir = newton_direction(f, x, vg.gradient);
  for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + dir[i];
  double ft = 0.0;
  try {
    ft = f.value(trial);
  } catch (const ExpOverflowError&) {
    return false;
  }
  if (!(ft <= (1.0 - 1e-3) * vg.value)) return false;
  double t = 1.0;
  extend_step(f, x, dir, vg.value, 0.0, t, ft, trial);
  vg = value_and_grad(f, trial);
  x = trial;
  return true;
}

}  // namespace

RunResult minimize(const Objective& f, std::span<const double> init, const OptimizerConfig& cfg) {
  cfg.validate();
  if (init.size() != f.dimension()) {
    throw std::invalid_argument("minimize: initial point has " + std::to_string(init.size()) +
                                " entries, objective expects " + std::to_string(f.dimension()));
  }
  RunResult res;
  res.seed = cfg.seed;
  res.params.assign(init.begin(), init.end());
  auto& x = res.params;
  const std::size_t n = x.size();

  ValueAndGradient vg;
  try {
    vg = value_and_grad(f, x);
  } catch (const ExpOverflowError& e) {
    res.loss = std::numeric_limits<double>::infinity();
    res.grad_norm = std::numeric_limits<double>::quiet_NaN();
    res.termination = Termination::overflow;
    res.diagnostic = std::string("overflow at initial point: ") + e.what();
    return res;
  }

  const bool second_order = f.smooth() && n <= kMaxDenseHessianParams;
  double step = cfg.initial_step;
  // Loss at the most recent perturbation; convergence must beat it.
  double must_beat = std::numeric_limits<double>::infinity();
  std::size_t last_check = 0;
  bool checked_once = false;
  std::vector<double> trial(n);

  auto finish = [&](Termination t, std::string diag) {
    res.loss = vg.value;
    res.grad_norm = l2_norm(vg.gradient);
    res.termination = t;
    res.diagnostic = std::move(diag);
    return res;
  };

  for (std::size_t it = 0;; ++it) {
    res.iterations = it;
    const auto& g = vg.gradient;
    const double gn = l2_norm(g);

    if (gn <= cfg.grad_tol && !f.smooth()) return finish(Termination::converged, "");
    if (gn <= cfg.grad_tol && f.smooth() && !second_order) {
      return finish(Termination::max_iters, "second-order check unavailable above " +
                                                std::to_string(kMaxDenseHessianParams) + " parameters");
    }

    if (second_order && gn < 10.0 * cfg.grad_tol &&
        (gn <= cfg.grad_tol || !checked_once || it - last_check >= cfg.patience)) {
      checked_once = true;
      last_check = it;
      const Eigen1 low = lowest_eigenpair(f, x);
      res.min_hessian_eig = low.value;
      if (low.value < -cfg.hessian_tol) {
        if (res.perturbations >= cfg.max_perturbations) {
          return finish(Termination::max_iters, "saddle escape budget exhausted (min eig " +
                                                    std::to_string(low.value) + ")");
        }
        if (it >= cfg.max_iters) return finish(Termination::max_iters, "");
        const double sign = dot(g, std::span<const double>(low.vector.data(), n)) > 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) {
          trial[i] = x[i] + sign * cfg.perturb_radius * low.vector(static_cast<Eigen::Index>(i));
        }
        try {
          auto moved = value_and_grad(f, trial);
          must_beat = vg.value;
          x = trial;
          vg = std::move(moved);
          ++res.perturbations;
          res.min_hessian_eig = std::numeric_limits<double>::quiet_NaN();
          continue;
        } catch (const ExpOverflowError& e) {
          return finish(Termination::overflow, std::string("overflow during saddle perturbation: ") + e.what());
        }
      }
      if (gn <= cfg.grad_tol) {
        // On the polynomial hinge tails the gradient vanishes quadratically
        // before samples reach the flat region; keep going while a Newton
        // step still removes a noticeable fraction of the loss.
        if (it < cfg.max_iters && newton_progress(f, x, vg, trial)) continue;
        if (vg.value < must_beat) return finish(Termination::converged, "");
        return finish(Termination::max_iters, "stationary point not below the pre-perturbation loss");
      }
    }

    if (it >= cfg.max_iters) return finish(Termination::max_iters, "");

    const bool newton = second_order && it >= cfg.polish_after;
    std::vector<double> dir(n);
    if (newton) {
      dir = newton_direction(f, x, g);
    } else {
      for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
    }
    const double slope = dot(g, dir);  // < 0

    // Armijo backtracking along dir. When the value test is lost in rounding
    // (the change is below ~1e-12), fall back to the sign of the directional
    // derivative at the trial point.
    const double dnorm = l2_norm(dir);
    const double xnorm = l2_norm(x);
    const double flat_band = std::min(1e-12, 64.0 * std::numeric_limits<double>::epsilon() * std::abs(vg.value));
    double t = newton ? 1.0 : step;
    bool overflowed = false;
    bool accepted = false;
    while (t * dnorm > 1e-17 * std::max(1.0, xnorm)) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + t * dir[i];
      double ft = 0.0;
      try {
        ft = f.value(trial);
      } catch (const ExpOverflowError&) {
        overflowed = true;
        t *= 0.5;
        continue;
      }
      if (ft <= vg.value + cfg.armijo * t * slope) {
        // A full Newton step that succeeds is extended while the loss keeps
        // dropping; on the polynomial hinge tails Newton alone only halves
        // the distance to the flat region per step.
        if (newton && t == 1.0) extend_step(f, x, dir, vg.value, cfg.armijo * slope, t, ft, trial);
        vg = value_and_grad(f, trial);
        accepted = true;
      } else if (ft <= vg.value + flat_band) {
        auto cand = value_and_grad(f, trial);
        if (dot(cand.gradient, dir) <= -0.8 * slope) {
          vg = std::move(cand);
          accepted = true;
        }
      }
      if (accepted) break;
      t *= 0.5;
    }
    if (!accepted) {
      if (overflowed) return finish(Termination::overflow, "line search collapsed on exponent overflow");
      return finish(Termination::max_iters, "line search stalled");
    }
    x = trial;
    if (!newton) step = std::min(2.0 * t, cfg.max_step);
  }
}

std::vector<RunResult> multi_start(const Objective& f, const ParamLayout& layout, std::size_t n_seeds,
                                   const OptimizerConfig& cfg, std::size_t threads, std::uint64_t seed_offset) {
  if (n_seeds == 0) throw std::invalid_argument("multi_start needs at least one seed");
  if (layout.size() != f.dimension()) throw std::invalid_argument("multi_start: layout does not match objective");
  cfg.validate();
  std::vector<RunResult> out(n_seeds);
  auto run_one = [&](std::size_t k) {
    OptimizerConfig c = cfg;
    c.seed = seed_offset + k;
    const auto init = random_init(layout.spec(), layout.mode(), c.init_scale, c.seed);
    out[k] = minimize(f, init.values(), c);
  };
  threads = std::max<std::size_t>(1, std::min(threads, n_seeds));
  if (threads == 1) {
    for (std::size_t k = 0; k < n_seeds; ++k) run_one(k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < n_seeds; k = next++) {
        try {
          run_one(k);
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

RunSummary summarize(std::span<const RunResult> runs) {
  RunSummary s;
  s.runs = runs.size();
  if (runs.empty()) return s;
  s.min_loss = std::numeric_limits<double>::infinity();
  s.max_loss = -std::numeric_limits<double>::infinity();
  double loss_sum = 0.0;
  double iter_sum = 0.0;
  for (const auto& r : runs) {
    switch (r.termination) {
      case Termination::converged:
        ++s.converged;
        break;
      case Termination::max_iters:
        ++s.max_iters;
        break;
      case Termination::overflow:
        ++s.overflow;
        break;
    }
    loss_sum += r.loss;
    iter_sum += static_cast<double>(r.iterations);
    s.min_loss = std::min(s.min_loss, r.loss);
    s.max_loss = std::max(s.max_loss, r.loss);
  }
  s.mean_loss = loss_sum / static_cast<double>(runs.size());
  s.mean_iterations = iter_sum / static_cast<double>(runs.size());
  return s;
}

}  // namespace landscape
