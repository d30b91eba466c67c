#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "lab/experiment.hpp"

namespace lab {

using landscape::Verdict;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Job {
  std::size_t arm = 0;
  std::size_t lambda_index = 0;
  std::uint64_t seed = 0;
};

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

// Free text ends up in a CSV cell.
std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

ReportRow run_one(const landscape::Dataset& data, const ExperimentConfig& cfg, const Arm& arm, const Job& job) {
  ReportRow row;
  row.arm = arm.name;
  row.lambda_index = job.lambda_index;
  row.lambda = cfg.lambdas[job.lambda_index];
  row.seed = job.seed;
  row.run_id = fmt::format("{}-l{}-s{}", arm.name, job.lambda_index, job.seed);
  try {
    landscape::NetworkSpec spec = cfg.network;
    spec.input_dim = data.dim();
    landscape::EmpiricalLossConfig loss{landscape::HingeLoss(cfg.power), row.lambda, arm.mode};
    landscape::TrainingProblem problem(data, landscape::ParamLayout(spec, arm.mode), loss);
    const landscape::AugmentedObjective objective(problem);
    landscape::OptimizerConfig oc = cfg.optimizer;
    oc.seed = job.seed;
    const auto init = landscape::random_init(spec, arm.mode, oc.init_scale, job.seed);
    const auto run = landscape::minimize(objective, init.values(), oc);
    const auto cert = landscape::full_certificate(objective.problem(), run, cfg.thresholds);
    row.termination = std::string(landscape::to_string(run.termination));
    row.iterations = run.iterations;
    row.perturbations = run.perturbations;
    row.loss = cert.loss;
    row.grad_norm = cert.grad_norm;
    row.min_hessian_eig = cert.min_hessian_eig.value_or(kNaN);
    row.probe_slack = cert.probe ? cert.probe->worst_slack : kNaN;
    row.inactivity = cert.inactivity;
    row.max_tensor_residual = cert.moments.max_residual();
    row.max_tensor_ratio = cert.moments.max_ratio();
    row.train_error = cert.train_error;
    row.oracle_error = cert.oracle_error;
    row.verdict = std::string(landscape::to_string(cert.verdict));
    row.failures = join(cert.failures, ";");
  } catch (const std::exception& e) {
    row.termination = "error";
    row.loss = row.grad_norm = std::numeric_limits<double>::infinity();
    row.min_hessian_eig = row.probe_slack = kNaN;
    row.verdict = std::string(landscape::to_string(Verdict::failed));
    row.failures = "error: " + sanitize(e.what());
  }
  return row;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

nlohmann::json manifest(const ExperimentConfig& cfg, const landscape::Dataset& data, const ExperimentResult& res,
                        bool compare, const std::string& started) {
  using nlohmann::json;
  json m;
  m["tool"] = "landscape-lab";
  m["verb"] = compare ? "compare" : "run";
  m["started"] = started;
  m["finished"] = timestamp();
  m["config"] = cfg.echo;
  m["dataset"] = {{"generator", data.meta().generator},
                  {"n", data.size()},
                  {"d", data.dim()},
                  {"seed", data.meta().seed},
                  {"sha256", res.dataset_hash}};
  std::vector<std::string> arms;
  for (const auto& a : arms_for(cfg, compare)) arms.push_back(a.name);
  m["arms"] = arms;
  std::vector<std::size_t> widths = cfg.network.widths;
  m["network"] = {{"widths", widths}, {"activation", cfg.network.activation.name()}};
  m["loss"] = {{"power", cfg.power}, {"lambda", cfg.lambdas}};
  m["run"] = {{"seeds", cfg.seeds}, {"seed_offset", cfg.seed_offset}, {"threads", cfg.threads}};
  const auto& o = cfg.optimizer;
  m["optimizer"] = {{"max_iters", o.max_iters},       {"grad_tol", o.grad_tol},
                    {"init_scale", o.init_scale},     {"perturb_radius", o.perturb_radius},
                    {"max_perturbations", o.max_perturbations}, {"patience", o.patience},
                    {"hessian_tol", o.hessian_tol},   {"armijo", o.armijo},
                    {"initial_step", o.initial_step}, {"max_step", o.max_step},
                    {"polish_after", o.polish_after}};
  const auto& t = cfg.thresholds;
  m["thresholds"] = {{"grad", t.grad},
                     {"hessian", t.hessian},
                     {"inactivity", t.inactivity},
                     {"tensor_rel", t.tensor_rel},
                     {"max_order", t.max_order},
                     {"probe_c", t.probe_c},
                     {"probe_radius", t.probe_radius},
                     {"probe_dirs", t.probe_dirs},
                     {"probe_seed", t.probe_seed},
                     {"restarts", t.restarts}};
  m["rows"] = res.rows.size();
  m["failed_runs"] = res.failed_runs;
  return m;
}

ExperimentResult run_and_write(const ExperimentConfig& cfg, bool compare, std::ostream* log) {
  cfg.validate();
  const std::string started = timestamp();
  const auto data = cfg.make_dataset();
  auto res = execute(cfg, RunOptions{compare, log});
  std::filesystem::create_directories(cfg.out_dir);
  write_file(cfg.out_dir / "rows.csv", rows_csv(res.rows));
  write_file(cfg.out_dir / "summary.txt", summary_table(res.summary));
  write_file(cfg.out_dir / "manifest.json", manifest(cfg, data, res, compare, started).dump(2) + "\n");
  return res;
}

}  // namespace

ExperimentResult execute(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  const auto data = cfg.make_dataset();
  const auto arms = arms_for(cfg, opts.compare);
  std::vector<Job> jobs;
  for (std::size_t a = 0; a < arms.size(); ++a) {
    for (std::size_t l = 0; l < cfg.lambdas.size(); ++l) {
      for (std::size_t s = 0; s < cfg.seeds; ++s) jobs.push_back({a, l, cfg.seed_offset + s});
    }
  }

  ExperimentResult res;
  res.dataset_hash = sha256_hex(landscape::to_text(data));
  res.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  const std::size_t per_cell = cfg.seeds;
  std::vector<std::atomic<std::size_t>> remaining(jobs.size() / per_cell);
  for (auto& r : remaining) r = per_cell;

  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      res.rows[k] = run_one(data, cfg, arms[jobs[k].arm], jobs[k]);
      if (opts.log && --remaining[k / per_cell] == 0) {
        const std::lock_guard lock(log_mutex);
        *opts.log << fmt::format("{} lambda={} done ({} seeds)\n", arms[jobs[k].arm].name,
                                 landscape::format_double(cfg.lambdas[jobs[k].lambda_index]), per_cell);
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(cfg.threads, jobs.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& r : res.rows) res.failed_runs += r.termination == "error" ? 1 : 0;
  res.summary = summarize_rows(res.rows, cfg.thresholds);
  return res;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  return run_and_write(cfg, false, log);
}

ExperimentResult compare_baseline(const ExperimentConfig& cfg, std::ostream* log) {
  return run_and_write(cfg, true, log);
}

std::string describe(const ExperimentConfig& cfg, bool compare) {
  cfg.validate();
  const auto data = cfg.make_dataset();
  const auto arms = arms_for(cfg, compare);
  std::vector<std::string> arm_names;
  for (const auto& a : arms) arm_names.push_back(a.name);
  std::vector<std::string> lambdas;
  for (double l : cfg.lambdas) lambdas.push_back(landscape::format_double(l));
  std::vector<std::string> widths;
  for (auto w : cfg.network.widths) widths.push_back(std::to_string(w));

  std::string out;
  out += fmt::format("dataset     {} (n={}, d={})\n", data.meta().generator, data.size(), data.dim());
  out += fmt::format("network     widths [{}], {}\n", join(widths, ", "), cfg.network.activation.name());
  out += fmt::format("arms        {}\n", join(arm_names, ", "));
  out += fmt::format("hinge power {}\n", cfg.power);
  out += fmt::format("lambda      {}\n", join(lambdas, ", "));
  out += fmt::format("seeds       {}..{}\n", cfg.seed_offset, cfg.seed_offset + cfg.seeds - 1);
  out += fmt::format("output      {}\n", cfg.out_dir.string());
  const std::size_t total = arms.size() * cfg.lambdas.size() * cfg.seeds;
  out += fmt::format("{} arm(s) x {} lambda x {} seeds\n", arms.size(), cfg.lambdas.size(), cfg.seeds);
  out += fmt::format("{} runs planned\n", total);
  return out;
}

}  // namespace lab
