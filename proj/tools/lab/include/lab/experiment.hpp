#pragma once

// Declarative experiment sweeps: dataset x network x augmentation x lambda x
// seeds. A config is an INI file:
//
//   [dataset]      generator = xor | circles | poly_separable |
//                              linearly_separable | conflicting | file
//                  n, d, degree, margin, groups, dups, flip_fraction, seed, path
//   [network]      widths = 2, 2      activation = tanh
//   [augmentation] mode = skip_exp    degree = 2   (skip_monomial only)
//   [loss]         power = 3          lambda = 0.01, 0.1
//   [run]          seeds = 100        threads = 1  seed_offset = 0
//   [optimizer]    any OptimizerConfig field
//   [thresholds]   any Thresholds field
//   [output]       dir = results
//
// Every key is optional except the generator. Unknown sections or keys are
// rejected so typos do not silently fall back to defaults.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "landscape/augment.hpp"
#include "landscape/certify.hpp"
#include "landscape/dataset.hpp"
#include "landscape/network.hpp"
#include "landscape/optimize.hpp"

namespace lab {

/// Invalid configuration. what() starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(field) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct DatasetSource {
  std::string generator = "xor";
  std::size_t n = 32;
  std::size_t d = 2;
  int degree = 2;
  double margin = 0.5;
  std::size_t groups = 4;
  std::size_t dups = 4;
  double flip_fraction = 0.25;
  std::uint64_t seed = 0;
  std::filesystem::path path;
};

struct ExperimentConfig {
  DatasetSource dataset;
  landscape::NetworkSpec network;
  landscape::Augmentation augmentation = landscape::Augmentation::skip_exp();
  int power = landscape::HingeLoss::kDefaultPower;
  std::vector<double> lambdas{0.1};
  std::size_t seeds = 10;
  std::size_t threads = 1;
  std::uint64_t seed_offset = 0;
  landscape::OptimizerConfig optimizer;
  landscape::Thresholds thresholds;
  std::filesystem::path out_dir = "results";
  /// Flat "section.key = value" echo of the config as parsed.
  std::map<std::string, std::string> echo;

  /// Throws ConfigError on the first invalid field.
  void validate() const;
  /// Materializes the dataset (generator or file).
  [[nodiscard]] landscape::Dataset make_dataset() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// One arm of a sweep. compare_baseline uses {none, configured mode}.
struct Arm {
  std::string name;
  landscape::Augmentation mode;
};

std::vector<Arm> arms_for(const ExperimentConfig& cfg, bool compare);

struct ReportRow {
  std::string run_id;
  std::string arm;
  std::size_t lambda_index = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::string termination;
  std::size_t iterations = 0;
  int perturbations = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  /// NaN for nonsmooth networks (probe_slack is used instead).
  double min_hessian_eig = 0.0;
  /// Worst slack of the first-order probe; NaN for smooth networks.
  double probe_slack = 0.0;
  double inactivity = 0.0;
  double max_tensor_residual = 0.0;
  /// Largest residual / (sum |c_i| max(1, |x_i|)^k) over orders.
  double max_tensor_ratio = 0.0;
  double train_error = 0.0;
  double oracle_error = 0.0;
  std::string verdict;
  /// ';'-joined failing fields, or the error message of a crashed run.
  std::string failures;
};

/// Verdict implied by the numeric fields of a row.
landscape::Verdict verdict_from_row(const ReportRow& row, const landscape::Thresholds& th);

/// Certificate preconditions: grad and curvature both within tolerance.
bool preconditions_met(const ReportRow& row, const landscape::Thresholds& th);

struct ArmSummary {
  std::string arm;
  double lambda = 0.0;
  std::size_t runs = 0;
  std::size_t converged = 0;
  std::size_t preconditions = 0;
  std::size_t certified_global = 0;
  std::size_t errors = 0;
  double certified_fraction = 0.0;
  /// Fraction of all runs whose train error exceeds 0.
  double train_error_fraction = 0.0;
  /// Converged runs (grad within tolerance) with train error above 0.
  double stuck_fraction = 0.0;
  /// Mean inactivity magnitude over converged runs; NaN when none converged.
  double mean_inactivity = 0.0;
};

std::vector<ArmSummary> summarize_rows(const std::vector<ReportRow>& rows, const landscape::Thresholds& th);

struct ExperimentResult {
  std::vector<ReportRow> rows;
  std::vector<ArmSummary> summary;
  std::size_t failed_runs = 0;
  std::string dataset_hash;
};

struct RunOptions {
  bool compare = false;
  /// Optional progress sink, one line per finished cell.
  std::ostream* log = nullptr;
};

/// Executes the sweep without touching the filesystem.
ExperimentResult execute(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// execute() plus rows.csv, summary.txt and manifest.json in cfg.out_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);
ExperimentResult compare_baseline(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// Sweep matrix and "<N> runs planned". Validates only.
std::string describe(const ExperimentConfig& cfg, bool compare);

// Report formats
std::string rows_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_rows_csv(const std::string& text);
std::string summary_table(const std::vector<ArmSummary>& summary);
std::string sha256_hex(const std::string& bytes);

}  // namespace lab
