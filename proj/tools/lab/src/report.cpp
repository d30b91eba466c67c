#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "lab/experiment.hpp"

namespace lab {

using landscape::format_double;
using landscape::Verdict;

namespace {

constexpr const char* kHeader =
    "run_id,arm,lambda_index,lambda,seed,termination,iterations,perturbations,loss,grad_norm,min_hessian_eig,"
    "probe_slack,inactivity,max_tensor_residual,max_tensor_ratio,train_error,oracle_error,verdict,failures";
constexpr std::size_t kColumns = 19;

double to_real(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("rows.csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

unsigned long long to_count(const std::string& s, std::size_t line) {
  unsigned long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("rows.csv line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return v;
}

bool curvature_ok(const ReportRow& row, const landscape::Thresholds& th) {
  if (!std::isnan(row.min_hessian_eig)) return row.min_hessian_eig >= -th.hessian;
  if (!std::isnan(row.probe_slack)) return row.probe_slack >= 0.0;
  return true;
}

}  // namespace

Verdict verdict_from_row(const ReportRow& row, const landscape::Thresholds& th) {
  if (row.termination == "error") return Verdict::failed;
  const bool grad_ok = row.grad_norm <= th.grad;
  const bool curv_ok = curvature_ok(row, th);
  const bool rest_ok = row.inactivity <= th.inactivity && row.max_tensor_ratio <= th.tensor_rel &&
                       row.train_error == row.oracle_error;
  if (grad_ok && curv_ok && rest_ok) return Verdict::certified_global;
  if (grad_ok && !curv_ok) return Verdict::stationary_only;
  return Verdict::failed;
}

bool preconditions_met(const ReportRow& row, const landscape::Thresholds& th) {
  return row.termination != "error" && row.grad_norm <= th.grad && curvature_ok(row, th);
}

std::vector<ArmSummary> summarize_rows(const std::vector<ReportRow>& rows, const landscape::Thresholds& th) {
  std::vector<ArmSummary> out;
  std::vector<double> inactivity_sum;
  for (const auto& r : rows) {
    if (out.empty() || out.back().arm != r.arm || out.back().lambda != r.lambda) {
      out.push_back({});
      out.back().arm = r.arm;
      out.back().lambda = r.lambda;
      inactivity_sum.push_back(0.0);
    }
    auto& s = out.back();
    s.runs += 1;
    s.errors += r.termination == "error" ? 1 : 0;
    s.certified_global += r.verdict == landscape::to_string(Verdict::certified_global) ? 1 : 0;
    s.preconditions += preconditions_met(r, th) ? 1 : 0;
    s.train_error_fraction += r.train_error > 0.0 ? 1.0 : 0.0;
    if (r.termination == "converged") {
      s.converged += 1;
      inactivity_sum.back() += r.inactivity;
    }
    s.stuck_fraction += (r.grad_norm <= th.grad && r.train_error > 0.0) ? 1.0 : 0.0;
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto& s = out[k];
    const double n = static_cast<double>(s.runs);
    s.certified_fraction = static_cast<double>(s.certified_global) / n;
    s.train_error_fraction /= n;
    s.stuck_fraction /= n;
    s.mean_inactivity = s.converged > 0 ? inactivity_sum[k] / static_cast<double>(s.converged)
                                        : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::string rows_csv(const std::vector<ReportRow>& rows) {
  std::string out = std::string(kHeader) + "\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.run_id, r.arm, r.lambda_index,
                       format_double(r.lambda), r.seed, r.termination, r.iterations, r.perturbations,
                       format_double(r.loss), format_double(r.grad_norm), format_double(r.min_hessian_eig),
                       format_double(r.probe_slack), format_double(r.inactivity),
                       format_double(r.max_tensor_residual), format_double(r.max_tensor_ratio),
                       format_double(r.train_error), format_double(r.oracle_error), r.verdict, r.failures);
  }
  return out;
}

std::vector<ReportRow> parse_rows_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw std::runtime_error("rows.csv: missing or unexpected header");
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != kColumns) {
      throw std::runtime_error("rows.csv line " + std::to_string(line_no) + ": expected " +
                               std::to_string(kColumns) + " cells, got " + std::to_string(cells.size()));
    }
    ReportRow r;
    r.run_id = cells[0];
    r.arm = cells[1];
    r.lambda_index = to_count(cells[2], line_no);
    r.lambda = to_real(cells[3], line_no);
    r.seed = to_count(cells[4], line_no);
    r.termination = cells[5];
    r.iterations = to_count(cells[6], line_no);
    r.perturbations = static_cast<int>(to_count(cells[7], line_no));
    r.loss = to_real(cells[8], line_no);
    r.grad_norm = to_real(cells[9], line_no);
    r.min_hessian_eig = to_real(cells[10], line_no);
    r.probe_slack = to_real(cells[11], line_no);
    r.inactivity = to_real(cells[12], line_no);
    r.max_tensor_residual = to_real(cells[13], line_no);
    r.max_tensor_ratio = to_real(cells[14], line_no);
    r.train_error = to_real(cells[15], line_no);
    r.oracle_error = to_real(cells[16], line_no);
    r.verdict = cells[17];
    r.failures = cells[18];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string summary_table(const std::vector<ArmSummary>& summary) {
  std::string out = fmt::format("{:<18} {:>24} {:>5} {:>9} {:>7} {:>9} {:>24} {:>24} {:>24} {:>24}\n", "arm",
                                "lambda", "runs", "converged", "precond", "certified", "certified_global_frac",
                                "train_error_frac", "stuck_frac", "mean_inactivity");
  for (const auto& s : summary) {
    out += fmt::format("{:<18} {:>24} {:>5} {:>9} {:>7} {:>9} {:>24} {:>24} {:>24} {:>24}\n", s.arm,
                       format_double(s.lambda), s.runs, s.converged, s.preconditions, s.certified_global,
                       format_double(s.certified_fraction), format_double(s.train_error_fraction),
                       format_double(s.stuck_fraction), format_double(s.mean_inactivity));
  }
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace lab
