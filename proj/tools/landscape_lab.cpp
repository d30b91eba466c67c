// landscape-lab: run, compare or describe an experiment config.
//
// Exit codes: 0 success, 1 invalid config or arguments, 2 at least one run
// failed (its row is still written).

#include <iostream>

#include <CLI11.hpp>

#include "lab/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Loss-landscape experiments with certified minima"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::size_t threads = 0;
  long long seed_offset = -1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "experiment config (INI)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed-offset", seed_offset, "first seed")->check(CLI::NonNegativeNumber);
  };
  auto* run = app.add_subcommand("run", "execute the sweep and write reports");
  auto* compare = app.add_subcommand("compare", "run the sweep with an unaugmented baseline arm");
  auto* describe = app.add_subcommand("describe", "print the sweep plan without running it");
  add_common(run);
  add_common(compare);
  add_common(describe);
  bool describe_compare = false;
  describe->add_flag("--compare", describe_compare, "include the baseline arm in the plan");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  lab::ExperimentConfig cfg;
  try {
    cfg = lab::load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (threads > 0) cfg.threads = threads;
    if (seed_offset >= 0) cfg.seed_offset = static_cast<std::uint64_t>(seed_offset);
    cfg.validate();
    if (describe->parsed()) {
      std::cout << lab::describe(cfg, describe_compare);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    const bool is_compare = compare->parsed();
    const auto res = is_compare ? lab::compare_baseline(cfg, &std::cerr) : lab::run_experiment(cfg, &std::cerr);
    std::cout << lab::summary_table(res.summary);
    std::cout << "reports written to " << cfg.out_dir.string() << "\n";
    if (res.failed_runs > 0) {
      std::cerr << res.failed_runs << " run(s) failed; see the failures column of rows.csv\n";
      return 2;
    }
  } catch (const lab::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
