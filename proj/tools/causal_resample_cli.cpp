// causal-resample: command-line front end for the resampling experiments.
//
//   causal-resample run --config grid.json [--seed S] [--workers W] [--out DIR]
//   causal-resample run --preset paper-grid [--slice "vertices=20,n=100"] ...
//   causal-resample summarize --input metrics.csv --by resampling_label,sample_size
//   causal-resample null-lrt --n 1000 --reps 5000 [--seed S] [--out DIR]

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "causal_resample/errors.hpp"
#include "causal_resample/runner.hpp"
#include "causal_resample/worker_pool.hpp"

namespace cr = causal_resample;

namespace {

std::vector<std::string> split_columns(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::string cur;
    for (char c : item) {
      if (c == ',') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resampling-based validation of causal discovery"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  std::string slice;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_dir;

  auto* run = app.add_subcommand("run", "Run an experiment grid");
  auto* config_opt = run->add_option("--config", config_path, "Experiment config (JSON)");
  auto* preset_opt =
      run->add_option("--preset", preset, "Built-in grid")->check(CLI::IsMember({"paper-grid"}));
  config_opt->excludes(preset_opt);
  run->add_option("--slice", slice, "Grid overrides, e.g. \"type=ER,vertices=20,n=100\"")
      ->needs(preset_opt);
  run->add_option("--seed", seed, "Master seed");
  run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory");

  std::string input;
  std::vector<std::string> by;
  std::string summary_out;
  auto* summarize = app.add_subcommand("summarize", "Group means and standard errors");
  summarize->add_option("--input", input, "metrics.csv")->required();
  summarize->add_option("--by", by, "Grouping columns (comma-separated)")->required();
  summarize->add_option("--out", summary_out, "Output file (default stdout)");

  std::size_t lrt_n = 1000;
  int lrt_reps = 5000;
  std::uint64_t lrt_seed = 0;
  std::string lrt_out = ".";
  std::optional<int> lrt_workers;
  auto* null_lrt = app.add_subcommand("null-lrt", "LRT p-values on bootstrapped null data");
  null_lrt->add_option("--n", lrt_n, "Rows per dataset")->check(CLI::Range(3, 100000000));
  null_lrt->add_option("--reps", lrt_reps, "Replicates")->check(CLI::PositiveNumber);
  null_lrt->add_option("--seed", lrt_seed, "Seed");
  null_lrt->add_option("--out", lrt_out, "Output directory for pvalues.csv");
  null_lrt->add_option("--workers", lrt_workers, "Worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      cr::runner::ExperimentConfig config;
      if (!config_path.empty()) {
        config = cr::runner::load_config(config_path);
      } else if (preset == "paper-grid") {
        config = cr::runner::paper_grid_preset();
        if (!slice.empty()) cr::runner::apply_slice(config, slice);
      } else {
        std::cerr << "run: one of --config or --preset is required\n";
        return 2;
      }
      if (seed) config.master_seed = *seed;
      if (workers) config.workers = *workers;
      if (out_dir) config.out_dir = *out_dir;
      const auto outcome = cr::runner::run_experiment(config);
      std::cerr << "wrote " << outcome.rows.size() << " rows to "
                << (std::filesystem::path(config.out_dir) / "metrics.csv").string() << '\n';
      if (outcome.failed_cells > 0) {
        std::cerr << outcome.failed_cells << " cell(s) failed; see the status column\n";
        return 1;
      }
      return 0;
    }

    if (summarize->parsed()) {
      std::ifstream in(input);
      if (!in) throw cr::UsageError("cannot open '" + input + "'");
      const auto keys = split_columns(by);
      if (summary_out.empty()) {
        cr::runner::summarize(in, keys, std::cout);
      } else {
        std::ofstream out(summary_out);
        cr::runner::summarize(in, keys, out);
      }
      return 0;
    }

    if (null_lrt->parsed()) {
      cr::WorkerPool pool(lrt_workers.value_or(cr::WorkerPool::default_workers()));
      const auto rows = cr::runner::null_lrt(lrt_n, lrt_reps, lrt_seed, &pool);
      std::filesystem::create_directories(lrt_out);
      const auto path = std::filesystem::path(lrt_out) / "pvalues.csv";
      std::ofstream out(path);
      cr::runner::write_pvalues_csv(out, rows);
      std::cerr << "wrote " << rows.size() << " p-value pairs to " << path.string() << '\n';
      return 0;
    }
  } catch (const cr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
