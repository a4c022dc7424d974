#ifndef CAUSAL_RESAMPLE_RUNNER_HPP
#define CAUSAL_RESAMPLE_RUNNER_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "causal_resample/errors.hpp"
#include "causal_resample/graphs.hpp"
#include "causal_resample/metrics.hpp"
#include "causal_resample/resample.hpp"
#include "causal_resample/scoring.hpp"
#include "causal_resample/search.hpp"
#include "causal_resample/simulate.hpp"
#include "causal_resample/worker_pool.hpp"

namespace causal_resample::runner {

// A replicate inside a cell failed; the message names plan, replicate and seed.
class CellError : public Error {
 public:
  using Error::Error;
};

struct ExperimentConfig {
  std::vector<graphs::GraphSpec> graph_specs;
  int true_graphs_per_spec = 1;
  // Overrides true_graphs_per_spec for specs with the given vertex count.
  std::map<int, int> true_graphs_by_num_vertices;
  std::vector<std::size_t> sample_sizes;
  std::vector<resample::ResamplePlan> resample_plans;
  std::vector<double> penalty_discounts;
  std::vector<search::Algorithm> algorithms;
  int ece_bins = metrics::kDefaultEceBins;
  double threshold = metrics::kDefaultThreshold;
  std::uint64_t master_seed = 0;
  int workers = 0;  // 0: environment override or hardware concurrency
  std::string out_dir = "out";
  double ridge = scoring::kDefaultRidge;
  int max_sweeps = 100;
  bool write_freq_tables = true;
  // Learned graphs as graphs/<cell-id>/rep<k>.edges.
  bool write_replicate_graphs = false;
  // Wall-clock times make metrics.csv non-reproducible, so they are opt-in.
  bool record_runtime = false;

  int true_graphs_for(const graphs::GraphSpec& spec) const;
  std::size_t num_cells() const;
  void validate() const;
};

// JSON text <-> config. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

// ER/SF x {20, 100} vertices x degree {2, 6}; 250 true graphs at 20 vertices
// and 50 at 100; n = 10 * 2^k for k = 2..10; five plans with 100 replicates;
// penalties {1, 2}; both search algorithms.
ExperimentConfig paper_grid_preset();

// Overrides grid dimensions from "key=v1|v2,key=v". Keys: type, vertices,
// degree, graphs, n, plans, penalty, algorithm, replicates, bins, threshold.
void apply_slice(ExperimentConfig& config, const std::string& slice);

// Parses "none", "bootstrap", "bootstrap_ess", "subsample_<pct>".
resample::ResamplePlan parse_plan_label(const std::string& label, int replicates);

struct CellSeeds {
  std::uint64_t data = 0;      // simulated dataset
  std::uint64_t resample = 0;  // base for per-replicate resampling seeds
  std::uint64_t search = 0;    // base for per-replicate search seeds
};

struct CellResult {
  metrics::EdgeFrequencyTable table;
  metrics::MetricsRecord metrics;
  std::vector<double> replicate_score_n;
  std::vector<graphs::Dag> replicate_graphs;
};

struct EvalConfig {
  int ece_bins = metrics::kDefaultEceBins;
  double threshold = metrics::kDefaultThreshold;
};

// Resample `data`, learn one graph per replicate and score the ensemble
// against `truth`. Replicates run on `pool` when one is given.
CellResult run_ensemble(const graphs::Dag& truth, const Dataset& data,
                        const resample::ResamplePlan& plan, const search::SearchConfig& search,
                        const CellSeeds& seeds, const EvalConfig& eval = {},
                        WorkerPool* pool = nullptr);

// Simulates n rows from `model` (seeded by seeds.data), then run_ensemble.
CellResult run_cell(const graphs::Dag& truth, const simulate::SemModel& model, std::size_t n,
                    const resample::ResamplePlan& plan, const search::SearchConfig& search,
                    const CellSeeds& seeds, const EvalConfig& eval = {},
                    WorkerPool* pool = nullptr);

struct ResultRow {
  std::string graph_type;
  int num_vertices = 0;
  double avg_degree = 0.0;
  int true_graph_id = 0;
  std::size_t sample_size = 0;
  std::string resampling_label;
  double penalty_discount = 0.0;
  std::string algorithm;
  metrics::MetricsRecord metrics;
  std::optional<double> runtime_ms;
  std::string seed_path;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

std::vector<std::string> result_header();
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);

struct ExperimentOutcome {
  std::vector<ResultRow> rows;
  int failed_cells = 0;
};

// Runs every grid cell and writes metrics.csv, freq/<cell-id>.csv,
// manifest.json and optionally graphs/<cell-id>/ under config.out_dir. Output bytes depend only on the config.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

// Grouped means/standard errors of the metric columns of a metrics.csv.
// Output columns: <keys...>,metric,mean,stderr,count. Rows whose status is
// not "ok" are skipped.
void summarize(std::istream& metrics_csv, const std::vector<std::string>& group_keys,
               std::ostream& out);

struct PValueRow {
  int rep = 0;
  double p_ess = 1.0;
  double p_raw = 1.0;
};

// Null LRT experiment: each replicate draws n rows of two independent
// standard normals, bootstraps them once and tests the single edge with the
// effective and with the raw sample size.
std::vector<PValueRow> null_lrt(std::size_t n, int reps, std::uint64_t seed,
                                WorkerPool* pool = nullptr);
void write_pvalues_csv(std::ostream& out, const std::vector<PValueRow>& rows);

}  // namespace causal_resample::runner

#endif  // CAUSAL_RESAMPLE_RUNNER_HPP
