#include "causal_resample/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "causal_resample/csv.hpp"
#include "causal_resample/errors.hpp"
#include "causal_resample/rng.hpp"

namespace causal_resample::runner {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Stream tags keep the seeds of different pipeline stages independent.
enum SeedStream : std::uint64_t {
  kGraphStream = 1,
  kModelStream = 2,
  kDataStream = 3,
  kResampleStream = 4,
  kSearchStream = 5,
};

std::string hex_seed(std::uint64_t seed) {
  std::ostringstream s;
  s << "0x" << std::hex << std::setw(16) << std::setfill('0') << seed;
  return s.str();
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& text, const std::string& what) {
  std::istringstream in(text);
  T value{};
  std::string rest;
  if (!(in >> value) || (in >> rest)) throw ConfigError("invalid " + what + " '" + text + "'");
  return value;
}

json plan_to_json(const resample::ResamplePlan& plan) {
  json j;
  switch (plan.kind) {
    case resample::PlanKind::NoResampling:
      j["kind"] = "none";
      break;
    case resample::PlanKind::Bootstrap:
      j["kind"] = "bootstrap";
      j["ess_adjust"] = plan.ess_adjust;
      j["replicates"] = plan.replicates;
      break;
    case resample::PlanKind::Subsample:
      j["kind"] = "subsample";
      j["fraction"] = plan.fraction;
      j["replicates"] = plan.replicates;
      break;
  }
  return j;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

resample::ResamplePlan plan_from_json(const json& j, int default_replicates) {
  if (j.is_string()) return parse_plan_label(j.get<std::string>(), default_replicates);
  if (!j.is_object()) throw ConfigError("resample plan must be an object or a label");
  reject_unknown_keys(j, {"kind", "ess_adjust", "fraction", "replicates"}, "resample plan");
  const std::string kind = j.at("kind").get<std::string>();
  const int reps = j.value("replicates", default_replicates);
  resample::ResamplePlan plan;
  if (kind == "none") {
    plan = resample::ResamplePlan::none();
  } else if (kind == "bootstrap") {
    plan = resample::ResamplePlan::bootstrap(j.value("ess_adjust", false), reps);
  } else if (kind == "subsample") {
    plan = resample::ResamplePlan::subsample(j.at("fraction").get<double>(), reps);
  } else {
    throw ConfigError("unknown resample plan kind '" + kind + "'");
  }
  plan.validate();
  return plan;
}

std::string cell_id(const graphs::GraphSpec& spec, int graph_id, std::size_t n,
                    const resample::ResamplePlan& plan, double penalty, search::Algorithm alg) {
  std::ostringstream s;
  s << graphs::to_string(spec.graph_type) << "_v" << spec.num_vertices << "_d"
    << csv::format_double(spec.avg_degree) << "_g" << graph_id << "_n" << n << '_' << plan.label()
    << "_c" << csv::format_double(penalty) << '_' << search::to_string(alg);
  return s.str();
}

}  // namespace

int ExperimentConfig::true_graphs_for(const graphs::GraphSpec& spec) const {
  if (auto it = true_graphs_by_num_vertices.find(spec.num_vertices);
      it != true_graphs_by_num_vertices.end()) {
    return it->second;
  }
  return true_graphs_per_spec;
}

std::size_t ExperimentConfig::num_cells() const {
  std::size_t graphs_total = 0;
  for (const auto& spec : graph_specs) graphs_total += static_cast<std::size_t>(true_graphs_for(spec));
  return graphs_total * sample_sizes.size() * resample_plans.size() * penalty_discounts.size() *
         algorithms.size();
}

void ExperimentConfig::validate() const {
  for (const auto& spec : graph_specs) spec.validate();
  if (true_graphs_per_spec < 1) throw ConfigError("true_graphs_per_spec must be positive");
  for (const auto& [v, count] : true_graphs_by_num_vertices) {
    if (count < 1) throw ConfigError("true graph counts must be positive");
  }
  for (auto n : sample_sizes) {
    if (n < 2) throw ConfigError("sample sizes must be at least 2");
  }
  for (const auto& plan : resample_plans) plan.validate();
  for (double c : penalty_discounts) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("penalty discounts must be positive");
  }
  if (ece_bins < 1) throw ConfigError("ece_bins must be positive");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
  if (workers < 0) throw ConfigError("workers must be nonnegative");
  if (!(ridge >= 0.0)) throw ConfigError("ridge must be nonnegative");
  if (max_sweeps < 1) throw ConfigError("max_sweeps must be positive");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown_keys(j,
                      {"graph_specs", "true_graphs_per_spec", "true_graphs_by_num_vertices",
                       "sample_sizes", "resample_plans", "replicates", "penalty_discounts",
                       "algorithms", "ece_bins", "threshold", "master_seed", "workers", "out_dir",
                       "ridge", "max_sweeps", "write_freq_tables", "write_replicate_graphs",
                       "record_runtime"},
                      "config");
  ExperimentConfig c;
  try {
    for (const auto& g : j.value("graph_specs", json::array())) {
      reject_unknown_keys(g, {"graph_type", "num_vertices", "avg_degree"}, "graph spec");
      graphs::GraphSpec spec;
      spec.graph_type = graphs::parse_graph_type(g.at("graph_type").get<std::string>());
      spec.num_vertices = g.at("num_vertices").get<int>();
      spec.avg_degree = g.at("avg_degree").get<double>();
      c.graph_specs.push_back(spec);
    }
    c.true_graphs_per_spec = j.value("true_graphs_per_spec", 1);
    for (const auto& [k, v] : j.value("true_graphs_by_num_vertices", json::object()).items()) {
      c.true_graphs_by_num_vertices[parse_number<int>(k, "vertex count")] = v.get<int>();
    }
    c.sample_sizes = j.value("sample_sizes", std::vector<std::size_t>{});
    const int reps = j.value("replicates", 100);
    for (const auto& p : j.value("resample_plans", json::array())) {
      c.resample_plans.push_back(plan_from_json(p, reps));
    }
    c.penalty_discounts = j.value("penalty_discounts", std::vector<double>{});
    for (const auto& a : j.value("algorithms", json::array())) {
      c.algorithms.push_back(search::parse_algorithm(a.get<std::string>()));
    }
    c.ece_bins = j.value("ece_bins", metrics::kDefaultEceBins);
    c.threshold = j.value("threshold", metrics::kDefaultThreshold);
    c.master_seed = j.value("master_seed", std::uint64_t{0});
    c.workers = j.value("workers", 0);
    c.out_dir = j.value("out_dir", std::string("out"));
    c.ridge = j.value("ridge", scoring::kDefaultRidge);
    c.max_sweeps = j.value("max_sweeps", 100);
    c.write_freq_tables = j.value("write_freq_tables", true);
    c.write_replicate_graphs = j.value("write_replicate_graphs", false);
    c.record_runtime = j.value("record_runtime", false);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config has a malformed field: ") + e.what());
  }
  c.validate();
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["graph_specs"] = json::array();
  for (const auto& s : c.graph_specs) {
    j["graph_specs"].push_back({{"graph_type", graphs::to_string(s.graph_type)},
                                {"num_vertices", s.num_vertices},
                                {"avg_degree", s.avg_degree}});
  }
  j["true_graphs_per_spec"] = c.true_graphs_per_spec;
  json by_v = json::object();
  for (const auto& [v, count] : c.true_graphs_by_num_vertices) by_v[std::to_string(v)] = count;
  j["true_graphs_by_num_vertices"] = by_v;
  j["sample_sizes"] = c.sample_sizes;
  j["resample_plans"] = json::array();
  for (const auto& p : c.resample_plans) j["resample_plans"].push_back(plan_to_json(p));
  j["penalty_discounts"] = c.penalty_discounts;
  j["algorithms"] = json::array();
  for (auto a : c.algorithms) j["algorithms"].push_back(search::to_string(a));
  j["ece_bins"] = c.ece_bins;
  j["threshold"] = c.threshold;
  j["master_seed"] = c.master_seed;
  j["workers"] = c.workers;
  j["out_dir"] = c.out_dir;
  j["ridge"] = c.ridge;
  j["max_sweeps"] = c.max_sweeps;
  j["write_freq_tables"] = c.write_freq_tables;
  j["write_replicate_graphs"] = c.write_replicate_graphs;
  j["record_runtime"] = c.record_runtime;
  return j.dump(2);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ExperimentConfig paper_grid_preset() {
  ExperimentConfig c;
  for (auto type : {graphs::GraphType::ErdosRenyi, graphs::GraphType::ScaleFree}) {
    for (int v : {20, 100}) {
      for (double d : {2.0, 6.0}) c.graph_specs.push_back({type, v, d});
    }
  }
  c.true_graphs_per_spec = 50;
  c.true_graphs_by_num_vertices = {{20, 250}, {100, 50}};
  for (int k = 2; k <= 10; ++k) c.sample_sizes.push_back(std::size_t{10} << k);
  c.resample_plans = {resample::ResamplePlan::none(), resample::ResamplePlan::bootstrap(false, 100),
                      resample::ResamplePlan::bootstrap(true, 100),
                      resample::ResamplePlan::subsample(0.5, 100),
                      resample::ResamplePlan::subsample(0.9, 100)};
  c.penalty_discounts = {1.0, 2.0};
  c.algorithms = {search::Algorithm::Boss, search::Algorithm::GreedyHillClimb};
  return c;
}

resample::ResamplePlan parse_plan_label(const std::string& label, int replicates) {
  if (label == "none") return resample::ResamplePlan::none();
  if (label == "bootstrap") return resample::ResamplePlan::bootstrap(false, replicates);
  if (label == "bootstrap_ess") return resample::ResamplePlan::bootstrap(true, replicates);
  const std::string prefix = "subsample_";
  if (label.rfind(prefix, 0) == 0) {
    const double pct = parse_number<double>(label.substr(prefix.size()), "subsample percentage");
    auto plan = resample::ResamplePlan::subsample(pct / 100.0, replicates);
    plan.validate();
    return plan;
  }
  throw ConfigError("unknown resampling label '" + label + "'");
}

void apply_slice(ExperimentConfig& config, const std::string& slice) {
  std::vector<graphs::GraphType> types;
  std::vector<int> vertices;
  std::vector<double> degrees;
  for (const auto& s : config.graph_specs) {
    if (std::find(types.begin(), types.end(), s.graph_type) == types.end()) types.push_back(s.graph_type);
    if (std::find(vertices.begin(), vertices.end(), s.num_vertices) == vertices.end()) {
      vertices.push_back(s.num_vertices);
    }
    if (std::find(degrees.begin(), degrees.end(), s.avg_degree) == degrees.end()) {
      degrees.push_back(s.avg_degree);
    }
  }
  bool specs_changed = false;
  std::vector<std::string> plan_labels;
  std::optional<int> replicates;

  for (const auto& item : split(slice, ',')) {
    const std::string entry = trim(item);
    if (entry.empty()) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) throw ConfigError("slice entry '" + entry + "' lacks '='");
    const std::string key = trim(entry.substr(0, eq));
    std::vector<std::string> values;
    for (const auto& v : split(entry.substr(eq + 1), '|')) values.push_back(trim(v));

    if (key == "type") {
      types.clear();
      for (const auto& v : values) types.push_back(graphs::parse_graph_type(v));
      specs_changed = true;
    } else if (key == "vertices") {
      vertices.clear();
      for (const auto& v : values) vertices.push_back(parse_number<int>(v, "vertex count"));
      specs_changed = true;
    } else if (key == "degree") {
      degrees.clear();
      for (const auto& v : values) degrees.push_back(parse_number<double>(v, "degree"));
      specs_changed = true;
    } else if (key == "graphs") {
      config.true_graphs_per_spec = parse_number<int>(values.at(0), "graph count");
      config.true_graphs_by_num_vertices.clear();
    } else if (key == "n") {
      config.sample_sizes.clear();
      for (const auto& v : values) config.sample_sizes.push_back(parse_number<std::size_t>(v, "sample size"));
    } else if (key == "plans") {
      plan_labels = values;
    } else if (key == "penalty") {
      config.penalty_discounts.clear();
      for (const auto& v : values) config.penalty_discounts.push_back(parse_number<double>(v, "penalty"));
    } else if (key == "algorithm") {
      config.algorithms.clear();
      for (const auto& v : values) config.algorithms.push_back(search::parse_algorithm(v));
    } else if (key == "replicates") {
      replicates = parse_number<int>(values.at(0), "replicate count");
    } else if (key == "bins") {
      config.ece_bins = parse_number<int>(values.at(0), "bin count");
    } else if (key == "threshold") {
      config.threshold = parse_number<double>(values.at(0), "threshold");
    } else {
      throw ConfigError("unknown slice key '" + key + "'");
    }
  }

  if (specs_changed) {
    config.graph_specs.clear();
    for (auto t : types) {
      for (int v : vertices) {
        for (double d : degrees) config.graph_specs.push_back({t, v, d});
      }
    }
  }
  if (!plan_labels.empty()) {
    const int reps = replicates.value_or(
        config.resample_plans.empty() ? 100 : std::max_element(config.resample_plans.begin(), config.resample_plans.end(),
                                                               [](const auto& a, const auto& b) {
                                                                 return a.replicates < b.replicates;
                                                               })->replicates);
    config.resample_plans.clear();
    for (const auto& label : plan_labels) config.resample_plans.push_back(parse_plan_label(label, reps));
  } else if (replicates) {
    for (auto& plan : config.resample_plans) {
      if (plan.kind != resample::PlanKind::NoResampling) plan.replicates = *replicates;
    }
  }
  config.validate();
}

CellResult run_ensemble(const graphs::Dag& truth, const Dataset& data,
                        const resample::ResamplePlan& plan, const search::SearchConfig& search,
                        const CellSeeds& seeds, const EvalConfig& eval, WorkerPool* pool) {
  plan.validate();
  search.validate();
  if (truth.num_vertices() != data.num_vars()) throw UsageError("truth/data size mismatch");
  const int reps = plan.effective_replicates();
  std::vector<graphs::Dag> ensemble(reps);
  std::vector<double> score_n(reps, 0.0);
  std::vector<std::string> failures(reps);

  auto one = [&](std::size_t r) {
    const std::uint64_t resample_seed = derive_seed(seeds.resample, {r});
    try {
      Rng resample_rng(resample_seed);
      const Dataset replicate = resample::draw(data, plan, resample_rng);
      const auto stats = scoring::sufficient_stats(replicate, plan.scores_with_ess());
      score_n[r] = stats.score_n();
      Rng search_rng(derive_seed(seeds.search, {r}));
      ensemble[r] = search::learn(stats, search, search_rng);
    } catch (const std::exception& e) {
      failures[r] = "plan " + plan.label() + " replicate " + std::to_string(r) + " seed " +
                    hex_seed(resample_seed) + ": " + e.what();
    }
  };
  if (pool != nullptr) {
    pool->parallel_for(static_cast<std::size_t>(reps), one);
  } else {
    for (int r = 0; r < reps; ++r) one(static_cast<std::size_t>(r));
  }
  for (const auto& f : failures) {
    if (!f.empty()) throw CellError(f);
  }

  auto table = metrics::edge_frequencies(ensemble);
  auto record = metrics::evaluate(table, truth, eval.ece_bins, eval.threshold);
  return CellResult{std::move(table), record, std::move(score_n), std::move(ensemble)};
}

CellResult run_cell(const graphs::Dag& truth, const simulate::SemModel& model, std::size_t n,
                    const resample::ResamplePlan& plan, const search::SearchConfig& search,
                    const CellSeeds& seeds, const EvalConfig& eval, WorkerPool* pool) {
  Rng data_rng(seeds.data);
  const Dataset data = simulate::simulate(model, n, data_rng);
  return run_ensemble(truth, data, plan, search, seeds, eval, pool);
}

std::vector<std::string> result_header() {
  return {"graph_type",  "num_vertices", "avg_degree", "true_graph_id",    "sample_size",
          "resampling_label", "penalty_discount", "algorithm", "brier", "ece",
          "precision",   "recall",       "f1",         "runtime_ms",       "seed_path",
          "status"};
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  csv::write_row(out, result_header());
  for (const auto& r : rows) {
    auto metric = [&](double v) { return r.ok() ? csv::format_double(v) : std::string(); };
    csv::write_row(out, {r.graph_type, std::to_string(r.num_vertices),
                         csv::format_double(r.avg_degree), std::to_string(r.true_graph_id),
                         std::to_string(r.sample_size), r.resampling_label,
                         csv::format_double(r.penalty_discount), r.algorithm,
                         metric(r.metrics.brier), metric(r.metrics.ece),
                         metric(r.metrics.precision), metric(r.metrics.recall),
                         metric(r.metrics.f1),
                         r.runtime_ms ? csv::format_double(*r.runtime_ms) : std::string(),
                         r.seed_path, r.status});
  }
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  config.validate();
  const int workers = config.workers > 0 && std::getenv("CAUSAL_RESAMPLE_WORKERS") == nullptr
                          ? config.workers
                          : WorkerPool::default_workers();
  WorkerPool pool(workers);

  const fs::path out_dir(config.out_dir);
  fs::create_directories(out_dir);
  if (config.write_freq_tables) fs::create_directories(out_dir / "freq");

  // True graphs and their SEMs, one per (spec, graph id).
  struct Truth {
    std::size_t spec = 0;
    int graph_id = 0;
    graphs::Dag dag;
    simulate::SemModel model;
  };
  std::vector<Truth> truths;
  for (std::size_t s = 0; s < config.graph_specs.size(); ++s) {
    for (int g = 0; g < config.true_graphs_for(config.graph_specs[s]); ++g) {
      truths.push_back({s, g, {}, {}});
    }
  }
  pool.parallel_for(truths.size(), [&](std::size_t i) {
    auto& t = truths[i];
    Rng graph_rng(derive_seed(config.master_seed, {kGraphStream, t.spec, std::uint64_t(t.graph_id)}));
    t.dag = graphs::generate_dag(config.graph_specs[t.spec], graph_rng);
    Rng model_rng(derive_seed(config.master_seed, {kModelStream, t.spec, std::uint64_t(t.graph_id)}));
    t.model = simulate::parameterize(t.dag, model_rng);
  });

  struct Cell {
    std::size_t truth = 0;
    std::size_t n_index = 0;
    std::size_t plan = 0;
    std::size_t penalty = 0;
    std::size_t alg = 0;
  };
  std::vector<Cell> cells;
  for (std::size_t t = 0; t < truths.size(); ++t) {
    for (std::size_t ni = 0; ni < config.sample_sizes.size(); ++ni) {
      for (std::size_t p = 0; p < config.resample_plans.size(); ++p) {
        for (std::size_t c = 0; c < config.penalty_discounts.size(); ++c) {
          for (std::size_t a = 0; a < config.algorithms.size(); ++a) cells.push_back({t, ni, p, c, a});
        }
      }
    }
  }

  std::vector<ResultRow> rows(cells.size());
  pool.parallel_for(cells.size(), [&](std::size_t i) {
    const Cell& cell = cells[i];
    const Truth& truth = truths[cell.truth];
    const auto& spec = config.graph_specs[truth.spec];
    const std::size_t n = config.sample_sizes[cell.n_index];
    const auto& plan = config.resample_plans[cell.plan];
    const double penalty = config.penalty_discounts[cell.penalty];
    const auto alg = config.algorithms[cell.alg];
    const auto graph_id = static_cast<std::uint64_t>(truth.graph_id);

    ResultRow& row = rows[i];
    row.graph_type = graphs::to_string(spec.graph_type);
    row.num_vertices = spec.num_vertices;
    row.avg_degree = spec.avg_degree;
    row.true_graph_id = truth.graph_id;
    row.sample_size = n;
    row.resampling_label = plan.label();
    row.penalty_discount = penalty;
    row.algorithm = search::to_string(alg);
    row.seed_path = "m" + std::to_string(config.master_seed) + "/s" + std::to_string(truth.spec) +
                    "/g" + std::to_string(truth.graph_id) + "/n" + std::to_string(n) + "/p" +
                    std::to_string(cell.plan) + "/c" + std::to_string(cell.penalty) + "/a" +
                    std::to_string(cell.alg);

    // The dataset depends only on (spec, graph, n) and resamples additionally
    // on the plan, so comparisons across plans, penalties and algorithms are
    // paired.
    CellSeeds seeds;
    seeds.data = derive_seed(config.master_seed, {kDataStream, truth.spec, graph_id, n});
    seeds.resample = derive_seed(config.master_seed, {kResampleStream, truth.spec, graph_id, n, cell.plan});
    seeds.search = derive_seed(config.master_seed, {kSearchStream, truth.spec, graph_id, n, cell.plan,
                                                    cell.penalty, cell.alg});

    search::SearchConfig search_cfg;
    search_cfg.algorithm = alg;
    search_cfg.score.penalty_discount = penalty;
    search_cfg.score.ridge = config.ridge;
    search_cfg.max_sweeps = config.max_sweeps;

    const auto start = std::chrono::steady_clock::now();
    try {
      const auto result = run_cell(truth.dag, truth.model, n, plan, search_cfg, seeds,
                                   {config.ece_bins, config.threshold}, &pool);
      row.metrics = result.metrics;
      const std::string id = cell_id(spec, truth.graph_id, n, plan, penalty, alg);
      if (config.write_freq_tables) {
        std::ofstream f(out_dir / "freq" / (id + ".csv"));
        metrics::write_csv(f, result.table);
      }
      if (config.write_replicate_graphs) {
        const fs::path dir = out_dir / "graphs" / id;
        fs::create_directories(dir);
        for (std::size_t k = 0; k < result.replicate_graphs.size(); ++k) {
          std::ofstream f(dir / ("rep" + std::to_string(k) + ".edges"));
          graphs::write_edge_list(f, result.replicate_graphs[k]);
        }
      }
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    if (config.record_runtime) {
      row.runtime_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  });

  ExperimentOutcome outcome;
  outcome.rows = std::move(rows);
  for (const auto& r : outcome.rows) {
    if (!r.ok()) ++outcome.failed_cells;
  }

  {
    std::ofstream out(out_dir / "metrics.csv", std::ios::binary);
    write_results_csv(out, outcome.rows);
    if (!out) throw DataError("failed to write metrics.csv");
  }
  {
    json manifest;
    manifest["tool"] = "causal-resample";
    manifest["format_version"] = 1;
    manifest["master_seed"] = config.master_seed;
    manifest["num_cells"] = outcome.rows.size();
    manifest["failed_cells"] = outcome.failed_cells;
    manifest["config"] = json::parse(config_to_json(config));
    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
  }
  return outcome;
}

void summarize(std::istream& metrics_csv, const std::vector<std::string>& group_keys,
               std::ostream& out) {
  const csv::Table table = csv::read(metrics_csv);
  std::vector<int> key_cols;
  for (const auto& k : group_keys) {
    const int c = table.column(k);
    if (c < 0) throw UsageError("unknown column '" + k + "'");
    key_cols.push_back(c);
  }
  const std::vector<std::string> metric_names = {"brier", "ece", "precision", "recall", "f1",
                                                 "runtime_ms"};
  std::vector<std::pair<std::string, int>> metric_cols;
  for (const auto& m : metric_names) {
    if (const int c = table.column(m); c >= 0) metric_cols.emplace_back(m, c);
  }
  const int status_col = table.column("status");

  struct Acc {
    std::vector<std::string> key;
    std::vector<std::vector<double>> values;
  };
  std::vector<Acc> groups;
  std::map<std::vector<std::string>, std::size_t> index;
  for (const auto& row : table.rows) {
    if (status_col >= 0 && row[status_col] != "ok") continue;
    std::vector<std::string> key;
    for (int c : key_cols) key.push_back(row[c]);
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.push_back({key, std::vector<std::vector<double>>(metric_cols.size())});
    auto& acc = groups[it->second];
    for (std::size_t m = 0; m < metric_cols.size(); ++m) {
      const std::string& cell = row[metric_cols[m].second];
      if (!cell.empty()) acc.values[m].push_back(csv::parse_double(cell));
    }
  }

  std::vector<std::string> header = group_keys;
  for (const char* h : {"metric", "mean", "stderr", "count"}) header.emplace_back(h);
  csv::write_row(out, header);
  for (const auto& g : groups) {
    for (std::size_t m = 0; m < metric_cols.size(); ++m) {
      const auto& v = g.values[m];
      if (v.empty()) continue;
      const double count = static_cast<double>(v.size());
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= count;
      double se = 0.0;
      if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        se = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
      }
      std::vector<std::string> fields = g.key;
      fields.push_back(metric_cols[m].first);
      fields.push_back(csv::format_double(mean));
      fields.push_back(csv::format_double(se));
      fields.push_back(std::to_string(v.size()));
      csv::write_row(out, fields);
    }
  }
}

std::vector<PValueRow> null_lrt(std::size_t n, int reps, std::uint64_t seed, WorkerPool* pool) {
  if (n < 3) throw ConfigError("null LRT needs n >= 3");
  if (reps < 1) throw ConfigError("null LRT needs at least one replicate");
  std::vector<PValueRow> rows(static_cast<std::size_t>(reps));
  auto one = [&](std::size_t r) {
    Rng rng(derive_seed(seed, {r}));
    std::normal_distribution<double> normal(0.0, 1.0);
    Dataset data;
    data.values.resize(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index i = 0; i < data.values.rows(); ++i) {
      data.values(i, 0) = normal(rng);
      data.values(i, 1) = normal(rng);
    }
    const Dataset boot = resample::bootstrap(data, rng);
    const int x = 0;
    const int y = 1;
    auto pvalue = [&](bool ess) {
      const auto stats = scoring::sufficient_stats(boot, ess);
      const double sigma_no = std::sqrt(scoring::residual_variance(stats, y, {}));
      const double sigma_yes = std::sqrt(scoring::residual_variance(stats, y, std::span<const int>(&x, 1)));
      return scoring::lrt_pvalue(stats, sigma_no, sigma_yes);
    };
    rows[r] = {static_cast<int>(r), pvalue(true), pvalue(false)};
  };
  if (pool != nullptr) {
    pool->parallel_for(rows.size(), one);
  } else {
    for (std::size_t r = 0; r < rows.size(); ++r) one(r);
  }
  return rows;
}

void write_pvalues_csv(std::ostream& out, const std::vector<PValueRow>& rows) {
  out << "rep,p_ess,p_raw\n";
  for (const auto& r : rows) {
    out << r.rep << ',' << csv::format_double(r.p_ess) << ',' << csv::format_double(r.p_raw) << '\n';
  }
}

}  // namespace causal_resample::runner
