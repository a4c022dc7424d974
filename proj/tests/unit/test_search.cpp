#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "causal_resample/errors.hpp"
#include "causal_resample/search.hpp"
#include "causal_resample/simulate.hpp"
#include "oracles.hpp"

using namespace causal_resample;
using namespace causal_resample::search;

namespace {

scoring::SufficientStats stats_of(const simulate::SemModel& model, std::size_t n, Rng& rng) {
  return scoring::sufficient_stats(simulate::simulate(model, n, rng), false);
}

simulate::SemModel chain_model(int p, double b) {
  graphs::Dag dag(p);
  for (int v = 1; v < p; ++v) dag.add_edge(v - 1, v);
  simulate::SemModel model{dag, Eigen::MatrixXd::Zero(p, p), Eigen::VectorXd::Ones(p)};
  for (int v = 1; v < p; ++v) model.beta(v - 1, v) = b;
  return simulate::standardize(model);
}

simulate::SemModel empty_model(int p) {
  return {graphs::Dag(p), Eigen::MatrixXd::Zero(p, p), Eigen::VectorXd::Ones(p)};
}

}  // namespace

TEST_CASE("grow-shrink with no predecessors") {
  Rng rng(1);
  const auto stats = stats_of(chain_model(3, 0.7), 500, rng);
  CHECK(grow_shrink(1, std::vector<int>{}, stats, {}, nullptr).empty());
  CHECK_THROWS_AS(grow_shrink(1, std::vector<int>{0, 1}, stats, {}, nullptr), UsageError);
}

TEST_CASE("grow-shrink ignores independent predecessors") {
  Rng rng(2);
  const auto model = empty_model(3);
  int empty = 0;
  for (int t = 0; t < 200; ++t) {
    const auto stats = stats_of(model, 100'000, rng);
    if (grow_shrink(2, std::vector<int>{0, 1}, stats, {}, nullptr).empty()) ++empty;
  }
  CHECK(empty >= 190);
}

TEST_CASE("grow-shrink keeps only the direct cause in a chain") {
  Rng rng(3);
  const auto model = chain_model(3, 0.7);
  int exact = 0;
  for (int t = 0; t < 200; ++t) {
    const auto stats = stats_of(model, 100'000, rng);
    if (grow_shrink(2, std::vector<int>{0, 1}, stats, {}, nullptr) == std::vector<int>{1}) ++exact;
  }
  CHECK(exact >= 190);
}

TEST_CASE("projection") {
  Rng rng(4);
  const auto indep = stats_of(empty_model(4), 100'000, rng);
  std::vector<int> order{0, 1, 2, 3};
  do {
    CHECK(project_order(order, indep, {}, nullptr).dag.num_edges() == 0);
  } while (std::next_permutation(order.begin(), order.end()));

  const auto lone = stats_of(empty_model(1), 50, rng);
  const auto one = project_order(std::vector<int>{0}, lone, {}, nullptr);
  CHECK(one.dag.num_edges() == 0);
  CHECK(one.score == scoring::local_bic(lone, 0, std::vector<int>{}, {}));

  const auto dag = graphs::generate_dag({graphs::GraphType::ErdosRenyi, 10, 3.0}, rng);
  const auto stats = stats_of(simulate::parameterize(dag, rng), 300, rng);
  std::vector<int> perm(10);
  for (int t = 0; t < 20; ++t) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto proj = project_order(perm, stats, {}, nullptr);
    CHECK(proj.score == scoring::graph_bic(stats, proj.dag, {}));
  }
  CHECK_THROWS_AS(project_order(std::vector<int>{0, 0, 1, 2, 3, 4, 5, 6, 7, 8}, stats, {}, nullptr),
                  UsageError);
}

TEST_CASE("BOSS leaves independent variables unconnected") {
  Rng rng(5);
  const auto model = empty_model(2);
  int empty = 0;
  for (int t = 0; t < 200; ++t) {
    const auto stats = stats_of(model, 100'000, rng);
    if (boss_search(stats, {}, rng).num_edges() == 0) ++empty;
  }
  CHECK(empty >= 190);
}

TEST_CASE("BOSS recovers a three-chain skeleton") {
  Rng rng(6);
  const auto model = chain_model(3, 0.6);
  const std::vector<graphs::UnorderedPair> truth{{0, 1}, {1, 2}};
  int exact = 0;
  for (int t = 0; t < 200; ++t) {
    const auto stats = stats_of(model, 100'000, rng);
    if (graphs::adjacency_pairs(boss_search(stats, {}, rng)) == truth) ++exact;
  }
  CHECK(exact >= 180);
}

TEST_CASE("BOSS against exhaustive search on four variables") {
  const auto dags = oracle::all_dags(4);
  REQUIRE(dags.size() == 543);
  Rng rng(7);
  int matched = 0;
  const int instances = 30;
  for (int t = 0; t < instances; ++t) {
    const auto truth = graphs::generate_dag({graphs::GraphType::ErdosRenyi, 4, 1.5}, rng);
    const auto stats = stats_of(simulate::parameterize(truth, rng), 10'000, rng);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& d : dags) best = std::max(best, scoring::graph_bic(stats, d, {}));
    const double found = scoring::graph_bic(stats, boss_search(stats, {}, rng), {});
    CHECK(found <= best + 1e-9 * std::abs(best));
    if (std::abs(found - best) <= 1e-9 * std::abs(best)) ++matched;
  }
  CHECK(matched >= 27);
}

TEST_CASE("BOSS sweeps never lower the score") {
  Rng rng(8);
  for (int t = 0; t < 10; ++t) {
    const auto truth = graphs::generate_dag({graphs::GraphType::ScaleFree, 15, 4.0}, rng);
    const auto stats = stats_of(simulate::parameterize(truth, rng), 200, rng);
    SearchConfig cfg;
    cfg.max_sweeps = 3;
    SearchTrace trace;
    const auto dag = boss_search(stats, cfg, rng, &trace);
    CHECK(trace.sweeps <= 3);
    CHECK(std::is_sorted(trace.scores.begin(), trace.scores.end()));
    CHECK(trace.scores.back() == doctest::Approx(scoring::graph_bic(stats, dag, {})));
    CHECK(graphs::topological_order(dag).size() == 15);
  }
}

TEST_CASE("hill climbing") {
  Rng rng(9);
  int recovered = 0;
  for (int t = 0; t < 100; ++t) {
    const auto stats = stats_of(chain_model(2, 0.8 / std::sqrt(1 - 0.64)), 10'000, rng);
    CHECK(stats.cov(0, 1) == doctest::Approx(0.8).epsilon(0.05));
    const auto dag = greedy_hill_climb(stats, {});
    if (dag.adjacent(0, 1)) ++recovered;
  }
  CHECK(recovered >= 95);

  const auto indep = stats_of(empty_model(5), 100'000, rng);
  CHECK(greedy_hill_climb(indep, {}).num_edges() == 0);

  const auto truth = graphs::generate_dag({graphs::GraphType::ErdosRenyi, 12, 3.0}, rng);
  const auto stats = stats_of(simulate::parameterize(truth, rng), 300, rng);
  SearchTrace trace;
  const auto dag = greedy_hill_climb(stats, {}, &trace);
  for (std::size_t i = 1; i < trace.scores.size(); ++i) CHECK(trace.scores[i] > trace.scores[i - 1]);
  CHECK(trace.scores.back() == doctest::Approx(scoring::graph_bic(stats, dag, {})));
  CHECK(graphs::topological_order(dag).size() == 12);
}

TEST_CASE("score cache is transparent") {
  Rng rng(10);
  for (int t = 0; t < 10; ++t) {
    const auto truth = graphs::generate_dag({graphs::GraphType::ErdosRenyi, 12, 2.0}, rng);
    const auto stats = stats_of(simulate::parameterize(truth, rng), 150, rng);
    for (auto alg : {Algorithm::Boss, Algorithm::GreedyHillClimb}) {
      SearchConfig cached;
      cached.algorithm = alg;
      SearchConfig fresh = cached;
      fresh.use_cache = false;
      Rng a(t);
      Rng b(t);
      CHECK(learn(stats, cached, a) == learn(stats, fresh, b));
    }
  }

  const auto stats = stats_of(chain_model(4, 0.5), 100, rng);
  ScoreCache cache(stats, {});
  VertexSet parents(4);
  parents.insert(0);
  parents.insert(2);
  const auto first = cache.local_score(3, parents);
  const auto second = cache.local_score(3, parents);
  CHECK(cache.hits() == 1);
  CHECK(first == second);
  CHECK(*first == scoring::local_bic(stats, 3, std::vector<int>{0, 2}, {}));
}

TEST_CASE("search is deterministic per seed") {
  Rng rng(11);
  const auto truth = graphs::generate_dag({graphs::GraphType::ErdosRenyi, 15, 2.0}, rng);
  const auto stats = stats_of(simulate::parameterize(truth, rng), 100, rng);
  Rng a(5);
  Rng b(5);
  CHECK(boss_search(stats, {}, a) == boss_search(stats, {}, b));
  SearchConfig data_order;
  data_order.initial_order = InitialOrder::DataOrder;
  Rng c(1);
  Rng d(2);
  CHECK(boss_search(stats, data_order, c) == boss_search(stats, data_order, d));
}

TEST_CASE("algorithm names") {
  CHECK(parse_algorithm("BOSS") == Algorithm::Boss);
  CHECK(parse_algorithm("ghc") == Algorithm::GreedyHillClimb);
  CHECK(to_string(Algorithm::GreedyHillClimb) == "ghc");
  CHECK_THROWS_AS(parse_algorithm("fges"), ConfigError);
  SearchConfig bad;
  bad.max_sweeps = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
