#ifndef CAUSAL_RESAMPLE_SEARCH_HPP
#define CAUSAL_RESAMPLE_SEARCH_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "causal_resample/graphs.hpp"
#include "causal_resample/rng.hpp"
#include "causal_resample/scoring.hpp"
#include "causal_resample/vertex_set.hpp"

namespace causal_resample::search {

enum class Algorithm { Boss, GreedyHillClimb };
enum class InitialOrder { Random, DataOrder };

std::string to_string(Algorithm alg);
// "boss", "ghc" / "hill_climb" (case-insensitive).
Algorithm parse_algorithm(const std::string& text);

struct SearchConfig {
  Algorithm algorithm = Algorithm::Boss;
  scoring::ScoreConfig score;
  int max_sweeps = 100;
  InitialOrder initial_order = InitialOrder::Random;
  bool use_cache = true;

  void validate() const;
};

// Memo of local scores for one SufficientStats/ScoreConfig pair. A parent set
// that fails to score is remembered as nullopt.
class ScoreCache {
 public:
  ScoreCache(const scoring::SufficientStats& stats, const scoring::ScoreConfig& cfg)
      : stats_(&stats), cfg_(cfg) {}

  std::optional<double> local_score(int v, const VertexSet& parents);

  std::size_t size() const { return table_.size(); }
  std::size_t hits() const { return hits_; }

 private:
  struct Key {
    int vertex;
    VertexSet parents;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return k.parents.hash() ^ (static_cast<std::size_t>(k.vertex) * 0x9e3779b97f4a7c15ULL);
    }
  };

  const scoring::SufficientStats* stats_;
  scoring::ScoreConfig cfg_;
  std::unordered_map<Key, std::optional<double>, KeyHash> table_;
  std::size_t hits_ = 0;
};

// Local score of (v, parents), through the cache when one is given.
// nullopt when the parent set cannot be scored.
std::optional<double> try_local_score(const scoring::SufficientStats& stats, int v,
                                      const VertexSet& parents, const scoring::ScoreConfig& cfg,
                                      ScoreCache* cache);

// Forward/backward parent selection of v among `predecessors`. Returns the
// selected parents in ascending order. Ties go to the lowest vertex index.
std::vector<int> grow_shrink(int v, std::span<const int> predecessors,
                             const scoring::SufficientStats& stats,
                             const scoring::ScoreConfig& cfg, ScoreCache* cache);

struct Projection {
  graphs::Dag dag;
  double score = 0.0;
};

// DAG induced by an ordering: each vertex takes grow_shrink parents from its
// prefix. score is the graph BIC summed in vertex-index order.
Projection project_order(std::span<const int> order, const scoring::SufficientStats& stats,
                         const scoring::ScoreConfig& cfg, ScoreCache* cache);

struct SearchTrace {
  std::vector<double> scores;  // BOSS: score after each sweep; GHC: after each accepted move
  std::vector<int> final_order;
  int sweeps = 0;
};

// Best-relocation order search: every sweep moves each vertex to its best
// position in the order when that strictly improves the projected score.
graphs::Dag boss_search(const scoring::SufficientStats& stats, const SearchConfig& cfg, Rng& rng,
                        SearchTrace* trace = nullptr);

// Edge-wise hill climbing over DAGs from the empty graph using add, delete and
// reverse moves.
graphs::Dag greedy_hill_climb(const scoring::SufficientStats& stats, const SearchConfig& cfg,
                              SearchTrace* trace = nullptr);

graphs::Dag learn(const scoring::SufficientStats& stats, const SearchConfig& cfg, Rng& rng);

}  // namespace causal_resample::search

#endif  // CAUSAL_RESAMPLE_SEARCH_HPP
