#include "causal_resample/search.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "causal_resample/errors.hpp"

namespace causal_resample::search {

std::string to_string(Algorithm alg) {
  return alg == Algorithm::Boss ? "boss" : "ghc";
}

Algorithm parse_algorithm(const std::string& text) {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "boss") return Algorithm::Boss;
  if (lower == "ghc" || lower == "hill_climb" || lower == "greedy_hill_climb" || lower == "hc") {
    return Algorithm::GreedyHillClimb;
  }
  throw ConfigError("unknown search algorithm '" + text + "'");
}

void SearchConfig::validate() const {
  score.validate();
  if (max_sweeps < 1) throw ConfigError("max_sweeps must be at least 1");
}

std::optional<double> ScoreCache::local_score(int v, const VertexSet& parents) {
  Key key{v, parents};
  if (auto it = table_.find(key); it != table_.end()) {
    ++hits_;
    return it->second;
  }
  std::optional<double> value = try_local_score(*stats_, v, parents, cfg_, nullptr);
  table_.emplace(std::move(key), value);
  return value;
}

std::optional<double> try_local_score(const scoring::SufficientStats& stats, int v,
                                      const VertexSet& parents, const scoring::ScoreConfig& cfg,
                                      ScoreCache* cache) {
  if (cache != nullptr) return cache->local_score(v, parents);
  try {
    const auto members = parents.members();
    return scoring::local_bic(stats, v, members, cfg);
  } catch (const ScoringError&) {
    return std::nullopt;
  }
}

namespace {

constexpr double kRelocationTolerance = 1e-10;

struct GrowShrinkResult {
  std::vector<int> parents;
  double score = 0.0;
};

// `candidates` must be sorted ascending.
GrowShrinkResult grow_shrink_impl(int v, const std::vector<int>& candidates,
                                  const scoring::SufficientStats& stats,
                                  const scoring::ScoreConfig& cfg, ScoreCache* cache) {
  VertexSet parents(stats.num_vars());
  const auto base = try_local_score(stats, v, parents, cfg, cache);
  if (!base) throw ScoringError("vertex " + std::to_string(v) + " cannot be scored");
  double score = *base;

  for (;;) {
    for (;;) {
      int best = -1;
      double best_gain = 0.0;
      double best_score = score;
      for (int c : candidates) {
        if (parents.contains(c)) continue;
        parents.insert(c);
        const auto s = try_local_score(stats, v, parents, cfg, cache);
        parents.erase(c);
        if (s && *s - score > best_gain) {
          best_gain = *s - score;
          best_score = *s;
          best = c;
        }
      }
      if (best < 0) break;
      parents.insert(best);
      score = best_score;
    }

    bool removed = false;
    for (;;) {
      int best = -1;
      double best_gain = 0.0;
      double best_score = score;
      for (int c : parents.members()) {
        parents.erase(c);
        const auto s = try_local_score(stats, v, parents, cfg, cache);
        parents.insert(c);
        if (s && *s - score > best_gain) {
          best_gain = *s - score;
          best_score = *s;
          best = c;
        }
      }
      if (best < 0) break;
      parents.erase(best);
      score = best_score;
      removed = true;
    }
    if (!removed) break;
  }
  return {parents.members(), score};
}

// Grow-shrink results keyed by (vertex, predecessor set), scoped to one search.
class GrowShrinkMemo {
 public:
  GrowShrinkMemo(const scoring::SufficientStats& stats, const scoring::ScoreConfig& cfg,
                 ScoreCache* cache)
      : stats_(stats), cfg_(cfg), cache_(cache) {}

  const GrowShrinkResult& get(int v, const VertexSet& predecessors) {
    if (cache_ == nullptr) {
      scratch_ = grow_shrink_impl(v, predecessors.members(), stats_, cfg_, nullptr);
      return scratch_;
    }
    Key key{v, predecessors};
    auto it = table_.find(key);
    if (it == table_.end()) {
      it = table_.emplace(std::move(key),
                          grow_shrink_impl(v, predecessors.members(), stats_, cfg_, cache_))
               .first;
    }
    return it->second;
  }

 private:
  struct Key {
    int vertex;
    VertexSet predecessors;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return k.predecessors.hash() ^ (static_cast<std::size_t>(k.vertex) * 0x9e3779b97f4a7c15ULL);
    }
  };

  const scoring::SufficientStats& stats_;
  const scoring::ScoreConfig& cfg_;
  ScoreCache* cache_;
  std::unordered_map<Key, GrowShrinkResult, KeyHash> table_;
  GrowShrinkResult scratch_;
};

void check_order(std::span<const int> order, int p) {
  if (static_cast<int>(order.size()) != p) throw UsageError("order is not a permutation");
  std::vector<char> seen(p, 0);
  for (int v : order) {
    if (v < 0 || v >= p || seen[v]) throw UsageError("order is not a permutation");
    seen[v] = 1;
  }
}

}  // namespace

std::vector<int> grow_shrink(int v, std::span<const int> predecessors,
                             const scoring::SufficientStats& stats,
                             const scoring::ScoreConfig& cfg, ScoreCache* cache) {
  std::vector<int> candidates(predecessors.begin(), predecessors.end());
  if (std::find(candidates.begin(), candidates.end(), v) != candidates.end()) {
    throw UsageError("vertex is among its own predecessors");
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  return grow_shrink_impl(v, candidates, stats, cfg, cache).parents;
}

Projection project_order(std::span<const int> order, const scoring::SufficientStats& stats,
                         const scoring::ScoreConfig& cfg, ScoreCache* cache) {
  const int p = stats.num_vars();
  check_order(order, p);
  Projection out{graphs::Dag(p), 0.0};
  std::vector<double> local(p, 0.0);
  std::vector<int> prefix;
  for (int v : order) {
    const auto sorted_prefix = [&] {
      auto s = prefix;
      std::sort(s.begin(), s.end());
      return s;
    }();
    auto result = grow_shrink_impl(v, sorted_prefix, stats, cfg, cache);
    for (int parent : result.parents) out.dag.add_edge(parent, v);
    local[v] = result.score;
    prefix.push_back(v);
  }
  for (int v = 0; v < p; ++v) out.score += local[v];
  return out;
}

graphs::Dag boss_search(const scoring::SufficientStats& stats, const SearchConfig& cfg, Rng& rng,
                        SearchTrace* trace) {
  cfg.validate();
  const int p = stats.num_vars();
  if (p < 1) throw UsageError("search over zero variables");

  std::optional<ScoreCache> cache;
  if (cfg.use_cache) cache.emplace(stats, cfg.score);
  ScoreCache* cache_ptr = cache ? &*cache : nullptr;
  GrowShrinkMemo memo(stats, cfg.score, cache_ptr);

  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  if (cfg.initial_order == InitialOrder::Random) std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> with_x(p);
  std::vector<double> without_x(p);
  std::vector<double> as_prefix(p);
  std::vector<double> score_at(p);
  int sweeps = 0;
  for (; sweeps < cfg.max_sweeps;) {
    ++sweeps;
    bool improved = false;
    const std::vector<int> visit = order;
    for (int x : visit) {
      const int pos = static_cast<int>(std::find(order.begin(), order.end(), x) - order.begin());
      std::vector<int> rest;
      rest.reserve(p - 1);
      for (int y : order) {
        if (y != x) rest.push_back(y);
      }

      // For insertion slot k: vertices rest[0..k) keep their prefixes, x sees
      // rest[0..k), and rest[k..] additionally see x.
      VertexSet prefix(p);
      for (int i = 0; i < p - 1; ++i) {
        const int y = rest[i];
        without_x[i] = memo.get(y, prefix).score;
        as_prefix[i] = memo.get(x, prefix).score;
        prefix.insert(x);
        with_x[i] = memo.get(y, prefix).score;
        prefix.erase(x);
        prefix.insert(y);
      }
      as_prefix[p - 1] = memo.get(x, prefix).score;

      double head = 0.0;
      std::vector<double> tail(p, 0.0);
      for (int i = p - 2; i >= 0; --i) tail[i] = tail[i + 1] + with_x[i];
      for (int k = 0; k < p; ++k) {
        score_at[k] = head + as_prefix[k] + tail[k];
        if (k < p - 1) head += without_x[k];
      }

      // Markov-equivalent orders score identically up to rounding; only a
      // gain above that noise floor counts as an improvement.
      int best_k = pos;
      for (int k = 0; k < p; ++k) {
        if (score_at[k] > score_at[best_k]) best_k = k;
      }
      const double noise_floor = kRelocationTolerance * std::max(1.0, std::abs(score_at[pos]));
      if (best_k != pos && score_at[best_k] - score_at[pos] > noise_floor) {
        rest.insert(rest.begin() + best_k, x);
        order = std::move(rest);
        improved = true;
      }
    }
    if (trace != nullptr) trace->scores.push_back(project_order(order, stats, cfg.score, cache_ptr).score);
    if (!improved) break;
  }

  auto projection = project_order(order, stats, cfg.score, cache_ptr);
  if (trace != nullptr) {
    trace->final_order = order;
    trace->sweeps = sweeps;
  }
  return std::move(projection.dag);
}

graphs::Dag greedy_hill_climb(const scoring::SufficientStats& stats, const SearchConfig& cfg,
                              SearchTrace* trace) {
  cfg.validate();
  const int p = stats.num_vars();
  if (p < 1) throw UsageError("search over zero variables");

  std::optional<ScoreCache> cache;
  if (cfg.use_cache) cache.emplace(stats, cfg.score);
  ScoreCache* cache_ptr = cache ? &*cache : nullptr;

  graphs::Dag dag(p);
  std::vector<VertexSet> parent_sets(p, VertexSet(p));
  std::vector<double> local(p);
  for (int v = 0; v < p; ++v) {
    const auto s = try_local_score(stats, v, parent_sets[v], cfg.score, cache_ptr);
    if (!s) throw ScoringError("vertex " + std::to_string(v) + " cannot be scored");
    local[v] = *s;
  }
  auto total = [&] { return std::accumulate(local.begin(), local.end(), 0.0); };
  if (trace != nullptr) trace->scores.push_back(total());

  enum class Move { Add, Delete, Reverse };
  const long long max_ops = static_cast<long long>(cfg.max_sweeps) * p * p;
  for (long long op = 0; op < max_ops; ++op) {
    double best_gain = 0.0;
    Move best_move = Move::Add;
    int best_u = -1;
    int best_v = -1;
    double best_child_score = 0.0;
    double best_parent_score = 0.0;

    auto consider = [&](Move m, int u, int v, double gain, double child_score, double parent_score) {
      if (gain > best_gain) {
        best_gain = gain;
        best_move = m;
        best_u = u;
        best_v = v;
        best_child_score = child_score;
        best_parent_score = parent_score;
      }
    };

    for (int u = 0; u < p; ++u) {
      for (int v = 0; v < p; ++v) {
        if (u == v) continue;
        if (dag.has_edge(u, v)) {
          VertexSet& pv = parent_sets[v];
          pv.erase(u);
          const auto dropped = try_local_score(stats, v, pv, cfg.score, cache_ptr);
          pv.insert(u);
          if (dropped) consider(Move::Delete, u, v, *dropped - local[v], *dropped, 0.0);

          // Reversal is acyclic unless another path u ~> v exists.
          const graphs::Edge skip{u, v};
          if (dropped && !dag.reachable(u, v, &skip)) {
            VertexSet& pu = parent_sets[u];
            pu.insert(v);
            const auto grown = try_local_score(stats, u, pu, cfg.score, cache_ptr);
            pu.erase(v);
            if (grown) {
              consider(Move::Reverse, u, v, (*dropped - local[v]) + (*grown - local[u]), *dropped,
                       *grown);
            }
          }
        } else if (!dag.has_edge(v, u) && !dag.reachable(v, u)) {
          VertexSet& pv = parent_sets[v];
          pv.insert(u);
          const auto grown = try_local_score(stats, v, pv, cfg.score, cache_ptr);
          pv.erase(u);
          if (grown) consider(Move::Add, u, v, *grown - local[v], *grown, 0.0);
        }
      }
    }
    if (best_u < 0) break;

    const int u = best_u;
    const int v = best_v;
    switch (best_move) {
      case Move::Add:
        dag.add_edge(u, v);
        parent_sets[v].insert(u);
        local[v] = best_child_score;
        break;
      case Move::Delete:
        dag.remove_edge(u, v);
        parent_sets[v].erase(u);
        local[v] = best_child_score;
        break;
      case Move::Reverse:
        dag.remove_edge(u, v);
        dag.add_edge(v, u);
        parent_sets[v].erase(u);
        parent_sets[u].insert(v);
        local[v] = best_child_score;
        local[u] = best_parent_score;
        break;
    }
    if (trace != nullptr) {
      trace->scores.push_back(total());
      ++trace->sweeps;
    }
  }
  return dag;
}

graphs::Dag learn(const scoring::SufficientStats& stats, const SearchConfig& cfg, Rng& rng) {
  return cfg.algorithm == Algorithm::Boss ? boss_search(stats, cfg, rng)
                                          : greedy_hill_climb(stats, cfg);
}

}  // namespace causal_resample::search
