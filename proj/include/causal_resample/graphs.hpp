#ifndef CAUSAL_RESAMPLE_GRAPHS_HPP
#define CAUSAL_RESAMPLE_GRAPHS_HPP

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "causal_resample/rng.hpp"

namespace causal_resample::graphs {

struct Edge {
  int parent;
  int child;
  auto operator<=>(const Edge&) const = default;
};

// Unordered vertex pair, normalized so that u < v.
struct UnorderedPair {
  int u;
  int v;
  auto operator<=>(const UnorderedPair&) const = default;
};

// Position of the pair {u, v} (u < v) in the lexicographic enumeration of all
// C(n,2) pairs. Every pair-indexed table in the library uses this layout.
constexpr std::size_t pair_index(int u, int v, int num_vertices) {
  const auto uu = static_cast<std::size_t>(u);
  const auto n = static_cast<std::size_t>(num_vertices);
  return uu * (2 * n - uu - 1) / 2 + static_cast<std::size_t>(v - u - 1);
}

constexpr std::size_t num_pairs(int num_vertices) {
  const auto n = static_cast<std::size_t>(num_vertices);
  return n * (n - 1) / 2;
}

// Directed acyclic graph over vertices 0..n-1. Mutations that would create a
// cycle, a self-loop or a duplicate edge are rejected with StructuralError, so
// a Dag value is always valid.
class Dag {
 public:
  Dag() = default;
  explicit Dag(int num_vertices);
  Dag(int num_vertices, std::span<const Edge> edges);

  int num_vertices() const { return static_cast<int>(parents_.size()); }
  std::size_t num_edges() const { return num_edges_; }

  bool has_edge(int parent, int child) const;
  bool adjacent(int u, int v) const { return has_edge(u, v) || has_edge(v, u); }

  void add_edge(int parent, int child);
  void remove_edge(int parent, int child);

  // Sorted ascending.
  const std::vector<int>& parents(int v) const { return parents_.at(v); }
  const std::vector<int>& children(int v) const { return children_.at(v); }

  // Sorted by (parent, child).
  std::vector<Edge> edges() const;

  // True when a directed path from -> ... -> to exists (length >= 0). When
  // `skip` is given, that edge is ignored during the traversal.
  bool reachable(int from, int to, const Edge* skip = nullptr) const;

  bool operator==(const Dag&) const = default;

 private:
  void check_vertex(int v) const;

  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  std::size_t num_edges_ = 0;
};

enum class GraphType { ErdosRenyi, ScaleFree };

std::string to_string(GraphType type);
// Accepts "ER"/"erdos_renyi" and "SF"/"scale_free" (case-insensitive).
GraphType parse_graph_type(const std::string& text);

struct GraphSpec {
  GraphType graph_type = GraphType::ErdosRenyi;
  int num_vertices = 1;
  double avg_degree = 0.0;

  // Throws ConfigError when the spec cannot be realized by its generator.
  void validate() const;
  // Scale-free attachment count, round(avg_degree / 2).
  int attachments() const;
};

// G(n, p) over a uniformly random total order with p = d / (v - 1).
Dag generate_er_dag(const GraphSpec& spec, Rng& rng);

// Preferential attachment: each new vertex draws m distinct existing vertices
// with probability proportional to (undirected degree + 1); edges point from
// the existing vertex to the new one.
Dag generate_sf_dag(const GraphSpec& spec, Rng& rng);

Dag generate_dag(const GraphSpec& spec, Rng& rng);

// Kahn's method, lowest index first among ready vertices.
std::vector<int> topological_order(const Dag& dag);

std::vector<UnorderedPair> adjacency_pairs(const Dag& dag);

// 0/1 adjacency indicator per pair, laid out by pair_index.
std::vector<int> adjacency_indicator(const Dag& dag);

// Edge list text format:
//   vertices <v>
//   <parent> <child>
//   ...
void write_edge_list(std::ostream& out, const Dag& dag);
Dag read_edge_list(std::istream& in);

}  // namespace causal_resample::graphs

#endif  // CAUSAL_RESAMPLE_GRAPHS_HPP
