#include "causal_resample/graphs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>

#include "causal_resample/errors.hpp"

namespace causal_resample::graphs {

Dag::Dag(int num_vertices) {
  if (num_vertices < 0) throw ConfigError("negative vertex count");
  parents_.resize(num_vertices);
  children_.resize(num_vertices);
}

Dag::Dag(int num_vertices, std::span<const Edge> edges) : Dag(num_vertices) {
  for (const auto& e : edges) add_edge(e.parent, e.child);
}

void Dag::check_vertex(int v) const {
  if (v < 0 || v >= num_vertices()) {
    throw StructuralError("vertex " + std::to_string(v) + " out of range [0, " +
                          std::to_string(num_vertices()) + ")");
  }
}

bool Dag::has_edge(int parent, int child) const {
  check_vertex(parent);
  check_vertex(child);
  const auto& pa = parents_[child];
  return std::binary_search(pa.begin(), pa.end(), parent);
}

void Dag::add_edge(int parent, int child) {
  check_vertex(parent);
  check_vertex(child);
  if (parent == child) {
    throw StructuralError("self-loop on vertex " + std::to_string(parent));
  }
  if (has_edge(parent, child)) {
    throw StructuralError("duplicate edge " + std::to_string(parent) + " -> " +
                          std::to_string(child));
  }
  if (reachable(child, parent)) {
    throw StructuralError("edge " + std::to_string(parent) + " -> " + std::to_string(child) +
                          " would create a cycle");
  }
  auto& pa = parents_[child];
  pa.insert(std::upper_bound(pa.begin(), pa.end(), parent), parent);
  auto& ch = children_[parent];
  ch.insert(std::upper_bound(ch.begin(), ch.end(), child), child);
  ++num_edges_;
}

void Dag::remove_edge(int parent, int child) {
  if (!has_edge(parent, child)) {
    throw StructuralError("no edge " + std::to_string(parent) + " -> " + std::to_string(child));
  }
  auto& pa = parents_[child];
  pa.erase(std::lower_bound(pa.begin(), pa.end(), parent));
  auto& ch = children_[parent];
  ch.erase(std::lower_bound(ch.begin(), ch.end(), child));
  --num_edges_;
}

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges_);
  for (int p = 0; p < num_vertices(); ++p) {
    for (int c : children_[p]) out.push_back({p, c});
  }
  return out;
}

bool Dag::reachable(int from, int to, const Edge* skip) const {
  check_vertex(from);
  check_vertex(to);
  if (from == to) return true;
  std::vector<char> seen(num_vertices(), 0);
  std::vector<int> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int w : children_[u]) {
      if (skip != nullptr && skip->parent == u && skip->child == w) continue;
      if (w == to) return true;
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return false;
}

std::string to_string(GraphType type) {
  return type == GraphType::ErdosRenyi ? "ER" : "SF";
}

GraphType parse_graph_type(const std::string& text) {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "er" || lower == "erdos_renyi" || lower == "erdosrenyi") return GraphType::ErdosRenyi;
  if (lower == "sf" || lower == "scale_free" || lower == "scalefree") return GraphType::ScaleFree;
  throw ConfigError("unknown graph type '" + text + "'");
}

int GraphSpec::attachments() const {
  return static_cast<int>(std::floor(avg_degree / 2.0 + 0.5));
}

void GraphSpec::validate() const {
  if (num_vertices < 1) throw ConfigError("num_vertices must be positive");
  if (!std::isfinite(avg_degree) || avg_degree < 0.0) {
    throw ConfigError("avg_degree must be a finite nonnegative number");
  }
  if (graph_type == GraphType::ErdosRenyi) {
    if (avg_degree > 0.0 && !(avg_degree < num_vertices - 1)) {
      throw ConfigError("avg_degree must be below num_vertices - 1 for Erdos-Renyi graphs");
    }
  } else {
    const int m = attachments();
    if (num_vertices <= m) {
      throw ConfigError("scale-free graphs need more than m = " + std::to_string(m) +
                        " vertices");
    }
  }
}

Dag generate_er_dag(const GraphSpec& spec, Rng& rng) {
  if (spec.graph_type != GraphType::ErdosRenyi) throw UsageError("spec is not Erdos-Renyi");
  spec.validate();
  const int n = spec.num_vertices;
  Dag dag(n);
  if (n < 2 || spec.avg_degree == 0.0) return dag;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  const double p = spec.avg_degree / (n - 1);
  std::bernoulli_distribution coin(p);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(rng)) dag.add_edge(order[i], order[j]);
    }
  }
  return dag;
}

Dag generate_sf_dag(const GraphSpec& spec, Rng& rng) {
  if (spec.graph_type != GraphType::ScaleFree) throw UsageError("spec is not scale-free");
  spec.validate();
  const int n = spec.num_vertices;
  const int m = spec.attachments();
  Dag dag(n);
  if (m == 0) return dag;

  std::vector<double> degree(n, 0.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> chosen;
  for (int t = m; t < n; ++t) {
    // Sequential weighted draws without replacement among 0..t-1.
    std::vector<double> weight(t);
    for (int u = 0; u < t; ++u) weight[u] = degree[u] + 1.0;
    chosen.clear();
    for (int k = 0; k < m; ++k) {
      const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
      double target = unif(rng) * total;
      int pick = -1;
      for (int u = 0; u < t; ++u) {
        if (weight[u] <= 0.0) continue;
        pick = u;
        if (target < weight[u]) break;
        target -= weight[u];
      }
      chosen.push_back(pick);
      weight[pick] = 0.0;
    }
    std::sort(chosen.begin(), chosen.end());
    for (int u : chosen) {
      dag.add_edge(u, t);
      degree[u] += 1.0;
      degree[t] += 1.0;
    }
  }
  return dag;
}

Dag generate_dag(const GraphSpec& spec, Rng& rng) {
  return spec.graph_type == GraphType::ErdosRenyi ? generate_er_dag(spec, rng)
                                                  : generate_sf_dag(spec, rng);
}

std::vector<int> topological_order(const Dag& dag) {
  const int n = dag.num_vertices();
  std::vector<int> indegree(n);
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < n; ++v) {
    indegree[v] = static_cast<int>(dag.parents(v).size());
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int c : dag.children(v)) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    throw StructuralError("cycle detected during topological sort");
  }
  return order;
}

std::vector<UnorderedPair> adjacency_pairs(const Dag& dag) {
  std::vector<UnorderedPair> out;
  out.reserve(dag.num_edges());
  for (const auto& e : dag.edges()) {
    out.push_back({std::min(e.parent, e.child), std::max(e.parent, e.child)});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> adjacency_indicator(const Dag& dag) {
  const int n = dag.num_vertices();
  std::vector<int> out(num_pairs(n), 0);
  for (const auto& e : dag.edges()) {
    const int u = std::min(e.parent, e.child);
    const int v = std::max(e.parent, e.child);
    out[pair_index(u, v, n)] = 1;
  }
  return out;
}

void write_edge_list(std::ostream& out, const Dag& dag) {
  out << "vertices " << dag.num_vertices() << '\n';
  for (const auto& e : dag.edges()) out << e.parent << ' ' << e.child << '\n';
}

Dag read_edge_list(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next_content_line = [&](std::string& dst) {
    while (std::getline(in, dst)) {
      ++line_no;
      if (dst.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_content_line(line)) throw DataError("edge list: missing 'vertices' header");
  std::istringstream header(line);
  std::string keyword;
  int n = -1;
  if (!(header >> keyword >> n) || keyword != "vertices" || n < 0) {
    throw DataError("edge list: malformed header on line " + std::to_string(line_no));
  }
  Dag dag(n);
  while (next_content_line(line)) {
    std::istringstream row(line);
    int p = 0;
    int c = 0;
    std::string extra;
    if (!(row >> p >> c) || (row >> extra)) {
      throw DataError("edge list: malformed edge on line " + std::to_string(line_no));
    }
    try {
      dag.add_edge(p, c);
    } catch (const StructuralError& e) {
      throw DataError("edge list line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return dag;
}

}  // namespace causal_resample::graphs
