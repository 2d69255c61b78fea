#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace matchdecomp {

using NodeId = std::int32_t;
using Bitstring = std::vector<std::uint8_t>;

// Packed (u,v) node pair with u < v; compares in the same order as the pair.
using EdgeKey = std::uint64_t;

inline EdgeKey make_edge_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<EdgeKey>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}
inline NodeId key_u(EdgeKey k) { return static_cast<NodeId>(k >> 32); }
inline NodeId key_v(EdgeKey k) { return static_cast<NodeId>(k & 0xffffffffull); }

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double w = 0.0;
  EdgeKey key() const { return make_edge_key(u, v); }
};

// Named tolerance constants used across modules.
namespace tolerances {
inline constexpr double row_sum_slack = 1e-12;    // doubly substochastic row sums
inline constexpr double weight_sum_slack = 1e-9;  // sum of decomposition weights vs 1
inline constexpr double nonzero_weight = 1e-9;    // a weight counts as nonzero above this
inline constexpr double exact_entry = 1e-15;      // per-entry reconstruction agreement
}  // namespace tolerances

// Undirected weighted graph as a lexicographically sorted edge list plus a
// per-node incidence index. Entry (u,v) and (v,u) of the implied symmetric
// matrix are both equal to w.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  explicit WeightedGraph(NodeId n) { reset(n, {}); }

  WeightedGraph(NodeId n, std::vector<Edge> edges) { reset(n, std::move(edges)); }

  NodeId node_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  // Indices into edges() of the edges touching v.
  const std::vector<int>& incident(NodeId v) const {
    if (v < 0 || v >= n_) throw std::out_of_range("WeightedGraph: node id out of range");
    return incident_[static_cast<std::size_t>(v)];
  }

  int edge_index(NodeId u, NodeId v) const {
    const EdgeKey k = make_edge_key(u, v);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), k,
                               [](const Edge& e, EdgeKey key) { return e.key() < key; });
    if (it == edges_.end() || it->key() != k) return -1;
    return static_cast<int>(it - edges_.begin());
  }

  bool has_edge(NodeId u, NodeId v) const { return edge_index(u, v) >= 0; }

  // Weight of (u,v); absent edges weigh 0.
  double weight(NodeId u, NodeId v) const {
    const int i = edge_index(u, v);
    return i < 0 ? 0.0 : edges_[static_cast<std::size_t>(i)].w;
  }

  double weight(EdgeKey k) const { return weight(key_u(k), key_v(k)); }

  // Sum over max(w, 0); the scale used by penalty and annealing defaults.
  double positive_weight_sum() const {
    double s = 0.0;
    for (const Edge& e : edges_)
      if (e.w > 0.0) s += e.w;
    return s;
  }

 private:
  void reset(NodeId n, std::vector<Edge> edges) {
    if (n < 0) throw std::invalid_argument("WeightedGraph: negative node count");
    n_ = n;
    edges_ = std::move(edges);
    for (Edge& e : edges_) {
      if (e.u > e.v) std::swap(e.u, e.v);
      if (e.u == e.v) throw std::invalid_argument("WeightedGraph: self-loop on node " + std::to_string(e.u));
      if (e.u < 0 || e.v >= n_) throw std::invalid_argument("WeightedGraph: edge endpoint out of range");
      if (!std::isfinite(e.w)) throw std::invalid_argument("WeightedGraph: non-finite edge weight");
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return a.key() < b.key(); });
    for (std::size_t i = 1; i < edges_.size(); ++i)
      if (edges_[i].key() == edges_[i - 1].key())
        throw std::invalid_argument("WeightedGraph: duplicate edge (" + std::to_string(edges_[i].u) +
                                    "," + std::to_string(edges_[i].v) + ")");
    incident_.assign(static_cast<std::size_t>(n_), {});
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      incident_[static_cast<std::size_t>(edges_[i].u)].push_back(static_cast<int>(i));
      incident_[static_cast<std::size_t>(edges_[i].v)].push_back(static_cast<int>(i));
    }
  }

  NodeId n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incident_;
};

// Symmetric doubly substochastic demand matrix D*: weights in [0,1], zero
// diagonal, per-node incident weight sums <= 1 (+ slack).
class DemandMatrix {
 public:
  DemandMatrix() = default;

  explicit DemandMatrix(WeightedGraph g) : graph_(std::move(g)) {
    for (const Edge& e : graph_.edges()) {
      if (e.w < 0.0 || e.w > 1.0)
        throw std::invalid_argument("DemandMatrix: weight of edge (" + std::to_string(e.u) + "," +
                                    std::to_string(e.v) + ") outside [0,1]");
    }
    for (NodeId v = 0; v < graph_.node_count(); ++v) {
      double s = 0.0;
      for (int ei : graph_.incident(v)) s += graph_.edges()[static_cast<std::size_t>(ei)].w;
      if (s > 1.0 + tolerances::row_sum_slack)
        throw std::invalid_argument("DemandMatrix: incident weights of node " + std::to_string(v) +
                                    " sum to " + std::to_string(s) + " > 1");
    }
  }

  const WeightedGraph& graph() const { return graph_; }
  NodeId node_count() const { return graph_.node_count(); }

 private:
  WeightedGraph graph_;
};

// Deterministic bijection between a sorted edge set and indices 0..N-1.
// The qubit index of an edge equals its position here.
class EdgeIndexing {
 public:
  EdgeIndexing() = default;

  explicit EdgeIndexing(std::vector<EdgeKey> keys) : keys_(std::move(keys)) {
    std::sort(keys_.begin(), keys_.end());
    if (std::adjacent_find(keys_.begin(), keys_.end()) != keys_.end())
      throw std::invalid_argument("EdgeIndexing: duplicate edge");
  }

  std::size_t size() const { return keys_.size(); }
  const std::vector<EdgeKey>& keys() const { return keys_; }
  EdgeKey key(std::size_t i) const { return keys_.at(i); }

  int index_of(EdgeKey k) const {
    auto it = std::lower_bound(keys_.begin(), keys_.end(), k);
    if (it == keys_.end() || *it != k) return -1;
    return static_cast<int>(it - keys_.begin());
  }

 private:
  std::vector<EdgeKey> keys_;
};

inline EdgeIndexing build_edge_indexing(const WeightedGraph& g) {
  std::vector<EdgeKey> keys;
  keys.reserve(g.edge_count());
  for (const Edge& e : g.edges()) keys.push_back(e.key());
  return EdgeIndexing(std::move(keys));
}

// True iff no node appears in two of the given edges. The empty set is a
// matching.
inline bool is_matching(std::span<const EdgeKey> edges) {
  std::vector<NodeId> nodes;
  nodes.reserve(edges.size() * 2);
  for (EdgeKey k : edges) {
    nodes.push_back(key_u(k));
    nodes.push_back(key_v(k));
  }
  std::sort(nodes.begin(), nodes.end());
  return std::adjacent_find(nodes.begin(), nodes.end()) == nodes.end();
}

inline bool is_matching(const std::vector<EdgeKey>& edges) {
  return is_matching(std::span<const EdgeKey>(edges));
}

// A set of node-disjoint edges, stored sorted. Equivalently a symmetric
// binary substochastic matrix, or a bitstring over an EdgeIndexing.
class Matching {
 public:
  Matching() = default;

  static Matching from_edges(std::vector<EdgeKey> edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    if (!is_matching(edges)) throw std::invalid_argument("Matching: edges share a node");
    Matching m;
    m.edges_ = std::move(edges);
    return m;
  }

  static Matching from_bitstring(const Bitstring& x, const EdgeIndexing& idx) {
    if (x.size() != idx.size())
      throw std::invalid_argument("Matching: bitstring length " + std::to_string(x.size()) +
                                  " != edge count " + std::to_string(idx.size()));
    std::vector<EdgeKey> edges;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x[j]) edges.push_back(idx.key(j));
    return from_edges(std::move(edges));
  }

  const std::vector<EdgeKey>& edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }

  bool contains(EdgeKey k) const {
    return std::binary_search(edges_.begin(), edges_.end(), k);
  }

  std::size_t overlap(const Matching& other) const {
    std::size_t c = 0;
    auto a = edges_.begin();
    auto b = other.edges_.begin();
    while (a != edges_.end() && b != other.edges_.end()) {
      if (*a < *b) ++a;
      else if (*b < *a) ++b;
      else { ++c; ++a; ++b; }
    }
    return c;
  }

  Bitstring to_bitstring(const EdgeIndexing& idx) const {
    Bitstring x(idx.size(), 0);
    for (EdgeKey k : edges_) {
      const int j = idx.index_of(k);
      if (j < 0) throw std::invalid_argument("Matching: edge not present in indexing");
      x[static_cast<std::size_t>(j)] = 1;
    }
    return x;
  }

  NodeId max_node() const {
    NodeId m = -1;
    for (EdgeKey k : edges_) m = std::max(m, key_v(k));
    return m;
  }

  friend bool operator==(const Matching& a, const Matching& b) { return a.edges_ == b.edges_; }
  friend auto operator<=>(const Matching& a, const Matching& b) { return a.edges_ <=> b.edges_; }

 private:
  std::vector<EdgeKey> edges_;
};

// Edges whose bit is set; the result need not be a valid matching.
inline std::vector<EdgeKey> bitstring_to_subgraph(const Bitstring& x, const EdgeIndexing& idx) {
  if (x.size() != idx.size())
    throw std::invalid_argument("bitstring_to_subgraph: bitstring length " + std::to_string(x.size()) +
                                " != edge count " + std::to_string(idx.size()));
  std::vector<EdgeKey> edges;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j]) edges.push_back(idx.key(j));
  return edges;
}

inline Bitstring subgraph_to_bitstring(std::span<const EdgeKey> edges, const EdgeIndexing& idx) {
  Bitstring x(idx.size(), 0);
  for (EdgeKey k : edges) {
    const int j = idx.index_of(k);
    if (j < 0) throw std::invalid_argument("subgraph_to_bitstring: edge not present in indexing");
    x[static_cast<std::size_t>(j)] = 1;
  }
  return x;
}

struct DecompositionEntry {
  Matching matching;
  double weight = 0.0;
};

struct TracePoint {
  int iteration = 0;
  int length = 0;
  double error = 0.0;
};

struct PhaseTimings {
  double sample_seconds = 0.0;
  double fw_seconds = 0.0;
  double solve_seconds = 0.0;
  double total_seconds = 0.0;
};

// The evolving decomposition X_k = sum_l alpha_l M_l with its error trace.
struct Decomposition {
  std::vector<DecompositionEntry> entries;
  std::vector<TracePoint> error_trace;
  PhaseTimings timings;

  // Number of entries with weight above the nonzero cutoff.
  int length() const {
    int c = 0;
    for (const auto& e : entries)
      if (e.weight > tolerances::nonzero_weight) ++c;
    return c;
  }

  double weight_sum() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.weight;
    return s;
  }
};

// (1/n^2) * ||D* - sum alpha M||_F^2 over the full symmetric matrix; both
// (u,v) and (v,u) contribute.
inline double approximation_error(const DemandMatrix& target, const Decomposition& decomp) {
  const NodeId n = target.node_count();
  const std::size_t nn = static_cast<std::size_t>(n);
  std::vector<double> diff(nn * nn, 0.0);
  for (const Edge& e : target.graph().edges()) {
    diff[static_cast<std::size_t>(e.u) * nn + static_cast<std::size_t>(e.v)] = e.w;
    diff[static_cast<std::size_t>(e.v) * nn + static_cast<std::size_t>(e.u)] = e.w;
  }
  for (const auto& entry : decomp.entries) {
    if (entry.matching.max_node() >= n)
      throw std::invalid_argument("approximation_error: matching node id exceeds target size");
    for (EdgeKey k : entry.matching.edges()) {
      diff[static_cast<std::size_t>(key_u(k)) * nn + static_cast<std::size_t>(key_v(k))] -= entry.weight;
      diff[static_cast<std::size_t>(key_v(k)) * nn + static_cast<std::size_t>(key_u(k))] -= entry.weight;
    }
  }
  double s = 0.0;
  for (double d : diff) s += d * d;
  return s / (static_cast<double>(n) * static_cast<double>(n));
}

// D* - X on the union of edge supports; entries may be negative.
inline WeightedGraph residual_graph(const DemandMatrix& target, const Decomposition& decomp) {
  std::map<EdgeKey, double> w;
  for (const Edge& e : target.graph().edges()) w[e.key()] = e.w;
  for (const auto& entry : decomp.entries) {
    if (entry.matching.max_node() >= target.node_count())
      throw std::invalid_argument("residual_graph: matching node id exceeds target size");
    for (EdgeKey k : entry.matching.edges()) w[k] -= entry.weight;
  }
  std::vector<Edge> edges;
  edges.reserve(w.size());
  for (const auto& [k, weight] : w) edges.push_back({key_u(k), key_v(k), weight});
  return WeightedGraph(target.node_count(), std::move(edges));
}

// Sum of graph weights over the matching's edges; absent edges contribute 0.
inline double matching_weight(const Matching& m, const WeightedGraph& g) {
  double s = 0.0;
  for (EdgeKey k : m.edges()) s += g.weight(k);
  return s;
}

}  // namespace matchdecomp
