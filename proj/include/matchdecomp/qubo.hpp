#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "matchdecomp/graph.hpp"

namespace matchdecomp {

// For each edge index j, the indices of edges sharing a node with j.
struct EdgeAdjacency {
  std::vector<std::vector<int>> gamma;

  std::size_t size() const { return gamma.size(); }
  const std::vector<int>& operator[](std::size_t j) const { return gamma[j]; }
};

inline EdgeAdjacency build_edge_adjacency(const EdgeIndexing& idx) {
  EdgeAdjacency adj;
  const std::size_t n_edges = idx.size();
  adj.gamma.assign(n_edges, {});
  for (std::size_t j = 0; j < n_edges; ++j) {
    const NodeId ju = key_u(idx.key(j));
    const NodeId jv = key_v(idx.key(j));
    for (std::size_t k = 0; k < n_edges; ++k) {
      if (k == j) continue;
      const NodeId ku = key_u(idx.key(k));
      const NodeId kv = key_v(idx.key(k));
      if (ku == ju || ku == jv || kv == ju || kv == jv)
        adj.gamma[j].push_back(static_cast<int>(k));
    }
  }
  return adj;
}

// Penalized binary objective over edge variables:
//   C(x) = -sum_j w_j x_j + lambda * sum_j sum_{k in Gamma(j)} x_j x_k
// The double sum runs over ordered pairs, so each unordered violating pair
// contributes 2*lambda (reported as effective_pair_penalty in diagnostics).
struct QuboModel {
  int num_vars = 0;
  std::vector<double> weights;  // w_j
  std::vector<double> linear;   // -w_j
  EdgeAdjacency adjacency;
  double lambda = 0.0;
  EdgeIndexing indexing;

  double effective_pair_penalty() const { return 2.0 * lambda; }
};

// lambda = penalty_factor * sum_j max(w_j, 0); non-positive edges stay as
// variables so bitstring lengths keep matching the EdgeIndexing.
inline QuboModel build_qubo(const WeightedGraph& g, double penalty_factor = 0.2) {
  if (!(penalty_factor > 0.0)) throw std::invalid_argument("build_qubo: penalty_factor must be > 0");
  QuboModel model;
  model.indexing = build_edge_indexing(g);
  model.num_vars = static_cast<int>(model.indexing.size());
  model.weights.reserve(model.indexing.size());
  for (EdgeKey k : model.indexing.keys()) model.weights.push_back(g.weight(k));
  model.linear.reserve(model.weights.size());
  for (double w : model.weights) model.linear.push_back(-w);
  model.adjacency = build_edge_adjacency(model.indexing);
  model.lambda = penalty_factor * g.positive_weight_sum();
  return model;
}

inline void check_bitstring_size(const QuboModel& model, std::size_t len, const char* who) {
  if (len != static_cast<std::size_t>(model.num_vars))
    throw std::invalid_argument(std::string(who) + ": bitstring length " + std::to_string(len) +
                                " != variable count " + std::to_string(model.num_vars));
}

// C(x), evaluated exactly as the written double sum.
inline double qubo_cost(const QuboModel& model, std::span<const std::uint8_t> x) {
  check_bitstring_size(model, x.size(), "qubo_cost");
  double cost = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!x[j]) continue;
    cost += model.linear[j];
    for (int k : model.adjacency[j])
      if (x[static_cast<std::size_t>(k)]) cost += model.lambda;
  }
  return cost;
}

inline double qubo_cost(const QuboModel& model, const Bitstring& x) {
  return qubo_cost(model, std::span<const std::uint8_t>(x));
}

// True iff some adjacent pair of edges has both bits set.
inline bool violates(const QuboModel& model, std::span<const std::uint8_t> x) {
  check_bitstring_size(model, x.size(), "violates");
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!x[j]) continue;
    for (int k : model.adjacency[j])
      if (x[static_cast<std::size_t>(k)]) return true;
  }
  return false;
}

inline bool violates(const QuboModel& model, const Bitstring& x) {
  return violates(model, std::span<const std::uint8_t>(x));
}

// Plain-text coefficient list (i, j, value): diagonal terms carry the linear
// coefficients, off-diagonal lines one per ordered adjacent pair.
inline void export_coefficients(const QuboModel& model, std::ostream& out) {
  out << "# qubo coefficients: i j value (diagonal = linear)\n";
  out << "# lambda " << model.lambda << " effective_pair_penalty " << model.effective_pair_penalty()
      << "\n";
  char buf[64];
  for (int j = 0; j < model.num_vars; ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", model.linear[static_cast<std::size_t>(j)]);
    out << j << ' ' << j << ' ' << buf << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.17g", model.lambda);
  for (int j = 0; j < model.num_vars; ++j)
    for (int k : model.adjacency[static_cast<std::size_t>(j)]) out << j << ' ' << k << ' ' << buf << '\n';
}

}  // namespace matchdecomp
