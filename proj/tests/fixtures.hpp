#pragma once

#include <utility>
#include <vector>

#include "matchdecomp/graph.hpp"

namespace matchdecomp::testing {

// Six-node demand matrix with a known exact decomposition into four
// matchings; used as a shared fixture across suites.
inline DemandMatrix six_node_demand() {
  std::vector<Edge> edges = {
      {0, 3, 0.4}, {0, 4, 0.6}, {1, 2, 0.1}, {1, 3, 0.3}, {1, 4, 0.4},
      {1, 5, 0.2}, {2, 3, 0.2}, {2, 5, 0.7}, {3, 5, 0.1},
  };
  return DemandMatrix(WeightedGraph(6, std::move(edges)));
}

// The four matchings and weights that reconstruct six_node_demand exactly.
inline std::vector<DecompositionEntry> six_node_generator() {
  auto m = [](std::vector<std::pair<NodeId, NodeId>> pairs) {
    std::vector<EdgeKey> keys;
    for (auto [u, v] : pairs) keys.push_back(make_edge_key(u, v));
    return Matching::from_edges(std::move(keys));
  };
  return {
      {m({{0, 4}, {1, 2}, {3, 5}}), 0.1},
      {m({{0, 4}, {1, 5}, {2, 3}}), 0.2},
      {m({{0, 4}, {1, 3}, {2, 5}}), 0.3},
      {m({{0, 3}, {1, 4}, {2, 5}}), 0.4},
  };
}

inline Matching make_matching(std::vector<std::pair<NodeId, NodeId>> pairs) {
  std::vector<EdgeKey> keys;
  for (auto [u, v] : pairs) keys.push_back(make_edge_key(u, v));
  return Matching::from_edges(std::move(keys));
}

}  // namespace matchdecomp::testing
