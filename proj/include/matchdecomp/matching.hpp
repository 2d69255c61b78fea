#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "matchdecomp/graph.hpp"

namespace matchdecomp {

struct MatchingSolution {
  Matching matching;
  double weight = 0.0;
};

namespace detail {

// Maximum-weight matching on a general graph (Edmonds' blossom algorithm,
// following Galil's O(n^3) formulation in the van Rantwijk arrangement:
// endpoint-indexed edges, vertex+blossom dual variables, and four delta
// types per substage). Weights may be any finite doubles; the matching
// maximizes total weight and need not be maximal.
class BlossomMatcher {
 public:
  BlossomMatcher(int nvertex, const std::vector<Edge>& edge_list) : nv_(nvertex) {
    for (const Edge& e : edge_list) edges_.push_back(e);
    ne_ = static_cast<int>(edges_.size());
    double maxw = 0.0;
    for (const Edge& e : edges_) maxw = std::max(maxw, e.w);
    max_weight_ = maxw;
    eps_ = 1e-12 * std::max(1.0, maxw);

    endpoint_.resize(2 * ne_);
    for (int k = 0; k < ne_; ++k) {
      endpoint_[2 * k] = edges_[k].u;
      endpoint_[2 * k + 1] = edges_[k].v;
    }
    neighbend_.assign(nv_, {});
    for (int k = 0; k < ne_; ++k) {
      neighbend_[edges_[k].u].push_back(2 * k + 1);
      neighbend_[edges_[k].v].push_back(2 * k);
    }
    mate_.assign(nv_, -1);
    label_.assign(2 * nv_, 0);
    labelend_.assign(2 * nv_, -1);
    inblossom_.resize(nv_);
    for (int v = 0; v < nv_; ++v) inblossom_[v] = v;
    blossomparent_.assign(2 * nv_, -1);
    blossomchilds_.assign(2 * nv_, {});
    blossombase_.resize(2 * nv_);
    for (int v = 0; v < nv_; ++v) blossombase_[v] = v;
    for (int b = nv_; b < 2 * nv_; ++b) blossombase_[b] = -1;
    blossomendps_.assign(2 * nv_, {});
    bestedge_.assign(2 * nv_, -1);
    blossombestedges_.assign(2 * nv_, {});
    has_best_list_.assign(2 * nv_, false);
    unusedblossoms_.clear();
    for (int b = nv_; b < 2 * nv_; ++b) unusedblossoms_.push_back(b);
    dualvar_.assign(2 * nv_, 0.0);
    for (int v = 0; v < nv_; ++v) dualvar_[v] = maxw;
    allowedge_.assign(ne_, false);
  }

  // Returns mate[v] = partner vertex or -1.
  std::vector<int> solve() {
    if (ne_ == 0) return mate_;
    for (int stage = 0; stage < nv_; ++stage) {
      std::fill(label_.begin(), label_.end(), 0);
      std::fill(bestedge_.begin(), bestedge_.end(), -1);
      for (int b = nv_; b < 2 * nv_; ++b) {
        blossombestedges_[b].clear();
        has_best_list_[b] = false;
      }
      std::fill(allowedge_.begin(), allowedge_.end(), false);
      queue_.clear();

      for (int v = 0; v < nv_; ++v)
        if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);

      bool augmented = false;
      while (true) {
        while (!queue_.empty() && !augmented) {
          const int v = queue_.back();
          queue_.pop_back();
          assert(label_[inblossom_[v]] == 1);
          for (int p : neighbend_[v]) {
            const int k = p / 2;
            const int w = endpoint_[p];
            if (inblossom_[v] == inblossom_[w]) continue;
            double kslack = 0.0;
            if (!allowedge_[k]) {
              kslack = slack(k);
              if (kslack <= eps_) allowedge_[k] = true;
            }
            if (allowedge_[k]) {
              if (label_[inblossom_[w]] == 0) {
                assign_label(w, 2, p ^ 1);
              } else if (label_[inblossom_[w]] == 1) {
                const int base = scan_blossom(v, w);
                if (base >= 0) {
                  add_blossom(base, k);
                } else {
                  augment_matching(k);
                  augmented = true;
                  break;
                }
              } else if (label_[w] == 0) {
                assert(label_[inblossom_[w]] == 2);
                label_[w] = 2;
                labelend_[w] = p ^ 1;
              }
            } else if (label_[inblossom_[w]] == 1) {
              const int b = inblossom_[v];
              if (bestedge_[b] < 0 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
            } else if (label_[w] == 0) {
              if (bestedge_[w] < 0 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
            }
          }
        }
        if (augmented) break;

        // Choose the smallest dual adjustment that makes progress.
        int deltatype = 1;
        int deltaedge = -1, deltablossom = -1;
        double delta = 0.0;
        {
          double mind = dualvar_[0];
          for (int v = 1; v < nv_; ++v) mind = std::min(mind, dualvar_[v]);
          delta = std::max(0.0, mind);
        }
        for (int v = 0; v < nv_; ++v) {
          if (label_[inblossom_[v]] == 0 && bestedge_[v] >= 0) {
            const double d = slack(bestedge_[v]);
            if (d < delta) {
              delta = d;
              deltatype = 2;
              deltaedge = bestedge_[v];
            }
          }
        }
        for (int b = 0; b < 2 * nv_; ++b) {
          if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] >= 0) {
            const double d = slack(bestedge_[b]) / 2.0;
            if (d < delta) {
              delta = d;
              deltatype = 3;
              deltaedge = bestedge_[b];
            }
          }
        }
        for (int b = nv_; b < 2 * nv_; ++b) {
          if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
              dualvar_[b] < delta) {
            delta = dualvar_[b];
            deltatype = 4;
            deltablossom = b;
          }
        }
        delta = std::max(delta, 0.0);

        for (int v = 0; v < nv_; ++v) {
          const int lbl = label_[inblossom_[v]];
          if (lbl == 1) dualvar_[v] -= delta;
          else if (lbl == 2) dualvar_[v] += delta;
        }
        for (int b = nv_; b < 2 * nv_; ++b) {
          if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
            if (label_[b] == 1) dualvar_[b] += delta;
            else if (label_[b] == 2) dualvar_[b] -= delta;
          }
        }

        if (deltatype == 1) {
          break;  // no more useful slack anywhere: optimum reached
        } else if (deltatype == 2) {
          allowedge_[deltaedge] = true;
          int i = edges_[deltaedge].u;
          if (label_[inblossom_[i]] == 0) i = edges_[deltaedge].v;
          assert(label_[inblossom_[i]] == 1);
          queue_.push_back(i);
        } else if (deltatype == 3) {
          allowedge_[deltaedge] = true;
          const int i = edges_[deltaedge].u;
          assert(label_[inblossom_[i]] == 1);
          queue_.push_back(i);
        } else {
          expand_blossom(deltablossom, false);
        }
      }

      if (!augmented) break;

      for (int b = nv_; b < 2 * nv_; ++b)
        if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 &&
            dualvar_[b] <= eps_)
          expand_blossom(b, true);
    }

    std::vector<int> result(nv_, -1);
    for (int v = 0; v < nv_; ++v)
      if (mate_[v] >= 0) result[v] = endpoint_[mate_[v]];
    return result;
  }

 private:
  double slack(int k) const {
    return dualvar_[edges_[k].u] + dualvar_[edges_[k].v] - 2.0 * edges_[k].w;
  }

  void blossom_leaves(int b, std::vector<int>& out) const {
    if (b < nv_) {
      out.push_back(b);
    } else {
      for (int t : blossomchilds_[b]) blossom_leaves(t, out);
    }
  }

  void assign_label(int w, int t, int p) {
    const int b = inblossom_[w];
    assert(label_[w] == 0 && label_[b] == 0);
    label_[w] = label_[b] = t;
    labelend_[w] = labelend_[b] = p;
    bestedge_[w] = bestedge_[b] = -1;
    if (t == 1) {
      std::vector<int> leaves;
      blossom_leaves(b, leaves);
      for (int leaf : leaves) queue_.push_back(leaf);
    } else {
      const int base = blossombase_[b];
      assert(mate_[base] >= 0);
      assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
    }
  }

  // Trace back from both ends of the edge; returns the common ancestor base
  // vertex, or -1 if the paths reach different trees (an augmenting path).
  int scan_blossom(int v, int w) {
    std::vector<int> path;
    int base = -1;
    while (v != -1 || w != -1) {
      int b = inblossom_[v];
      if (label_[b] & 4) {
        base = blossombase_[b];
        break;
      }
      assert(label_[b] == 1);
      path.push_back(b);
      label_[b] = 5;
      assert(labelend_[b] == mate_[blossombase_[b]]);
      if (labelend_[b] == -1) {
        v = -1;
      } else {
        v = endpoint_[labelend_[b]];
        b = inblossom_[v];
        assert(label_[b] == 2);
        assert(labelend_[b] >= 0);
        v = endpoint_[labelend_[b]];
      }
      if (w != -1) std::swap(v, w);
    }
    for (int b : path) label_[b] = 1;
    return base;
  }

  void add_blossom(int base, int k) {
    int v = edges_[k].u;
    int w = edges_[k].v;
    const int bb = inblossom_[base];
    int bv = inblossom_[v];
    int bw = inblossom_[w];
    const int b = unusedblossoms_.back();
    unusedblossoms_.pop_back();
    blossombase_[b] = base;
    blossomparent_[b] = -1;
    blossomparent_[bb] = b;

    std::vector<int> path;
    std::vector<int> endps;
    while (bv != bb) {
      blossomparent_[bv] = b;
      path.push_back(bv);
      endps.push_back(labelend_[bv]);
      assert(label_[bv] == 2 || (label_[bv] == 1 && labelend_[bv] == mate_[blossombase_[bv]]));
      assert(labelend_[bv] >= 0);
      v = endpoint_[labelend_[bv]];
      bv = inblossom_[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
      blossomparent_[bw] = b;
      path.push_back(bw);
      endps.push_back(labelend_[bw] ^ 1);
      assert(label_[bw] == 2 || (label_[bw] == 1 && labelend_[bw] == mate_[blossombase_[bw]]));
      assert(labelend_[bw] >= 0);
      w = endpoint_[labelend_[bw]];
      bw = inblossom_[w];
    }

    assert(label_[bb] == 1);
    label_[b] = 1;
    labelend_[b] = labelend_[bb];
    dualvar_[b] = 0.0;
    blossomchilds_[b] = path;
    blossomendps_[b] = endps;

    std::vector<int> leaves;
    blossom_leaves(b, leaves);
    for (int leaf : leaves) {
      if (label_[inblossom_[leaf]] == 2) queue_.push_back(leaf);
      inblossom_[leaf] = b;
    }

    // Recompute the least-slack edge to every neighbouring S-blossom.
    std::vector<int> bestedgeto(2 * nv_, -1);
    for (int bv2 : path) {
      std::vector<int> edge_candidates;
      if (!has_best_list_[bv2]) {
        std::vector<int> lv;
        blossom_leaves(bv2, lv);
        for (int leaf : lv)
          for (int p : neighbend_[leaf]) edge_candidates.push_back(p / 2);
      } else {
        edge_candidates = blossombestedges_[bv2];
      }
      for (int k2 : edge_candidates) {
        int i = edges_[k2].u;
        int j = edges_[k2].v;
        if (inblossom_[j] == b) std::swap(i, j);
        const int bj = inblossom_[j];
        if (bj != b && label_[bj] == 1 &&
            (bestedgeto[bj] == -1 || slack(k2) < slack(bestedgeto[bj])))
          bestedgeto[bj] = k2;
      }
      blossombestedges_[bv2].clear();
      has_best_list_[bv2] = false;
      bestedge_[bv2] = -1;
    }
    blossombestedges_[b].clear();
    for (int k2 : bestedgeto)
      if (k2 != -1) blossombestedges_[b].push_back(k2);
    has_best_list_[b] = true;
    bestedge_[b] = -1;
    for (int k2 : blossombestedges_[b])
      if (bestedge_[b] == -1 || slack(k2) < slack(bestedge_[b])) bestedge_[b] = k2;
  }

  void expand_blossom(int b, bool endstage) {
    for (int s : blossomchilds_[b]) {
      blossomparent_[s] = -1;
      if (s < nv_) {
        inblossom_[s] = s;
      } else if (endstage && dualvar_[s] <= eps_) {
        expand_blossom(s, endstage);
      } else {
        std::vector<int> lv;
        blossom_leaves(s, lv);
        for (int leaf : lv) inblossom_[leaf] = s;
      }
    }
    if (!endstage && label_[b] == 2) {
      // Relabel the path through the expanded T-blossom.
      assert(labelend_[b] >= 0);
      const int entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
      int j = 0;
      for (std::size_t idx = 0; idx < blossomchilds_[b].size(); ++idx)
        if (blossomchilds_[b][idx] == entrychild) j = static_cast<int>(idx);
      int jstep, endptrick;
      const int nchild = static_cast<int>(blossomchilds_[b].size());
      if (j & 1) {
        j -= nchild;
        jstep = 1;
        endptrick = 0;
      } else {
        jstep = -1;
        endptrick = 1;
      }
      int p = labelend_[b];
      auto child = [&](int rel) { return blossomchilds_[b][static_cast<std::size_t>(rel < 0 ? rel + nchild : rel)]; };
      auto endp = [&](int rel) { return blossomendps_[b][static_cast<std::size_t>(rel < 0 ? rel + nchild : rel)]; };
      while (j != 0) {
        label_[endpoint_[p ^ 1]] = 0;
        label_[endpoint_[endp(j - endptrick) ^ endptrick ^ 1]] = 0;
        assign_label(endpoint_[p ^ 1], 2, p);
        allowedge_[endp(j - endptrick) / 2] = true;
        j += jstep;
        p = endp(j - endptrick) ^ endptrick;
        allowedge_[p / 2] = true;
        j += jstep;
      }
      {
        const int bv = child(j);
        label_[endpoint_[p ^ 1]] = 2;
        label_[bv] = 2;
        labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
        bestedge_[bv] = -1;
      }
      j += jstep;
      while (child(j) != entrychild) {
        const int bv = child(j);
        if (label_[bv] == 1) {
          j += jstep;
          continue;
        }
        std::vector<int> lv;
        blossom_leaves(bv, lv);
        int labeled = -1;
        for (int leaf : lv)
          if (label_[leaf] != 0) {
            labeled = leaf;
            break;
          }
        if (labeled >= 0) {
          assert(label_[labeled] == 2);
          assert(inblossom_[labeled] == bv);
          label_[labeled] = 0;
          label_[endpoint_[mate_[blossombase_[bv]]]] = 0;
          assign_label(labeled, 2, labelend_[labeled]);
        }
        j += jstep;
      }
    }
    label_[b] = -1;
    labelend_[b] = -1;
    blossomchilds_[b].clear();
    blossomendps_[b].clear();
    blossombase_[b] = -1;
    blossombestedges_[b].clear();
    has_best_list_[b] = false;
    bestedge_[b] = -1;
    unusedblossoms_.push_back(b);
  }

  // Swap matched/unmatched edges over the alternating path through blossom b
  // between its base and vertex v.
  void augment_blossom(int b, int v) {
    int t = v;
    while (blossomparent_[t] != b) t = blossomparent_[t];
    if (t >= nv_) augment_blossom(t, v);
    const int nchild = static_cast<int>(blossomchilds_[b].size());
    int i = 0;
    for (std::size_t idx = 0; idx < blossomchilds_[b].size(); ++idx)
      if (blossomchilds_[b][idx] == t) i = static_cast<int>(idx);
    int j = i;
    int jstep, endptrick;
    if (i & 1) {
      j -= nchild;
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    auto child = [&](int rel) { return blossomchilds_[b][static_cast<std::size_t>(rel < 0 ? rel + nchild : rel)]; };
    auto endp = [&](int rel) { return blossomendps_[b][static_cast<std::size_t>(rel < 0 ? rel + nchild : rel)]; };
    while (j != 0) {
      j += jstep;
      t = child(j);
      const int p = endp(j - endptrick) ^ endptrick;
      if (t >= nv_) augment_blossom(t, endpoint_[p]);
      j += jstep;
      t = child(j);
      if (t >= nv_) augment_blossom(t, endpoint_[p ^ 1]);
      mate_[endpoint_[p]] = p ^ 1;
      mate_[endpoint_[p ^ 1]] = p;
    }
    std::rotate(blossomchilds_[b].begin(), blossomchilds_[b].begin() + i, blossomchilds_[b].end());
    std::rotate(blossomendps_[b].begin(), blossomendps_[b].begin() + i, blossomendps_[b].end());
    blossombase_[b] = blossombase_[blossomchilds_[b][0]];
    assert(blossombase_[b] == v);
  }

  void augment_matching(int k) {
    const int v = edges_[k].u;
    const int w = edges_[k].v;
    const std::pair<int, int> starts[2] = {{v, 2 * k + 1}, {w, 2 * k}};
    for (auto [s0, p0] : starts) {
      int s = s0;
      int p = p0;
      while (true) {
        const int bs = inblossom_[s];
        assert(label_[bs] == 1);
        assert(labelend_[bs] == mate_[blossombase_[bs]]);
        if (bs >= nv_) augment_blossom(bs, s);
        mate_[s] = p;
        if (labelend_[bs] == -1) break;  // reached a single vertex
        const int t = endpoint_[labelend_[bs]];
        const int bt = inblossom_[t];
        assert(label_[bt] == 2);
        assert(labelend_[bt] >= 0);
        s = endpoint_[labelend_[bt]];
        const int j = endpoint_[labelend_[bt] ^ 1];
        assert(blossombase_[bt] == t);
        if (bt >= nv_) augment_blossom(bt, j);
        mate_[j] = labelend_[bt];
        p = labelend_[bt] ^ 1;
      }
    }
  }

  int nv_ = 0;
  int ne_ = 0;
  double max_weight_ = 0.0;
  double eps_ = 1e-12;
  std::vector<Edge> edges_;
  std::vector<int> endpoint_;
  std::vector<std::vector<int>> neighbend_;
  std::vector<int> mate_;
  std::vector<int> label_;
  std::vector<int> labelend_;
  std::vector<int> inblossom_;
  std::vector<int> blossomparent_;
  std::vector<std::vector<int>> blossomchilds_;
  std::vector<int> blossombase_;
  std::vector<std::vector<int>> blossomendps_;
  std::vector<int> bestedge_;
  std::vector<std::vector<int>> blossombestedges_;
  std::vector<char> has_best_list_;
  std::vector<int> unusedblossoms_;
  std::vector<double> dualvar_;
  std::vector<char> allowedge_;
  std::vector<int> queue_;
};

inline std::vector<EdgeKey> blossom_matching_keys(NodeId n, const std::vector<Edge>& edges) {
  BlossomMatcher matcher(static_cast<int>(n), edges);
  const std::vector<int> mate = matcher.solve();
  std::vector<EdgeKey> keys;
  for (int v = 0; v < static_cast<int>(mate.size()); ++v)
    if (mate[v] > v) keys.push_back(make_edge_key(v, mate[v]));
  return keys;
}

}  // namespace detail

// Maximum-weight matching (Eq.-style pure weight maximization). Non-positive
// edges never appear in the result; among maximum-weight matchings the
// lexicographically smallest edge-index set is returned, realized by a
// greedy force-and-resolve pass over ascending edge indices.
inline MatchingSolution max_weight_matching(const WeightedGraph& g) {
  std::vector<Edge> pos;
  for (const Edge& e : g.edges())
    if (e.w > 0.0) pos.push_back(e);
  if (pos.empty()) return {Matching(), 0.0};

  const NodeId n = g.node_count();
  double pos_sum = 0.0;
  for (const Edge& e : pos) pos_sum += e.w;
  const double eq_tol = 1e-9 * std::max(1.0, pos_sum);

  auto weight_of_keys = [&](const std::vector<EdgeKey>& keys) {
    double s = 0.0;
    for (EdgeKey k : keys) s += g.weight(k);
    return s;
  };

  std::vector<EdgeKey> incumbent = detail::blossom_matching_keys(n, pos);
  std::sort(incumbent.begin(), incumbent.end());
  const double best_weight = weight_of_keys(incumbent);

  std::vector<EdgeKey> forced;
  std::vector<char> node_used(static_cast<std::size_t>(n), 0);
  double forced_weight = 0.0;
  for (const Edge& e : pos) {
    if (node_used[static_cast<std::size_t>(e.u)] || node_used[static_cast<std::size_t>(e.v)]) continue;
    const EdgeKey key = e.key();
    bool take = std::binary_search(incumbent.begin(), incumbent.end(), key);
    if (!take) {
      // Try forcing this edge: drop its endpoints and re-solve the rest.
      std::vector<Edge> rest;
      for (const Edge& r : pos) {
        if (r.u == e.u || r.u == e.v || r.v == e.u || r.v == e.v) continue;
        if (node_used[static_cast<std::size_t>(r.u)] || node_used[static_cast<std::size_t>(r.v)]) continue;
        rest.push_back(r);
      }
      std::vector<EdgeKey> rest_keys = detail::blossom_matching_keys(n, rest);
      const double forced_total = forced_weight + e.w + weight_of_keys(rest_keys);
      if (forced_total >= best_weight - eq_tol) {
        take = true;
        incumbent = forced;
        incumbent.push_back(key);
        incumbent.insert(incumbent.end(), rest_keys.begin(), rest_keys.end());
        std::sort(incumbent.begin(), incumbent.end());
      }
    }
    if (take) {
      forced.push_back(key);
      forced_weight += e.w;
      node_used[static_cast<std::size_t>(e.u)] = 1;
      node_used[static_cast<std::size_t>(e.v)] = 1;
    }
  }

  Matching m = Matching::from_edges(std::move(forced));
  return {m, matching_weight(m, g)};
}

// All edge subsets that are valid matchings, including the empty one.
// Intended as a brute-force oracle; refuses large graphs.
inline std::vector<Matching> enumerate_matchings(const WeightedGraph& g, std::size_t max_edges = 24) {
  if (g.edge_count() > max_edges)
    throw std::invalid_argument("enumerate_matchings: edge count " + std::to_string(g.edge_count()) +
                                " exceeds cap " + std::to_string(max_edges));
  std::vector<Matching> out;
  std::vector<EdgeKey> current;
  std::vector<char> used(static_cast<std::size_t>(g.node_count()), 0);
  const auto& edges = g.edges();

  auto recurse = [&](auto&& self, std::size_t i) -> void {
    if (i == edges.size()) {
      out.push_back(Matching::from_edges(current));
      return;
    }
    self(self, i + 1);
    const Edge& e = edges[i];
    if (!used[static_cast<std::size_t>(e.u)] && !used[static_cast<std::size_t>(e.v)]) {
      used[static_cast<std::size_t>(e.u)] = used[static_cast<std::size_t>(e.v)] = 1;
      current.push_back(e.key());
      self(self, i + 1);
      current.pop_back();
      used[static_cast<std::size_t>(e.u)] = used[static_cast<std::size_t>(e.v)] = 0;
    }
  };
  recurse(recurse, 0);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace matchdecomp
