#pragma once

// Undirected simple graphs on nodes 0..p-1, structural predicates, Prufer
// coding, exhaustive tree/forest enumeration, and the Erdos-Gallai test.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <queue>
#include <vector>

#include "treegm/common.hpp"

namespace treegm {

// Union of components with path compression; shared by Kruskal and the
// acyclicity checks.
class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Returns false if x and y were already joined.
  bool unite(int x, int y) {
    int rx = find(x), ry = find(y);
    if (rx == ry) return false;
    parent_[rx] = ry;
    return true;
  }

 private:
  std::vector<int> parent_;
};

class LabeledGraph {
 public:
  LabeledGraph() : p_(0) {}
  explicit LabeledGraph(int p) : p_(p) {
    if (p < 1) throw validation_error("LabeledGraph: node count must be positive");
  }
  LabeledGraph(int p, std::vector<std::pair<int, int>> edges) : LabeledGraph(p) {
    for (auto [u, v] : edges) add_edge(u, v);
  }

  int p() const { return p_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  void add_edge(int u, int v) {
    check_pair(u, v);
    auto e = canon(u, v);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
    if (it != edges_.end() && *it == e) throw validation_error("add_edge: duplicate edge");
    edges_.insert(it, e);
  }

  void remove_edge(int u, int v) {
    auto e = canon(u, v);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
    if (it == edges_.end() || *it != e) throw validation_error("remove_edge: no such edge");
    edges_.erase(it);
  }

  bool has_edge(int u, int v) const {
    if (u == v) return false;
    auto e = canon(u, v);
    return std::binary_search(edges_.begin(), edges_.end(), e);
  }

  // Edges in canonical (u < v) lexicographic order.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  std::vector<int> degrees() const {
    std::vector<int> d(p_, 0);
    for (auto [u, v] : edges_) {
      ++d[u];
      ++d[v];
    }
    return d;
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(p_);
    for (auto [u, v] : edges_) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
  }

  BitPattern bits() const {
    BitPattern b(p_);
    for (auto [u, v] : edges_) b.set(pair_index(u, v));
    return b;
  }

  static LabeledGraph from_bits(int p, const BitPattern& b) {
    LabeledGraph g(p);
    for (int i = 1; i < p; ++i)
      for (int j = 0; j < i; ++j)
        if (b.test(pair_index(i, j))) g.edges_.emplace_back(j, i);
    std::sort(g.edges_.begin(), g.edges_.end());
    return g;
  }

  bool operator==(const LabeledGraph& o) const { return p_ == o.p_ && edges_ == o.edges_; }
  bool operator!=(const LabeledGraph& o) const { return !(*this == o); }

 private:
  void check_pair(int u, int v) const {
    if (u == v) throw validation_error("edge endpoints must differ");
    if (u < 0 || v < 0 || u >= p_ || v >= p_) throw validation_error("edge endpoint out of range");
  }
  static std::pair<int, int> canon(int u, int v) { return {std::min(u, v), std::max(u, v)}; }

  int p_;
  std::vector<std::pair<int, int>> edges_;  // sorted, u < v
};

inline LabeledGraph complete_graph(int p) {
  LabeledGraph g(p);
  for (int v = 1; v < p; ++v)
    for (int u = 0; u < v; ++u) g.add_edge(u, v);
  return g;
}

inline LabeledGraph star_graph(int p, int center = 0) {
  LabeledGraph g(p);
  for (int v = 0; v < p; ++v)
    if (v != center) g.add_edge(center, v);
  return g;
}

inline LabeledGraph chain_graph(int p) {
  LabeledGraph g(p);
  for (int v = 0; v + 1 < p; ++v) g.add_edge(v, v + 1);
  return g;
}

inline bool is_forest(const LabeledGraph& g) {
  DisjointSets ds(g.p());
  for (auto [u, v] : g.edges())
    if (!ds.unite(u, v)) return false;  // edge inside a component closes a cycle
  return true;
}

inline bool is_tree(const LabeledGraph& g) {
  return g.edge_count() == g.p() - 1 && is_forest(g);
}

inline int component_count(const LabeledGraph& g) {
  DisjointSets ds(g.p());
  int c = g.p();
  for (auto [u, v] : g.edges())
    if (ds.unite(u, v)) --c;
  return c;
}

inline bool is_connected(const LabeledGraph& g) { return component_count(g) == 1; }

// Component label per node, labels 0..k-1 in order of smallest member.
inline std::vector<int> component_labels(const LabeledGraph& g) {
  DisjointSets ds(g.p());
  for (auto [u, v] : g.edges()) ds.unite(u, v);
  std::vector<int> label(g.p(), -1);
  int next = 0;
  for (int v = 0; v < g.p(); ++v) {
    int r = ds.find(v);
    if (label[r] < 0) label[r] = next++;
    label[v] = label[r];
  }
  return label;
}

using PruferSequence = std::vector<int>;

inline LabeledGraph prufer_decode(const PruferSequence& seq, int p) {
  if (p < 2) throw validation_error("prufer_decode: need p >= 2");
  if (static_cast<int>(seq.size()) != p - 2) throw validation_error("prufer_decode: sequence length must be p-2");
  for (int s : seq)
    if (s < 0 || s >= p) throw validation_error("prufer_decode: label out of range");

  std::vector<int> degree(p, 1);
  for (int s : seq) ++degree[s];

  LabeledGraph t(p);
  std::priority_queue<int, std::vector<int>, std::greater<int>> leaves;
  for (int v = 0; v < p; ++v)
    if (degree[v] == 1) leaves.push(v);

  for (int s : seq) {
    int leaf = leaves.top();
    leaves.pop();
    t.add_edge(leaf, s);
    if (--degree[s] == 1) leaves.push(s);
    --degree[leaf];
  }
  int a = leaves.top();
  leaves.pop();
  int b = leaves.top();
  t.add_edge(a, b);
  return t;
}

inline PruferSequence prufer_encode(const LabeledGraph& t) {
  if (t.p() < 2 || !is_tree(t)) throw validation_error("prufer_encode: input is not a tree on p >= 2 nodes");
  int p = t.p();
  auto adj = t.adjacency();
  std::vector<int> degree(p);
  for (int v = 0; v < p; ++v) degree[v] = static_cast<int>(adj[v].size());
  std::vector<char> removed(p, 0);

  std::priority_queue<int, std::vector<int>, std::greater<int>> leaves;
  for (int v = 0; v < p; ++v)
    if (degree[v] == 1) leaves.push(v);

  PruferSequence seq;
  seq.reserve(p - 2);
  for (int step = 0; step < p - 2; ++step) {
    int leaf = leaves.top();
    leaves.pop();
    removed[leaf] = 1;
    for (int nbr : adj[leaf]) {
      if (removed[nbr]) continue;
      seq.push_back(nbr);
      if (--degree[nbr] == 1) leaves.push(nbr);
      break;
    }
  }
  return seq;
}

// Visits all p^(p-2) labeled trees by decoding every Prufer sequence.
template <class Fn>
void for_each_tree(int p, Fn&& fn) {
  if (p < 2 || p > 8) throw validation_error("for_each_tree: p must be in [2, 8]");
  if (p == 2) {
    fn(prufer_decode({}, 2));
    return;
  }
  PruferSequence seq(p - 2, 0);
  while (true) {
    fn(prufer_decode(seq, p));
    int i = p - 3;
    while (i >= 0 && seq[i] == p - 1) seq[i--] = 0;
    if (i < 0) break;
    ++seq[i];
  }
}

inline std::vector<LabeledGraph> enumerate_trees(int p) {
  std::vector<LabeledGraph> out;
  for_each_tree(p, [&](const LabeledGraph& t) { out.push_back(t); });
  return out;
}

// Visits every acyclic edge subset of the complete graph exactly once.
template <class Fn>
void for_each_forest(int p, Fn&& fn) {
  if (p < 1 || p > 6) throw validation_error("for_each_forest: p must be in [1, 6]");
  int m = pair_count(p);
  std::vector<std::pair<int, int>> pairs;
  for (int v = 1; v < p; ++v)
    for (int u = 0; u < v; ++u) pairs.emplace_back(u, v);
  for (uint32_t mask = 0; mask < (uint32_t{1} << m); ++mask) {
    DisjointSets ds(p);
    LabeledGraph g(p);
    bool acyclic = true;
    for (int i = 0; i < m && acyclic; ++i) {
      if (!(mask >> i & 1)) continue;
      if (!ds.unite(pairs[i].first, pairs[i].second))
        acyclic = false;
      else
        g.add_edge(pairs[i].first, pairs[i].second);
    }
    if (acyclic) fn(g);
  }
}

inline std::vector<LabeledGraph> enumerate_forests(int p) {
  std::vector<LabeledGraph> out;
  for_each_forest(p, [&](const LabeledGraph& g) { out.push_back(g); });
  return out;
}

// Degree sequence realizability. Input must be non-increasing.
inline bool erdos_gallai_check(const std::vector<int>& degrees) {
  int n = static_cast<int>(degrees.size());
  long long sum = 0;
  for (int i = 0; i < n; ++i) {
    if (degrees[i] < 0) throw validation_error("erdos_gallai_check: negative degree");
    if (i > 0 && degrees[i] > degrees[i - 1]) throw validation_error("erdos_gallai_check: input must be non-increasing");
    sum += degrees[i];
  }
  if (sum % 2 != 0) return false;
  for (int k = 1; k <= n; ++k) {
    long long lhs = 0;
    for (int i = 0; i < k; ++i) lhs += degrees[i];
    long long rhs = static_cast<long long>(k) * (k - 1);
    for (int i = k; i < n; ++i) rhs += std::min(k, degrees[i]);
    if (lhs > rhs) return false;
  }
  return true;
}

}  // namespace treegm
