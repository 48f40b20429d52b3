#pragma once

// Maximum-weight spanning structures: Kruskal for trees, the drop-negative
// variant for forests, Gaussian mutual-information edge weights, and MAP
// structure selection under factored priors.

#include "treegm/priors.hpp"

namespace treegm {

struct WeightedEdge {
  int u, v;
  double weight;
};

struct WeightedEdgeList {
  int p = 0;
  std::vector<WeightedEdge> items;

  // one entry per unordered pair, all pairs present
  void validate_complete() const {
    if (p < 1) throw validation_error("WeightedEdgeList: node count must be positive");
    if (static_cast<int>(items.size()) != pair_count(p))
      throw validation_error("WeightedEdgeList: need a weight for every node pair");
    std::vector<char> seen(pair_count(p), 0);
    for (const auto& e : items) {
      int idx = pair_index(e.u, e.v);
      if (seen[idx]) throw validation_error("WeightedEdgeList: duplicate pair");
      seen[idx] = 1;
    }
  }

  static WeightedEdgeList from_matrix(const EdgeLogWeights& w) {
    WeightedEdgeList out;
    out.p = w.p();
    for (int v = 1; v < out.p; ++v)
      for (int u = 0; u < v; ++u) out.items.push_back({u, v, w.w(u, v)});
    return out;
  }
};

namespace detail {

// Heaviest edges first; equal weights fall back to lexicographic (u, v) so
// selection is deterministic.
inline std::vector<WeightedEdge> sorted_for_kruskal(const WeightedEdgeList& w) {
  std::vector<WeightedEdge> edges;
  edges.reserve(w.items.size());
  for (const auto& e : w.items) {
    WeightedEdge c = e;
    if (c.u > c.v) std::swap(c.u, c.v);
    edges.push_back(c);
  }
  std::sort(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return std::make_pair(a.u, a.v) < std::make_pair(b.u, b.v);
  });
  return edges;
}

}  // namespace detail

inline LabeledGraph kruskal_max_tree(const WeightedEdgeList& w) {
  w.validate_complete();
  LabeledGraph tree(w.p);
  DisjointSets ds(w.p);
  for (const auto& e : detail::sorted_for_kruskal(w)) {
    if (ds.unite(e.u, e.v)) tree.add_edge(e.u, e.v);
    if (tree.edge_count() == w.p - 1) break;
  }
  return tree;
}

// Kruskal over the strictly-positive-weight edges only: the result is the
// maximum-total-weight forest.
inline LabeledGraph kruskal_max_forest(const WeightedEdgeList& w) {
  w.validate_complete();
  LabeledGraph forest(w.p);
  DisjointSets ds(w.p);
  for (const auto& e : detail::sorted_for_kruskal(w)) {
    if (e.weight <= 0.0) break;  // sorted, so the rest are non-positive too
    if (ds.unite(e.u, e.v)) forest.add_edge(e.u, e.v);
  }
  return forest;
}

// Pairwise Gaussian mutual information -1/2 log(1 - rho^2) from centered
// data. rho^2 is clamped just below 1 so collinear columns stay finite.
inline WeightedEdgeList chow_liu_gaussian_weights(const Eigen::MatrixXd& x) {
  int n = static_cast<int>(x.rows());
  int p = static_cast<int>(x.cols());
  if (n < 2) throw validation_error("chow_liu_gaussian_weights: need at least two observations");
  Eigen::MatrixXd s = x.transpose() * x;
  for (int j = 0; j < p; ++j)
    if (!(s(j, j) > 0.0)) throw validation_error("chow_liu_gaussian_weights: zero-variance column " + std::to_string(j));

  WeightedEdgeList out;
  out.p = p;
  for (int v = 1; v < p; ++v)
    for (int u = 0; u < v; ++u) {
      double rho2 = s(u, v) * s(u, v) / (s(u, u) * s(v, v));
      rho2 = std::min(rho2, 1.0 - 1e-12);
      out.items.push_back({u, v, -0.5 * std::log1p(-rho2)});
    }
  return out;
}

namespace detail {

inline WeightedEdgeList posterior_edge_weights(const HiwParams& params, const SuffStats& stats,
                                               const GraphPrior& prior) {
  auto pw = prior.is_factored();
  if (!pw) throw validation_error("map selection: prior must factor over edges");
  HiwModel model(params, stats);
  auto lw = model.edge_log_weight_matrix();
  if (pw->p() != lw.p()) throw validation_error("map selection: prior dimension mismatch");
  WeightedEdgeList out;
  out.p = lw.p();
  for (int v = 1; v < out.p; ++v)
    for (int u = 0; u < v; ++u) out.items.push_back({u, v, lw.w(u, v) + pw->w(u, v)});
  return out;
}

}  // namespace detail

// Highest-posterior forest: likelihood edge gains plus prior edge weights,
// keeping only strictly positive combined weights.
inline LabeledGraph map_forest(const HiwParams& params, const SuffStats& stats, const GraphPrior& prior) {
  return kruskal_max_forest(detail::posterior_edge_weights(params, stats, prior));
}

// Highest-posterior spanning tree: same weights, all p-1 edges kept.
inline LabeledGraph map_tree(const HiwParams& params, const SuffStats& stats, const GraphPrior& prior) {
  return kruskal_max_tree(detail::posterior_edge_weights(params, stats, prior));
}

}  // namespace treegm
