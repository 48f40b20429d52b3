#pragma once

// Factored distributions over spanning trees, P(T) proportional to the
// product of edge weights. The weighted matrix-tree theorem gives the
// normalizing constant as a Laplacian minor determinant; its inverse gives
// every edge inclusion probability; a weighted loop-erased random walk gives
// exact samples.

#include "treegm/hiw.hpp"

namespace treegm {

// log weight at or below this means the edge is forbidden
constexpr double kForbiddenLogWeight = -1e300;

class FactoredTreeDist {
 public:
  explicit FactoredTreeDist(EdgeLogWeights lw) : lw_(std::move(lw)) {
    if (lw_.p() < 2) throw validation_error("FactoredTreeDist: need at least two nodes");
    for (int v = 1; v < lw_.p(); ++v)
      for (int u = 0; u < v; ++u) {
        double w = lw_.w(u, v);
        if (std::isnan(w) || w == std::numeric_limits<double>::infinity())
          throw validation_error("FactoredTreeDist: log weights must be finite or the forbidden sentinel");
      }
  }

  int p() const { return lw_.p(); }
  double log_weight(int u, int v) const { return lw_.w(u, v); }
  bool allowed(int u, int v) const { return lw_.w(u, v) > kForbiddenLogWeight / 2; }

  const EdgeLogWeights& weights() const { return lw_; }

 private:
  EdgeLogWeights lw_;
};

struct TreePosteriorSummary {
  double log_z;
  SymMatrix edge_prob;                  // inclusion probability per pair
  std::vector<double> expected_degree;  // row sums of edge_prob
};

namespace detail {

// Laplacian of exp(lw - m) with row/column 0 removed. Factoring out the
// largest weight keeps everything in double range.
struct ScaledMinor {
  double m;
  Eigen::MatrixXd w;  // exp(lw - m), zero diagonal
  Eigen::MatrixXd q;  // (p-1) x (p-1) minor
};

inline ScaledMinor scaled_laplacian_minor(const FactoredTreeDist& d) {
  int p = d.p();
  double m = -std::numeric_limits<double>::infinity();
  for (int v = 1; v < p; ++v)
    for (int u = 0; u < v; ++u) m = std::max(m, d.log_weight(u, v));
  if (!(m > kForbiddenLogWeight / 2)) throw numeric_error("tree distribution: every edge is forbidden");

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
  for (int v = 1; v < p; ++v)
    for (int u = 0; u < v; ++u)
      if (d.allowed(u, v)) w(u, v) = w(v, u) = std::exp(d.log_weight(u, v) - m);

  Eigen::MatrixXd lap = Eigen::MatrixXd(w.colwise().sum().asDiagonal()) - w;
  return {m, std::move(w), lap.bottomRightCorner(p - 1, p - 1)};
}

}  // namespace detail

// log of the sum over all spanning trees of the product of edge weights
inline double log_partition(const FactoredTreeDist& d) {
  auto minor = detail::scaled_laplacian_minor(d);
  try {
    return cholesky_logdet(minor.q).logdet + (d.p() - 1) * minor.m;
  } catch (const numeric_error&) {
    throw numeric_error("log_partition: singular Laplacian minor (edge support is disconnected)");
  }
}

// Every edge's inclusion probability from the minor inverse: differentiating
// log Z with respect to one log weight isolates the trees containing that edge.
inline TreePosteriorSummary edge_probabilities(const FactoredTreeDist& d) {
  int p = d.p();
  auto minor = detail::scaled_laplacian_minor(d);
  Eigen::MatrixXd b;
  double logdet;
  try {
    auto chol = cholesky_logdet(minor.q);
    logdet = chol.logdet;
    b = inverse_from_cholesky(chol.factor);
  } catch (const numeric_error&) {
    throw numeric_error("edge_probabilities: singular Laplacian minor (edge support is disconnected)");
  }

  TreePosteriorSummary out;
  out.log_z = logdet + (p - 1) * minor.m;
  out.edge_prob = SymMatrix(p);
  for (int v = 1; v < p; ++v)
    for (int u = 0; u < v; ++u) {
      // node 0's row/column were deleted, so its terms drop out
      double factor = u == 0 ? b(v - 1, v - 1) : b(u - 1, u - 1) + b(v - 1, v - 1) - 2.0 * b(u - 1, v - 1);
      double prob = minor.w(u, v) * factor;
      out.edge_prob.set(u, v, std::min(1.0, std::max(0.0, prob)));
    }
  out.expected_degree.assign(p, 0.0);
  for (int v = 1; v < p; ++v)
    for (int u = 0; u < v; ++u) {
      out.expected_degree[u] += out.edge_prob(u, v);
      out.expected_degree[v] += out.edge_prob(u, v);
    }
  return out;
}

// ETP = sum of inclusion probabilities over the true edges; ETPR divides by
// the number of true edges.
inline std::pair<double, double> expected_true_positives(const TreePosteriorSummary& s, const LabeledGraph& truth) {
  if (truth.p() != s.edge_prob.dim()) throw validation_error("expected_true_positives: dimension mismatch");
  if (truth.edge_count() == 0) throw validation_error("expected_true_positives: truth has no edges, rate undefined");
  double etp = 0.0;
  for (auto [u, v] : truth.edges()) etp += s.edge_prob(u, v);
  return {etp, etp / truth.edge_count()};
}

// Exact draw via a loop-erased random walk rooted at node 0, stepping with
// probability proportional to edge weight.
inline LabeledGraph sample_tree(const FactoredTreeDist& d, uint64_t seed) {
  int p = d.p();
  DisjointSets ds(p);
  int components = p;
  for (int v = 1; v < p; ++v)
    for (int u = 0; u < v; ++u)
      if (d.allowed(u, v) && ds.unite(u, v)) --components;
  if (components != 1) throw numeric_error("sample_tree: edge support is disconnected");

  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto step = [&](int u) {
    double rowmax = -std::numeric_limits<double>::infinity();
    for (int v = 0; v < p; ++v)
      if (v != u && d.allowed(u, v)) rowmax = std::max(rowmax, d.log_weight(u, v));
    double total = 0.0;
    std::vector<double> mass(p, 0.0);
    for (int v = 0; v < p; ++v)
      if (v != u && d.allowed(u, v)) total += mass[v] = std::exp(d.log_weight(u, v) - rowmax);
    double ticket = unif(rng) * total;
    for (int v = 0; v < p; ++v) {
      ticket -= mass[v];
      if (mass[v] > 0.0 && ticket <= 0.0) return v;
    }
    for (int v = p - 1; v >= 0; --v)
      if (mass[v] > 0.0) return v;  // rounding spill
    throw numeric_error("sample_tree: node has no usable edges");
  };

  std::vector<int> next(p, -1);
  std::vector<char> in_tree(p, 0);
  in_tree[0] = 1;
  for (int v = 1; v < p; ++v) {
    int u = v;
    while (!in_tree[u]) {
      next[u] = step(u);  // overwriting erases any loop
      u = next[u];
    }
    u = v;
    while (!in_tree[u]) {
      in_tree[u] = 1;
      u = next[u];
    }
  }

  LabeledGraph tree(p);
  for (int v = 1; v < p; ++v) tree.add_edge(v, next[v]);
  return tree;
}

}  // namespace treegm
