#pragma once

// Graph priors in log form: uniform, independent-edge (binomial), size-based
// over forests, hub-encouraging, max-degree, and fully factored edge-product
// priors. Ratios take the telescoped fast path when the prior factors over
// edges.

#include <limits>
#include <optional>

#include "treegm/hiw.hpp"

namespace treegm {

class GraphPrior {
 public:
  static GraphPrior uniform(int p) { return GraphPrior(Kind::kUniform, p); }

  static GraphPrior binomial(int p, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw validation_error("binomial prior: beta must lie in (0,1)");
    GraphPrior g(Kind::kBinomial, p);
    g.beta_ = beta;
    return g;
  }

  // All forest sizes equally likely, all forests of one size equally likely.
  // Needs the per-size forest counts, which come from scanning every edge
  // subset; feasible only for small p.
  static GraphPrior size_based(int p) {
    if (p < 1 || p > 7) throw validation_error("size-based prior: p must be in [1, 7]");
    GraphPrior g(Kind::kSizeBased, p);
    g.size_counts_.assign(p, 0);
    int m = pair_count(p);
    std::vector<std::pair<int, int>> pairs;
    for (int v = 1; v < p; ++v)
      for (int u = 0; u < v; ++u) pairs.emplace_back(u, v);
    for (uint32_t mask = 0; mask < (uint32_t{1} << m); ++mask) {
      DisjointSets ds(p);
      int edges = 0;
      bool acyclic = true;
      for (int b = 0; b < m && acyclic; ++b)
        if (mask >> b & 1) {
          if (!ds.unite(pairs[b].first, pairs[b].second))
            acyclic = false;
          else
            ++edges;
        }
      if (acyclic) ++g.size_counts_[edges];
    }
    return g;
  }

  static GraphPrior hub_encouraging(int p, int chi, double psi) {
    if (chi < 1) throw validation_error("hub prior: chi must be at least 1");
    if (!(psi > 0.0)) throw validation_error("hub prior: psi must be positive");
    GraphPrior g(Kind::kHub, p);
    g.chi_ = chi;
    g.psi_ = psi;
    return g;
  }

  static GraphPrior max_degree_exp(int p) { return GraphPrior(Kind::kMaxDegree, p); }

  static GraphPrior factored(EdgeLogWeights w) {
    GraphPrior g(Kind::kFactored, w.p());
    g.weights_ = std::move(w);
    return g;
  }

  int p() const { return p_; }

  double log_unnorm(const LabeledGraph& g) const {
    if (g.p() != p_) throw validation_error("graph prior: dimension mismatch");
    switch (kind_) {
      case Kind::kUniform:
        return 0.0;
      case Kind::kBinomial: {
        int e = g.edge_count();
        return e * std::log(beta_) + (pair_count(p_) - e) * std::log1p(-beta_);
      }
      case Kind::kSizeBased: {
        if (!is_forest(g)) return -std::numeric_limits<double>::infinity();  // outside the ambient class
        return -std::log(static_cast<double>(size_counts_[g.edge_count()]));
      }
      case Kind::kHub: {
        double excess = 0.0;
        for (int d : g.degrees()) excess += std::max(0, d - chi_);
        return std::log(psi_ + excess);
      }
      case Kind::kMaxDegree: {
        int maxdeg = 0;
        for (int d : g.degrees()) maxdeg = std::max(maxdeg, d);
        return static_cast<double>(maxdeg);
      }
      case Kind::kFactored: {
        double s = 0.0;
        for (auto [u, v] : g.edges()) s += weights_->w(u, v);
        return s;
      }
    }
    return 0.0;  // unreachable
  }

  double log_ratio(const LabeledGraph& g_new, const LabeledGraph& g_old) const {
    if (g_new.p() != p_ || g_old.p() != p_) throw validation_error("graph prior: dimension mismatch");
    if (auto w = is_factored()) {
      // telescoped: only edges in the symmetric difference contribute
      double s = 0.0;
      for (auto [u, v] : g_new.edges())
        if (!g_old.has_edge(u, v)) s += w->w(u, v);
      for (auto [u, v] : g_old.edges())
        if (!g_new.has_edge(u, v)) s -= w->w(u, v);
      return s;
    }
    return log_unnorm(g_new) - log_unnorm(g_old);
  }

  // Ratio straight from an edge delta; only meaningful for factored priors.
  double log_ratio_from_delta(const std::vector<std::pair<int, int>>& added,
                              const std::vector<std::pair<int, int>>& removed) const {
    auto w = is_factored();
    if (!w) throw validation_error("graph prior: delta ratio requires a factored prior");
    double s = 0.0;
    for (auto [u, v] : added) s += w->w(u, v);
    for (auto [u, v] : removed) s -= w->w(u, v);
    return s;
  }

  // The edge weight matrix when the prior is a product over edges.
  std::optional<EdgeLogWeights> is_factored() const {
    switch (kind_) {
      case Kind::kUniform:
        return EdgeLogWeights{SymMatrix(p_)};
      case Kind::kBinomial: {
        SymMatrix w(p_);
        double odds = std::log(beta_) - std::log1p(-beta_);
        for (int v = 1; v < p_; ++v)
          for (int u = 0; u < v; ++u) w.set(u, v, odds);
        return EdgeLogWeights{w};
      }
      case Kind::kFactored:
        return weights_;
      default:
        return std::nullopt;
    }
  }

 private:
  enum class Kind { kUniform, kBinomial, kSizeBased, kHub, kMaxDegree, kFactored };

  GraphPrior(Kind kind, int p) : kind_(kind), p_(p) {
    if (p < 1) throw validation_error("graph prior: node count must be positive");
  }

  Kind kind_;
  int p_;
  double beta_ = 0.0;
  int chi_ = 0;
  double psi_ = 0.0;
  std::vector<long long> size_counts_;      // size-based: forests per edge count
  std::optional<EdgeLogWeights> weights_;   // factored
};

}  // namespace treegm
