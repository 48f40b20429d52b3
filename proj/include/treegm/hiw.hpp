#pragma once

// Marginal likelihoods for Gaussian graphical models under the conjugate
// prior on covariances: the k-function, per-subset prior/posterior ratios
// (memoized), forest and decomposable-graph log marginals, and the edge
// log-weight matrix that drives tree search and tree sampling.

#include <limits>
#include <map>
#include <mutex>

#include "treegm/chordal.hpp"
#include "treegm/linalg.hpp"

namespace treegm {

// Prior hyperparameters. delta > 2 keeps the implied covariance prior proper.
struct HiwParams {
  double delta;
  SymMatrix d;

  HiwParams(double delta_in, SymMatrix d_in) : delta(delta_in), d(std::move(d_in)) {
    if (!(delta > 2.0)) throw validation_error("HiwParams: delta must exceed 2");
    cholesky_logdet(d);  // throws numeric_error when not PD
  }

  static HiwParams defaults(int p) { return HiwParams(3.0, SymMatrix::scaled_identity(p, 5.0)); }
};

// Data enters only through the observation count and the scatter matrix.
struct SuffStats {
  int n;
  SymMatrix u;

  SuffStats(int n_in, SymMatrix u_in) : n(n_in), u(std::move(u_in)) {
    if (n < 0) throw validation_error("SuffStats: negative observation count");
    double scale = 1.0;
    for (int i = 0; i < u.dim(); ++i) scale = std::max(scale, std::abs(u(i, i)));
    if (jacobi_eigenvalues(u.to_dense()).front() < -1e-9 * scale)
      throw validation_error("SuffStats: scatter matrix must be positive semi-definite");
  }

  static SuffStats from_data(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd u = x.transpose() * x;
    return SuffStats(static_cast<int>(x.rows()), SymMatrix::from_dense(u));
  }

  static SuffStats none(int p) { return SuffStats(0, SymMatrix(p)); }
};

// log k(C, delta, D) = ((delta+c-1)/2) log|D_C/2| - log Gamma_c((delta+c-1)/2)
inline double log_k(const std::vector<int>& nodes, double delta, const SymMatrix& d) {
  if (nodes.empty()) throw validation_error("log_k: empty node set");
  int c = static_cast<int>(nodes.size());
  double a = (delta + c - 1) / 2.0;
  double logdet = cholesky_logdet(d.submatrix(nodes)).logdet;
  return a * (logdet - c * std::log(2.0)) - log_multigamma(c, a);
}

struct EdgeLogWeights {
  SymMatrix w;  // symmetric log weights; diagonal unused
  int p() const { return w.dim(); }
};

// One model = one (prior, data) pairing. Subset ratios are cached, since
// search and sampling ask for the same node sets over and over.
class HiwModel {
 public:
  HiwModel(HiwParams params, SuffStats stats) : params_(std::move(params)), stats_(std::move(stats)) {
    int p = params_.d.dim();
    if (stats_.u.dim() != p) throw validation_error("HiwModel: dimension mismatch between D and U");
    dplus_ = SymMatrix(p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j <= i; ++j) dplus_.set(i, j, params_.d(i, j) + stats_.u(i, j));
    single_.assign(p, kUnset);
    pairs_.assign(pair_count(p), kUnset);
  }

  int p() const { return params_.d.dim(); }
  const HiwParams& params() const { return params_; }
  const SuffStats& stats() const { return stats_; }

  // log k(C, delta, D) - log k(C, delta+n, D+U)
  double log_k_ratio(std::vector<int> nodes) const {
    std::sort(nodes.begin(), nodes.end());
    if (nodes.size() == 1) return cached(single_[nodes[0]], nodes);
    if (nodes.size() == 2) return cached(pairs_[pair_index(nodes[0], nodes[1])], nodes);
    {
      std::lock_guard<std::mutex> lock(memo_mutex_);
      auto it = memo_.find(nodes);
      if (it != memo_.end()) return it->second;
    }
    double value = compute(nodes);
    std::lock_guard<std::mutex> lock(memo_mutex_);
    memo_[nodes] = value;
    return value;
  }

  double log_k_ratio(int v) const { return log_k_ratio(std::vector<int>{v}); }
  double log_k_ratio(int u, int v) const { return log_k_ratio(std::vector<int>{u, v}); }

  // -(np/2) log 2pi + sum_v logK(v) + sum_(u,v) [logK(u,v) - logK(u) - logK(v)]
  double log_marginal_forest(const LabeledGraph& g) const {
    if (g.p() != p()) throw validation_error("log_marginal_forest: graph size mismatch");
    if (!is_forest(g)) throw validation_error("log_marginal_forest: graph is not a forest");
    double total = -0.5 * stats_.n * p() * std::log(2.0 * M_PI);
    for (int v = 0; v < p(); ++v) total += log_k_ratio(v);
    for (auto [u, v] : g.edges()) total += log_k_ratio(u, v) - log_k_ratio(u) - log_k_ratio(v);
    return total;
  }

  // Clique-separator form; empty separators contribute nothing.
  double log_marginal_decomposable(const LabeledGraph& g) const {
    if (g.p() != p()) throw validation_error("log_marginal_decomposable: graph size mismatch");
    auto decomp = clique_separator_decomposition(g);  // rejects non-decomposable input
    double total = -0.5 * stats_.n * p() * std::log(2.0 * M_PI);
    for (const auto& c : decomp.cliques) total += log_k_ratio(c);
    for (const auto& s : decomp.separators)
      if (!s.empty()) total -= log_k_ratio(s);
    return total;
  }

  // w(u,v) = logK(u,v) - logK(u) - logK(v): the gain for joining u and v.
  EdgeLogWeights edge_log_weight_matrix() const {
    SymMatrix w(p());
    for (int v = 1; v < p(); ++v)
      for (int u = 0; u < v; ++u) w.set(u, v, log_k_ratio(u, v) - log_k_ratio(u) - log_k_ratio(v));
    return {w};
  }

 private:
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

  double compute(const std::vector<int>& nodes) const {
    return log_k(nodes, params_.delta, params_.d) - log_k(nodes, params_.delta + stats_.n, dplus_);
  }

  double cached(double& slot, const std::vector<int>& nodes) const {
    std::lock_guard<std::mutex> lock(memo_mutex_);
    if (std::isnan(slot)) slot = compute(nodes);
    return slot;
  }

  HiwParams params_;
  SuffStats stats_;
  SymMatrix dplus_;
  mutable std::vector<double> single_, pairs_;
  mutable std::map<std::vector<int>, double> memo_;
  mutable std::mutex memo_mutex_;
};

}  // namespace treegm
