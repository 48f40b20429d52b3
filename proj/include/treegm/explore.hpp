#pragma once

// Posterior exploration. Two families: shotgun stochastic search, which
// scores batches of neighboring graphs and hops to one of them with
// probability proportional to its posterior weight, and Metropolis samplers
// that walk (graph, incomplete covariance) space jointly, jumping dimension
// whenever an edge appears or disappears.

#include <chrono>
#include <cmath>
#include <unordered_map>

#include "treegm/hiw.hpp"
#include "treegm/priors.hpp"
#include "treegm/stores.hpp"

namespace treegm {

enum class GraphClass { kForest, kTree };

// Memoizing scorer: log marginal likelihood plus log prior mass, keyed by
// the graph's edge bit-pattern so no graph is ever scored twice. Holds
// references; the model and prior must outlive the scorer.
class GraphScorer {
 public:
  GraphScorer(GraphClass cls, const HiwModel& model, const GraphPrior& prior)
      : cls_(cls), model_(&model), prior_(&prior) {}

  double score(const LabeledGraph& g) {
    auto it = ledger_.find(g.bits());
    if (it != ledger_.end()) return it->second;
    double value = score_uncached(g);
    ++evaluations_;
    ledger_.emplace(g.bits(), value);
    return value;
  }

  // Same computation with the memo bypassed.
  double score_uncached(const LabeledGraph& g) const {
    if (cls_ == GraphClass::kTree && !is_tree(g)) throw validation_error("score: graph is not a tree");
    return model_->log_marginal_forest(g) + prior_->log_unnorm(g);
  }

  const std::unordered_map<BitPattern, double, BitPatternHash>& ledger() const { return ledger_; }
  long long evaluations() const { return evaluations_; }

 private:
  GraphClass cls_;
  const HiwModel* model_;
  const GraphPrior* prior_;
  std::unordered_map<BitPattern, double, BitPatternHash> ledger_;
  long long evaluations_ = 0;
};

struct ScoredGraph {
  LabeledGraph graph;
  double score;  // log posterior score for search runs, visit count for samplers
};

struct PosteriorRecord {
  int p = 0;
  bool ledger_holds_log_scores = true;
  std::unordered_map<BitPattern, double, BitPatternHash> ledger;
  std::vector<ScoredGraph> best;  // descending; ties broken by bit-pattern
  std::vector<double> trace;      // one entry per iteration: score of the current state
};

struct SssConfig {
  long long omega = 1;       // neighbors scored per step (clamped to what the graph offers)
  long long iterations = 0;  // set exactly one budget: iteration count ...
  double seconds = 0.0;      // ... or wall-clock seconds, checked every 64 iterations
  ProposalSystem system = ProposalSystem::kWeightedDedupe;  // tree runs only
  double alpha = 1.0;        // selection sharpness: weights are exp(alpha * score)
  int top_k = 10;
  uint64_t seed = 0;
};

struct McmcConfig {
  double sigma_g = 1.0;    // scale for the covariance entry born with a new edge
  double sigma_ij = 0.1;   // scale of the all-entry covariance refresh
  long long iterations = 0;
  // Edge-move proposal for tree chains. kWeightedDedupe draws uniformly over
  // all distinct moves; kRejection picks an edge uniformly and a reinsertion
  // uniformly, which cancels from the acceptance ratio entirely.
  ProposalSystem system = ProposalSystem::kWeightedDedupe;
  int top_k = 10;
  uint64_t seed = 0;
};

// Covariance entries kept only where the graph has structure: one value per
// node on the diagonal plus one per existing edge. Every pairwise 2x2 block
// must stay positive-definite or the model density is zero.
struct IncompleteCov {
  std::vector<double> diag;
  std::map<int, double> edges;  // pair index -> off-diagonal entry

  int p() const { return static_cast<int>(diag.size()); }

  bool block_pd(int u, int v) const {
    auto it = edges.find(pair_index(u, v));
    double off = it == edges.end() ? 0.0 : it->second;
    return diag[u] > 0.0 && diag[v] > 0.0 && diag[u] * diag[v] - off * off > 0.0;
  }
};

// Start the chain at the sample moments: variances on the diagonal (1.0 when
// there is no data) and covariances on the edges, clipped so every block
// starts strictly inside the PD region.
inline IncompleteCov init_incomplete_cov(const LabeledGraph& g, const SuffStats& stats) {
  if (stats.u.dim() != g.p()) throw validation_error("init_incomplete_cov: dimension mismatch");
  IncompleteCov cov;
  cov.diag.assign(g.p(), 1.0);
  for (int v = 0; v < g.p(); ++v) {
    double variance = stats.n > 0 ? stats.u(v, v) / stats.n : 1.0;
    if (variance > 0.0) cov.diag[v] = variance;
  }
  for (auto [u, v] : g.edges()) {
    double c = stats.n > 0 ? stats.u(u, v) / stats.n : 0.0;
    double bound = 0.99 * std::sqrt(cov.diag[u] * cov.diag[v]);
    cov.edges[pair_index(u, v)] = std::clamp(c, -bound, bound);
  }
  return cov;
}

struct ForestChainState {
  ForestStore store;
  IncompleteCov cov;
};

struct TreeChainState {
  TreeStore store;
  IncompleteCov cov;
};

inline ForestChainState make_forest_chain(const LabeledGraph& start, const HiwModel& model) {
  return {ForestStore(start), init_incomplete_cov(start, model.stats())};
}

inline TreeChainState make_tree_chain(const LabeledGraph& start, const HiwModel& model) {
  return {TreeStore(start), init_incomplete_cov(start, model.stats())};
}

namespace detail {

inline double log_normal_density(double x, double sigma) {
  return -0.5 * std::log(2.0 * M_PI) - std::log(sigma) - 0.5 * (x / sigma) * (x / sigma);
}

// Per-node and per-edge factors of [prior covariance density] x [likelihood].
// The product over edges, divided by each node factor once per extra
// adjacency, is the joint density the covariance samplers target; its
// integral over the kept entries is the graph's marginal likelihood.
class HFactorEval {
 public:
  explicit HFactorEval(const HiwModel& m)
      : delta_(m.params().delta), n_(m.stats().n), d_(&m.params().d), u_(&m.stats().u) {
    double a = delta_ / 2.0;
    c1_.resize(m.p());
    for (int v = 0; v < m.p(); ++v) c1_[v] = a * std::log((*d_)(v, v) / 2.0) - std::lgamma(a);
    lg2_ = log_multigamma(2, (delta_ + 1.0) / 2.0);
  }

  // Inverse-gamma(delta/2, D_vv/2) prior times the node's data factor.
  double h1(int v, double gvv) const {
    if (!(gvv > 0.0)) return -std::numeric_limits<double>::infinity();
    double a = delta_ / 2.0;
    return c1_[v] - (a + 1.0 + 0.5 * n_) * std::log(gvv) - ((*d_)(v, v) + (*u_)(v, v)) / (2.0 * gvv) -
           0.5 * n_ * std::log(2.0 * M_PI);
  }

  // 2x2 inverse-Wishart prior on the block times the pair's data factor.
  double h2(int u, int v, double guu, double gvv, double guv) const {
    double det = guu * gvv - guv * guv;
    if (!(guu > 0.0) || !(det > 0.0)) return -std::numeric_limits<double>::infinity();
    double duu = (*d_)(u, u), dvv = (*d_)(v, v), duv = (*d_)(u, v);
    double a2 = (delta_ + 1.0) / 2.0;
    double tr_prior = (duu * gvv - 2.0 * duv * guv + dvv * guu) / det;
    double tr_data = ((*u_)(u, u) * gvv - 2.0 * (*u_)(u, v) * guv + (*u_)(v, v) * guu) / det;
    return a2 * std::log((duu * dvv - duv * duv) / 4.0) - lg2_ -
           0.5 * (delta_ + 4.0 + n_) * std::log(det) - 0.5 * (tr_prior + tr_data) -
           n_ * std::log(2.0 * M_PI);
  }

  // log joint density of (data, covariance entries) given the graph whose
  // degrees are supplied. -inf whenever any kept block leaves the PD cone.
  double graph_target(const IncompleteCov& cov, const std::vector<int>& degree) const {
    for (double d : cov.diag)
      if (!(d > 0.0)) return -std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (int v = 0; v < cov.p(); ++v) total += (1.0 - degree[v]) * h1(v, cov.diag[v]);
    for (auto [idx, val] : cov.edges) {
      auto [u, v] = pair_from_index(idx);
      total += h2(u, v, cov.diag[u], cov.diag[v], val);
    }
    return total;
  }

 private:
  double delta_, n_;
  const SymMatrix* d_;
  const SymMatrix* u_;
  std::vector<double> c1_;
  double lg2_;
};

inline std::vector<int> degrees_from_cov(const IncompleteCov& cov) {
  std::vector<int> degree(cov.diag.size(), 0);
  for (auto [idx, val] : cov.edges) {
    (void)val;
    auto [u, v] = pair_from_index(idx);
    ++degree[u];
    ++degree[v];
  }
  return degree;
}

inline long long forest_subtree_size(const ForestStore& s, int v) {
  long long count = 0;
  std::vector<int> stack = {v};
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    ++count;
    for (int w : s.children(x)) stack.push_back(w);
  }
  return count;
}

// Chance of drawing any one move uniformly from existing + addable edges.
inline double log_pick_rate(const ForestStore& s) {
  return -std::log(static_cast<double>(s.existing_count() + s.addable_count()));
}

// Chance that the reverse pick removes (i, j) right after it was added:
// the add converts the |I||J| cross pairs between the joined parts from
// addable to taken, so the new menu has existing+1+addable-|I||J| entries.
inline double log_reverse_remove_rate(const ForestStore& s, int i, int j) {
  double cross = static_cast<double>(s.part_members(s.part_of(i)).size()) *
                 static_cast<double>(s.part_members(s.part_of(j)).size());
  return -std::log(static_cast<double>(s.existing_count() + 1 + s.addable_count()) - cross);
}

// Chance that the reverse pick re-adds (i, j) right after it was removed:
// the split frees the cross pairs between the two newborn parts.
inline double log_reverse_add_rate(const ForestStore& s, int i, int j) {
  int child = s.parent(i) == j ? i : j;
  double young = static_cast<double>(forest_subtree_size(s, child));
  double part = static_cast<double>(s.part_members(s.part_of(i)).size());
  double cross = young * (part - young);
  return -std::log(static_cast<double>(s.existing_count() - 1 + s.addable_count()) + cross);
}

// One dimension-jumping move on a forest chain: pick uniformly from the
// removable and addable edges, give a newborn edge a Gaussian entry, and
// accept with the ratio of joint densities times proposal rates. Rejection
// leaves the state untouched.
inline bool forest_jump_step(ForestChainState& st, const McmcConfig& cfg, const HFactorEval& h,
                             const GraphPrior& prior, Rng& rng) {
  ForestStore& s = st.store;
  if (s.existing_count() + s.addable_count() == 0) return false;
  ForestMove mv = s.uniform_move(rng);
  std::normal_distribution<double> gauss(0.0, cfg.sigma_g);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int i = mv.u, j = mv.v;
  LabeledGraph g_old = s.graph();
  LabeledGraph g_new = g_old;
  double drawn = 0.0;
  double log_accept;
  if (mv.add) {
    drawn = gauss(rng);
    g_new.add_edge(i, j);
    double log_target = h.h2(i, j, st.cov.diag[i], st.cov.diag[j], drawn) -
                        h.h1(i, st.cov.diag[i]) - h.h1(j, st.cov.diag[j]) +
                        prior.log_ratio(g_new, g_old);
    log_accept = log_target + log_reverse_remove_rate(s, i, j) - log_pick_rate(s) -
                 log_normal_density(drawn, cfg.sigma_g);
  } else {
    double old_val = st.cov.edges.at(pair_index(i, j));
    g_new.remove_edge(i, j);
    double log_target = h.h1(i, st.cov.diag[i]) + h.h1(j, st.cov.diag[j]) -
                        h.h2(i, j, st.cov.diag[i], st.cov.diag[j], old_val) +
                        prior.log_ratio(g_new, g_old);
    log_accept = log_target + log_reverse_add_rate(s, i, j) - log_pick_rate(s) +
                 log_normal_density(old_val, cfg.sigma_g);
  }
  if (!(std::log(unif(rng)) < std::min(0.0, log_accept))) return false;
  if (mv.add) {
    s.add_edge(i, j);
    st.cov.edges[pair_index(i, j)] = drawn;
  } else {
    s.remove_edge(i, j);
    st.cov.edges.erase(pair_index(i, j));
  }
  return true;
}

// One edge-move on a tree chain: delete an edge, reconnect the two sides
// elsewhere, and hand the new edge a Gaussian entry. The acceptance ratio
// trades the two node factors freed against the two consumed, the old entry's
// proposal density against the new one's, and (under the uniform-move
// proposal) the move counts of the two trees.
inline bool tree_jump_step(TreeChainState& st, const McmcConfig& cfg, const HFactorEval& h,
                           const GraphPrior& prior, Rng& rng) {
  TreeStore& s = st.store;
  int p = s.p();
  if (p < 3) return false;
  bool uniform_moves = cfg.system == ProposalSystem::kWeightedDedupe;
  TreeMove mv;
  if (uniform_moves) {
    mv = tree_uniform_move(s, rng);
  } else if (cfg.system == ProposalSystem::kRejection) {
    std::uniform_int_distribution<int> node(1, p - 1);
    int oc = node(rng);
    long long w = s.weight(oc);
    std::uniform_int_distribution<long long> rank(0, w * (p - w) - 2);
    mv = move_from_rank(s, oc, rank(rng));
  } else {
    throw validation_error("tree sampler: batched edge-list systems cannot propose single moves");
  }
  long long moves_before = uniform_moves ? tree_count_moves(s) : 0;
  int idx_old = pair_index(mv.old_child, mv.old_parent);
  int idx_new = pair_index(mv.new_child, mv.new_parent);
  double old_val = st.cov.edges.at(idx_old);
  std::normal_distribution<double> gauss(0.0, cfg.sigma_g);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double drawn = gauss(rng);

  LabeledGraph g_old = s.graph();
  LabeledGraph g_new = g_old;
  g_new.remove_edge(mv.old_child, mv.old_parent);
  g_new.add_edge(mv.new_child, mv.new_parent);

  const auto& diag = st.cov.diag;
  double log_accept = h.h2(mv.new_child, mv.new_parent, diag[mv.new_child], diag[mv.new_parent], drawn) +
                      h.h1(mv.old_child, diag[mv.old_child]) + h.h1(mv.old_parent, diag[mv.old_parent]) -
                      h.h2(mv.old_child, mv.old_parent, diag[mv.old_child], diag[mv.old_parent], old_val) -
                      h.h1(mv.new_child, diag[mv.new_child]) - h.h1(mv.new_parent, diag[mv.new_parent]) +
                      prior.log_ratio(g_new, g_old) +
                      log_normal_density(old_val, cfg.sigma_g) - log_normal_density(drawn, cfg.sigma_g);
  s.apply_move(mv);
  if (uniform_moves)
    log_accept += std::log(static_cast<double>(moves_before)) -
                  std::log(static_cast<double>(tree_count_moves(s)));
  if (std::log(unif(rng)) < std::min(0.0, log_accept)) {
    st.cov.edges.erase(idx_old);
    st.cov.edges[idx_new] = drawn;
    return true;
  }
  s.apply_move({mv.new_child, mv.new_parent, mv.old_child, mv.old_parent});
  return false;
}

// Symmetric refresh of every kept covariance entry at once. A proposal that
// pushes any block out of the PD cone has density zero and is never taken.
inline bool cov_metropolis_step(IncompleteCov& cov, const std::vector<int>& degree,
                                const HFactorEval& h, double sigma_ij, Rng& rng) {
  std::normal_distribution<double> noise(0.0, sigma_ij);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  IncompleteCov prop = cov;
  for (double& d : prop.diag) d += noise(rng);
  for (auto& [idx, val] : prop.edges) val += noise(rng);
  double log_accept = h.graph_target(prop, degree) - h.graph_target(cov, degree);
  if (!(std::log(unif(rng)) < std::min(0.0, log_accept))) return false;
  cov = std::move(prop);
  return true;
}

inline void check_sss_config(const SssConfig& cfg) {
  if (cfg.omega < 1) throw validation_error("sss: omega must be at least 1");
  if ((cfg.iterations > 0) == (cfg.seconds > 0.0))
    throw validation_error("sss: set exactly one of the iteration and wall-clock budgets");
  if (!(cfg.alpha > 0.0)) throw validation_error("sss: selection sharpness must be positive");
  if (cfg.top_k < 0) throw validation_error("sss: top_k must be non-negative");
}

inline void check_mcmc_config(const McmcConfig& cfg) {
  if (!(cfg.sigma_g > 0.0)) throw validation_error("mcmc: sigma_g must be positive");
  if (!(cfg.sigma_ij > 0.0)) throw validation_error("mcmc: sigma_ij must be positive");
  if (cfg.iterations < 0) throw validation_error("mcmc: negative iteration count");
  if (cfg.top_k < 0) throw validation_error("mcmc: top_k must be non-negative");
}

struct SssBudget {
  long long iterations;
  double seconds;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  bool keep_going(long long it) const {
    if (iterations > 0) return it < iterations;
    if ((it & 63) != 0) return true;
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return elapsed < seconds;
  }
};

inline size_t softmax_pick(const std::vector<double>& scores, double alpha, Rng& rng) {
  double peak = *std::max_element(scores.begin(), scores.end());
  std::vector<double> mass(scores.size());
  double total = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) total += (mass[i] = std::exp(alpha * (scores[i] - peak)));
  std::uniform_real_distribution<double> unif(0.0, total);
  double ticket = unif(rng);
  for (size_t i = 0; i + 1 < mass.size(); ++i) {
    ticket -= mass[i];
    if (ticket < 0.0) return i;
  }
  return mass.size() - 1;
}

inline std::vector<ScoredGraph> top_rows(
    const std::unordered_map<BitPattern, double, BitPatternHash>& ledger, int p, int k) {
  std::vector<std::pair<BitPattern, double>> rows(ledger.begin(), ledger.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (static_cast<long long>(rows.size()) > k) rows.resize(static_cast<size_t>(std::max(k, 0)));
  std::vector<ScoredGraph> out;
  out.reserve(rows.size());
  for (auto& [bits, value] : rows) out.push_back({LabeledGraph::from_bits(p, bits), value});
  return out;
}

}  // namespace detail

// Shotgun search: score a batch of distinct neighbors each step (skipping
// any the ledger already holds), then hop to one drawn with weight
// exp(alpha * score). The ledger keeps every graph ever scored.
inline PosteriorRecord sss_run(GraphClass cls, const LabeledGraph& start, const SssConfig& cfg,
                               const HiwModel& model, const GraphPrior& prior) {
  detail::check_sss_config(cfg);
  if (start.p() != model.p()) throw validation_error("sss_run: graph and model dimensions differ");
  Rng rng(cfg.seed);
  GraphScorer scorer(cls, model, prior);
  PosteriorRecord rec;
  rec.p = start.p();
  rec.ledger_holds_log_scores = true;
  detail::SssBudget budget{cfg.iterations, cfg.seconds};

  if (cls == GraphClass::kForest) {
    ForestStore store(start);
    scorer.score(store.graph());
    struct Cand {
      BitPattern bits;
      ForestMove mv;
      double score;
    };
    for (long long it = 0; budget.keep_going(it); ++it) {
      long long ne = static_cast<long long>(store.existing_count());
      long long total = ne + static_cast<long long>(store.addable_count());
      if (total == 0) break;
      auto existing = store.edges_in_state(EdgeState::kExisting);
      auto addable = store.edges_in_state(EdgeState::kAddable);
      std::vector<Cand> cands;
      for (long long pos : detail::distinct_sample(total, std::min(cfg.omega, total), rng)) {
        bool add = pos >= ne;
        auto [u, v] = add ? addable[static_cast<size_t>(pos - ne)] : existing[static_cast<size_t>(pos)];
        BitPattern bits = store.bits();
        bits.flip(pair_index(u, v));
        cands.push_back({bits, ForestMove{add, u, v}, 0.0});
      }
      std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.bits < b.bits; });
      std::vector<double> scores(cands.size());
      for (size_t c = 0; c < cands.size(); ++c)
        scores[c] = cands[c].score = scorer.score(LabeledGraph::from_bits(rec.p, cands[c].bits));
      size_t pick = detail::softmax_pick(scores, cfg.alpha, rng);
      store.apply(cands[pick].mv);
      rec.trace.push_back(cands[pick].score);
    }
  } else {
    TreeStore store(start);
    scorer.score(store.graph());
    struct Cand {
      BitPattern bits;
      TreeMove mv;
      double score;
    };
    int p = start.p();
    bool batched_lists = cfg.system == ProposalSystem::kUnusedWeights ||
                         cfg.system == ProposalSystem::kNoWeights;
    for (long long it = 0; p >= 3 && budget.keep_going(it); ++it) {
      long long take = std::min(cfg.omega, tree_count_moves(store));
      if (batched_lists) take = std::min(take, static_cast<long long>(p - 1) * (p - 2));
      std::vector<Cand> cands;
      for (const TreeMove& mv : propose_moves(store, cfg.system, take, rng)) {
        BitPattern bits = store.bits();
        bits.flip(pair_index(mv.old_child, mv.old_parent));
        bits.flip(pair_index(mv.new_child, mv.new_parent));
        cands.push_back({bits, mv, 0.0});
      }
      std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.bits < b.bits; });
      std::vector<double> scores(cands.size());
      for (size_t c = 0; c < cands.size(); ++c)
        scores[c] = cands[c].score = scorer.score(LabeledGraph::from_bits(rec.p, cands[c].bits));
      size_t pick = detail::softmax_pick(scores, cfg.alpha, rng);
      store.apply_move(cands[pick].mv);
      rec.trace.push_back(cands[pick].score);
    }
  }

  rec.ledger = scorer.ledger();
  rec.best = detail::top_rows(rec.ledger, rec.p, cfg.top_k);
  return rec;
}

inline bool mcmc_forest_step(ForestChainState& st, const McmcConfig& cfg, const HiwModel& model,
                             const GraphPrior& prior, Rng& rng) {
  detail::check_mcmc_config(cfg);
  detail::HFactorEval h(model);
  return detail::forest_jump_step(st, cfg, h, prior, rng);
}

inline bool mcmc_tree_step(TreeChainState& st, const McmcConfig& cfg, const HiwModel& model,
                           const GraphPrior& prior, Rng& rng) {
  detail::check_mcmc_config(cfg);
  detail::HFactorEval h(model);
  return detail::tree_jump_step(st, cfg, h, prior, rng);
}

inline bool mcmc_cov_step(ForestChainState& st, const McmcConfig& cfg, const HiwModel& model, Rng& rng) {
  detail::check_mcmc_config(cfg);
  detail::HFactorEval h(model);
  return detail::cov_metropolis_step(st.cov, detail::degrees_from_cov(st.cov), h, cfg.sigma_ij, rng);
}

inline bool mcmc_cov_step(TreeChainState& st, const McmcConfig& cfg, const HiwModel& model, Rng& rng) {
  detail::check_mcmc_config(cfg);
  detail::HFactorEval h(model);
  return detail::cov_metropolis_step(st.cov, detail::degrees_from_cov(st.cov), h, cfg.sigma_ij, rng);
}

// Alternate one graph move and one covariance refresh per iteration,
// recording how long the chain sits at each graph. The time share per graph
// estimates its posterior mass.
inline PosteriorRecord mcmc_run(GraphClass cls, const LabeledGraph& start, const McmcConfig& cfg,
                                const HiwModel& model, const GraphPrior& prior) {
  detail::check_mcmc_config(cfg);
  if (start.p() != model.p()) throw validation_error("mcmc_run: graph and model dimensions differ");
  Rng rng(cfg.seed);
  detail::HFactorEval h(model);
  PosteriorRecord rec;
  rec.p = start.p();
  rec.ledger_holds_log_scores = false;

  if (cls == GraphClass::kForest) {
    ForestChainState st = make_forest_chain(start, model);
    for (long long it = 0; it < cfg.iterations; ++it) {
      detail::forest_jump_step(st, cfg, h, prior, rng);
      auto degree = detail::degrees_from_cov(st.cov);
      detail::cov_metropolis_step(st.cov, degree, h, cfg.sigma_ij, rng);
      rec.ledger[st.store.bits()] += 1.0;
      rec.trace.push_back(h.graph_target(st.cov, degree) + prior.log_unnorm(st.store.graph()));
    }
  } else {
    TreeChainState st = make_tree_chain(start, model);
    for (long long it = 0; it < cfg.iterations; ++it) {
      detail::tree_jump_step(st, cfg, h, prior, rng);
      auto degree = detail::degrees_from_cov(st.cov);
      detail::cov_metropolis_step(st.cov, degree, h, cfg.sigma_ij, rng);
      rec.ledger[st.store.bits()] += 1.0;
      rec.trace.push_back(h.graph_target(st.cov, degree) + prior.log_unnorm(st.store.graph()));
    }
  }

  rec.best = detail::top_rows(rec.ledger, rec.p, cfg.top_k);
  return rec;
}

// Edge inclusion probabilities under the record's weights: softmax over
// scores for search ledgers, visit shares for sampler ledgers.
inline SymMatrix posterior_edge_probabilities(const PosteriorRecord& rec) {
  if (rec.ledger.empty()) throw validation_error("posterior_edge_probabilities: empty ledger");
  double shift = 0.0;
  if (rec.ledger_holds_log_scores) {
    shift = -std::numeric_limits<double>::infinity();
    for (const auto& [bits, value] : rec.ledger) shift = std::max(shift, value);
    if (!std::isfinite(shift))
      throw validation_error("posterior_edge_probabilities: no normalizable score in the ledger");
  }
  SymMatrix m(rec.p);
  double total = 0.0;
  for (const auto& [bits, value] : rec.ledger) {
    double w = rec.ledger_holds_log_scores ? std::exp(value - shift) : value;
    total += w;
    for (int idx = 0; idx < pair_count(rec.p); ++idx) {
      if (!bits.test(idx)) continue;
      auto [u, v] = pair_from_index(idx);
      m.set(u, v, m(u, v) + w);
    }
  }
  if (!(total > 0.0) || !std::isfinite(total))
    throw validation_error("posterior_edge_probabilities: ledger weights sum to nothing");
  for (int v = 1; v < rec.p; ++v)
    for (int u = 0; u < v; ++u) m.set(u, v, m(u, v) / total);
  return m;
}

}  // namespace treegm
