// Scoring an estimated graph against a known truth: the four-way pair
// classification, the ratio summaries built from it, and posterior-averaged
// versions where each pair contributes its inclusion probability instead of
// a hard yes or no.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "treegm/explore.hpp"
#include "treegm/graph.hpp"
#include "treegm/treedist.hpp"

namespace treegm {

// Pair counts by the four-way classification. Always sums to C(p,2).
struct Confusion {
  long long tp = 0;  // edge in both graphs
  long long fp = 0;  // edge only in the estimate
  long long fn = 0;  // edge only in the truth
  long long tn = 0;  // edge in neither
};

inline Confusion confusion(const LabeledGraph& estimate, const LabeledGraph& truth) {
  if (estimate.p() != truth.p()) throw validation_error("confusion: dimension mismatch");
  Confusion c;
  for (int v = 1; v < truth.p(); ++v)
    for (int u = 0; u < v; ++u) {
      if (estimate.has_edge(u, v))
        ++(truth.has_edge(u, v) ? c.tp : c.fp);
      else
        ++(truth.has_edge(u, v) ? c.fn : c.tn);
    }
  return c;
}

// The seven ratio summaries. A ratio whose denominator is empty stays unset
// rather than being faked as zero, so aggregate tables cannot silently
// absorb meaningless values; require_rate turns unset into an error.
struct ClassificationRates {
  std::optional<double> precision;            // tp / (tp + fp)
  std::optional<double> recall;               // tp / (tp + fn); also true-positive rate, sensitivity
  std::optional<double> specificity;          // tn / (tn + fp); also true-negative rate
  std::optional<double> false_positive_rate;  // fp / (tn + fp)
  std::optional<double> false_negative_rate;  // fn / (tp + fn)
  std::optional<double> accuracy;             // (tp + tn) / all pairs
  std::optional<double> error_rate;           // (fp + fn) / all pairs
};

inline double require_rate(const std::optional<double>& rate, const std::string& name) {
  if (!rate) throw validation_error(name + " is undefined here: its denominator is zero");
  return *rate;
}

inline ClassificationRates rates(const Confusion& c) {
  if (c.tp < 0 || c.fp < 0 || c.fn < 0 || c.tn < 0)
    throw validation_error("rates: negative count");
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn), tn = static_cast<double>(c.tn);
  ClassificationRates r;
  if (c.tp + c.fp > 0) r.precision = tp / (tp + fp);
  if (c.tp + c.fn > 0) {
    r.recall = tp / (tp + fn);
    r.false_negative_rate = fn / (tp + fn);
  }
  if (c.tn + c.fp > 0) {
    r.specificity = tn / (tn + fp);
    r.false_positive_rate = fp / (tn + fp);
  }
  if (c.tp + c.fp + c.fn + c.tn > 0) {
    r.accuracy = (tp + tn) / (tp + fp + fn + tn);
    r.error_rate = (fp + fn) / (tp + fp + fn + tn);
  }
  return r;
}

// Confusion quantities averaged over a graph distribution. Each pair adds
// its inclusion probability to one of etp/efp and its complement to the
// matching negative count, so etp + efn is the true edge count and
// efp + etn the true non-edge count by construction.
struct ExpectedMetrics {
  double etp = 0.0;
  double efp = 0.0;
  double efn = 0.0;
  double etn = 0.0;
  std::optional<double> etpr;  // etp over the true edge count; unset for an empty truth
  std::vector<double> expected_degree;
};

namespace detail {

inline ExpectedMetrics expected_from_probs(const SymMatrix& prob, const LabeledGraph& truth) {
  if (prob.dim() != truth.p())
    throw validation_error("posterior metrics: dimension mismatch with the truth");
  ExpectedMetrics m;
  m.expected_degree.assign(truth.p(), 0.0);
  for (int v = 1; v < truth.p(); ++v)
    for (int u = 0; u < v; ++u) {
      const double q = prob(u, v);
      if (truth.has_edge(u, v)) {
        m.etp += q;
        m.efn += 1.0 - q;
      } else {
        m.efp += q;
        m.etn += 1.0 - q;
      }
      m.expected_degree[u] += q;
      m.expected_degree[v] += q;
    }
  if (truth.edge_count() > 0) m.etpr = m.etp / truth.edge_count();
  return m;
}

}  // namespace detail

// From an exploration ledger: edge probabilities are taken over the visited
// graphs only, which is exact when the ledger enumerates the whole family
// and an approximation otherwise.
inline ExpectedMetrics posterior_expected_metrics(const PosteriorRecord& rec,
                                                  const LabeledGraph& truth) {
  return detail::expected_from_probs(posterior_edge_probabilities(rec), truth);
}

// From the determinant-based summary of a factored tree distribution.
inline ExpectedMetrics posterior_expected_metrics(const TreePosteriorSummary& summary,
                                                  const LabeledGraph& truth) {
  return detail::expected_from_probs(summary.edge_prob, truth);
}

}  // namespace treegm
