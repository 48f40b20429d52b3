// Batch experiment harness. One spec names a truth graph, a synthetic
// dataset recipe, and an explorer; running it yields one row of quality
// measures per replicate plus a median-and-quartiles summary. Replicates are
// independent given the spec seed, so they run concurrently and reproduce
// exactly.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "treegm/explore.hpp"
#include "treegm/io.hpp"
#include "treegm/linalg.hpp"
#include "treegm/metrics.hpp"
#include "treegm/randgraph.hpp"

namespace treegm {

enum class GraphShape { kStar, kChain, kFile, kGnm };
enum class ExplorerKind { kSss, kMcmc };

struct ExperimentSpec {
  GraphShape shape = GraphShape::kStar;
  int p = 0;
  int n = 0;
  std::optional<double> r;     // defaults to 0.99/sqrt(p-1)
  long long shape_edges = 0;   // truth edge count when shape is gnm
  std::string shape_file;      // truth path when shape is file
  int replicates = 1;
  ExplorerKind algorithm = ExplorerKind::kSss;
  GraphClass family = GraphClass::kTree;
  SssConfig sss;               // its seed field is ignored; see run_experiment
  McmcConfig mcmc;             // likewise
  std::string prior = "uniform";
  double delta = 3.0;
  std::optional<double> dscale;  // D = dscale * I; defaults to delta + 2
  std::uint64_t seed = 0;
};

// Prior flag syntax shared by every subcommand:
//   uniform | binomial:<beta> | hub[:<chi>,<psi>] | maxdeg | factored:<weights.csv>
// A bare "hub" takes chi = 0.9 p rounded and psi = 1.
inline GraphPrior parse_prior(const std::string& text, int p) {
  auto bad = [&text](const std::string& why) {
    return validation_error("prior flag '" + text + "': " + why);
  };
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto to_double = [&bad](const std::string& s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument("trailing text");
      return v;
    } catch (const std::exception&) {
      throw bad("'" + s + "' is not a number");
    }
  };
  if (head == "uniform") {
    if (!arg.empty()) throw bad("takes no argument");
    return GraphPrior::uniform(p);
  }
  if (head == "binomial") {
    if (arg.empty()) throw bad("needs an edge probability, e.g. binomial:0.3");
    return GraphPrior::binomial(p, to_double(arg));
  }
  if (head == "hub") {
    if (arg.empty())
      return GraphPrior::hub_encouraging(p, static_cast<int>(std::llround(0.9 * p)), 1.0);
    const auto comma = arg.find(',');
    if (comma == std::string::npos) throw bad("needs hub:<chi>,<psi>");
    const double chi = to_double(arg.substr(0, comma));
    if (chi != std::floor(chi)) throw bad("chi must be an integer");
    return GraphPrior::hub_encouraging(p, static_cast<int>(chi), to_double(arg.substr(comma + 1)));
  }
  if (head == "maxdeg") {
    if (!arg.empty()) throw bad("takes no argument");
    return GraphPrior::max_degree_exp(p);
  }
  if (head == "factored") {
    if (arg.empty()) throw bad("needs a CSV path");
    SymMatrix w = SymMatrix::from_dense(read_csv_file(arg));
    if (w.dim() != p) throw bad("weight matrix dimension does not match p");
    return GraphPrior::factored(EdgeLogWeights{w});
  }
  throw bad("unknown prior kind");
}

inline ProposalSystem parse_system(const std::string& text) {
  if (text == "a") return ProposalSystem::kWeightedDedupe;
  if (text == "b") return ProposalSystem::kUnusedWeights;
  if (text == "c") return ProposalSystem::kNoWeights;
  if (text == "d") return ProposalSystem::kRejection;
  throw validation_error("system flag must be one of a, b, c, d");
}

inline GraphClass parse_graph_class(const std::string& text) {
  if (text == "forest") return GraphClass::kForest;
  if (text == "tree") return GraphClass::kTree;
  throw validation_error("class flag must be forest or tree");
}

inline double resolved_r(const ExperimentSpec& spec) {
  return spec.r ? *spec.r : 0.99 / std::sqrt(spec.p - 1.0);
}

namespace detail {

inline void check_spec(const ExperimentSpec& spec) {
  if (spec.p < 2) throw validation_error("experiment: need at least two nodes");
  if (spec.n < 0) throw validation_error("experiment: negative sample count");
  if (spec.replicates < 1) throw validation_error("experiment: need at least one replicate");
  if (spec.dscale && !(*spec.dscale > 0.0))
    throw validation_error("experiment: dscale must be positive");
  const double r = resolved_r(spec);
  if (!std::isfinite(r) || std::abs(r) >= 1.0)
    throw validation_error("experiment: partial correlation must lie inside (-1, 1)");
  if (spec.shape == GraphShape::kStar &&
      !star_validity(std::vector<double>(spec.p - 1, r)))
    throw validation_error(
        "experiment: star partial correlations this strong admit no covariance");
  if (spec.shape == GraphShape::kFile && spec.shape_file.empty())
    throw validation_error("experiment: file shape needs a graph path");
  if (spec.shape == GraphShape::kGnm &&
      (spec.shape_edges < 0 || spec.shape_edges > pair_count(spec.p)))
    throw validation_error("experiment: gnm edge count out of range");
}

// Seed streams per replicate: 0 draws the truth (gnm shape), 1 draws the
// data, 2 drives the explorer. Raw replicate seeds are spec.seed + index.
inline std::uint64_t truth_stream(std::uint64_t seed) { return derived_seed(seed, 0); }
inline std::uint64_t data_stream(std::uint64_t seed) { return derived_seed(seed, 1); }
inline std::uint64_t explorer_stream(std::uint64_t seed) { return derived_seed(seed, 2); }

}  // namespace detail

struct GeneratedData {
  Eigen::MatrixXd data;  // n rows, p columns
  LabeledGraph truth;
};

inline GeneratedData gen_data(const ExperimentSpec& spec) {
  detail::check_spec(spec);
  LabeledGraph truth(spec.p);
  switch (spec.shape) {
    case GraphShape::kStar:
      truth = star_graph(spec.p, 0);
      break;
    case GraphShape::kChain:
      truth = chain_graph(spec.p);
      break;
    case GraphShape::kFile:
      truth = read_graph_file(spec.shape_file);
      if (truth.p() != spec.p)
        throw validation_error("experiment: graph file dimension does not match p");
      break;
    case GraphShape::kGnm:
      truth = sample_gnm(spec.p, spec.shape_edges, detail::truth_stream(spec.seed));
      break;
  }
  SymMatrix sigma = cov_from_graph(truth, resolved_r(spec));
  return {sample_mvn(sigma, spec.n, detail::data_stream(spec.seed)), std::move(truth)};
}

// Per-replicate quality measures, in the order they are reported: how many
// distinct graphs the explorer scored, the expected true-positive rate under
// the normalized ledger, the true-positive rate of the best-scoring graph,
// that graph's unnormalized log posterior, and the sum over the ten best.
struct ReplicateRow {
  int replicate = 0;
  std::uint64_t seed = 0;
  long long graphs_visited = 0;
  double etpr = 0.0;
  double top_tpr = 0.0;
  double top_score = 0.0;
  double top10_score_sum = 0.0;
};

struct MetricSummary {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

struct ExperimentSummary {
  MetricSummary graphs_visited;
  MetricSummary etpr;
  MetricSummary top_tpr;
  MetricSummary top_score;
  MetricSummary top10_score_sum;
};

namespace detail {

// Quartiles by linear interpolation at q(n-1) over the sorted values.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (pos - lo) * (sorted[lo + 1] - sorted[lo]);
}

inline MetricSummary summarize(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return {quantile_sorted(values, 0.5), quantile_sorted(values, 0.25),
          quantile_sorted(values, 0.75)};
}

}  // namespace detail

inline ExperimentSummary aggregate_rows(const std::vector<ReplicateRow>& rows) {
  if (rows.empty()) throw validation_error("aggregate_rows: no rows");
  auto column = [&rows](auto member) {
    std::vector<double> values;
    values.reserve(rows.size());
    for (const ReplicateRow& row : rows) values.push_back(static_cast<double>(row.*member));
    return values;
  };
  ExperimentSummary s;
  s.graphs_visited = detail::summarize(column(&ReplicateRow::graphs_visited));
  s.etpr = detail::summarize(column(&ReplicateRow::etpr));
  s.top_tpr = detail::summarize(column(&ReplicateRow::top_tpr));
  s.top_score = detail::summarize(column(&ReplicateRow::top_score));
  s.top10_score_sum = detail::summarize(column(&ReplicateRow::top10_score_sum));
  return s;
}

namespace detail {

// Fixed start that is neither the star nor the chain the data may have come
// from: a path visiting even nodes then odd ones. Forest runs start empty.
inline LabeledGraph experiment_start(int p, GraphClass family) {
  if (family == GraphClass::kForest) return LabeledGraph(p);
  std::vector<int> order;
  for (int v = 0; v < p; v += 2) order.push_back(v);
  for (int v = 1; v < p; v += 2) order.push_back(v);
  LabeledGraph g(p);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) g.add_edge(order[i], order[i + 1]);
  return g;
}

inline ReplicateRow run_replicate(const ExperimentSpec& spec, int index) {
  ExperimentSpec rep = spec;
  rep.seed = spec.seed + static_cast<std::uint64_t>(index);
  GeneratedData gd = gen_data(rep);
  if (gd.truth.edge_count() == 0)
    throw validation_error("experiment: the truth graph has no edges, rates are undefined");

  const int p = spec.p;
  HiwParams params(spec.delta,
                   SymMatrix::scaled_identity(p, spec.dscale.value_or(spec.delta + 2.0)));
  HiwModel model(std::move(params), SuffStats::from_data(gd.data));
  GraphPrior prior = parse_prior(spec.prior, p);
  LabeledGraph start = experiment_start(p, spec.family);

  PosteriorRecord rec;
  if (spec.algorithm == ExplorerKind::kSss) {
    SssConfig cfg = spec.sss;
    cfg.seed = explorer_stream(rep.seed);
    rec = sss_run(spec.family, start, cfg, model, prior);
  } else {
    McmcConfig cfg = spec.mcmc;
    cfg.seed = explorer_stream(rep.seed);
    rec = mcmc_run(spec.family, start, cfg, model, prior);
  }

  // Scores straight from the ledger when it holds them; otherwise (sampler
  // ledgers hold visit counts) score the visited graphs directly.
  GraphScorer scorer(spec.family, model, prior);
  std::vector<double> scores;
  scores.reserve(rec.ledger.size());
  BitPattern best_bits(p);
  double best_score = -std::numeric_limits<double>::infinity();
  bool first = true;
  for (const auto& [bits, value] : rec.ledger) {
    const double score =
        rec.ledger_holds_log_scores ? value : scorer.score(LabeledGraph::from_bits(p, bits));
    scores.push_back(score);
    if (first || score > best_score || (score == best_score && bits < best_bits)) {
      best_bits = bits;
      best_score = score;
      first = false;
    }
  }

  ReplicateRow row;
  row.replicate = index;
  row.seed = rep.seed;
  row.graphs_visited = static_cast<long long>(rec.ledger.size());
  row.etpr = *posterior_expected_metrics(rec, gd.truth).etpr;
  LabeledGraph top = LabeledGraph::from_bits(p, best_bits);
  row.top_tpr = require_rate(rates(confusion(top, gd.truth)).recall, "true-positive rate");
  row.top_score = best_score;
  std::sort(scores.begin(), scores.end(), std::greater<double>());
  const std::size_t take = std::min<std::size_t>(10, scores.size());
  for (std::size_t i = 0; i < take; ++i) row.top10_score_sum += scores[i];
  return row;
}

}  // namespace detail

struct ExperimentResult {
  std::vector<ReplicateRow> rows;  // ordered by replicate index
  ExperimentSummary summary;
};

// Replicate i reruns the spec with seed + i: fresh dataset, fresh explorer
// run, same everything else. Rows come back in index order no matter how
// the replicates were scheduled.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  detail::check_spec(spec);
  std::vector<std::future<ReplicateRow>> parts;
  parts.reserve(spec.replicates);
  for (int i = 0; i < spec.replicates; ++i)
    parts.push_back(std::async(std::launch::async,
                               [&spec, i] { return detail::run_replicate(spec, i); }));
  ExperimentResult out;
  out.rows.reserve(spec.replicates);
  for (auto& part : parts) out.rows.push_back(part.get());
  out.summary = aggregate_rows(out.rows);
  return out;
}

}  // namespace treegm
