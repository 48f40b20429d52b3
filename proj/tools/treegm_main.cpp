// Command-line front end. One subcommand per workflow step: synthetic data,
// point estimates, posterior summaries, stochastic search, triangulation
// thinning, cycle censuses, family enumeration, scoring against a truth, and
// replicated experiment sweeps. JSON outputs carry full provenance (version,
// flags, seed, wall time); CSV and graph-text outputs are plain artifacts.
// Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "treegm/chordal.hpp"
#include "treegm/experiment.hpp"
#include "treegm/spanning.hpp"
#include "treegm/treedist.hpp"

using treegm::validation_error;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct WallTimer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void write_text(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw validation_error("cannot open for writing: " + path);
  out << content;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string graph_text(const treegm::LabeledGraph& g) {
  std::ostringstream os;
  treegm::write_graph(os, g);
  return os.str();
}

json edges_json(const treegm::LabeledGraph& g) {
  json edges = json::array();
  for (auto [u, v] : g.edges()) edges.push_back({u, v});
  return edges;
}

json matrix_json(const treegm::SymMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.dim(); ++j) row.push_back(i == j ? 0.0 : m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json provenance(const std::string& command, json flags, uint64_t seed, const WallTimer& timer) {
  json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["flags"] = std::move(flags);
  j["seed"] = seed;
  j["wall_seconds"] = timer.elapsed();
  return j;
}

// Hyperparameters of the inverse-Wishart layer, shared by every subcommand
// that touches a model. D defaults to (delta + 2) times the identity.
struct HyperFlags {
  double delta = 3.0;
  double dscale = 0.0;
  std::string dfile;
  CLI::Option* dscale_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--delta", delta, "degrees of freedom (default 3)");
    dscale_opt = cmd->add_option("--dscale", dscale, "D = dscale * I (default delta + 2)");
    CLI::Option* df = cmd->add_option("--dfile", dfile, "read D from a CSV matrix");
    dscale_opt->excludes(df);
    df->excludes(dscale_opt);
  }

  double effective_scale() const { return dscale_opt->count() ? dscale : delta + 2.0; }

  treegm::HiwParams resolve(int p) const {
    if (!dfile.empty()) {
      treegm::SymMatrix d = treegm::SymMatrix::from_dense(treegm::read_csv_file(dfile));
      if (d.dim() != p)
        throw validation_error("--dfile: matrix is " + std::to_string(d.dim()) +
                               "-dimensional, data has " + std::to_string(p) + " variables");
      return treegm::HiwParams(delta, std::move(d));
    }
    return treegm::HiwParams(delta, treegm::SymMatrix::scaled_identity(p, effective_scale()));
  }

  void record(json& flags) const {
    flags["delta"] = delta;
    if (!dfile.empty())
      flags["dfile"] = dfile;
    else
      flags["dscale"] = effective_scale();
  }
};

treegm::LabeledGraph load_truth(const std::string& path, int p) {
  treegm::LabeledGraph t = treegm::read_graph_file(path);
  if (t.p() != p)
    throw validation_error("truth graph has " + std::to_string(t.p()) + " nodes, expected " +
                           std::to_string(p));
  return t;
}

// ---------------------------------------------------------------- gen-data

struct GenDataArgs {
  std::string shape = "star";
  int p = 0;
  int n = 0;
  double r = 0.0;
  CLI::Option* r_opt = nullptr;
  long long edges = 0;
  std::string graph_file;
  uint64_t seed = 0;
  std::string out_data;
  std::string out_truth;
  std::string out = "-";
};

treegm::GraphShape shape_from_name(const std::string& name) {
  if (name == "star") return treegm::GraphShape::kStar;
  if (name == "chain") return treegm::GraphShape::kChain;
  if (name == "file") return treegm::GraphShape::kFile;
  if (name == "gnm") return treegm::GraphShape::kGnm;
  throw validation_error("shape must be star, chain, file, or gnm");
}

int run_gen_data(const GenDataArgs& a) {
  WallTimer timer;
  treegm::ExperimentSpec spec;
  spec.shape = shape_from_name(a.shape);
  spec.p = a.p;
  spec.n = a.n;
  if (a.r_opt->count()) spec.r = a.r;
  spec.shape_edges = a.edges;
  spec.shape_file = a.graph_file;
  spec.seed = a.seed;

  treegm::GeneratedData gd = treegm::gen_data(spec);
  treegm::write_csv_file(a.out_data, gd.data);
  treegm::write_graph_file(a.out_truth, gd.truth);

  json flags{{"shape", a.shape}, {"p", a.p},       {"n", a.n},
             {"r", treegm::resolved_r(spec)},      {"out-data", a.out_data},
             {"out-truth", a.out_truth}};
  if (spec.shape == treegm::GraphShape::kGnm) flags["edges"] = a.edges;
  if (spec.shape == treegm::GraphShape::kFile) flags["graph-file"] = a.graph_file;
  json j = provenance("gen-data", std::move(flags), a.seed, timer);
  j["rows"] = gd.data.rows();
  j["cols"] = gd.data.cols();
  j["truth_edges"] = gd.truth.edge_count();
  write_text(a.out, j.dump(2) + "\n");
  return 0;
}

// ------------------------------------------------------ chow-liu, map-forest

struct SelectArgs {
  std::string data;
  std::string out = "-";
  std::string prior = "uniform";
  HyperFlags hyper;
};

int run_chow_liu(const SelectArgs& a) {
  Eigen::MatrixXd x = treegm::read_csv_file(a.data);
  treegm::LabeledGraph tree = treegm::kruskal_max_tree(treegm::chow_liu_gaussian_weights(x));
  write_text(a.out, graph_text(tree));
  return 0;
}

int run_map_forest(const SelectArgs& a) {
  Eigen::MatrixXd x = treegm::read_csv_file(a.data);
  const int p = static_cast<int>(x.cols());
  treegm::GraphPrior prior = treegm::parse_prior(a.prior, p);
  treegm::LabeledGraph forest =
      treegm::map_forest(a.hyper.resolve(p), treegm::SuffStats::from_data(x), prior);
  write_text(a.out, graph_text(forest));
  return 0;
}

// -------------------------------------------------------------- mtt-summary

struct MttArgs {
  std::string data;
  std::string truth;
  std::string out = "-";
  std::string prior = "uniform";
  HyperFlags hyper;
};

int run_mtt_summary(const MttArgs& a) {
  WallTimer timer;
  Eigen::MatrixXd x = treegm::read_csv_file(a.data);
  const int p = static_cast<int>(x.cols());
  treegm::GraphPrior prior = treegm::parse_prior(a.prior, p);
  auto pw = prior.is_factored();
  if (!pw)
    throw validation_error("mtt-summary needs a prior that factors over edges "
                           "(uniform, binomial, or factored)");

  treegm::HiwModel model(a.hyper.resolve(p), treegm::SuffStats::from_data(x));
  treegm::EdgeLogWeights lw = model.edge_log_weight_matrix();
  for (int v = 1; v < p; ++v)
    for (int u = 0; u < v; ++u) lw.w.set(u, v, lw.w(u, v) + pw->w(u, v));
  treegm::TreePosteriorSummary summary =
      treegm::edge_probabilities(treegm::FactoredTreeDist(std::move(lw)));

  json flags{{"data", a.data}, {"prior", a.prior}};
  a.hyper.record(flags);
  if (!a.truth.empty()) flags["truth"] = a.truth;
  json j = provenance("mtt-summary", std::move(flags), 0, timer);
  j["p"] = p;
  j["log_z"] = summary.log_z;
  j["edge_prob"] = matrix_json(summary.edge_prob);
  j["expected_degree"] = summary.expected_degree;
  if (!a.truth.empty()) {
    auto [etp, etpr] = treegm::expected_true_positives(summary, load_truth(a.truth, p));
    j["etp"] = etp;
    j["etpr"] = etpr;
  }
  write_text(a.out, j.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------- sss, mcmc

struct ExploreArgs {
  std::string data;
  std::string graph_class = "tree";
  long long omega = 1;
  long long iters = 0;
  double seconds = 0.0;
  double alpha = 1.0;
  double sigma_g = 1.0;
  double sigma_ij = 0.1;
  std::string system = "a";
  uint64_t seed = 0;
  int top = 10;
  std::string start;
  std::string truth;
  std::string trace;
  std::string out = "-";
  std::string prior = "uniform";
  HyperFlags hyper;
};

std::string trace_csv(const std::vector<double>& trace) {
  std::string csv = "iteration,score\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    csv += std::to_string(i) + "," + fmt17(trace[i]) + "\n";
  return csv;
}

treegm::LabeledGraph start_graph(const ExploreArgs& a, treegm::GraphClass cls, int p) {
  if (!a.start.empty()) return load_truth(a.start, p);
  // default start: the empty forest, or the 0-1-2-... chain for tree runs
  return cls == treegm::GraphClass::kForest ? treegm::LabeledGraph(p) : treegm::chain_graph(p);
}

json ledger_json(const treegm::PosteriorRecord& rec) {
  json entries = json::array();
  for (const auto& [bits, value] : rec.ledger) {
    json entry;
    entry["edges"] = edges_json(treegm::LabeledGraph::from_bits(rec.p, bits));
    entry["value"] = value;
    entries.push_back(std::move(entry));
  }
  // fixed order so equal runs emit equal bytes
  std::sort(entries.begin(), entries.end(),
            [](const json& x, const json& y) { return x["edges"].dump() < y["edges"].dump(); });
  json l;
  l["holds_log_scores"] = rec.ledger_holds_log_scores;
  l["entries"] = std::move(entries);
  return l;
}

void emit_explorer_json(json j, const treegm::PosteriorRecord& rec, const ExploreArgs& a,
                        const char* value_key) {
  j["p"] = rec.p;
  j["class"] = a.graph_class;
  json top = json::array();
  for (const auto& sg : rec.best) {
    json row;
    row["edges"] = edges_json(sg.graph);
    row[value_key] = sg.score;
    top.push_back(std::move(row));
  }
  j["top"] = std::move(top);
  treegm::SymMatrix probs = treegm::posterior_edge_probabilities(rec);
  j["edge_prob"] = matrix_json(probs);
  if (!a.truth.empty()) {
    treegm::ExpectedMetrics em =
        treegm::posterior_expected_metrics(rec, load_truth(a.truth, rec.p));
    if (em.etpr)
      j["etpr"] = *em.etpr;
    else
      j["etpr"] = nullptr;
  }
  j["ledger"] = ledger_json(rec);
  if (!a.trace.empty()) write_text(a.trace, trace_csv(rec.trace));
  write_text(a.out, j.dump(2) + "\n");
}

json explore_flags(const ExploreArgs& a, bool sss) {
  json flags{{"data", a.data}, {"class", a.graph_class}, {"prior", a.prior}};
  if (sss) {
    flags["omega"] = a.omega;
    flags["alpha"] = a.alpha;
  } else {
    flags["sigma-g"] = a.sigma_g;
    flags["sigma-ij"] = a.sigma_ij;
  }
  flags["iters"] = a.iters;
  if (sss) flags["seconds"] = a.seconds;
  flags["system"] = a.system;
  flags["top"] = a.top;
  if (!a.start.empty()) flags["start"] = a.start;
  if (!a.truth.empty()) flags["truth"] = a.truth;
  if (!a.trace.empty()) flags["trace"] = a.trace;
  a.hyper.record(flags);
  return flags;
}

int run_sss(const ExploreArgs& a) {
  WallTimer timer;
  Eigen::MatrixXd x = treegm::read_csv_file(a.data);
  const int p = static_cast<int>(x.cols());
  treegm::GraphClass cls = treegm::parse_graph_class(a.graph_class);
  treegm::GraphPrior prior = treegm::parse_prior(a.prior, p);
  treegm::HiwModel model(a.hyper.resolve(p), treegm::SuffStats::from_data(x));

  treegm::SssConfig cfg;
  cfg.omega = a.omega;
  cfg.iterations = a.iters;
  cfg.seconds = a.seconds;
  cfg.system = treegm::parse_system(a.system);
  cfg.alpha = a.alpha;
  cfg.top_k = a.top;
  cfg.seed = a.seed;

  treegm::PosteriorRecord rec = treegm::sss_run(cls, start_graph(a, cls, p), cfg, model, prior);

  json j = provenance("sss", explore_flags(a, true), a.seed, timer);
  // both budgets are flags; exactly one may be set, and it is the binding one
  json budget;
  budget["kind"] = a.iters > 0 ? "iters" : "seconds";
  budget["iterations_done"] = rec.trace.size();
  if (a.seconds > 0.0) budget["seconds_requested"] = a.seconds;
  j["budget"] = std::move(budget);
  emit_explorer_json(std::move(j), rec, a, "score");
  return 0;
}

int run_mcmc(const ExploreArgs& a) {
  WallTimer timer;
  Eigen::MatrixXd x = treegm::read_csv_file(a.data);
  const int p = static_cast<int>(x.cols());
  treegm::GraphClass cls = treegm::parse_graph_class(a.graph_class);
  treegm::GraphPrior prior = treegm::parse_prior(a.prior, p);
  treegm::HiwModel model(a.hyper.resolve(p), treegm::SuffStats::from_data(x));

  treegm::McmcConfig cfg;
  cfg.sigma_g = a.sigma_g;
  cfg.sigma_ij = a.sigma_ij;
  cfg.iterations = a.iters;
  cfg.system = treegm::parse_system(a.system);
  cfg.top_k = a.top;
  cfg.seed = a.seed;

  treegm::PosteriorRecord rec = treegm::mcmc_run(cls, start_graph(a, cls, p), cfg, model, prior);

  json j = provenance("mcmc", explore_flags(a, false), a.seed, timer);
  json budget;
  budget["kind"] = "iters";
  budget["iterations_done"] = rec.trace.size();
  j["budget"] = std::move(budget);
  emit_explorer_json(std::move(j), rec, a, "visits");
  return 0;
}

// --------------------------------------------------------------------- thin

struct ThinArgs {
  std::string graph;
  std::string order = "natural";
  std::string algorithm = "ii";
  std::string out = "-";
};

int run_thin(const ThinArgs& a) {
  treegm::LabeledGraph g = treegm::read_graph_file(a.graph);

  std::vector<int> ordering;
  if (a.order == "natural") {
    ordering.resize(g.p());
    for (int v = 0; v < g.p(); ++v) ordering[v] = v;
  } else if (a.order == "mindeg") {
    ordering = treegm::min_degree_ordering(g);
  } else {
    throw validation_error("--order must be natural or mindeg");
  }

  treegm::Triangulation filled = treegm::eliminate(g, ordering);
  treegm::Triangulation thinned = a.algorithm == "ii"    ? treegm::recursive_thin_ii(filled)
                                  : a.algorithm == "iii" ? treegm::recursive_thin_iii(filled)
                                  : throw validation_error("--algorithm must be ii or iii");

  // certify minimality: dropping any single fill edge must break chordality
  int necessary = 0;
  for (std::size_t skip = 0; skip < thinned.fill.size(); ++skip) {
    treegm::LabeledGraph trial = thinned.base;
    for (std::size_t i = 0; i < thinned.fill.size(); ++i)
      if (i != skip) trial.add_edge(thinned.fill[i].first, thinned.fill[i].second);
    if (!treegm::mcs_is_decomposable(trial)) ++necessary;
  }

  std::string report;
  if (thinned.fill.empty())
    report = "# minimal: no fill needed, the input graph is already chordal\n";
  else if (necessary == static_cast<int>(thinned.fill.size()))
    report = thinned.fill.size() == 1
                 ? std::string("# minimal: the single fill edge is necessary for chordality\n")
                 : "# minimal: each of the " + std::to_string(thinned.fill.size()) +
                       " fill edges is necessary for chordality\n";
  else
    report = "# NOT minimal: only " + std::to_string(necessary) + " of " +
             std::to_string(thinned.fill.size()) + " fill edges are necessary\n";

  write_text(a.out, graph_text(treegm::LabeledGraph(g.p(), thinned.fill)) + report);
  return 0;
}

// ------------------------------------------------------------- count-cycles

struct CountCyclesArgs {
  std::vector<double> gnp;  // n, edge probability
  std::vector<long long> gnm;
  long long samples = 5000;
  uint64_t seed = 0;
  std::string out = "-";
};

int run_count_cycles(const CountCyclesArgs& a) {
  const bool is_gnp = !a.gnp.empty();
  if (is_gnp == !a.gnm.empty())
    throw validation_error("count-cycles: give exactly one of --gnp and --gnm");

  treegm::RandomGraphModel model =
      is_gnp ? treegm::RandomGraphModel::gnp(static_cast<int>(a.gnp[0]), a.gnp[1])
             : treegm::RandomGraphModel::gnm(static_cast<int>(a.gnm[0]), a.gnm[1]);
  treegm::CycleMoments moments = treegm::monte_carlo_cycles(model, a.samples, a.seed);

  // limit formula for the matching family; degenerate densities have no
  // cycles in the limit, so the lambda column is 0 without consulting it
  const double c = model.density_constant();
  std::optional<treegm::GraphFamily> family;
  if (c > 0.0)
    family = is_gnp ? treegm::GraphFamily::gnp(c) : treegm::GraphFamily::gnm(c);

  std::string csv = "length,empirical_mean,lambda\n";
  for (int len = 3; len <= model.nodes(); ++len) {
    auto it = moments.mean.find(len);
    const double mean = it == moments.mean.end() ? 0.0 : it->second;
    const double lambda = family ? family->lambda(len) : 0.0;
    csv += std::to_string(len) + "," + fmt17(mean) + "," + fmt17(lambda) + "\n";
  }
  write_text(a.out, csv);
  return 0;
}

// ---------------------------------------------------------------- enumerate

struct EnumerateArgs {
  std::string family = "trees";
  int p = 0;
  bool list = false;
  std::string out = "-";
};

int run_enumerate(const EnumerateArgs& a) {
  WallTimer timer;
  json flags{{"family", a.family}, {"p", a.p}, {"list", a.list}};
  json j = provenance("enumerate", std::move(flags), 0, timer);
  j["family"] = a.family;
  j["p"] = a.p;

  if (a.family == "decomposable") {
    if (a.list)
      throw validation_error("enumerate: decomposable graphs are counted, not listed");
    j["count"] = treegm::count_decomposable(a.p);
  } else {
    std::vector<treegm::LabeledGraph> all = a.family == "trees" ? treegm::enumerate_trees(a.p)
                                            : a.family == "forests"
                                                ? treegm::enumerate_forests(a.p)
                                                : throw validation_error(
                                                      "--family must be trees, forests, or "
                                                      "decomposable");
    j["count"] = all.size();
    if (a.list) {
      json graphs = json::array();
      for (const auto& g : all) graphs.push_back(edges_json(g));
      j["graphs"] = std::move(graphs);
    }
  }
  j["wall_seconds"] = timer.elapsed();
  write_text(a.out, j.dump(2) + "\n");
  return 0;
}

// --------------------------------------------------------------------- eval

struct EvalArgs {
  std::string ledger;
  std::string truth;
  std::string out = "-";
};

treegm::PosteriorRecord record_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open ledger json: " + path);
  json j;
  try {
    in >> j;
    treegm::PosteriorRecord rec;
    rec.p = j.at("p").get<int>();
    const json& ledger = j.at("ledger");
    rec.ledger_holds_log_scores = ledger.at("holds_log_scores").get<bool>();
    for (const json& entry : ledger.at("entries")) {
      auto edges = entry.at("edges").get<std::vector<std::pair<int, int>>>();
      treegm::LabeledGraph g(rec.p, edges);
      rec.ledger[g.bits()] = entry.at("value").get<double>();
    }
    return rec;
  } catch (const json::exception& e) {
    throw validation_error("ledger json " + path + ": " + e.what());
  }
}

int run_eval(const EvalArgs& a) {
  treegm::PosteriorRecord rec = record_from_json(a.ledger);
  if (rec.ledger.empty()) throw validation_error("eval: the ledger holds no graphs");
  treegm::LabeledGraph truth = load_truth(a.truth, rec.p);

  // best entry: highest value, bit-pattern order breaking ties
  const auto* best = &*rec.ledger.begin();
  for (const auto& entry : rec.ledger)
    if (entry.second > best->second ||
        (entry.second == best->second && entry.first < best->first))
      best = &entry;
  treegm::LabeledGraph top = treegm::LabeledGraph::from_bits(rec.p, best->first);

  treegm::Confusion c = treegm::confusion(top, truth);
  treegm::ClassificationRates r = treegm::rates(c);
  treegm::ExpectedMetrics em = treegm::posterior_expected_metrics(rec, truth);

  auto cell = [](const std::optional<double>& v) { return v ? fmt17(*v) : "n/a"; };
  std::string csv = "metric,value\n";
  csv += "tp," + std::to_string(c.tp) + "\n";
  csv += "fp," + std::to_string(c.fp) + "\n";
  csv += "fn," + std::to_string(c.fn) + "\n";
  csv += "tn," + std::to_string(c.tn) + "\n";
  csv += "precision," + cell(r.precision) + "\n";
  csv += "recall," + cell(r.recall) + "\n";
  csv += "specificity," + cell(r.specificity) + "\n";
  csv += "false_positive_rate," + cell(r.false_positive_rate) + "\n";
  csv += "false_negative_rate," + cell(r.false_negative_rate) + "\n";
  csv += "accuracy," + cell(r.accuracy) + "\n";
  csv += "error_rate," + cell(r.error_rate) + "\n";
  csv += "etp," + fmt17(em.etp) + "\n";
  csv += "efp," + fmt17(em.efp) + "\n";
  csv += "efn," + fmt17(em.efn) + "\n";
  csv += "etn," + fmt17(em.etn) + "\n";
  csv += "etpr," + cell(em.etpr) + "\n";
  write_text(a.out, csv);
  return 0;
}

// --------------------------------------------------------------- experiment

struct ExperimentArgs {
  GenDataArgs data;  // reuses shape/p/n/r/edges/graph-file fields
  int replicates = 1;
  std::string algorithm = "sss";
  ExploreArgs explore;  // shares omega/iters/system/... fields
  uint64_t seed = 0;
  std::string rows;
  std::string out = "-";
};

std::string rows_csv(const std::vector<treegm::ReplicateRow>& rows) {
  std::string csv = "replicate,seed,graphs_visited,etpr,top_tpr,top_score,top10_score_sum\n";
  for (const auto& row : rows) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%d,%llu,%lld,%s,%s,%s,%s\n", row.replicate,
                  static_cast<unsigned long long>(row.seed), row.graphs_visited,
                  fmt17(row.etpr).c_str(), fmt17(row.top_tpr).c_str(),
                  fmt17(row.top_score).c_str(), fmt17(row.top10_score_sum).c_str());
    csv += buf;
  }
  return csv;
}

json summary_json(const treegm::ExperimentSummary& s) {
  auto one = [](const treegm::MetricSummary& m) {
    return json{{"median", m.median}, {"q25", m.q25}, {"q75", m.q75}};
  };
  return json{{"graphs_visited", one(s.graphs_visited)},
              {"etpr", one(s.etpr)},
              {"top_tpr", one(s.top_tpr)},
              {"top_score", one(s.top_score)},
              {"top10_score_sum", one(s.top10_score_sum)}};
}

int run_experiment(const ExperimentArgs& a) {
  WallTimer timer;
  treegm::ExperimentSpec spec;
  spec.shape = shape_from_name(a.data.shape);
  spec.p = a.data.p;
  spec.n = a.data.n;
  if (a.data.r_opt->count()) spec.r = a.data.r;
  spec.shape_edges = a.data.edges;
  spec.shape_file = a.data.graph_file;
  spec.replicates = a.replicates;
  spec.family = treegm::parse_graph_class(a.explore.graph_class);
  spec.prior = a.explore.prior;
  spec.delta = a.explore.hyper.delta;
  if (!a.explore.hyper.dfile.empty())
    throw validation_error("experiment: D must be scalar (--dscale), not --dfile");
  if (a.explore.hyper.dscale_opt->count()) spec.dscale = a.explore.hyper.dscale;
  spec.seed = a.seed;

  if (a.algorithm == "sss") {
    spec.algorithm = treegm::ExplorerKind::kSss;
    spec.sss.omega = a.explore.omega;
    spec.sss.iterations = a.explore.iters;
    spec.sss.seconds = a.explore.seconds;
    spec.sss.system = treegm::parse_system(a.explore.system);
    spec.sss.alpha = a.explore.alpha;
    spec.sss.top_k = a.explore.top;
  } else if (a.algorithm == "mcmc") {
    spec.algorithm = treegm::ExplorerKind::kMcmc;
    if (a.explore.seconds > 0.0)
      throw validation_error("experiment: the sampler takes an iteration budget, not --seconds");
    spec.mcmc.sigma_g = a.explore.sigma_g;
    spec.mcmc.sigma_ij = a.explore.sigma_ij;
    spec.mcmc.iterations = a.explore.iters;
    spec.mcmc.system = treegm::parse_system(a.explore.system);
    spec.mcmc.top_k = a.explore.top;
  } else {
    throw validation_error("--algorithm must be sss or mcmc");
  }

  treegm::ExperimentResult res = treegm::run_experiment(spec);
  if (!a.rows.empty()) write_text(a.rows, rows_csv(res.rows));

  json flags{{"shape", a.data.shape},
             {"p", a.data.p},
             {"n", a.data.n},
             {"r", treegm::resolved_r(spec)},
             {"replicates", a.replicates},
             {"algorithm", a.algorithm},
             {"class", a.explore.graph_class},
             {"prior", a.explore.prior},
             {"system", a.explore.system},
             {"iters", a.explore.iters},
             {"seconds", a.explore.seconds},
             {"omega", a.explore.omega},
             {"top", a.explore.top},
             {"delta", spec.delta},
             {"dscale", spec.dscale.value_or(spec.delta + 2.0)}};
  if (spec.shape == treegm::GraphShape::kGnm) flags["edges"] = a.data.edges;
  if (spec.shape == treegm::GraphShape::kFile) flags["graph-file"] = a.data.graph_file;
  if (!a.rows.empty()) flags["rows"] = a.rows;
  json j = provenance("experiment", std::move(flags), a.seed, timer);
  j["replicates"] = a.replicates;
  j["summary"] = summary_json(res.summary);
  write_text(a.out, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian tree and forest graphical models: fitting, search, and experiments"};
  app.require_subcommand(1);

  GenDataArgs gen;
  CLI::App* cmd_gen = app.add_subcommand("gen-data", "draw a synthetic dataset from a graph");
  cmd_gen->add_option("--shape", gen.shape, "star|chain|file|gnm (default star)");
  cmd_gen->add_option("--p", gen.p, "number of variables")->required();
  cmd_gen->add_option("--n", gen.n, "number of observations")->required();
  gen.r_opt = cmd_gen->add_option("--r", gen.r, "partial correlation (default 0.99/sqrt(p-1))");
  cmd_gen->add_option("--edges", gen.edges, "edge count for --shape=gnm");
  cmd_gen->add_option("--graph-file", gen.graph_file, "truth graph for --shape=file");
  cmd_gen->add_option("--seed", gen.seed, "rng seed");
  cmd_gen->add_option("--out-data", gen.out_data, "dataset CSV path")->required();
  cmd_gen->add_option("--out-truth", gen.out_truth, "truth graph path")->required();
  cmd_gen->add_option("-o,--out", gen.out, "provenance JSON (default stdout)");

  SelectArgs chow;
  CLI::App* cmd_chow = app.add_subcommand("chow-liu", "maximum-likelihood spanning tree");
  cmd_chow->add_option("--data", chow.data, "dataset CSV")->required();
  cmd_chow->add_option("-o,--out", chow.out, "graph output (default stdout)");

  SelectArgs mapf;
  CLI::App* cmd_mapf = app.add_subcommand("map-forest", "highest-posterior forest");
  cmd_mapf->add_option("--data", mapf.data, "dataset CSV")->required();
  cmd_mapf->add_option("--prior", mapf.prior, "graph prior (must factor over edges)");
  mapf.hyper.attach(cmd_mapf);
  cmd_mapf->add_option("-o,--out", mapf.out, "graph output (default stdout)");

  MttArgs mtt;
  CLI::App* cmd_mtt = app.add_subcommand("mtt-summary", "exact tree-posterior summary");
  cmd_mtt->add_option("--data", mtt.data, "dataset CSV")->required();
  cmd_mtt->add_option("--prior", mtt.prior, "graph prior (must factor over edges)");
  cmd_mtt->add_option("--truth", mtt.truth, "truth graph for ETP/ETPR");
  mtt.hyper.attach(cmd_mtt);
  cmd_mtt->add_option("-o,--out", mtt.out, "JSON output (default stdout)");

  auto attach_explore = [](CLI::App* cmd, ExploreArgs& e, bool sss) {
    cmd->add_option("--data", e.data, "dataset CSV")->required();
    cmd->add_option("--class", e.graph_class, "forest|tree (default tree)");
    if (sss) {
      cmd->add_option("--omega", e.omega, "neighbors scored per step");
      cmd->add_option("--seconds", e.seconds, "wall-clock budget");
      cmd->add_option("--alpha", e.alpha, "selection sharpness");
    } else {
      cmd->add_option("--sigma-g", e.sigma_g, "new-edge covariance proposal scale");
      cmd->add_option("--sigma-ij", e.sigma_ij, "covariance refresh scale");
    }
    cmd->add_option("--iters", e.iters, "iteration budget");
    cmd->add_option("--system", e.system, "move bookkeeping: a|b|c|d");
    cmd->add_option("--seed", e.seed, "rng seed");
    cmd->add_option("--top", e.top, "top-k list size (default 10)");
    cmd->add_option("--start", e.start, "start graph file (default: chain, or empty forest)");
    cmd->add_option("--truth", e.truth, "truth graph for ETPR");
    cmd->add_option("--trace", e.trace, "per-iteration score trace CSV path");
    cmd->add_option("--prior", e.prior, "graph prior");
    e.hyper.attach(cmd);
    cmd->add_option("-o,--out", e.out, "JSON output (default stdout)");
  };

  ExploreArgs sss;
  CLI::App* cmd_sss = app.add_subcommand("sss", "shotgun stochastic search over graphs");
  attach_explore(cmd_sss, sss, true);

  ExploreArgs mcmc;
  CLI::App* cmd_mcmc = app.add_subcommand("mcmc", "Markov chain over graphs and covariances");
  attach_explore(cmd_mcmc, mcmc, false);

  ThinArgs thin;
  CLI::App* cmd_thin = app.add_subcommand("thin", "minimal triangulation by fill thinning");
  cmd_thin->add_option("--graph", thin.graph, "input graph file")->required();
  cmd_thin->add_option("--order", thin.order, "elimination order: natural|mindeg");
  cmd_thin->add_option("--algorithm", thin.algorithm, "thinning pass: ii|iii");
  cmd_thin->add_option("-o,--out", thin.out, "fill edges + report (default stdout)");

  CountCyclesArgs cycles;
  CLI::App* cmd_cycles = app.add_subcommand("count-cycles", "cycle census of random graphs");
  CLI::Option* gnp_opt =
      cmd_cycles->add_option("--gnp", cycles.gnp, "n and edge probability")->expected(2);
  CLI::Option* gnm_opt =
      cmd_cycles->add_option("--gnm", cycles.gnm, "n and edge count")->expected(2);
  gnp_opt->excludes(gnm_opt);
  gnm_opt->excludes(gnp_opt);
  cmd_cycles->add_option("--samples", cycles.samples, "number of graphs drawn (default 5000)");
  cmd_cycles->add_option("--seed", cycles.seed, "rng seed");
  cmd_cycles->add_option("-o,--out", cycles.out, "CSV output (default stdout)");

  EnumerateArgs enumerate;
  CLI::App* cmd_enum = app.add_subcommand("enumerate", "count or list small graph families");
  cmd_enum->add_option("--family", enumerate.family, "trees|forests|decomposable");
  cmd_enum->add_option("--p", enumerate.p, "number of nodes")->required();
  cmd_enum->add_flag("--list", enumerate.list, "include the edge lists");
  cmd_enum->add_option("-o,--out", enumerate.out, "JSON output (default stdout)");

  EvalArgs eval;
  CLI::App* cmd_eval = app.add_subcommand("eval", "score a run's ledger against a truth graph");
  cmd_eval->add_option("--ledger", eval.ledger, "explorer output JSON")->required();
  cmd_eval->add_option("--truth", eval.truth, "truth graph file")->required();
  cmd_eval->add_option("-o,--out", eval.out, "metrics CSV (default stdout)");

  ExperimentArgs exp;
  CLI::App* cmd_exp = app.add_subcommand("experiment", "replicated recovery experiment");
  cmd_exp->add_option("--shape", exp.data.shape, "star|chain|file|gnm (default star)");
  cmd_exp->add_option("--p", exp.data.p, "number of variables")->required();
  cmd_exp->add_option("--n", exp.data.n, "observations per replicate")->required();
  exp.data.r_opt =
      cmd_exp->add_option("--r", exp.data.r, "partial correlation (default 0.99/sqrt(p-1))");
  cmd_exp->add_option("--edges", exp.data.edges, "edge count for --shape=gnm");
  cmd_exp->add_option("--graph-file", exp.data.graph_file, "truth graph for --shape=file");
  cmd_exp->add_option("--replicates", exp.replicates, "independent repeats (default 1)");
  cmd_exp->add_option("--algorithm", exp.algorithm, "sss|mcmc (default sss)");
  cmd_exp->add_option("--class", exp.explore.graph_class, "forest|tree (default tree)");
  cmd_exp->add_option("--omega", exp.explore.omega, "sss neighbors per step");
  cmd_exp->add_option("--iters", exp.explore.iters, "iteration budget");
  cmd_exp->add_option("--seconds", exp.explore.seconds, "sss wall-clock budget per replicate");
  cmd_exp->add_option("--alpha", exp.explore.alpha, "sss selection sharpness");
  cmd_exp->add_option("--sigma-g", exp.explore.sigma_g, "mcmc new-edge proposal scale");
  cmd_exp->add_option("--sigma-ij", exp.explore.sigma_ij, "mcmc covariance refresh scale");
  cmd_exp->add_option("--system", exp.explore.system, "move bookkeeping: a|b|c|d");
  cmd_exp->add_option("--top", exp.explore.top, "top-k list size");
  cmd_exp->add_option("--prior", exp.explore.prior, "graph prior");
  cmd_exp->add_option("--delta", exp.explore.hyper.delta, "degrees of freedom (default 3)");
  exp.explore.hyper.dscale_opt =
      cmd_exp->add_option("--dscale", exp.explore.hyper.dscale, "D = dscale * I");
  cmd_exp->add_option("--seed", exp.seed, "base seed; replicate i uses seed + i");
  cmd_exp->add_option("--rows", exp.rows, "per-replicate CSV path");
  cmd_exp->add_option("-o,--out", exp.out, "summary JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cmd_gen) return run_gen_data(gen);
    if (*cmd_chow) return run_chow_liu(chow);
    if (*cmd_mapf) return run_map_forest(mapf);
    if (*cmd_mtt) return run_mtt_summary(mtt);
    if (*cmd_sss) return run_sss(sss);
    if (*cmd_mcmc) return run_mcmc(mcmc);
    if (*cmd_thin) return run_thin(thin);
    if (*cmd_cycles) return run_count_cycles(cycles);
    if (*cmd_enum) return run_enumerate(enumerate);
    if (*cmd_eval) return run_eval(eval);
    if (*cmd_exp) return run_experiment(exp);
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const treegm::numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
