// Random-graph experiments around the "sparse graphs are locally tree-like"
// question. Erdos-Renyi samplers, an exact census of all simple cycles built
// from a spanning-forest chord basis, the Poisson limit formulas the census
// gets compared against, and a Monte Carlo driver that does the comparison.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <bit>

#include "treegm/common.hpp"
#include "treegm/graph.hpp"
#include "treegm/stores.hpp"

namespace treegm {

// Counts of simple cycles keyed by length. Lengths run from 3 to p.
struct CycleCensus {
  std::map<int, long long> counts;

  long long total() const {
    long long t = 0;
    for (auto [len, cnt] : counts) t += cnt;
    return t;
  }

  // Shortest cycle length, or 0 for an acyclic graph.
  int girth() const { return counts.empty() ? 0 : counts.begin()->first; }
};

// Limiting mean cycle counts by length, all positive.
struct PoissonParams {
  std::map<int, double> lambdas;
};

// One draw where each pair is an edge independently with the given probability.
inline LabeledGraph sample_gnp(int n, double prob, std::uint64_t seed) {
  if (n < 1) throw validation_error("sample_gnp: need at least one node");
  if (!(prob >= 0.0 && prob <= 1.0))
    throw validation_error("sample_gnp: edge probability must lie in [0, 1]");
  LabeledGraph g(n);
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int v = 1; v < n; ++v)
    for (int u = 0; u < v; ++u)
      if (unif(rng) < prob) g.add_edge(u, v);
  return g;
}

// One draw chosen uniformly among all graphs with exactly m edges.
inline LabeledGraph sample_gnm(int n, long long m, std::uint64_t seed) {
  if (n < 1) throw validation_error("sample_gnm: need at least one node");
  const long long total = 1LL * n * (n - 1) / 2;
  if (m < 0 || m > total)
    throw validation_error("sample_gnm: edge count must lie in [0, n(n-1)/2]");
  LabeledGraph g(n);
  Rng rng(seed);
  for (long long idx : detail::distinct_sample(total, m, rng)) {
    auto [u, v] = pair_from_index(static_cast<int>(idx));
    g.add_edge(u, v);
  }
  return g;
}

// Exact count of every simple cycle, by length. A spanning forest is grown
// first; each chord closes one fundamental cycle, and those form a basis of
// the cycle space over GF(2). Every other member of the space is a symmetric
// difference of basis elements, so a Gray-code walk visits all of them with
// one basis flip per step. A member is a single simple cycle exactly when
// its edges touch every incident node twice and form one component.
//
// Guards: at most 40 nodes, and cycle-space dimension |E| - p + components
// at most 25, since the walk is exponential in the dimension.
inline CycleCensus enumerate_cycles(const LabeledGraph& g) {
  const int p = g.p();
  if (p > 40) throw validation_error("enumerate_cycles: at most 40 nodes");
  const auto& edges = g.edges();
  const int m = static_cast<int>(edges.size());
  const int dim = m - p + component_count(g);
  if (dim > 25)
    throw validation_error("enumerate_cycles: cycle space dimension above 25");

  CycleCensus census;
  if (dim <= 0) return census;

  // Spanning forest by breadth-first search; non-tree edges become chords.
  std::vector<std::vector<std::pair<int, int>>> adj(p);  // (neighbor, edge id)
  for (int e = 0; e < m; ++e) {
    adj[edges[e].first].emplace_back(edges[e].second, e);
    adj[edges[e].second].emplace_back(edges[e].first, e);
  }
  std::vector<int> parent(p, -1), parent_edge(p, -1), depth(p, 0);
  std::vector<char> seen(p, 0), tree_edge(m, 0);
  std::vector<int> order;
  order.reserve(p);
  for (int root = 0; root < p; ++root) {
    if (seen[root]) continue;
    seen[root] = 1;
    order.push_back(root);
    for (std::size_t head = order.size() - 1; head < order.size(); ++head) {
      int u = order[head];
      for (auto [w, e] : adj[u]) {
        if (seen[w]) continue;
        seen[w] = 1;
        parent[w] = u;
        parent_edge[w] = e;
        depth[w] = depth[u] + 1;
        tree_edge[e] = 1;
        order.push_back(w);
      }
    }
  }

  // Fundamental cycle per chord: the chord plus the tree path between its ends.
  std::vector<std::vector<int>> basis;
  basis.reserve(dim);
  for (int e = 0; e < m; ++e) {
    if (tree_edge[e]) continue;
    std::vector<int> cyc{e};
    int a = edges[e].first, b = edges[e].second;
    while (depth[a] > depth[b]) {
      cyc.push_back(parent_edge[a]);
      a = parent[a];
    }
    while (depth[b] > depth[a]) {
      cyc.push_back(parent_edge[b]);
      b = parent[b];
    }
    while (a != b) {
      cyc.push_back(parent_edge[a]);
      cyc.push_back(parent_edge[b]);
      a = parent[a];
      b = parent[b];
    }
    basis.push_back(std::move(cyc));
  }

  // Gray-code walk over all nonzero combinations. Degree bookkeeping is
  // incremental; the connectivity check runs only on 2-regular candidates.
  std::vector<char> in_set(m, 0);
  std::vector<int> deg(p, 0);
  std::vector<int> nbr1(p, -1), nbr2(p, -1);
  std::vector<int> set_edges;
  set_edges.reserve(m);
  long long edges_in = 0, touched = 0, bad = 0;
  auto bump = [&](int x, int delta) {
    int d = deg[x];
    touched -= (d > 0);
    bad -= (d > 0 && d != 2);
    d += delta;
    deg[x] = d;
    touched += (d > 0);
    bad += (d > 0 && d != 2);
  };
  const unsigned long long limit = 1ULL << dim;
  for (unsigned long long s = 1; s < limit; ++s) {
    for (int e : basis[std::countr_zero(s)]) {
      int delta = in_set[e] ? -1 : 1;
      in_set[e] ^= 1;
      edges_in += delta;
      bump(edges[e].first, delta);
      bump(edges[e].second, delta);
    }
    if (bad != 0 || edges_in != touched) continue;
    // Union of node-disjoint cycles; keep it only if it is one cycle.
    set_edges.clear();
    for (int e = 0; e < m; ++e)
      if (in_set[e]) set_edges.push_back(e);
    for (int e : set_edges) {
      auto [a, b] = edges[e];
      (nbr1[a] == -1 ? nbr1[a] : nbr2[a]) = b;
      (nbr1[b] == -1 ? nbr1[b] : nbr2[b]) = a;
    }
    const int start = edges[set_edges.front()].first;
    int prev = -1, cur = start;
    long long walked = 0;
    do {
      int next = (nbr1[cur] == prev) ? nbr2[cur] : nbr1[cur];
      prev = cur;
      cur = next;
      ++walked;
    } while (cur != start);
    if (walked == touched) ++census.counts[static_cast<int>(edges_in)];
    for (int e : set_edges) {
      auto [a, b] = edges[e];
      nbr1[a] = nbr2[a] = nbr1[b] = nbr2[b] = -1;
    }
  }
  return census;
}

// Sparse random-graph family with Poisson-limited cycle counts. Every family
// has limiting means of the form base^i / (2i); the factories pin the base:
// c for edge-probability p ~ c/n, 2c for edge-count M ~ c n, d - 1 for
// d-regular graphs, and the size-biased mean branching ratio for a fixed
// degree sequence. None of the limits involve n.
class GraphFamily {
 public:
  static GraphFamily gnp(double c) {
    if (!(c > 0.0) || !std::isfinite(c))
      throw validation_error("graph family: density constant must be positive");
    return GraphFamily(c);
  }

  static GraphFamily gnm(double c) {
    if (!(c > 0.0) || !std::isfinite(c))
      throw validation_error("graph family: density constant must be positive");
    return GraphFamily(2.0 * c);
  }

  static GraphFamily regular(int d) {
    if (d < 3) throw validation_error("graph family: regular degree must be at least 3");
    return GraphFamily(static_cast<double>(d - 1));
  }

  static GraphFamily degree_sequence(std::vector<int> degrees) {
    if (degrees.empty())
      throw validation_error("graph family: empty degree sequence");
    std::sort(degrees.begin(), degrees.end(), std::greater<int>());
    if (!erdos_gallai_check(degrees))
      throw validation_error("graph family: degree sequence is not graphical");
    double pairs = 0.0, stubs = 0.0;
    for (int d : degrees) {
      stubs += d;
      pairs += 0.5 * d * (d - 1);
    }
    if (stubs <= 0.0 || pairs <= 0.0)
      throw validation_error("graph family: degree sequence admits no cycles");
    return GraphFamily(pairs / (stubs / 2.0));
  }

  // Limiting mean number of cycles of the given length.
  double lambda(int length) const {
    if (length < 3) throw validation_error("graph family: cycle lengths start at 3");
    return std::pow(base_, length) / (2.0 * length);
  }

 private:
  explicit GraphFamily(double base) : base_(base) {}
  double base_;
};

inline PoissonParams poisson_params(const GraphFamily& family,
                                    const std::vector<int>& lengths) {
  PoissonParams out;
  for (int len : lengths) out.lambdas[len] = family.lambda(len);
  return out;
}

// Probability that a random d-regular graph has girth beyond g, to leading
// order. Girths of 2 or less get the empty sum, hence probability one.
inline double girth_tail_probability(int d, int g) {
  if (d < 3) throw validation_error("girth_tail_probability: degree must be at least 3");
  double sum = 0.0;
  for (int r = 3; r <= g; ++r) sum += std::pow(d - 1.0, r) / (2.0 * r);
  return std::exp(-sum);
}

namespace detail {

// splitmix64 of (seed, index): draw i gets a seed any worker can recompute
// without touching shared generator state.
inline std::uint64_t derived_seed(std::uint64_t seed, long long index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// A concrete finite model the Monte Carlo experiment draws from.
class RandomGraphModel {
 public:
  static RandomGraphModel gnp(int n, double prob) {
    if (n < 1) throw validation_error("random graph model: need at least one node");
    if (!(prob >= 0.0 && prob <= 1.0))
      throw validation_error("random graph model: edge probability must lie in [0, 1]");
    RandomGraphModel md;
    md.gnp_ = true;
    md.n_ = n;
    md.prob_ = prob;
    return md;
  }

  static RandomGraphModel gnm(int n, long long edges) {
    if (n < 1) throw validation_error("random graph model: need at least one node");
    if (edges < 0 || edges > 1LL * n * (n - 1) / 2)
      throw validation_error("random graph model: edge count must lie in [0, n(n-1)/2]");
    RandomGraphModel md;
    md.gnp_ = false;
    md.n_ = n;
    md.m_ = edges;
    return md;
  }

  LabeledGraph sample(std::uint64_t seed) const {
    return gnp_ ? sample_gnp(n_, prob_, seed) : sample_gnm(n_, m_, seed);
  }

  int nodes() const { return n_; }

  // Density constant matching this model to its asymptotic family: np for
  // the edge-probability model, M/n for the fixed-edge-count model.
  double density_constant() const {
    return gnp_ ? prob_ * n_ : static_cast<double>(m_) / n_;
  }

 private:
  RandomGraphModel() = default;
  bool gnp_ = true;
  int n_ = 1;
  double prob_ = 0.0;
  long long m_ = 0;
};

// Per-length sample moments of the cycle counts across draws.
struct CycleMoments {
  std::map<int, double> mean;
  std::map<int, double> variance;  // unbiased; 0 when there is a single draw
  long long samples = 0;
};

// Simple Monte Carlo estimate of the cycle-count distribution: draw graphs,
// census each one, average. Draw i uses derived_seed(seed, i), so the work
// splits across threads with no shared state and the result is identical to
// a serial pass; sums are integers, which keeps the merge order-free.
// Lengths that never occur are absent from the maps.
inline CycleMoments monte_carlo_cycles(const RandomGraphModel& model,
                                       long long samples, std::uint64_t seed) {
  if (samples < 1)
    throw validation_error("monte_carlo_cycles: need at least one sample");
  if (model.nodes() > 40)
    throw validation_error("monte_carlo_cycles: cycle enumeration caps nodes at 40");

  using Sums = std::map<int, std::pair<long long, long long>>;
  auto run_chunk = [&model, seed](long long lo, long long hi) {
    Sums acc;
    for (long long i = lo; i < hi; ++i) {
      CycleCensus census = enumerate_cycles(model.sample(detail::derived_seed(seed, i)));
      for (auto [len, cnt] : census.counts) {
        auto& cell = acc[len];
        cell.first += cnt;
        cell.second += cnt * cnt;
      }
    }
    return acc;
  };

  const long long workers =
      std::min<long long>(samples, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::future<Sums>> parts;
  parts.reserve(workers);
  for (long long w = 0; w < workers; ++w) {
    const long long lo = samples * w / workers;
    const long long hi = samples * (w + 1) / workers;
    parts.push_back(std::async(std::launch::async, run_chunk, lo, hi));
  }
  Sums total;
  for (auto& part : parts)
    for (auto [len, cell] : part.get()) {
      total[len].first += cell.first;
      total[len].second += cell.second;
    }

  CycleMoments out;
  out.samples = samples;
  const double n = static_cast<double>(samples);
  for (auto [len, cell] : total) {
    const double sum = static_cast<double>(cell.first);
    const double sumsq = static_cast<double>(cell.second);
    out.mean[len] = sum / n;
    out.variance[len] = samples < 2 ? 0.0 : (sumsq - sum * sum / n) / (n - 1.0);
  }
  return out;
}

}  // namespace treegm
