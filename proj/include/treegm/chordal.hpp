#pragma once

// Triangulation by elimination, recursive thinning of fill edges (the two
// corrected one-edge-at-a-time loops), the maximum-cardinality-search
// decomposability test, clique/separator extraction, and exhaustive counting
// of decomposable graphs.

#include <algorithm>
#include <utility>
#include <vector>

#include "treegm/graph.hpp"

namespace treegm {

namespace detail {

// Mutable adjacency matrix view used by elimination and thinning.
class AdjMatrix {
 public:
  explicit AdjMatrix(const LabeledGraph& g) : p_(g.p()), a_(static_cast<size_t>(p_) * p_, 0) {
    for (auto [u, v] : g.edges()) link(u, v);
  }
  int p() const { return p_; }
  bool has(int u, int v) const { return a_[static_cast<size_t>(u) * p_ + v] != 0; }
  void link(int u, int v) { a_[static_cast<size_t>(u) * p_ + v] = a_[static_cast<size_t>(v) * p_ + u] = 1; }
  void unlink(int u, int v) { a_[static_cast<size_t>(u) * p_ + v] = a_[static_cast<size_t>(v) * p_ + u] = 0; }

  std::vector<int> common_neighbors(int u, int v) const {
    std::vector<int> c;
    for (int w = 0; w < p_; ++w)
      if (w != u && w != v && has(u, w) && has(v, w)) c.push_back(w);
    return c;
  }

  bool complete(const std::vector<int>& nodes) const {
    for (size_t i = 0; i < nodes.size(); ++i)
      for (size_t j = 0; j < i; ++j)
        if (!has(nodes[i], nodes[j])) return false;
    return true;
  }

 private:
  int p_;
  std::vector<char> a_;
};

}  // namespace detail

// MCS (maximum cardinality search): visit the node with the most visited
// neighbors; the graph is decomposable iff for every node, its earlier
// neighbors minus the latest one are all adjacent to that latest one.
inline bool mcs_is_decomposable(const LabeledGraph& g) {
  int p = g.p();
  auto adj = g.adjacency();
  std::vector<int> weight(p, 0), pos(p, -1), order(p);
  std::vector<char> visited(p, 0);
  for (int step = 0; step < p; ++step) {
    int best = -1;
    for (int v = 0; v < p; ++v)
      if (!visited[v] && (best < 0 || weight[v] > weight[best])) best = v;
    visited[best] = 1;
    pos[best] = step;
    order[step] = best;
    for (int nbr : adj[best])
      if (!visited[nbr]) ++weight[nbr];
  }
  detail::AdjMatrix m(g);
  for (int step = 1; step < p; ++step) {
    int v = order[step];
    int latest = -1;
    for (int nbr : adj[v])
      if (pos[nbr] < step && (latest < 0 || pos[nbr] > pos[latest])) latest = nbr;
    if (latest < 0) continue;
    for (int nbr : adj[v])
      if (pos[nbr] < step && nbr != latest && !m.has(nbr, latest)) return false;
  }
  return true;
}

// A graph together with the fill edges that make it chordal.
struct Triangulation {
  LabeledGraph base;
  std::vector<std::pair<int, int>> fill;  // canonical (u < v), sorted

  Triangulation(LabeledGraph base_in, std::vector<std::pair<int, int>> fill_in)
      : base(std::move(base_in)), fill(std::move(fill_in)) {
    for (auto& [u, v] : fill) {
      if (u > v) std::swap(u, v);
    }
    std::sort(fill.begin(), fill.end());
    if (std::adjacent_find(fill.begin(), fill.end()) != fill.end())
      throw validation_error("Triangulation: duplicate fill edge");
    for (auto [u, v] : fill)
      if (base.has_edge(u, v)) throw validation_error("Triangulation: fill edge already in base");
    if (!mcs_is_decomposable(combined())) throw validation_error("Triangulation: base plus fill is not chordal");
  }

  LabeledGraph combined() const {
    LabeledGraph g = base;
    for (auto [u, v] : fill) g.add_edge(u, v);
    return g;
  }
};

// The elimination game: process nodes in the given order, connecting the
// remaining neighbors of each node as it is taken out.
inline Triangulation eliminate(const LabeledGraph& g, const std::vector<int>& ordering) {
  int p = g.p();
  if (static_cast<int>(ordering.size()) != p) throw validation_error("eliminate: ordering length mismatch");
  std::vector<char> seen(p, 0);
  for (int v : ordering) {
    if (v < 0 || v >= p || seen[v]) throw validation_error("eliminate: not a permutation");
    seen[v] = 1;
  }

  detail::AdjMatrix m(g);
  std::vector<char> gone(p, 0);
  std::vector<std::pair<int, int>> fill;
  for (int v : ordering) {
    std::vector<int> nbrs;
    for (int w = 0; w < p; ++w)
      if (!gone[w] && w != v && m.has(v, w)) nbrs.push_back(w);
    for (size_t i = 0; i < nbrs.size(); ++i)
      for (size_t j = 0; j < i; ++j)
        if (!m.has(nbrs[i], nbrs[j])) {
          m.link(nbrs[i], nbrs[j]);
          fill.emplace_back(std::min(nbrs[i], nbrs[j]), std::max(nbrs[i], nbrs[j]));
        }
    gone[v] = 1;
  }
  return Triangulation(g, std::move(fill));
}

// Greedy minimum-degree elimination ordering over the live graph (fill edges
// included as they appear); ties go to the lowest node index.
inline std::vector<int> min_degree_ordering(const LabeledGraph& g) {
  int p = g.p();
  detail::AdjMatrix m(g);
  std::vector<char> gone(p, 0);
  std::vector<int> ordering;
  ordering.reserve(p);
  for (int step = 0; step < p; ++step) {
    int best = -1, bestdeg = p + 1;
    for (int v = 0; v < p; ++v) {
      if (gone[v]) continue;
      int deg = 0;
      for (int w = 0; w < p; ++w)
        if (!gone[w] && w != v && m.has(v, w)) ++deg;
      if (deg < bestdeg) {
        best = v;
        bestdeg = deg;
      }
    }
    std::vector<int> nbrs;
    for (int w = 0; w < p; ++w)
      if (!gone[w] && w != best && m.has(best, w)) nbrs.push_back(w);
    for (size_t i = 0; i < nbrs.size(); ++i)
      for (size_t j = 0; j < i; ++j)
        if (!m.has(nbrs[i], nbrs[j])) m.link(nbrs[i], nbrs[j]);
    gone[best] = 1;
    ordering.push_back(best);
  }
  return ordering;
}

namespace detail {

// Shared core of the two thinning loops. An edge (x, y) may come out of the
// fill exactly when the common neighbors of x and y form a complete subgraph;
// the graph is updated after every single removal. `use_candidates` switches
// between rechecking everything per run and only the edges next to a removal.
inline Triangulation thin(const Triangulation& t, bool use_candidates) {
  AdjMatrix m(t.combined());
  std::vector<std::pair<int, int>> fill = t.fill;  // constructor sorted these
  std::vector<std::pair<int, int>> candidates = fill;
  while (true) {
    std::vector<int> b;  // endpoints of edges removed this run
    const std::vector<std::pair<int, int>> check = use_candidates ? candidates : fill;
    for (auto [x, y] : check) {
      if (m.complete(m.common_neighbors(x, y))) {
        m.unlink(x, y);
        fill.erase(std::find(fill.begin(), fill.end(), std::make_pair(x, y)));
        b.push_back(x);
        b.push_back(y);
      }
    }
    if (b.empty()) break;
    if (use_candidates) {
      candidates.clear();
      for (auto [x, y] : fill)
        if (std::find(b.begin(), b.end(), x) != b.end() || std::find(b.begin(), b.end(), y) != b.end())
          candidates.emplace_back(x, y);
    }
  }
  return Triangulation(t.base, std::move(fill));
}

}  // namespace detail

// Every run rechecks all remaining fill edges in lexicographic order.
inline Triangulation recursive_thin_ii(const Triangulation& t) { return detail::thin(t, false); }

// Each run only rechecks fill edges touching a node whose neighborhood
// changed on the previous run. Can need an extra run compared to the other
// variant but checks fewer edges.
inline Triangulation recursive_thin_iii(const Triangulation& t) { return detail::thin(t, true); }

// Cliques in perfect-sequence order plus separators with multiplicity
// (empty separators join the connected components).
struct CliqueSeparatorDecomposition {
  std::vector<std::vector<int>> cliques;     // each sorted ascending
  std::vector<std::vector<int>> separators;  // k-1 entries for k cliques
};

inline CliqueSeparatorDecomposition clique_separator_decomposition(const LabeledGraph& g) {
  if (!mcs_is_decomposable(g)) throw validation_error("clique_separator_decomposition: graph is not decomposable");
  int p = g.p();
  auto adj = g.adjacency();

  // MCS again, collecting each node's earlier-visited neighborhood.
  std::vector<int> weight(p, 0), pos(p, -1), order(p);
  std::vector<char> visited(p, 0);
  std::vector<std::vector<int>> earlier(p);
  for (int step = 0; step < p; ++step) {
    int best = -1;
    for (int v = 0; v < p; ++v)
      if (!visited[v] && (best < 0 || weight[v] > weight[best])) best = v;
    visited[best] = 1;
    pos[best] = step;
    order[step] = best;
    for (int nbr : adj[best])
      if (!visited[nbr]) ++weight[nbr];
  }
  for (int v = 0; v < p; ++v)
    for (int nbr : adj[v])
      if (pos[nbr] < pos[v]) earlier[v].push_back(nbr);

  // Candidate cliques: node plus earlier neighborhood; keep the maximal ones.
  std::vector<std::vector<int>> cand;
  for (int step = 0; step < p; ++step) {
    int v = order[step];
    std::vector<int> c = earlier[v];
    c.push_back(v);
    std::sort(c.begin(), c.end());
    cand.push_back(std::move(c));
  }
  std::vector<std::vector<int>> cliques;
  for (size_t i = 0; i < cand.size(); ++i) {
    bool maximal = true;
    for (size_t j = 0; j < cand.size() && maximal; ++j) {
      if (i == j || cand[j].size() < cand[i].size()) continue;
      if (cand[i] == cand[j] && j < i) maximal = false;  // drop duplicates, keep first
      else if (cand[i] != cand[j] && std::includes(cand[j].begin(), cand[j].end(), cand[i].begin(), cand[i].end()))
        maximal = false;
    }
    if (maximal) cliques.push_back(cand[i]);
  }
  std::sort(cliques.begin(), cliques.end());

  int k = static_cast<int>(cliques.size());
  auto overlap = [&](int i, int j) {
    std::vector<int> s;
    std::set_intersection(cliques[i].begin(), cliques[i].end(), cliques[j].begin(), cliques[j].end(),
                          std::back_inserter(s));
    return s;
  };

  // Junction forest: maximum-weight spanning forest of the clique graph
  // under intersection size, lexicographic tie-break.
  struct JEdge {
    int w, i, j;
  };
  std::vector<JEdge> jedges;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      int w = static_cast<int>(overlap(i, j).size());
      if (w > 0) jedges.push_back({w, i, j});
    }
  std::sort(jedges.begin(), jedges.end(),
            [](const JEdge& a, const JEdge& b) { return std::tie(b.w, a.i, a.j) < std::tie(a.w, b.i, b.j); });
  DisjointSets ds(k);
  std::vector<std::vector<int>> jt(k);
  for (const auto& e : jedges)
    if (ds.unite(e.i, e.j)) {
      jt[e.i].push_back(e.j);
      jt[e.j].push_back(e.i);
    }

  // Breadth-first over each junction-tree component gives a perfect
  // sequence; the separator of a clique is its overlap with its parent.
  CliqueSeparatorDecomposition out;
  std::vector<char> seen(k, 0);
  bool first_component = true;
  for (int root = 0; root < k; ++root) {
    if (seen[root]) continue;
    if (!first_component) out.separators.emplace_back();  // empty separator between components
    first_component = false;
    std::vector<std::pair<int, int>> queue{{root, -1}};  // clique, parent
    seen[root] = 1;
    for (size_t head = 0; head < queue.size(); ++head) {
      auto [c, parent] = queue[head];
      out.cliques.push_back(cliques[c]);
      if (parent >= 0) out.separators.push_back(overlap(c, parent));
      for (int nbr : jt[c])
        if (!seen[nbr]) {
          seen[nbr] = 1;
          queue.emplace_back(nbr, c);
        }
    }
  }

  // perfect-sequence identity: clique sizes minus separator sizes = p
  long long total = 0;
  for (const auto& c : out.cliques) total += static_cast<long long>(c.size());
  for (const auto& s : out.separators) total -= static_cast<long long>(s.size());
  if (total != p) throw numeric_error("clique_separator_decomposition: size identity failed");
  return out;
}

// Exhaustive count of decomposable graphs on n labeled nodes.
inline long long count_decomposable(int n) {
  if (n < 1 || n > 7) throw validation_error("count_decomposable: n must be in [1, 7]");
  int m = pair_count(n);
  std::vector<std::pair<int, int>> pairs;
  for (int v = 1; v < n; ++v)
    for (int u = 0; u < v; ++u) pairs.emplace_back(u, v);

  long long count = 0;
  for (uint32_t mask = 0; mask < (uint32_t{1} << m); ++mask) {
    // adjacency as per-node bitmasks; n <= 7 fits easily
    uint8_t adj[7] = {0, 0, 0, 0, 0, 0, 0};
    for (int b = 0; b < m; ++b)
      if (mask >> b & 1) {
        adj[pairs[b].first] |= uint8_t(1u << pairs[b].second);
        adj[pairs[b].second] |= uint8_t(1u << pairs[b].first);
      }
    // MCS with the same latest-earlier-neighbor check as above
    uint8_t visited = 0;
    int pos[7], order[7], weight[7] = {0, 0, 0, 0, 0, 0, 0};
    for (int step = 0; step < n; ++step) {
      int best = -1;
      for (int v = 0; v < n; ++v)
        if (!(visited >> v & 1) && (best < 0 || weight[v] > weight[best])) best = v;
      visited |= uint8_t(1u << best);
      pos[best] = step;
      order[step] = best;
      for (int w = 0; w < n; ++w)
        if ((adj[best] >> w & 1) && !(visited >> w & 1)) ++weight[w];
    }
    bool ok = true;
    for (int step = 1; step < n && ok; ++step) {
      int v = order[step];
      uint8_t earlier = 0;
      for (int w = 0; w < n; ++w)
        if ((adj[v] >> w & 1) && pos[w] < step) earlier |= uint8_t(1u << w);
      if (!earlier) continue;
      int latest = -1;
      for (int w = 0; w < n; ++w)
        if ((earlier >> w & 1) && (latest < 0 || pos[w] > pos[latest])) latest = w;
      uint8_t rest = earlier & uint8_t(~(1u << latest));
      if ((rest & adj[latest]) != rest) ok = false;
    }
    if (ok) ++count;
  }
  return count;
}

}  // namespace treegm
