#pragma once

// Incremental stores for forests and trees under single-edge moves. The
// forest store keeps a node partition and a three-way edge partition
// (existing / addable / nonaddable) so a uniform legal move is one array
// lookup. The tree store keeps per-node subtree weights so edge-moves can be
// drawn uniformly over all moves rather than uniformly over edges.
//
// Both stores are single-writer structures; share only bit-pattern snapshots
// across threads.

#include <map>
#include <set>

#include "treegm/graph.hpp"

namespace treegm {

enum class EdgeState : uint8_t { kExisting, kAddable, kNonaddable };

// One legal forest move: insert u-v (directed v -> u internally) or delete u-v.
struct ForestMove {
  bool add;
  int u, v;
};

class ForestStore {
 public:
  explicit ForestStore(const LabeledGraph& g) : p_(g.p()), bits_(g.bits()) {
    parent_.assign(p_, -1);
    children_.assign(p_, {});
    part_of_.assign(p_, -1);

    // breadth-first search per component; a previously discovered child
    // means a second path to it, hence a cycle
    auto adjacency = g.adjacency();
    std::vector<char> undiscovered(p_, 1);
    for (int root = 0; root < p_; ++root) {
      if (!undiscovered[root]) continue;
      undiscovered[root] = 0;
      int label = next_label_++;
      members_[label] = {root};
      part_of_[root] = label;
      std::vector<int> waitlist = {root};
      while (!waitlist.empty()) {
        int current = waitlist.back();
        waitlist.pop_back();
        for (int w : adjacency[current]) {
          if (w == parent_[current]) continue;
          if (!undiscovered[w]) throw validation_error("ForestStore: graph has a cycle");
          undiscovered[w] = 0;
          parent_[w] = current;
          children_[current].insert(w);
          part_of_[w] = label;
          members_[label].push_back(w);
          waitlist.push_back(w);
        }
      }
    }

    state_.assign(pair_count(p_), 0);
    pos_.assign(pair_count(p_), 0);
    for (int v = 1; v < p_; ++v)
      for (int u = 0; u < v; ++u) {
        EdgeState st = g.has_edge(u, v)         ? EdgeState::kExisting
                       : part_of_[u] == part_of_[v] ? EdgeState::kNonaddable
                                                    : EdgeState::kAddable;
        int idx = pair_index(u, v);
        state_[idx] = static_cast<uint8_t>(st);
        pos_[idx] = static_cast<int>(items_[state_[idx]].size());
        items_[state_[idx]].push_back(idx);
      }
  }

  int p() const { return p_; }
  int parent(int v) const { return parent_.at(v); }
  const std::set<int>& children(int v) const { return children_.at(v); }
  int part_of(int v) const { return part_of_.at(v); }
  const std::vector<int>& part_members(int label) const { return members_.at(label); }
  int part_count() const { return static_cast<int>(members_.size()); }
  EdgeState edge_state(int u, int v) const { return static_cast<EdgeState>(state_[pair_index(u, v)]); }
  const BitPattern& bits() const { return bits_; }
  LabeledGraph graph() const { return LabeledGraph::from_bits(p_, bits_); }

  size_t existing_count() const { return items_[static_cast<int>(EdgeState::kExisting)].size(); }
  size_t addable_count() const { return items_[static_cast<int>(EdgeState::kAddable)].size(); }
  size_t nonaddable_count() const { return items_[static_cast<int>(EdgeState::kNonaddable)].size(); }

  std::vector<std::pair<int, int>> edges_in_state(EdgeState st) const {
    std::vector<std::pair<int, int>> out;
    for (int idx : items_[static_cast<int>(st)]) out.push_back(pair_from_index(idx));
    return out;
  }

  // v becomes u's parent; u's old root path is reversed so the merged
  // component stays a rooted tree
  void add_edge(int u, int v) {
    if (edge_state(u, v) != EdgeState::kAddable) throw validation_error("ForestStore: edge is not addable");

    int current = u, previous = v;
    bool first = true;
    while (true) {
      if (!first) children_[current].erase(previous);
      int next = parent_[current];
      parent_[current] = previous;
      if (next < 0) break;
      children_[current].insert(next);
      previous = current;
      current = next;
      first = false;
    }
    children_[v].insert(u);

    // all pairs bridging the two old parts stop being addable
    int from = part_of_[u], to = part_of_[v];
    for (int w : members_[from])
      for (int x : members_[to]) move_pair(pair_index(w, x), EdgeState::kNonaddable);
    move_pair(pair_index(u, v), EdgeState::kExisting);
    bits_.set(pair_index(u, v));

    for (int w : members_[from]) {
      part_of_[w] = to;
      members_[to].push_back(w);
    }
    members_.erase(from);
  }

  void remove_edge(int u, int v) {
    if (edge_state(u, v) != EdgeState::kExisting) throw validation_error("ForestStore: edge does not exist");
    int child = parent_[u] == v ? u : v;
    int par = child == u ? v : u;

    parent_[child] = -1;
    children_[par].erase(child);

    // fan down from the orphaned child to find its new component
    std::vector<int> young = {child};
    for (size_t i = 0; i < young.size(); ++i)
      for (int w : children_[young[i]]) young.push_back(w);

    int old_label = part_of_[child];
    int fresh = next_label_++;
    std::vector<char> moved(p_, 0);
    for (int w : young) {
      moved[w] = 1;
      part_of_[w] = fresh;
    }
    auto& remain = members_[old_label];
    remain.erase(std::remove_if(remain.begin(), remain.end(), [&](int w) { return moved[w]; }), remain.end());
    members_[fresh] = young;

    for (int w : young)
      for (int x : remain)
        if (pair_index(w, x) != pair_index(u, v)) move_pair(pair_index(w, x), EdgeState::kAddable);
    move_pair(pair_index(u, v), EdgeState::kAddable);
    bits_.reset(pair_index(u, v));
  }

  // uniform over addable and existing edges together
  ForestMove uniform_move(Rng& rng) const {
    const auto& add = items_[static_cast<int>(EdgeState::kAddable)];
    const auto& del = items_[static_cast<int>(EdgeState::kExisting)];
    size_t total = add.size() + del.size();
    if (total == 0) throw validation_error("ForestStore: no legal move");
    std::uniform_int_distribution<size_t> pick(0, total - 1);
    size_t k = pick(rng);
    auto [u, v] = pair_from_index(k < add.size() ? add[k] : del[k - add.size()]);
    return {k < add.size(), u, v};
  }

  void apply(const ForestMove& m) { m.add ? add_edge(m.u, m.v) : remove_edge(m.u, m.v); }

 private:
  void move_pair(int idx, EdgeState to) {
    auto& src = items_[state_[idx]];
    int back = src.back();
    src[pos_[idx]] = back;
    pos_[back] = pos_[idx];
    src.pop_back();
    state_[idx] = static_cast<uint8_t>(to);
    pos_[idx] = static_cast<int>(items_[state_[idx]].size());
    items_[state_[idx]].push_back(idx);
  }

  int p_;
  BitPattern bits_;
  std::vector<int> parent_;
  std::vector<std::set<int>> children_;
  std::vector<int> part_of_;
  std::map<int, std::vector<int>> members_;  // part label -> member nodes
  int next_label_ = 0;                       // labels are never reused
  std::vector<uint8_t> state_;               // per pair index
  std::vector<int> pos_;                     // position inside its state's item list
  std::vector<int> items_[3];
};

// An edge-move on a tree: delete (old_child, old_parent), insert
// (new_child, new_parent). new_parent must land in the component keeping the
// root, new_child in the detached one.
struct TreeMove {
  int old_child, old_parent, new_child, new_parent;

  bool operator==(const TreeMove& o) const = default;

  // key identifying the move by its undirected edge pair
  std::pair<int, int> key() const {
    return {pair_index(old_child, old_parent), pair_index(new_child, new_parent)};
  }
};

class TreeStore {
 public:
  explicit TreeStore(const LabeledGraph& g) : p_(g.p()), bits_(g.bits()) {
    parent_.assign(p_, -1);
    children_.assign(p_, {});
    weight_.assign(p_, 0);

    auto adjacency = g.adjacency();
    std::vector<char> undiscovered(p_, 1);
    undiscovered[0] = 0;  // the root, fixed forever
    std::vector<int> order = {0};
    for (size_t i = 0; i < order.size(); ++i) {
      int current = order[i];
      for (int w : adjacency[current]) {
        if (w == parent_[current]) continue;
        if (!undiscovered[w]) throw validation_error("TreeStore: graph has a cycle");
        undiscovered[w] = 0;
        parent_[w] = current;
        children_[current].insert(w);
        order.push_back(w);
      }
    }
    if (static_cast<int>(order.size()) != p_) throw validation_error("TreeStore: graph is disconnected");

    // subtree sizes accumulate leaf-to-root
    for (size_t i = order.size(); i-- > 0;) {
      int v = order[i];
      weight_[v] += 1;
      if (v != 0) weight_[parent_[v]] += weight_[v];
    }
    weight_[0] = 0;  // root weight is never used
  }

  int p() const { return p_; }
  int parent(int v) const { return parent_.at(v); }
  const std::set<int>& children(int v) const { return children_.at(v); }
  int weight(int v) const {
    if (v <= 0 || v >= p_) throw validation_error("TreeStore: weight is kept for non-root nodes only");
    return weight_[v];
  }
  const BitPattern& bits() const { return bits_; }
  LabeledGraph graph() const { return LabeledGraph::from_bits(p_, bits_); }

  // v and all its descendants, ascending
  std::vector<int> subtree(int v) const {
    std::vector<int> nodes = {v};
    for (size_t i = 0; i < nodes.size(); ++i)
      for (int w : children_[nodes[i]]) nodes.push_back(w);
    std::sort(nodes.begin(), nodes.end());
    return nodes;
  }

  void apply_move(const TreeMove& m) {
    if (m.old_child <= 0 || m.old_child >= p_ || parent_[m.old_child] != m.old_parent)
      throw validation_error("TreeStore: move does not name a current edge");
    if (m.new_child < 0 || m.new_child >= p_ || m.new_parent < 0 || m.new_parent >= p_)
      throw validation_error("TreeStore: move names nodes outside the graph");
    if (m.new_child == m.old_child && m.new_parent == m.old_parent)
      throw validation_error("TreeStore: move leaves the tree unchanged");

    parent_[m.old_child] = -1;
    children_[m.old_parent].erase(m.old_child);

    std::vector<int> young = {m.old_child};
    std::vector<char> in_young(p_, 0);
    in_young[m.old_child] = 1;
    for (size_t i = 0; i < young.size(); ++i)
      for (int w : children_[young[i]]) {
        young.push_back(w);
        in_young[w] = 1;
      }
    int young_size = static_cast<int>(young.size());
    if (!in_young[m.new_child] || in_young[m.new_parent]) {
      parent_[m.old_child] = m.old_parent;
      children_[m.old_parent].insert(m.old_child);
      throw validation_error("TreeStore: reinsertion endpoints are on the wrong sides");
    }

    // walk up from new_child to old_child, reversing arrows; each node's new
    // weight is the detached size minus the former weight of the node below
    int current = m.new_child, previous = m.new_parent, below = 0;
    while (true) {
      int former = weight_[current];
      weight_[current] = young_size - below;
      below = former;
      int next = parent_[current];
      children_[current].erase(previous);
      parent_[current] = previous;
      if (current == m.old_child) break;
      children_[current].insert(next);
      previous = current;
      current = next;
    }

    // outside the detached part, only the paths meeting at the youngest
    // common ancestor shift, by the detached size
    std::vector<char> on_root_path(p_, 0);
    for (int w = m.old_parent; w >= 0; w = parent_[w]) on_root_path[w] = 1;
    int w = m.new_parent;
    while (!on_root_path[w]) {
      weight_[w] += young_size;
      w = parent_[w];
    }
    int common_ancestor = w;
    for (w = m.old_parent; w != common_ancestor; w = parent_[w]) weight_[w] -= young_size;

    children_[m.new_parent].insert(m.new_child);
    bits_.reset(pair_index(m.old_child, m.old_parent));
    bits_.set(pair_index(m.new_child, m.new_parent));
  }

 private:
  int p_;
  BitPattern bits_;
  std::vector<int> parent_;
  std::vector<std::set<int>> children_;
  std::vector<int> weight_;
};

// Moving the edge above v can land in W(v) * (p - W(v)) places; the count
// excludes the one reinsertion that recreates the same tree.
inline long long tree_count_moves(const TreeStore& s) {
  long long total = 0;
  for (int v = 1; v < s.p(); ++v) {
    long long w = s.weight(v);
    total += w * (s.p() - w) - 1;
  }
  return total;
}

// same count with the stay-put reinsertions included
inline long long tree_count_moves_including_stay(const TreeStore& s) {
  return tree_count_moves(s) + s.p() - 1;
}

namespace detail {

// move number k of the W*(p-W)-1 legal reinsertions of the edge above old_child
inline TreeMove move_from_rank(const TreeStore& s, int old_child, long long k) {
  std::vector<int> young = s.subtree(old_child);
  std::vector<int> old_comp;
  old_comp.reserve(s.p() - young.size());
  {
    size_t j = 0;
    for (int v = 0; v < s.p(); ++v) {
      if (j < young.size() && young[j] == v)
        ++j;
      else
        old_comp.push_back(v);
    }
  }
  long long nc = static_cast<long long>(std::lower_bound(young.begin(), young.end(), old_child) - young.begin());
  long long np =
      static_cast<long long>(std::lower_bound(old_comp.begin(), old_comp.end(), s.parent(old_child)) - old_comp.begin());
  long long oc_size = static_cast<long long>(old_comp.size());
  long long stay = nc * oc_size + np;
  if (k >= stay) ++k;  // skip the reinsertion that undoes the removal
  return {old_child, s.parent(old_child), young[k / oc_size], old_comp[k % oc_size]};
}

inline int weighted_node_choice(const TreeStore& s, Rng& rng) {
  long long total = tree_count_moves(s);
  std::uniform_int_distribution<long long> pick(0, total - 1);
  long long t = pick(rng);
  for (int v = 1; v < s.p(); ++v) {
    long long w = s.weight(v);
    long long g = w * (s.p() - w) - 1;
    if (t < g) return v;
    t -= g;
  }
  throw numeric_error("tree move: weighted choice ran past the last node");
}

// Floyd's sampling: m distinct values from {0, ..., n-1}
inline std::set<long long> distinct_sample(long long n, long long m, Rng& rng) {
  std::set<long long> out;
  for (long long j = n - m; j < n; ++j) {
    std::uniform_int_distribution<long long> pick(0, j);
    long long t = pick(rng);
    if (!out.insert(t).second) out.insert(j);
  }
  return out;
}

}  // namespace detail

// one move, uniform over all legal edge-moves
inline TreeMove tree_uniform_move(const TreeStore& s, Rng& rng) {
  if (s.p() < 3) throw validation_error("tree move: need at least three nodes");
  int old_child = detail::weighted_node_choice(s, rng);
  long long w = s.weight(old_child);
  std::uniform_int_distribution<long long> pick(0, w * (s.p() - w) - 2);
  return detail::move_from_rank(s, old_child, pick(rng));
}

inline TreeMove tree_uniform_move(const TreeStore& s, uint64_t seed) {
  Rng rng(seed);
  return tree_uniform_move(s, rng);
}

// Four interchangeable ways to draw a batch of distinct edge-moves. The
// weighted draw is uniform over moves; the edge-list draws are uniform over a
// list holding p-2 copies of each edge, so their edge choice is uniform over
// edges instead; the last one proposes naively and rejects repeats.
enum class ProposalSystem {
  kWeightedDedupe,   // weighted node choice, repeat until omega distinct
  kUnusedWeights,    // edge-list draw (weights maintained but not consulted)
  kNoWeights,        // edge-list draw
  kRejection,        // uniform edge, uniform reinsertion, reject duplicates
};

inline std::vector<TreeMove> propose_moves(const TreeStore& s, ProposalSystem system, long long omega, Rng& rng) {
  int p = s.p();
  if (p < 3) throw validation_error("propose_moves: need at least three nodes");
  if (omega < 1) throw validation_error("propose_moves: need at least one move");
  long long total = tree_count_moves(s);
  if (omega > total) throw validation_error("propose_moves: more moves requested than exist");

  std::map<std::pair<int, int>, TreeMove> chosen;
  if (system == ProposalSystem::kUnusedWeights || system == ProposalSystem::kNoWeights) {
    long long copies = p - 2;  // every edge admits at least p-2 moves
    if (omega > (p - 1) * copies)
      throw validation_error("propose_moves: edge-list draw cannot supply that many moves");
    std::vector<long long> multiplicity(p, 0);
    for (long long pos : detail::distinct_sample((p - 1) * copies, omega, rng)) ++multiplicity[1 + pos / copies];
    for (int v = 1; v < p; ++v) {
      if (multiplicity[v] == 0) continue;
      long long w = s.weight(v);
      for (long long k : detail::distinct_sample(w * (p - w) - 1, multiplicity[v], rng)) {
        TreeMove m = detail::move_from_rank(s, v, k);
        chosen.emplace(m.key(), m);
      }
    }
  } else {
    std::uniform_int_distribution<int> edge_pick(1, p - 1);
    while (static_cast<long long>(chosen.size()) < omega) {
      TreeMove m;
      if (system == ProposalSystem::kWeightedDedupe) {
        m = tree_uniform_move(s, rng);
      } else {
        int old_child = edge_pick(rng);
        long long w = s.weight(old_child);
        std::uniform_int_distribution<long long> pick(0, w * (p - w) - 2);
        m = detail::move_from_rank(s, old_child, pick(rng));
      }
      chosen.emplace(m.key(), m);
    }
  }

  std::vector<TreeMove> out;
  out.reserve(chosen.size());
  for (const auto& [key, m] : chosen) out.push_back(m);
  return out;
}

inline std::vector<TreeMove> propose_moves(const TreeStore& s, ProposalSystem system, long long omega, uint64_t seed) {
  Rng rng(seed);
  return propose_moves(s, system, omega, rng);
}

}  // namespace treegm
