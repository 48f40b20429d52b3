#pragma once

// Shared basics: error types, pair indexing over the lower triangle,
// the packed edge bit-pattern used as a graph fingerprint, and the RNG.

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace treegm {

// Bad inputs (malformed graphs, out-of-range parameters, file format errors).
class validation_error : public std::invalid_argument {
 public:
  explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical failures (non-PD matrices, singular minors, domain errors).
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

using Rng = std::mt19937_64;

inline int pair_count(int p) { return p * (p - 1) / 2; }

// Position of unordered pair {u,v} in the lower triangle, row-major:
// (1,0) (2,0) (2,1) (3,0) ... so index(i,j) = i(i-1)/2 + j for i > j.
inline int pair_index(int u, int v) {
  if (u == v) throw validation_error("pair_index: self-pair");
  int i = u > v ? u : v;
  int j = u > v ? v : u;
  return i * (i - 1) / 2 + j;
}

// Inverse of pair_index. Returns (lo, hi).
inline std::pair<int, int> pair_from_index(int idx) {
  int i = 1;
  while ((i + 1) * i / 2 <= idx) ++i;
  return {idx - i * (i - 1) / 2, i};
}

// Packed bits over the C(p,2) lower-triangle positions. Canonical
// fingerprint for visited-graph ledgers and store coherence checks.
class BitPattern {
 public:
  BitPattern() : nbits_(0) {}
  explicit BitPattern(int p) : nbits_(pair_count(p)), words_((nbits_ + 63) / 64, 0) {}

  bool test(int idx) const { return (words_[idx >> 6] >> (idx & 63)) & 1; }
  void set(int idx) { words_[idx >> 6] |= uint64_t{1} << (idx & 63); }
  void reset(int idx) { words_[idx >> 6] &= ~(uint64_t{1} << (idx & 63)); }
  void flip(int idx) { words_[idx >> 6] ^= uint64_t{1} << (idx & 63); }

  int count() const {
    int c = 0;
    for (uint64_t w : words_) c += __builtin_popcountll(w);
    return c;
  }

  bool operator==(const BitPattern& o) const { return words_ == o.words_; }
  bool operator!=(const BitPattern& o) const { return !(*this == o); }
  bool operator<(const BitPattern& o) const { return words_ < o.words_; }

  size_t hash() const {
    size_t h = std::hash<int>{}(nbits_);
    for (uint64_t w : words_) h ^= std::hash<uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

  int bit_count() const { return nbits_; }

 private:
  int nbits_;
  std::vector<uint64_t> words_;
};

struct BitPatternHash {
  size_t operator()(const BitPattern& b) const { return b.hash(); }
};

}  // namespace treegm
