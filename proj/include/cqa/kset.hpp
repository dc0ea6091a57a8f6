#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cqa/core.hpp"

namespace cqa {

/// Dense numbering of all subsets of {0..n-1} with at most k elements.
///
/// Sets are grouped by size (level); inside a level they are numbered in
/// colexicographic order, so rank({c0 < c1 < ... < cm-1}) within level m is
/// sum_i C(ci, i+1). The empty set has rank 0.
class KSetIndex {
 public:
  /// Throws LimitExceeded when the number of sets exceeds `cap`.
  KSetIndex(std::size_t n, std::size_t k, std::uint64_t cap);

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  std::uint64_t size() const { return level_begin_.back(); }
  std::uint64_t level_begin(std::size_t m) const { return level_begin_[m]; }
  std::uint64_t level_end(std::size_t m) const { return level_begin_[m + 1]; }

  /// `sorted` must be strictly increasing and hold at most k ids.
  std::uint64_t rank(std::span<const FactId> sorted) const;
  void unrank(std::uint64_t rank, std::vector<FactId>& out) const;
  std::size_t level_of(std::uint64_t rank) const;

  /// Advances `set` to its colex successor within the same level.
  /// Returns false when `set` was the last one.
  bool next(std::vector<FactId>& set) const;

  std::uint64_t binomial(std::size_t n, std::size_t r) const;

 private:
  std::size_t n_;
  std::size_t k_;
  std::vector<std::vector<std::uint64_t>> binom_;  // binom_[r][m] = C(m, r)
  std::vector<std::uint64_t> level_begin_;
};

/// Number of subsets of an n-set with at most k elements, saturating.
std::uint64_t count_ksets(std::size_t n, std::size_t k);

}  // namespace cqa
