#include "cqa/kset.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace cqa {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

// Pascal rows up to C(n, k); entries saturate.
std::vector<std::vector<std::uint64_t>> pascal(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::uint64_t>> t(k + 2, std::vector<std::uint64_t>(n + 1, 0));
  for (std::size_t m = 0; m <= n; ++m) t[0][m] = 1;
  for (std::size_t r = 1; r < t.size(); ++r) {
    for (std::size_t m = 1; m <= n; ++m) t[r][m] = sat_add(t[r][m - 1], t[r - 1][m - 1]);
  }
  return t;
}

}  // namespace

std::uint64_t count_ksets(std::size_t n, std::size_t k) {
  auto t = pascal(n, std::min(k, n));
  std::uint64_t total = 0;
  for (std::size_t r = 0; r <= std::min(k, n); ++r) total = sat_add(total, t[r][n]);
  return total;
}

KSetIndex::KSetIndex(std::size_t n, std::size_t k, std::uint64_t cap)
    : n_(n), k_(k), binom_(pascal(n, k)) {
  level_begin_.push_back(0);
  for (std::size_t m = 0; m <= k; ++m) {
    std::uint64_t count = m <= n ? binom_[m][n] : 0;
    level_begin_.push_back(sat_add(level_begin_.back(), count));
  }
  if (size() > cap) {
    throw LimitExceeded(std::to_string(size()) + " candidate sets of size <= " +
                        std::to_string(k) + " over " + std::to_string(n) +
                        " facts exceed the cap of " + std::to_string(cap));
  }
}

std::uint64_t KSetIndex::binomial(std::size_t n, std::size_t r) const {
  if (r >= binom_.size() || n >= binom_[0].size()) return 0;
  return binom_[r][n];
}

std::uint64_t KSetIndex::rank(std::span<const FactId> sorted) const {
  std::uint64_t r = level_begin_[sorted.size()];
  for (std::size_t i = 0; i < sorted.size(); ++i) r += binom_[i + 1][sorted[i]];
  return r;
}

std::size_t KSetIndex::level_of(std::uint64_t rank) const {
  auto it = std::upper_bound(level_begin_.begin(), level_begin_.end(), rank);
  return static_cast<std::size_t>(it - level_begin_.begin()) - 1;
}

void KSetIndex::unrank(std::uint64_t rank, std::vector<FactId>& out) const {
  std::size_t m = level_of(rank);
  std::uint64_t r = rank - level_begin_[m];
  out.resize(m);
  std::size_t c = n_;
  for (std::size_t i = m; i-- > 0;) {
    // largest c below the previous element with C(c, i+1) <= r
    --c;
    while (binom_[i + 1][c] > r) --c;
    out[i] = static_cast<FactId>(c);
    r -= binom_[i + 1][c];
  }
}

bool KSetIndex::next(std::vector<FactId>& set) const {
  const std::size_t m = set.size();
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t limit = i + 1 < m ? set[i + 1] : n_;
    if (set[i] + 1 < limit) {
      ++set[i];
      for (std::size_t j = 0; j < i; ++j) set[j] = static_cast<FactId>(j);
      return true;
    }
  }
  return false;
}

}  // namespace cqa
