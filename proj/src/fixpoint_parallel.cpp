// OpenMP kernel. After every round the table is upward closed among sets
// of size <= k (a witness for S also works for any superset of S), so
// "some subset of S u {u} is derived" reduces to a membership test on
// S u {u} itself, or on its k-subsets containing u when |S| = k.

#include <algorithm>

#include "fixpoint_detail.hpp"

namespace cqa::detail {

namespace {

// Rank of the sorted set `s` with `u` inserted and position `skip` of s
// dropped (skip == s.size() drops nothing).
std::uint64_t rank_with(const KSetIndex& index, const std::vector<FactId>& s, FactId u,
                        std::size_t skip, std::vector<FactId>& scratch) {
  scratch.clear();
  bool placed = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!placed && u < s[i]) {
      scratch.push_back(u);
      placed = true;
    }
    if (i != skip) scratch.push_back(s[i]);
  }
  if (!placed) scratch.push_back(u);
  return index.rank(scratch);
}

bool member_ok(const KSetIndex& index, const std::vector<std::int32_t>& rounds,
               const std::vector<FactId>& s, FactId u, std::vector<FactId>& scratch) {
  if (std::binary_search(s.begin(), s.end(), u)) return false;  // S itself is missing
  if (s.size() < index.k()) return rounds[rank_with(index, s, u, s.size(), scratch)] >= 0;
  for (std::size_t x = 0; x < s.size(); ++x) {
    if (rounds[rank_with(index, s, u, x, scratch)] >= 0) return true;
  }
  return false;
}

void seed_round_zero(const FixpointProblem& problem, DeltaTable& table) {
  const KSetIndex& index = table.index();
  auto& rounds = table.rounds();
  for (const auto& sol : problem.solution_sets) rounds[index.rank(sol)] = 0;
  for (std::size_t m = 1; m <= index.k(); ++m) {
    const auto begin = static_cast<std::int64_t>(index.level_begin(m));
    const auto end = static_cast<std::int64_t>(index.level_end(m));
#pragma omp parallel
    {
      std::vector<FactId> s, sub;
#pragma omp for schedule(static)
      for (std::int64_t r = begin; r < end; ++r) {
        if (rounds[r] == 0) continue;
        index.unrank(static_cast<std::uint64_t>(r), s);
        for (std::size_t x = 0; x < s.size(); ++x) {
          sub.assign(s.begin(), s.end());
          sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(x));
          if (rounds[index.rank(sub)] == 0) {
            rounds[r] = 0;
            break;
          }
        }
      }
    }
  }
}

}  // namespace

int run_parallel(const FixpointProblem& problem, DeltaTable& table) {
  const KSetIndex& index = table.index();
  auto& rounds = table.rounds();
  auto& witnesses = table.witnesses();
  seed_round_zero(problem, table);

  const auto total = static_cast<std::int64_t>(index.size());
  std::vector<std::int32_t> found(index.size(), -1);  // group index derived this round
  int round = 0;
  bool changed = true;
  while (changed) {
    int any = 0;
#pragma omp parallel reduction(| : any)
    {
      std::vector<FactId> s, scratch;
#pragma omp for schedule(dynamic, 512)
      for (std::int64_t r = 0; r < total; ++r) {
        if (rounds[r] >= 0) continue;
        index.unrank(static_cast<std::uint64_t>(r), s);
        for (std::size_t g = 0; g < problem.groups.size(); ++g) {
          bool all = true;
          for (FactId u : problem.groups[g]) {
            if (!member_ok(index, rounds, s, u, scratch)) {
              all = false;
              break;
            }
          }
          if (all) {
            found[r] = static_cast<std::int32_t>(g);
            any = 1;
            break;
          }
        }
      }
    }
    changed = any != 0;
    if (changed) {
#pragma omp parallel for schedule(static)
      for (std::int64_t r = 0; r < total; ++r) {
        if (found[r] < 0) continue;
        rounds[r] = round + 1;
        witnesses[r] = problem.group_witness[static_cast<std::size_t>(found[r])];
        found[r] = -1;
      }
    }
    ++round;
  }
  return round;
}

}  // namespace cqa::detail
