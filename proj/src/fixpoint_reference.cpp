// Serial kernel that follows the rule literally: every missing k-set is
// tested against every group by enumerating all subsets of S u {u}.

#include <algorithm>

#include "fixpoint_detail.hpp"

namespace cqa::detail {

namespace {

bool some_subset_derived(const KSetIndex& index, const std::vector<std::int32_t>& rounds,
                         const std::vector<FactId>& set, int round) {
  std::vector<FactId> sub;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << set.size()); ++mask) {
    sub.clear();
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (mask >> i & 1) sub.push_back(set[i]);
    }
    if (sub.size() > index.k()) continue;
    std::int32_t r = rounds[index.rank(sub)];
    if (r >= 0 && r <= round) return true;
  }
  return false;
}

}  // namespace

int run_reference(const FixpointProblem& problem, DeltaTable& table) {
  const KSetIndex& index = table.index();
  auto& rounds = table.rounds();
  auto& witnesses = table.witnesses();
  std::vector<FactId> s;

  for (std::uint64_t r = 0; r < index.size(); ++r) {
    index.unrank(r, s);
    if (contains_solution(problem, s)) rounds[r] = 0;
  }

  int round = 0;
  bool changed = true;
  std::vector<FactId> su;
  while (changed) {
    changed = false;
    for (std::uint64_t r = 0; r < index.size(); ++r) {
      if (rounds[r] >= 0) continue;
      index.unrank(r, s);
      for (std::size_t g = 0; g < problem.groups.size(); ++g) {
        bool all = true;
        for (FactId u : problem.groups[g]) {
          su = s;
          if (!std::binary_search(su.begin(), su.end(), u)) {
            su.insert(std::upper_bound(su.begin(), su.end(), u), u);
          }
          if (!some_subset_derived(index, rounds, su, round)) {
            all = false;
            break;
          }
        }
        if (all) {
          rounds[r] = round + 1;
          witnesses[r] = problem.group_witness[g];
          changed = true;
          break;
        }
      }
    }
    ++round;
  }
  return round;
}

}  // namespace cqa::detail
