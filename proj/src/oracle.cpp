#include "cqa/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <limits>

#include <omp.h>

namespace cqa {

namespace {

constexpr FactId kUnset = std::numeric_limits<FactId>::max();

// Depth-first search over block choices in canonical order.
class PrunedSearch {
 public:
  PrunedSearch(const Database& db, const ConjunctiveQuery& q) : db_(db), closing_(db.size()) {
    // A solution can be checked once its highest block has been chosen.
    for (auto& set : solution_sets(db, q)) {
      FactId top = *std::max_element(set.begin(), set.end(), [&](FactId a, FactId b) {
        return db.block_of(a) < db.block_of(b);
      });
      closing_[top].push_back(std::move(set));
    }
  }

  // Whether choosing f (in block block_of(f)) completes a solution, given
  // the choices already made for all earlier blocks.
  bool closes(const std::vector<FactId>& chosen, FactId f) const {
    for (const auto& set : closing_[f]) {
      bool all = std::all_of(set.begin(), set.end(),
                             [&](FactId x) { return x == f || chosen[db_.block_of(x)] == x; });
      if (all) return true;
    }
    return false;
  }

  // Fills chosen[depth..] with the first completion that has no solution.
  bool search(std::vector<FactId>& chosen, std::size_t depth) const {
    if (depth == db_.block_count()) return true;
    for (FactId f : db_.block(static_cast<BlockId>(depth))) {
      if (closes(chosen, f)) continue;
      chosen[depth] = f;
      if (search(chosen, depth + 1)) return true;
    }
    chosen[depth] = kUnset;
    return false;
  }

 private:
  const Database& db_;
  std::vector<std::vector<std::vector<FactId>>> closing_;
};

std::optional<Repair> counterexample_parallel(const Database& db, const ConjunctiveQuery& q) {
  PrunedSearch search(db, q);
  const std::size_t blocks = db.block_count();

  // Shards are the choices for a prefix of blocks, numbered so that shard
  // order agrees with canonical repair order.
  const std::uint64_t target = 64 * static_cast<std::uint64_t>(omp_get_max_threads());
  std::size_t prefix = 0;
  std::uint64_t shards = 1;
  while (prefix < blocks && shards < target) shards *= db.block(static_cast<BlockId>(prefix++)).size();

  std::vector<std::optional<Repair>> found(shards);
  std::atomic<std::uint64_t> best{shards};
#pragma omp parallel
  {
    std::vector<FactId> chosen(blocks, kUnset);
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(shards); ++i) {
      const auto shard = static_cast<std::uint64_t>(i);
      if (shard > best.load(std::memory_order_relaxed)) continue;
      std::fill(chosen.begin(), chosen.end(), kUnset);
      std::uint64_t rest = shard;
      for (std::size_t b = prefix; b-- > 0;) {
        auto block = db.block(static_cast<BlockId>(b));
        chosen[b] = block[rest % block.size()];
        rest /= block.size();
      }
      bool pruned = false;
      for (std::size_t b = 0; b < prefix && !pruned; ++b) pruned = search.closes(chosen, chosen[b]);
      if (pruned || !search.search(chosen, prefix)) continue;
      found[shard] = Repair{chosen};
      std::uint64_t cur = best.load();
      while (shard < cur && !best.compare_exchange_weak(cur, shard)) {
      }
    }
  }
  std::uint64_t b = best.load();
  if (b == shards) return std::nullopt;
  return found[b];
}

std::optional<Repair> counterexample_reference(const Database& db, const ConjunctiveQuery& q,
                                               std::uint64_t limit) {
  for (RepairCursor it(db, limit); !it.done(); it.next()) {
    if (solutions(db, q, fact_mask(db, *it)).empty()) return *it;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Repair> counterexample_repair(const Database& db, const ConjunctiveQuery& q,
                                            const OracleOptions& options) {
  check_repair_limit(db, options.repair_limit);
  if (options.strategy == Strategy::reference) {
    return counterexample_reference(db, q, options.repair_limit);
  }
  return counterexample_parallel(db, q);
}

bool certain(const Database& db, const ConjunctiveQuery& q, const OracleOptions& options) {
  return !counterexample_repair(db, q, options).has_value();
}

MinimalRepairs minimal_repairs(const Database& db, const ConjunctiveQuery& q,
                               const OracleOptions& options) {
  check_repair_limit(db, options.repair_limit);
  MinimalRepairs out;
  if (options.strategy == Strategy::reference) {
    out.solution_count = std::numeric_limits<std::size_t>::max();
    for (RepairCursor it(db, options.repair_limit); !it.done(); it.next()) {
      std::size_t count = solutions(db, q, fact_mask(db, *it)).size();
      if (count < out.solution_count) {
        out.solution_count = count;
        out.repairs.clear();
      }
      if (count == out.solution_count) out.repairs.push_back(*it);
    }
    return out;
  }

  const std::vector<Solution> all = solutions(db, q);
  const auto total = static_cast<std::int64_t>(repair_count(db));
  std::vector<std::size_t> counts(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < total; ++i) {
    std::vector<bool> mask = fact_mask(db, repair_at(db, static_cast<std::uint64_t>(i)));
    counts[i] = static_cast<std::size_t>(std::count_if(all.begin(), all.end(), [&](const Solution& s) {
      return std::all_of(s.begin(), s.end(), [&](FactId f) { return mask[f]; });
    }));
  }
  out.solution_count = *std::min_element(counts.begin(), counts.end());
  for (std::int64_t i = 0; i < total; ++i) {
    if (counts[i] == out.solution_count) {
      out.repairs.push_back(repair_at(db, static_cast<std::uint64_t>(i)));
    }
  }
  return out;
}

}  // namespace cqa
