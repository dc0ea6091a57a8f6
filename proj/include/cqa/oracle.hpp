#pragma once

#include <optional>
#include <vector>

#include "cqa/core.hpp"

namespace cqa {

struct OracleOptions {
  /// Refuse databases with more repairs than this (LimitExceeded).
  std::uint64_t repair_limit = kDefaultRepairLimit;
  /// reference: walk every repair in order. parallel: depth-first search
  /// over block choices that cuts a branch as soon as the chosen facts
  /// contain a solution, sharded over the choices of the leading blocks.
  Strategy strategy = Strategy::parallel;
};

/// True iff every repair of db satisfies q.
bool certain(const Database& db, const ConjunctiveQuery& q, const OracleOptions& options = {});

/// The first repair in canonical order (see repair_at) without a solution.
std::optional<Repair> counterexample_repair(const Database& db, const ConjunctiveQuery& q,
                                            const OracleOptions& options = {});

struct MinimalRepairs {
  std::size_t solution_count = 0;  // |q(r)| shared by all of them
  std::vector<Repair> repairs;     // canonical order
};

/// Repairs r minimising the number of solutions |q(r)|.
MinimalRepairs minimal_repairs(const Database& db, const ConjunctiveQuery& q,
                               const OracleOptions& options = {});

}  // namespace cqa
