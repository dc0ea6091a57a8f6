#pragma once

#include <vector>

#include "cqa/core.hpp"
#include "cqa/fixpoint.hpp"

namespace cqa::detail {

// Everything a kernel needs, precomputed from (db, q, k, mode).
struct FixpointProblem {
  std::size_t k = 0;
  FixpointMode mode = FixpointMode::standard;
  // Witness groups in the order they are tried: all blocks, then (extended
  // mode) the neighbourhoods of non-self-loop facts.
  std::vector<std::vector<FactId>> groups;
  std::vector<Witness> group_witness;
  std::size_t block_count = 0;
  std::vector<long> fact_group;  // extended mode; -1 for self-loops
  // Solution fact sets of size <= k, sorted and distinct.
  std::vector<std::vector<FactId>> solution_sets;
};

FixpointProblem make_problem(const Database& db, const ConjunctiveQuery& q, std::size_t k,
                             FixpointMode mode);

// Index into problem.groups for a witness, or -1 if it names no group.
long group_of(const FixpointProblem& problem, const Witness& w);

bool contains_solution(const FixpointProblem& problem, std::span<const FactId> sorted_set);

// Both kernels fill table.rounds()/witnesses() and return the number of
// derivation rounds executed, the last of which derived nothing.
int run_reference(const FixpointProblem& problem, DeltaTable& table);
int run_parallel(const FixpointProblem& problem, DeltaTable& table);

}  // namespace cqa::detail
