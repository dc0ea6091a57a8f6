#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cqa/core.hpp"

// Static analysis of self-join-free queries. Atoms are referred to by their
// index in the query and variables by their id (ConjunctiveQuery::variable_id).
// Every function here throws QueryShapeError on a query with a self-join.
namespace cqa::sjf {

using VarSet = std::set<int>;

VarSet key_vars(const ConjunctiveQuery& q, std::size_t atom);
VarSet all_vars(const ConjunctiveQuery& q, std::size_t atom);

/// A derivation X A1 ... An with An = target: each key(Ai) lies inside X
/// and the variables of A1..A(i-1). Atoms in `excluded` are never used.
/// Returns the atom sequence, or nullopt when target is not derivable.
std::optional<std::vector<std::size_t>> gamma_derivable(const ConjunctiveQuery& q,
                                                        const VarSet& x, std::size_t target,
                                                        std::optional<std::size_t> excluded = {});

/// B is determined by A: B is derivable from vars(A).
bool determines(const ConjunctiveQuery& q, std::size_t a, std::size_t b);

/// Classes of mutually determined atoms, each sorted, ordered by first atom.
std::vector<std::vector<std::size_t>> stable_partition_candidates(const ConjunctiveQuery& q);

/// Atoms B != A derivable from key(A) without passing through A.
std::vector<std::size_t> a_plus(const ConjunctiveQuery& q, std::size_t a);

/// Variables an attack from A may not go through: key(A) and vars(A+).
VarSet a_plus_closure(const ConjunctiveQuery& q, std::size_t a);

/// A attacks B (A != B): some chain A = F0, ..., Fn = B where consecutive
/// atoms share a variable outside a_plus_closure(A).
bool attacks(const ConjunctiveQuery& q, std::size_t a, std::size_t b);

struct AttackEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  bool weak = false;  // `to` is determined by `from`
  bool operator==(const AttackEdge&) const = default;
};

struct AttackGraph {
  std::size_t atom_count = 0;
  std::vector<AttackEdge> edges;  // sorted by (from, to)

  const AttackEdge* edge(std::size_t from, std::size_t to) const;
  /// reach[a][b]: a path of one or more edges from a to b.
  std::vector<std::vector<bool>> reachability() const;
};

AttackGraph build_attack_graph(const ConjunctiveQuery& q);

enum class Complexity { fo, ptime_not_fo, conp_complete };
std::string to_string(Complexity c);

struct Classification {
  Complexity verdict = Complexity::fo;
  AttackGraph graph;
  /// fo: every atom in a topological order of the attack graph.
  /// ptime_not_fo: strongly connected components in topological order.
  /// conp_complete: one component, the atoms of a cycle through a strong
  /// edge, listed in cycle order starting with its strong edge.
  std::vector<std::vector<std::size_t>> witness;
};

/// FO iff the attack graph is acyclic, coNP-complete iff it has a cycle
/// through a strong edge, PTIME otherwise.
Classification classify(const ConjunctiveQuery& q);

/// Weak edges dashed, strong edges solid.
std::string attack_graph_dot(const ConjunctiveQuery& q, const AttackGraph& graph);
std::string classification_json(const ConjunctiveQuery& q, const Classification& c);

}  // namespace cqa::sjf
