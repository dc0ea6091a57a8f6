#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cqa/core.hpp"

// Everything here concerns q4 = R(x; y, z) & R(z; x, y) over a database
// whose relation R is ternary with key {1}. Other relations are ignored.
namespace cqa::matching {

/// Throws SchemaError unless R is declared as R/3 key 1.
void require_q4_schema(const Database& db);

/// The successor of a fact (a1; a2, a3) under q4 is (a3; a1, a2): q4(ab)
/// holds iff b is a's successor. Self-loops are the facts (c; c, c).
class SolutionGraph {
 public:
  /// Throws Error if a component is not a single vertex, a 2-clique
  /// without self-loops, or a triangle.
  explicit SolutionGraph(const Database& db);

  /// Facts of R, ascending.
  const std::vector<FactId>& vertices() const { return vertices_; }
  std::optional<FactId> successor(FactId a) const { return succ_[a]; }
  bool self_loop(FactId a) const { return loop_[a]; }
  /// Connected components over the R-facts, each ascending, ordered by
  /// smallest fact.
  const std::vector<std::vector<FactId>>& components() const { return components_; }
  std::size_t component_of(FactId a) const { return component_of_[a]; }
  std::size_t triangle_count() const;

 private:
  std::vector<FactId> vertices_;
  std::vector<std::optional<FactId>> succ_;
  std::vector<bool> loop_;
  std::vector<std::vector<FactId>> components_;
  std::vector<std::size_t> component_of_;
};

struct BipartiteInstance {
  std::vector<std::string> left;
  std::vector<std::string> right;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (left, right) indices

  bool operator==(const BipartiteInstance&) const = default;
};

/// Lines `left s1`, `right t1`, `edge s1 t1`; `#` comments. Vertices must
/// be declared before they are used in an edge.
BipartiteInstance parse_bipartite(std::string_view text);
std::string render_bipartite(const BipartiteInstance& g);

/// match[s] = right vertex matched to left vertex s, or -1.
using Matching = std::vector<long>;

/// Maximum matching by Hopcroft-Karp.
Matching maximum_matching(const BipartiteInstance& g);

/// A matching saturating the left side, if one exists.
std::optional<Matching> hopcroft_karp(const BipartiteInstance& g);

/// The bipartite instance of a database: left = blocks of R, right =
/// components of the solution graph, an edge when the block has a fact in
/// the component. Self-loop facts are left out.
BipartiteInstance block_component_instance(const Database& db, const SolutionGraph& graph);

/// certain(q4) in polynomial time: a self-loop alone in its block makes q4
/// certain; other self-loops can be dropped; then q4 is certain iff the
/// block/component instance has no left-saturating matching.
bool certain_q4(const Database& db);

/// Database D_G whose q4-certainty is the complement of "G has a
/// left-saturating matching".
struct DgInstance {
  Database db;
  /// (left, right) pairs fixed while folding right vertices of degree 1.
  std::vector<std::pair<std::size_t, std::size_t>> committed;
  /// Some left vertex lost all neighbours; db then holds a self-loop alone
  /// in its block.
  bool unmatchable = false;
  /// Fact of the block of a left vertex -> the edge it stands for.
  std::map<FactId, std::pair<std::size_t, std::size_t>> edge_of;
};

DgInstance sbm_to_q4(const BipartiteInstance& g);

/// Reads a matching of g off a repair of D_G without q4 solutions: the
/// committed pairs plus the edge chosen in each left vertex's block.
/// Returns nullopt if some left vertex stays unmatched.
std::optional<Matching> decode_matching(const BipartiteInstance& g, const DgInstance& dg,
                                        const Repair& repair);

}  // namespace cqa::matching
