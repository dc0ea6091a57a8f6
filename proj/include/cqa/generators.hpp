#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cqa/core.hpp"
#include "cqa/matching.hpp"

namespace cqa::gen {

/// D_n over R/3 key 1, for n >= 4 (Error otherwise). Constants a_i and
/// e_j_i. Blocks B_1..B_n hold b^j_i for j = 1..n-1; blocks E^j_l hold
/// u^j_l and v^j_l for l = 1..n-3. For every j the facts b^j_1..b^j_n,
/// u^j_*, v^j_* form the triangles {b1, b2, u1}, {b(n-1), bn, v(n-3)} and
/// {v_l, u_(l+1), b_(l+2)} for 1 <= l < n-3.
class Dn {
 public:
  explicit Dn(int n);

  int n() const { return n_; }
  const Database& db() const { return db_; }

  FactId b(int j, int i) const;  // 1 <= j <= n-1, 1 <= i <= n
  FactId u(int j, int l) const;  // 1 <= l <= n-3
  FactId v(int j, int l) const;
  BlockId b_block(int i) const { return db_.block_of(b(1, i)); }
  BlockId e_block(int j, int l) const { return db_.block_of(u(j, l)); }
  bool is_b_block(BlockId id) const;
  /// The j of an E^j_l block.
  int e_group(BlockId id) const;

  /// U(j, l) = {u^j_k : 1 <= k <= l-2} and V(j, l) = {v^j_k : l-1 <= k <= n-3},
  /// clipped to existing facts. Error on j or l out of range.
  std::vector<FactId> u_set(int j, int l) const;
  std::vector<FactId> v_set(int j, int l) const;

  /// Superscript j and subscript i of b^j_i, or nullopt for u/v facts.
  std::optional<std::pair<int, int>> b_label(FactId f) const;

 private:
  FactId lookup(const std::string& key, const std::string& v1, const std::string& v2) const;
  std::string a(int i) const { return "a_" + std::to_string(i); }
  std::string e(int j, int i) const { return "e_" + std::to_string(j) + "_" + std::to_string(i); }
  void check_j(int j) const;

  int n_;
  Database db_;
};

Database gen_dn(int n);

/// k-obstruction test for a set W of k facts of D_n. Throws Error unless W
/// takes exactly one fact from each of k distinct blocks.
bool is_k_obstruction(const Dn& dn, const std::vector<FactId>& w, std::size_t k);

/// A partial repair of `blocks` that is a |blocks|-obstruction set, built
/// by giving the m-th B-block (in block order) the fact b^m_i and filling
/// E-blocks from U/V; used for D_(k+2) with k blocks.
std::vector<FactId> obstruction_for(const Dn& dn, const std::vector<BlockId>& blocks);

/// D' over R1/2 key 1 and S1/3 key 1,2: R1(e_i; f_n) for each fact in block
/// B_i and component C_n of the solution graph; S1(f_n, g; e_i) and
/// S1(f_n, g; e_j) for each q4 edge between facts of distinct blocks B_i,
/// B_j; S1(f_n, g; e_i) for each self-loop. g names the fact pair.
Database q4_to_q5(const Database& db);

/// Deterministic random source: std::mt19937_64 with range reduction done
/// here, so streams agree across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [lo, hi].
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);
  bool chance(double p);

 private:
  std::mt19937_64 engine_;
};

struct RelationSpec {
  std::string name;
  int arity = 2;
  int key_size = 1;  // key on the leading positions
};

struct RandomProfile {
  std::vector<RelationSpec> relations;
  std::size_t n_blocks = 6;
  std::size_t max_block_size = 2;
  std::size_t domain_size = 4;  // constants c0..c(d-1)
  std::uint64_t seed = 0;
  /// Optionally add `planted` random valuations of this query's atoms, so
  /// that solutions are common.
  std::optional<ConjunctiveQuery> plant;
  std::size_t planted = 0;
};

/// Blocks are drawn independently: a relation, a key, then 1..max_block_size
/// facts. A block drawn twice is topped up to at most max_block_size facts.
/// Planted facts come on top and may enlarge blocks.
Database gen_random(const RandomProfile& profile);

matching::BipartiteInstance random_bipartite(std::size_t left, std::size_t right,
                                             double edge_probability, std::uint64_t seed);

}  // namespace cqa::gen
