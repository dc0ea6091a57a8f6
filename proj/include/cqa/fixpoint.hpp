#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cqa/core.hpp"
#include "cqa/kset.hpp"

namespace cqa {

enum class FixpointMode {
  standard,  // block rule only
  extended,  // block rule plus the neighbourhood rule for two-atom queries
};

/// What justified a derived k-set: a block of the database, or (extended
/// mode) the neighbourhood {b : q(ab) or q(ba) or a = b} of a fact a that
/// is not a self-loop. Round-0 entries have kind `none`.
struct Witness {
  enum class Kind : std::uint8_t { none, block, fact };
  Kind kind = Kind::none;
  std::uint32_t id = 0;

  bool operator==(const Witness&) const = default;
};

struct KSetEntry {
  std::vector<FactId> facts;  // ascending
  int round = 0;
  Witness witness;

  bool operator==(const KSetEntry&) const = default;
};

/// Derived k-sets with the round at which each was first derived.
class DeltaTable {
 public:
  DeltaTable(std::size_t fact_count, std::size_t k, FixpointMode mode, std::uint64_t cap);

  std::size_t k() const { return index_.k(); }
  FixpointMode mode() const { return mode_; }
  const KSetIndex& index() const { return index_; }

  /// Facts may be given in any order; duplicates are ignored.
  std::optional<int> round_of(std::span<const FactId> facts) const;
  bool contains(std::span<const FactId> facts) const { return round_of(facts).has_value(); }
  std::optional<Witness> witness_of(std::span<const FactId> facts) const;

  std::uint64_t size() const;
  int max_round() const;
  /// All entries ordered by (round, rank).
  std::vector<KSetEntry> entries() const;

  // Dense per-rank storage used by the kernels; -1 marks absent sets.
  std::vector<std::int32_t>& rounds() { return rounds_; }
  const std::vector<std::int32_t>& rounds() const { return rounds_; }
  std::vector<Witness>& witnesses() { return witnesses_; }
  const std::vector<Witness>& witnesses() const { return witnesses_; }

  bool operator==(const DeltaTable& other) const {
    return mode_ == other.mode_ && k() == other.k() && rounds_ == other.rounds_ &&
           witnesses_ == other.witnesses_;
  }

 private:
  std::optional<std::uint64_t> rank_of(std::span<const FactId> facts) const;

  KSetIndex index_;
  FixpointMode mode_;
  std::vector<std::int32_t> rounds_;
  std::vector<Witness> witnesses_;
};

struct FixpointOptions {
  /// Upper bound on the number of candidate sets sum_{i<=k} C(n, i).
  std::uint64_t candidate_cap = 20'000'000;
  Strategy strategy = Strategy::parallel;
};

struct FixpointResult {
  bool accepted = false;
  DeltaTable table;
  std::optional<int> empty_set_round;
  /// Number of rounds run until nothing new was derived.
  int rounds = 0;
};

/// Inflationary fixpoint over k-sets. Round 0 holds every k-set S with
/// S |= q. Round i+1 adds each k-set S for which some block B has, for
/// every u in B, a subset of S u {u} already derived by round i. Accepts
/// iff the empty set is derived.
FixpointResult run_cqk(const Database& db, const ConjunctiveQuery& q, std::size_t k,
                       const FixpointOptions& options = {});

/// run_cqk with the additional neighbourhood rule. Throws QueryShapeError
/// unless q has exactly two atoms.
FixpointResult run_cqk_plus(const Database& db, const ConjunctiveQuery& q, std::size_t k,
                            const FixpointOptions& options = {});

/// Facts a with D |= q(a a) for a two-atom query.
std::vector<bool> self_loops(const Database& db, const ConjunctiveQuery& q);

/// Per-round derivations of a table, ordered by (round, rank).
std::vector<KSetEntry> trace(const DeltaTable& table);

/// JSON lines: {"round":r,"kset":[ids],"witness":{"type":"block"|"fact","id":i}}
/// with `"witness":null` on round-0 entries.
std::string serialize_trace(const std::vector<KSetEntry>& entries);
std::vector<KSetEntry> parse_trace(const std::string& text);

/// Rebuilds a table from a trace, checking that every entry is justified
/// by its witness using only entries of strictly smaller rounds (round-0
/// entries must satisfy q). Throws Error on the first unjustified entry.
DeltaTable replay_trace(const Database& db, const ConjunctiveQuery& q, std::size_t k,
                        FixpointMode mode, const std::vector<KSetEntry>& entries,
                        std::uint64_t candidate_cap = FixpointOptions{}.candidate_cap);

}  // namespace cqa
