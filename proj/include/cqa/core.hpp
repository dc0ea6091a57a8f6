#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cqa {

using FactId = std::uint32_t;
using BlockId = std::uint32_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

/// Arity or key mismatch between a fact/atom and the declared relation.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class LimitExceeded : public Error {
 public:
  using Error::Error;
};

/// The query does not have the shape an algorithm requires.
class QueryShapeError : public Error {
 public:
  using Error::Error;
};

/// Selects between the serial reference kernels and the OpenMP kernels.
/// Both must produce identical results; the reference is kept for testing.
enum class Strategy { reference, parallel };

struct RelationSchema {
  std::string name;
  int arity = 0;
  std::vector<int> key_positions;  // 1-based, ascending

  int key_size() const { return static_cast<int>(key_positions.size()); }
  bool operator==(const RelationSchema&) const = default;
};

class Schema {
 public:
  /// Throws SchemaError on a second declaration for the same name or on
  /// key positions outside [1, arity].
  void add(RelationSchema relation);
  const RelationSchema* find(std::string_view name) const;
  const std::map<std::string, RelationSchema, std::less<>>& relations() const {
    return relations_;
  }
  bool operator==(const Schema&) const = default;

 private:
  std::map<std::string, RelationSchema, std::less<>> relations_;
};

/// A ground atom, stored key-first: `key` holds the constants at the key
/// positions in ascending position order, `value` the remaining ones.
struct Fact {
  std::string relation;
  std::vector<std::string> key;
  std::vector<std::string> value;

  auto operator<=>(const Fact&) const = default;
  bool operator==(const Fact&) const = default;
};

std::string to_string(const Fact& fact);

/// Immutable set of facts with its partition into blocks.
///
/// Facts are kept in canonical order (relation, key, value), which makes
/// every block a contiguous run; fact and block ids are positions in that
/// order. Constants are interned so the evaluation kernels can compare ints.
class Database {
 public:
  Database() = default;
  /// Validates each fact against the schema and merges duplicates.
  Database(Schema schema, std::vector<Fact> facts);

  const Schema& schema() const { return schema_; }
  std::size_t size() const { return facts_.size(); }
  bool empty() const { return facts_.empty(); }
  const Fact& fact(FactId id) const { return facts_[id]; }
  const std::vector<Fact>& facts() const { return facts_; }
  std::optional<FactId> find(const Fact& fact) const;

  std::size_t block_count() const { return block_begin_.size(); }
  std::span<const FactId> block(BlockId id) const;
  BlockId block_of(FactId id) const { return block_of_[id]; }
  std::size_t duplicates_merged() const { return duplicates_; }

  std::span<const int> terms(FactId id) const;
  int relation_of(FactId id) const { return relation_of_[id]; }
  std::optional<int> relation_index(std::string_view name) const;
  std::span<const FactId> facts_of(int relation) const;
  const std::vector<std::string>& constants() const { return constants_; }
  std::optional<int> constant_id(std::string_view name) const;

  bool operator==(const Database& other) const {
    return schema_ == other.schema_ && facts_ == other.facts_;
  }

 private:
  Schema schema_;
  std::vector<Fact> facts_;
  std::size_t duplicates_ = 0;

  std::vector<FactId> ids_;  // 0..n-1, backing store for block spans
  std::vector<std::uint32_t> block_begin_;
  std::vector<BlockId> block_of_;

  std::vector<std::string> constants_;
  std::map<std::string, int, std::less<>> constant_ids_;
  std::vector<std::string> relation_names_;
  std::vector<int> relation_of_;
  std::vector<std::uint32_t> term_offset_;
  std::vector<int> term_store_;
  std::vector<std::vector<FactId>> by_relation_;
};

struct Atom {
  std::string relation;
  std::vector<std::string> key;
  std::vector<std::string> value;

  int arity() const { return static_cast<int>(key.size() + value.size()); }
  bool operator==(const Atom&) const = default;
};

/// Boolean conjunctive query; atoms are kept in written order.
class ConjunctiveQuery {
 public:
  ConjunctiveQuery() = default;
  /// Throws QueryShapeError when the same relation is used with different
  /// arities or key sizes, or when there are no atoms.
  explicit ConjunctiveQuery(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const Atom& atom(std::size_t i) const { return atoms_[i]; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<std::string>& variables() const { return variables_; }
  /// Variable ids of atom i, key first.
  const std::vector<int>& atom_terms(std::size_t i) const { return atom_terms_[i]; }
  std::optional<int> variable_id(std::string_view name) const;

  bool is_self_join_free() const;
  /// R1(x0; x1) & R2(x1; x2) & ... with pairwise distinct variables.
  bool is_path() const;
  /// Schema with one relation per distinct name, key on the leading positions.
  Schema implied_schema() const;

  bool operator==(const ConjunctiveQuery& other) const { return atoms_ == other.atoms_; }

 private:
  std::vector<Atom> atoms_;
  std::vector<std::string> variables_;
  std::vector<std::vector<int>> atom_terms_;
};

std::string to_string(const ConjunctiveQuery& q);

/// One fact per atom, in atom order; facts may repeat.
using Solution = std::vector<FactId>;

/// Every solution of q in db. Throws SchemaError if a relation of q is
/// declared in db with a different arity or key size.
std::vector<Solution> solutions(const Database& db, const ConjunctiveQuery& q);

/// Solutions that only use facts with allowed[f] set.
std::vector<Solution> solutions(const Database& db, const ConjunctiveQuery& q,
                                const std::vector<bool>& allowed);

/// Distinct fact sets of the solutions, each sorted, in ascending order.
std::vector<std::vector<FactId>> solution_sets(const Database& db, const ConjunctiveQuery& q);

/// One fact per block: chosen[b] is the representative of block b.
struct Repair {
  std::vector<FactId> chosen;
  bool operator==(const Repair&) const = default;
};

inline constexpr std::uint64_t kDefaultRepairLimit = 1'000'000;

/// Product of block sizes, saturating at UINT64_MAX.
std::uint64_t repair_count(const Database& db);

/// Throws LimitExceeded when repair_count(db) > limit.
void check_repair_limit(const Database& db, std::uint64_t limit);

/// Repair number `index` in canonical order: block 0 is the most
/// significant digit and facts within a block are taken in id order.
Repair repair_at(const Database& db, std::uint64_t index);

std::vector<bool> fact_mask(const Database& db, const Repair& repair);

/// Walks all repairs in canonical order.
///
///   for (RepairCursor it(db); !it.done(); it.next()) use(*it);
class RepairCursor {
 public:
  explicit RepairCursor(const Database& db, std::uint64_t limit = kDefaultRepairLimit);

  bool done() const { return done_; }
  const Repair& operator*() const { return current_; }
  const Repair* operator->() const { return &current_; }
  std::uint64_t index() const { return index_; }
  void next();

 private:
  const Database* db_;
  Repair current_;
  std::vector<std::uint32_t> digit_;
  std::uint64_t index_ = 0;
  bool done_ = false;
};

}  // namespace cqa
