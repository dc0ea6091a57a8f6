#include "cqa/core.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace cqa {

ParseError::ParseError(int line, const std::string& message)
    : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

void Schema::add(RelationSchema relation) {
  if (relation.arity <= 0) {
    throw SchemaError("relation " + relation.name + ": arity must be positive");
  }
  std::sort(relation.key_positions.begin(), relation.key_positions.end());
  for (std::size_t i = 0; i < relation.key_positions.size(); ++i) {
    int p = relation.key_positions[i];
    if (p < 1 || p > relation.arity) {
      throw SchemaError("relation " + relation.name + ": key position " + std::to_string(p) +
                        " outside [1, " + std::to_string(relation.arity) + "]");
    }
    if (i > 0 && relation.key_positions[i - 1] == p) {
      throw SchemaError("relation " + relation.name + ": repeated key position " +
                        std::to_string(p));
    }
  }
  if (relations_.count(relation.name) != 0) {
    throw SchemaError("relation " + relation.name + " declared twice");
  }
  std::string name = relation.name;
  relations_.emplace(std::move(name), std::move(relation));
}

const RelationSchema* Schema::find(std::string_view name) const {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : &it->second;
}

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += items[i];
  }
  return out;
}

std::string render_split(const std::string& relation, const std::vector<std::string>& key,
                         const std::vector<std::string>& value) {
  std::string out = relation + "(" + join(key);
  if (!value.empty()) out += "; " + join(value);
  out += ")";
  return out;
}

}  // namespace

std::string to_string(const Fact& fact) { return render_split(fact.relation, fact.key, fact.value); }

Database::Database(Schema schema, std::vector<Fact> facts) : schema_(std::move(schema)) {
  for (const Fact& f : facts) {
    const RelationSchema* rel = schema_.find(f.relation);
    if (rel == nullptr) throw SchemaError("undeclared relation " + f.relation);
    if (static_cast<int>(f.key.size() + f.value.size()) != rel->arity) {
      throw SchemaError("arity mismatch for " + to_string(f) + ": expected " +
                        std::to_string(rel->arity));
    }
    if (static_cast<int>(f.key.size()) != rel->key_size()) {
      throw SchemaError("key split mismatch for " + to_string(f) + ": expected " +
                        std::to_string(rel->key_size()) + " key constants");
    }
  }
  std::sort(facts.begin(), facts.end());
  auto last = std::unique(facts.begin(), facts.end());
  duplicates_ = static_cast<std::size_t>(facts.end() - last);
  facts.erase(last, facts.end());
  facts_ = std::move(facts);

  const std::size_t n = facts_.size();
  ids_.resize(n);
  block_of_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids_[i] = static_cast<FactId>(i);
    bool fresh = i == 0 || facts_[i].relation != facts_[i - 1].relation ||
                 facts_[i].key != facts_[i - 1].key;
    if (fresh) block_begin_.push_back(static_cast<std::uint32_t>(i));
    block_of_[i] = static_cast<BlockId>(block_begin_.size() - 1);
  }

  for (const auto& [name, rel] : schema_.relations()) {
    relation_names_.push_back(name);
  }
  by_relation_.resize(relation_names_.size());
  relation_of_.resize(n);
  term_offset_.reserve(n + 1);
  term_offset_.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    const Fact& f = facts_[i];
    int rel = *relation_index(f.relation);
    relation_of_[i] = rel;
    by_relation_[rel].push_back(static_cast<FactId>(i));
    auto intern = [&](const std::string& c) {
      auto [it, inserted] = constant_ids_.try_emplace(c, static_cast<int>(constants_.size()));
      if (inserted) constants_.push_back(c);
      term_store_.push_back(it->second);
    };
    for (const auto& c : f.key) intern(c);
    for (const auto& c : f.value) intern(c);
    term_offset_.push_back(static_cast<std::uint32_t>(term_store_.size()));
  }
}

std::optional<FactId> Database::find(const Fact& fact) const {
  auto it = std::lower_bound(facts_.begin(), facts_.end(), fact);
  if (it == facts_.end() || *it != fact) return std::nullopt;
  return static_cast<FactId>(it - facts_.begin());
}

std::span<const FactId> Database::block(BlockId id) const {
  std::size_t begin = block_begin_[id];
  std::size_t end = id + 1 < block_begin_.size() ? block_begin_[id + 1] : facts_.size();
  return std::span<const FactId>(ids_).subspan(begin, end - begin);
}

std::span<const int> Database::terms(FactId id) const {
  return std::span<const int>(term_store_).subspan(term_offset_[id],
                                                   term_offset_[id + 1] - term_offset_[id]);
}

std::optional<int> Database::relation_index(std::string_view name) const {
  auto it = std::lower_bound(relation_names_.begin(), relation_names_.end(), name);
  if (it == relation_names_.end() || *it != name) return std::nullopt;
  return static_cast<int>(it - relation_names_.begin());
}

std::span<const FactId> Database::facts_of(int relation) const { return by_relation_[relation]; }

std::optional<int> Database::constant_id(std::string_view name) const {
  auto it = constant_ids_.find(name);
  if (it == constant_ids_.end()) return std::nullopt;
  return it->second;
}

ConjunctiveQuery::ConjunctiveQuery(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw QueryShapeError("a query needs at least one atom");
  std::map<std::string, std::pair<int, int>> shape;
  std::map<std::string, int> ids;
  for (const Atom& a : atoms_) {
    auto [it, inserted] =
        shape.try_emplace(a.relation, a.arity(), static_cast<int>(a.key.size()));
    if (!inserted && it->second != std::make_pair(a.arity(), static_cast<int>(a.key.size()))) {
      throw QueryShapeError("relation " + a.relation + " used with inconsistent arity or key");
    }
    std::vector<int> terms;
    auto intern = [&](const std::string& v) {
      auto [vit, fresh] = ids.try_emplace(v, static_cast<int>(variables_.size()));
      if (fresh) variables_.push_back(v);
      terms.push_back(vit->second);
    };
    for (const auto& v : a.key) intern(v);
    for (const auto& v : a.value) intern(v);
    atom_terms_.push_back(std::move(terms));
  }
}

std::optional<int> ConjunctiveQuery::variable_id(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i] == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

bool ConjunctiveQuery::is_self_join_free() const {
  std::set<std::string> seen;
  for (const Atom& a : atoms_) {
    if (!seen.insert(a.relation).second) return false;
  }
  return true;
}

bool ConjunctiveQuery::is_path() const {
  if (atoms_.empty()) return false;
  std::set<std::string> vars;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (a.key.size() != 1 || a.value.size() != 1) return false;
    if (i > 0 && a.key[0] != atoms_[i - 1].value[0]) return false;
    if (i == 0) vars.insert(a.key[0]);
    vars.insert(a.value[0]);
  }
  return vars.size() == atoms_.size() + 1;
}

Schema ConjunctiveQuery::implied_schema() const {
  Schema schema;
  for (const Atom& a : atoms_) {
    if (schema.find(a.relation) != nullptr) continue;
    RelationSchema rel{a.relation, a.arity(), {}};
    for (int p = 1; p <= static_cast<int>(a.key.size()); ++p) rel.key_positions.push_back(p);
    schema.add(std::move(rel));
  }
  return schema;
}

std::string to_string(const ConjunctiveQuery& q) {
  std::string out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i > 0) out += " & ";
    out += render_split(q.atom(i).relation, q.atom(i).key, q.atom(i).value);
  }
  return out;
}

namespace {

struct Evaluator {
  const Database& db;
  const ConjunctiveQuery& q;
  const std::vector<bool>* allowed;
  std::vector<int> relation;  // per atom, -1 when db has no such relation
  std::vector<int> valuation;
  Solution current;
  std::vector<Solution> out;

  Evaluator(const Database& d, const ConjunctiveQuery& query, const std::vector<bool>* mask)
      : db(d), q(query), allowed(mask) {
    for (const Atom& a : q.atoms()) {
      const RelationSchema* rel = db.schema().find(a.relation);
      if (rel == nullptr) {
        relation.push_back(-1);
        continue;
      }
      if (rel->arity != a.arity() || rel->key_size() != static_cast<int>(a.key.size())) {
        throw SchemaError("query atom over " + a.relation + " does not match declared relation " +
                          rel->name + "/" + std::to_string(rel->arity));
      }
      relation.push_back(*db.relation_index(a.relation));
    }
    valuation.assign(q.variables().size(), -1);
    current.resize(q.size());
  }

  void search(std::size_t i) {
    if (i == q.size()) {
      out.push_back(current);
      return;
    }
    if (relation[i] < 0) return;
    const std::vector<int>& vars = q.atom_terms(i);
    std::vector<int> bound;
    for (FactId f : db.facts_of(relation[i])) {
      if (allowed != nullptr && !(*allowed)[f]) continue;
      std::span<const int> terms = db.terms(f);
      bound.clear();
      bool ok = true;
      for (std::size_t p = 0; p < vars.size(); ++p) {
        int& slot = valuation[vars[p]];
        if (slot < 0) {
          slot = terms[p];
          bound.push_back(vars[p]);
        } else if (slot != terms[p]) {
          ok = false;
          break;
        }
      }
      if (ok) {
        current[i] = f;
        search(i + 1);
      }
      for (int v : bound) valuation[v] = -1;
    }
  }
};

}  // namespace

std::vector<Solution> solutions(const Database& db, const ConjunctiveQuery& q) {
  Evaluator ev(db, q, nullptr);
  ev.search(0);
  return std::move(ev.out);
}

std::vector<Solution> solutions(const Database& db, const ConjunctiveQuery& q,
                                const std::vector<bool>& allowed) {
  Evaluator ev(db, q, &allowed);
  ev.search(0);
  return std::move(ev.out);
}

std::vector<std::vector<FactId>> solution_sets(const Database& db, const ConjunctiveQuery& q) {
  std::vector<std::vector<FactId>> sets;
  for (Solution s : solutions(db, q)) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    sets.push_back(std::move(s));
  }
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  return sets;
}

std::uint64_t repair_count(const Database& db) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  for (BlockId b = 0; b < db.block_count(); ++b) {
    std::uint64_t s = db.block(b).size();
    if (total > kMax / s) return kMax;
    total *= s;
  }
  return total;
}

void check_repair_limit(const Database& db, std::uint64_t limit) {
  std::uint64_t count = repair_count(db);
  if (count > limit) {
    throw LimitExceeded("database has " + std::to_string(count) + " repairs, limit is " +
                        std::to_string(limit));
  }
}

Repair repair_at(const Database& db, std::uint64_t index) {
  Repair r;
  r.chosen.resize(db.block_count());
  for (std::size_t b = db.block_count(); b-- > 0;) {
    auto block = db.block(static_cast<BlockId>(b));
    r.chosen[b] = block[index % block.size()];
    index /= block.size();
  }
  return r;
}

std::vector<bool> fact_mask(const Database& db, const Repair& repair) {
  std::vector<bool> mask(db.size(), false);
  for (FactId f : repair.chosen) mask[f] = true;
  return mask;
}

RepairCursor::RepairCursor(const Database& db, std::uint64_t limit) : db_(&db) {
  check_repair_limit(db, limit);
  digit_.assign(db.block_count(), 0);
  current_.chosen.resize(db.block_count());
  for (BlockId b = 0; b < db.block_count(); ++b) current_.chosen[b] = db.block(b)[0];
}

void RepairCursor::next() {
  for (std::size_t b = digit_.size(); b-- > 0;) {
    auto block = db_->block(static_cast<BlockId>(b));
    if (++digit_[b] < block.size()) {
      current_.chosen[b] = block[digit_[b]];
      ++index_;
      return;
    }
    digit_[b] = 0;
    current_.chosen[b] = block[0];
  }
  done_ = true;
}

}  // namespace cqa
