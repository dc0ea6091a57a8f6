#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cqa/core.hpp"

namespace cqa::path {

/// The word R1 R2 ... Rn of a path query R1(x0; x1) & ... & Rn(xn-1; xn).
struct PathWord {
  std::vector<std::string> letters;

  std::size_t size() const { return letters.size(); }
  bool operator==(const PathWord&) const = default;
};

/// Throws QueryShapeError unless q.is_path().
PathWord word_of(const ConjunctiveQuery& q);
std::string to_string(const PathWord& w);  // letters separated by spaces

/// States are the prefix lengths 0..n; n is accepting. Letter edges go
/// from m to m+1 on letters[m]. An epsilon edge goes from m to p whenever
/// 1 <= p < m and the prefixes of length m and p end with the same letter.
class PathAutomaton {
 public:
  explicit PathAutomaton(PathWord word);

  const PathWord& word() const { return word_; }
  std::size_t state_count() const { return word_.size() + 1; }
  std::size_t accepting() const { return word_.size(); }
  const std::vector<std::pair<std::size_t, std::size_t>>& epsilon_edges() const {
    return epsilon_;
  }
  /// Alphabet: the distinct letters of the word, sorted.
  const std::vector<std::string>& alphabet() const { return alphabet_; }

  /// States reachable from `states` through epsilon edges (inclusive).
  std::vector<bool> closure(std::vector<bool> states) const;
  /// Closure of the letter successors of `states`.
  std::vector<bool> step(const std::vector<bool>& states, const std::string& letter) const;
  bool accepts(const std::vector<std::string>& input) const;

  std::string dot() const;

 private:
  PathWord word_;
  std::vector<std::pair<std::size_t, std::size_t>> epsilon_;
  std::vector<std::string> alphabet_;
};

enum class Inclusion {
  factor,  // every accepted word contains the query word as a factor
  prefix,  // every accepted word starts with the query word
};

/// A shortest accepted word violating the inclusion, or nullopt if it holds.
std::optional<std::vector<std::string>> counterexample_word(const PathWord& w, Inclusion mode);

bool factor_condition(const PathWord& w);
bool prefix_condition(const PathWord& w);

/// Pairs <c, m> (constant c, prefix length m) with the round at which each
/// was added.
class NTable {
 public:
  NTable(std::size_t constant_count, std::size_t states)
      : states_(states), rounds_(constant_count * states, -1) {}

  std::size_t constant_count() const { return rounds_.size() / states_; }
  std::size_t state_count() const { return states_; }
  std::optional<int> round_of(int constant, std::size_t state) const {
    int r = rounds_[static_cast<std::size_t>(constant) * states_ + state];
    return r < 0 ? std::nullopt : std::optional<int>(r);
  }
  bool contains(int constant, std::size_t state) const { return round_of(constant, state).has_value(); }
  std::size_t size() const;

  std::vector<int>& raw() { return rounds_; }

 private:
  std::size_t states_;
  std::vector<int> rounds_;
};

struct NResult {
  bool accepted = false;
  NTable table;
  int rounds = 0;  // derivation rounds run, the last of which added nothing
};

/// The N(q, D) fixpoint. Starts from <c, n> for every constant c of db.
/// Adds <c, m> when, for the letter R that follows state m (rule 1) or the
/// target p of an epsilon edge from m (rule 2, R = letters[p]), db has an
/// R-fact with key c and every R-fact R(c; b) has <b, next> in the table.
/// Accepts iff some <c, 0> is derived. Throws SchemaError when a letter is
/// declared in db with a shape other than binary with key {1}.
NResult run_n_fixpoint(const Database& db, const PathWord& w);

}  // namespace cqa::path
