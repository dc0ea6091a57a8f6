#include "cqa/path.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace cqa::path {

PathWord word_of(const ConjunctiveQuery& q) {
  if (!q.is_path()) throw QueryShapeError("not a path query: " + to_string(q));
  PathWord w;
  for (const Atom& a : q.atoms()) w.letters.push_back(a.relation);
  return w;
}

std::string to_string(const PathWord& w) {
  std::string out;
  for (const auto& l : w.letters) {
    if (!out.empty()) out += ' ';
    out += l;
  }
  return out;
}

PathAutomaton::PathAutomaton(PathWord word) : word_(std::move(word)) {
  const auto& l = word_.letters;
  for (std::size_t m = 2; m <= l.size(); ++m) {
    for (std::size_t p = 1; p < m; ++p) {
      if (l[p - 1] == l[m - 1]) epsilon_.emplace_back(m, p);
    }
  }
  alphabet_ = l;
  std::sort(alphabet_.begin(), alphabet_.end());
  alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()), alphabet_.end());
}

std::vector<bool> PathAutomaton::closure(std::vector<bool> states) const {
  // Epsilon edges only lead to shorter prefixes, so one pass from the
  // longest state down is enough.
  for (std::size_t m = states.size(); m-- > 0;) {
    if (!states[m]) continue;
    for (auto [from, to] : epsilon_) {
      if (from == m) states[to] = true;
    }
  }
  return states;
}

std::vector<bool> PathAutomaton::step(const std::vector<bool>& states,
                                      const std::string& letter) const {
  std::vector<bool> next(state_count(), false);
  for (std::size_t m = 0; m + 1 < state_count(); ++m) {
    if (states[m] && word_.letters[m] == letter) next[m + 1] = true;
  }
  return closure(std::move(next));
}

bool PathAutomaton::accepts(const std::vector<std::string>& input) const {
  std::vector<bool> states(state_count(), false);
  states[0] = true;
  states = closure(std::move(states));
  for (const auto& letter : input) states = step(states, letter);
  return states[accepting()];
}

std::string PathAutomaton::dot() const {
  std::string out = "digraph automaton {\n  rankdir=LR;\n";
  for (std::size_t m = 0; m < state_count(); ++m) {
    std::string label;
    for (std::size_t i = 0; i < m; ++i) label += (i ? " " : "") + word_.letters[i];
    if (label.empty()) label = "ε";
    out += "  s" + std::to_string(m) + " [label=\"" + label + "\"" +
           (m == accepting() ? ", shape=doublecircle" : "") + "];\n";
  }
  for (std::size_t m = 0; m + 1 < state_count(); ++m) {
    out += "  s" + std::to_string(m) + " -> s" + std::to_string(m + 1) + " [label=\"" +
           word_.letters[m] + "\"];\n";
  }
  for (auto [from, to] : epsilon_) {
    out += "  s" + std::to_string(from) + " -> s" + std::to_string(to) +
           " [label=\"ε\", style=dashed];\n";
  }
  out += "}\n";
  return out;
}

namespace {

// Deterministic tracker for the query word inside the input read so far.
// Returns n once the inclusion is guaranteed for every extension.
class Tracker {
 public:
  Tracker(const PathWord& w, Inclusion mode) : w_(w.letters), mode_(mode), fail_(w_.size(), 0) {
    for (std::size_t i = 1, j = 0; i < w_.size(); ++i) {
      while (j > 0 && w_[i] != w_[j]) j = fail_[j - 1];
      if (w_[i] == w_[j]) ++j;
      fail_[i] = j;
    }
  }

  std::size_t done() const { return w_.size(); }
  std::size_t dead() const { return w_.size() + 1; }  // prefix mode: mismatch seen

  std::size_t next(std::size_t j, const std::string& a) const {
    if (j == dead()) return j;
    if (mode_ == Inclusion::prefix) return w_[j] == a ? j + 1 : dead();
    while (j > 0 && w_[j] != a) j = fail_[j - 1];
    return w_[j] == a ? j + 1 : 0;
  }

 private:
  std::vector<std::string> w_;
  Inclusion mode_;
  std::vector<std::size_t> fail_;
};

}  // namespace

std::optional<std::vector<std::string>> counterexample_word(const PathWord& w, Inclusion mode) {
  if (w.letters.empty()) return std::nullopt;
  PathAutomaton a(w);
  Tracker tracker(w, mode);

  using Node = std::pair<std::vector<bool>, std::size_t>;
  std::map<Node, std::size_t> id;
  std::vector<Node> nodes;
  std::vector<std::pair<long, std::string>> parent;

  std::vector<bool> start(a.state_count(), false);
  start[0] = true;
  Node root{a.closure(start), 0};
  id.emplace(root, 0);
  nodes.push_back(root);
  parent.emplace_back(-1, "");

  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    std::size_t cur = queue.front();
    queue.pop_front();
    const auto [states, j] = nodes[cur];
    if (states[a.accepting()] && j != tracker.done()) {
      std::vector<std::string> word;
      for (long x = static_cast<long>(cur); parent[x].first >= 0; x = parent[x].first) {
        word.push_back(parent[x].second);
      }
      std::reverse(word.begin(), word.end());
      return word;
    }
    for (const auto& letter : a.alphabet()) {
      Node next{a.step(states, letter), tracker.next(j, letter)};
      if (next.second == tracker.done()) continue;
      if (std::none_of(next.first.begin(), next.first.end(), [](bool b) { return b; })) continue;
      if (id.count(next)) continue;
      id.emplace(next, nodes.size());
      nodes.push_back(next);
      parent.emplace_back(static_cast<long>(cur), letter);
      queue.push_back(nodes.size() - 1);
    }
  }
  return std::nullopt;
}

bool factor_condition(const PathWord& w) { return !counterexample_word(w, Inclusion::factor); }
bool prefix_condition(const PathWord& w) { return !counterexample_word(w, Inclusion::prefix); }

std::size_t NTable::size() const {
  return static_cast<std::size_t>(std::count_if(rounds_.begin(), rounds_.end(), [](int r) { return r >= 0; }));
}

NResult run_n_fixpoint(const Database& db, const PathWord& w) {
  const std::size_t n = w.size();
  const std::size_t constants = db.constants().size();
  const std::size_t states = n + 1;

  // succ[i][c]: values b of the facts letters[i](c; b); has[i][c]: any such fact.
  std::map<std::string, std::vector<std::vector<int>>> by_letter;
  for (const auto& letter : w.letters) {
    if (by_letter.count(letter)) continue;
    auto& succ = by_letter[letter];
    succ.assign(constants, {});
    const RelationSchema* rel = db.schema().find(letter);
    if (rel == nullptr) continue;
    if (rel->arity != 2 || rel->key_positions != std::vector<int>{1}) {
      throw SchemaError("relation " + letter + " must be binary with key {1} for path queries");
    }
    for (FactId f : db.facts_of(*db.relation_index(letter))) {
      auto t = db.terms(f);
      succ[static_cast<std::size_t>(t[0])].push_back(t[1]);
    }
  }
  std::vector<const std::vector<std::vector<int>>*> succ_at(n);
  for (std::size_t i = 0; i < n; ++i) succ_at[i] = &by_letter.at(w.letters[i]);

  // For each state m, the prefix lengths whose next letter may be read from m.
  PathAutomaton a(w);
  std::vector<std::vector<std::size_t>> moves(states);
  for (std::size_t m = 0; m < n; ++m) moves[m].push_back(m);
  for (auto [from, to] : a.epsilon_edges()) {
    if (to < n) moves[from].push_back(to);
  }

  NResult result{false, NTable(constants, states), 0};
  auto& rounds = result.table.raw();
  for (std::size_t c = 0; c < constants; ++c) rounds[c * states + n] = 0;

  std::vector<char> added(rounds.size(), 0);
  int round = 0;
  bool changed = true;
  while (changed) {
    int any = 0;
#pragma omp parallel for schedule(dynamic, 64) reduction(| : any)
    for (std::int64_t ci = 0; ci < static_cast<std::int64_t>(constants); ++ci) {
      const auto c = static_cast<std::size_t>(ci);
      for (std::size_t m = 0; m < states; ++m) {
        if (rounds[c * states + m] >= 0) continue;
        for (std::size_t p : moves[m]) {
          const auto& bs = (*succ_at[p])[c];
          bool ok = !bs.empty() && std::all_of(bs.begin(), bs.end(), [&](int b) {
            return rounds[static_cast<std::size_t>(b) * states + p + 1] >= 0;
          });
          if (ok) {
            added[c * states + m] = 1;
            any = 1;
            break;
          }
        }
      }
    }
    changed = any != 0;
    ++round;
    if (changed) {
      for (std::size_t i = 0; i < rounds.size(); ++i) {
        if (added[i]) {
          rounds[i] = round;
          added[i] = 0;
        }
      }
    }
  }
  result.rounds = round;
  for (std::size_t c = 0; c < constants; ++c) {
    if (rounds[c * states] >= 0) result.accepted = true;
  }
  return result;
}

}  // namespace cqa::path
