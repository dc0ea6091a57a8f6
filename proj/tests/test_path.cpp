#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cqa/fixpoint.hpp"
#include "cqa/generators.hpp"
#include "cqa/oracle.hpp"
#include "cqa/parse.hpp"
#include "cqa/path.hpp"
#include "cqa/queries.hpp"
#include "support.hpp"

using namespace cqa;
using namespace cqa::path;

namespace {

using Word = std::vector<std::string>;

PathWord pw(std::initializer_list<const char*> letters) {
  PathWord w;
  for (const char* l : letters) w.letters.emplace_back(l);
  return w;
}

PathWord random_word(std::uint64_t seed, std::size_t max_len = 6) {
  gen::Rng rng(seed);
  const char* letters[] = {"R", "X", "Y"};
  PathWord w;
  std::size_t n = rng.uniform(1, max_len);
  for (std::size_t i = 0; i < n; ++i) w.letters.emplace_back(letters[rng.uniform(0, 2)]);
  return w;
}

// Acceptance by direct search over (state, position) with the epsilon rule
// read off the word: from prefix s.R jump back to any shorter prefix t.R.
bool brute_accepts(const PathWord& w, const Word& input) {
  const std::size_t n = w.size();
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::function<bool(std::size_t, std::size_t)> go = [&](std::size_t state, std::size_t pos) {
    if (!seen.insert({state, pos}).second) return false;
    if (pos == input.size() && state == n) return true;
    if (state < n && pos < input.size() && w.letters[state] == input[pos] && go(state + 1, pos + 1)) {
      return true;
    }
    for (std::size_t t = 1; t < state; ++t) {
      if (w.letters[t - 1] == w.letters[state - 1] && go(t, pos)) return true;
    }
    return false;
  };
  return go(0, 0);
}

bool has_factor(const Word& input, const PathWord& w) {
  return std::search(input.begin(), input.end(), w.letters.begin(), w.letters.end()) != input.end();
}

bool has_prefix(const Word& input, const PathWord& w) {
  return input.size() >= w.size() && std::equal(w.letters.begin(), w.letters.end(), input.begin());
}

bool violates(const Word& input, const PathWord& w, Inclusion mode) {
  return mode == Inclusion::factor ? !has_factor(input, w) : !has_prefix(input, w);
}

// Shortest violating word of length <= max_len, by enumerating all words.
std::optional<Word> brute_counterexample(const PathWord& w, Inclusion mode, std::size_t max_len) {
  std::vector<std::string> sigma(w.letters.begin(), w.letters.end());
  std::sort(sigma.begin(), sigma.end());
  sigma.erase(std::unique(sigma.begin(), sigma.end()), sigma.end());
  for (std::size_t len = 0; len <= max_len; ++len) {
    std::vector<std::size_t> digits(len, 0);
    while (true) {
      Word input;
      for (std::size_t d : digits) input.push_back(sigma[d]);
      if (brute_accepts(w, input) && violates(input, w, mode)) return input;
      std::size_t i = 0;
      while (i < len && ++digits[i] == sigma.size()) digits[i++] = 0;
      if (i == len) break;
    }
  }
  return std::nullopt;
}

Database random_path_db(const PathWord& w, std::uint64_t seed, std::size_t blocks, std::size_t domain) {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < w.size(); ++i) {
    atoms.push_back(Atom{w.letters[i], {"x" + std::to_string(i)}, {"x" + std::to_string(i + 1)}});
  }
  return testing::random_db_for(ConjunctiveQuery(std::move(atoms)), seed, blocks, 3, domain);
}

}  // namespace

TEST_CASE("automaton examples") {
  PathAutomaton one(pw({"R"}));
  CHECK(one.state_count() == 2);
  CHECK(one.epsilon_edges().empty());

  PathAutomaton q2p(word_of(queries::q2p()));
  CHECK(q2p.state_count() == 7);
  const auto& eps = q2p.epsilon_edges();
  CHECK(std::find(eps.begin(), eps.end(), std::make_pair<std::size_t, std::size_t>(3, 1)) != eps.end());

  PathAutomaton rr(pw({"R", "R"}));
  CHECK(rr.state_count() == 3);
  CHECK(rr.epsilon_edges() == std::vector<std::pair<std::size_t, std::size_t>>{{2, 1}});
  CHECK(rr.accepts({"R", "R", "R"}));
  CHECK_FALSE(rr.accepts({"R"}));
  CHECK(rr.alphabet() == std::vector<std::string>{"R"});

  CHECK(to_string(word_of(queries::q3p())) == "R X R X R Y R Y");
  CHECK_THROWS_AS(word_of(queries::q2()), QueryShapeError);
  CHECK(q2p.dot().find("digraph") != std::string::npos);
}

TEST_CASE("epsilon edges are well formed") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    PathWord w = random_word(seed, 8);
    PathAutomaton a(w);
    for (auto [m, p] : a.epsilon_edges()) {
      CHECK(p >= 1);
      CHECK(p < m);
      CHECK(w.letters[m - 1] == w.letters[p - 1]);
    }
  }
}

TEST_CASE("automaton acceptance matches direct search") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    PathWord w = random_word(seed, 5);
    PathAutomaton a(w);
    std::vector<std::string> sigma = a.alphabet();
    for (std::size_t len = 0; len <= 7; ++len) {
      std::vector<std::size_t> digits(len, 0);
      while (true) {
        Word input;
        for (std::size_t d : digits) input.push_back(sigma[d]);
        CHECK(a.accepts(input) == brute_accepts(w, input));
        std::size_t i = 0;
        while (i < len && ++digits[i] == sigma.size()) digits[i++] = 0;
        if (i == len) break;
      }
    }
  }
}

TEST_CASE("factor and prefix conditions on the example words") {
  PathWord q2p = word_of(queries::q2p());
  PathWord q3p = word_of(queries::q3p());
  CHECK(factor_condition(q2p));
  CHECK_FALSE(prefix_condition(q2p));
  CHECK_FALSE(factor_condition(q3p));
  CHECK(factor_condition(pw({"R"})));
  CHECK(prefix_condition(pw({"R"})));
  CHECK(prefix_condition(pw({"R1", "R2"})));
  CHECK_FALSE(counterexample_word(q2p, Inclusion::factor));
  CHECK_FALSE(counterexample_word(pw({"R"}), Inclusion::prefix));
}

TEST_CASE("q3' factor counterexample has the repeated-loop shape") {
  PathWord q3p = word_of(queries::q3p());
  auto w = counterexample_word(q3p, Inclusion::factor);
  REQUIRE(w);
  CHECK(brute_accepts(q3p, *w));
  CHECK_FALSE(has_factor(*w, q3p));
  // u = R X, T = R, v = X R Y, w = Y gives u T v T v T w
  CHECK(*w == Word{"R", "X", "R", "X", "R", "Y", "R", "X", "R", "Y", "R", "Y"});
  CHECK(w->size() == brute_counterexample(q3p, Inclusion::factor, 12)->size());
}

TEST_CASE("conditions and counterexamples agree with word enumeration") {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    PathWord w = random_word(seed, 5);
    for (Inclusion mode : {Inclusion::factor, Inclusion::prefix}) {
      auto got = counterexample_word(w, mode);
      auto brute = brute_counterexample(w, mode, 9);
      bool holds = mode == Inclusion::factor ? factor_condition(w) : prefix_condition(w);
      CHECK(holds == !got.has_value());
      if (got) {
        CHECK(brute_accepts(w, *got));
        CHECK(violates(*got, w, mode));
        if (brute) CHECK(got->size() == brute->size());
      } else {
        CHECK_FALSE(brute);
      }
    }
    if (prefix_condition(w)) CHECK(factor_condition(w));
  }
}

TEST_CASE("N fixpoint: consistent path database") {
  Database db = parse_database(
      "R/2 key 1\nX/2 key 1\nY/2 key 1\n"
      "R(a; b)\nX(b; c)\nR(c; d)\nY(d; e)\nR(e; f)\nY(f; g)\n");
  auto r = run_n_fixpoint(db, word_of(queries::q2p()));
  CHECK(r.accepted);
  for (int c = 0; c < static_cast<int>(r.table.constant_count()); ++c) CHECK(r.table.round_of(c, 6) == 0);
  CHECK(r.table.size() >= r.table.constant_count() + 6);

  Database bad = parse_database("R/3 key 1\nR(a; b, c)\n");
  CHECK_THROWS_AS(run_n_fixpoint(bad, pw({"R"})), SchemaError);
}

TEST_CASE("N = certain = Cqk under the factor condition") {
  std::size_t words = 0, accepted = 0;
  for (std::uint64_t seed = 0; seed < 400 && words < 25; ++seed) {
    PathWord w = random_word(seed, 4);
    if (!factor_condition(w)) continue;
    ++words;
    for (std::uint64_t s = 0; s < 6; ++s) {
      Database db = random_path_db(w, seed * 17 + s, 6, 3);
      auto n = run_n_fixpoint(db, w);
      bool truth = certain(db, ConjunctiveQuery(queries::path_query(w.letters)));
      CHECK(n.accepted == truth);
      CHECK(run_cqk(db, queries::path_query(w.letters), w.size()).accepted == truth);
      accepted += truth;
      // stamps only grow and stay below the trivial bound
      int max_round = *std::max_element(n.table.raw().begin(), n.table.raw().end());
      CHECK(max_round < n.rounds);
      CHECK(static_cast<std::size_t>(n.rounds) <= n.table.constant_count() * (w.size() + 1) + 1);
    }
  }
  CHECK(words >= 15);
  CHECK(accepted > 0);
}

TEST_CASE("prefix condition: Cqk accepts within |q| rounds") {
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    PathWord w = random_word(seed, 3);
    if (!prefix_condition(w)) continue;
    ConjunctiveQuery q = queries::path_query(w.letters);
    Database db = random_path_db(w, seed, 6, 3);
    auto r = run_cqk(db, q, w.size());
    if (certain(db, q)) {
      REQUIRE(r.empty_set_round);
      CHECK(static_cast<std::size_t>(*r.empty_set_round) <= w.size());
    }
  }
}
