#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "cqa/core.hpp"
#include "cqa/generators.hpp"
#include "cqa/kset.hpp"
#include "cqa/parse.hpp"
#include "cqa/queries.hpp"
#include "support.hpp"

using namespace cqa;

TEST_CASE("parse_database: single fact, shared key, arity mismatch") {
  Database one = parse_database("R/3 key 1\nR(a; b, c)");
  CHECK(one.size() == 1);
  CHECK(one.block_count() == 1);

  Database two = parse_database("R/3 key 1\nR(a; b, c)\nR(a; c, b)\n");
  CHECK(two.size() == 2);
  REQUIRE(two.block_count() == 1);
  CHECK(two.block(0).size() == 2);

  try {
    parse_database("R/3 key 1\nR(a; b)\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("arity") != std::string::npos);
  }
}

TEST_CASE("parse_database: errors carry line numbers") {
  auto line_of = [](const char* text) {
    try {
      parse_database(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("R/2 key 1\n\n# c\nR(a; b\n") == 4);
  CHECK(line_of("R(a; b)\n") == 1);                        // undeclared
  CHECK(line_of("R/2 key 1\nR(a, b; c)\n") == 2);          // wrong key split
  CHECK(line_of("R/2 key 3\n") == 1);                      // key outside arity
  CHECK(line_of("R/2 key 1\nR/2 key 1\n") == 2);           // declared twice
  CHECK(line_of("R/x key 1\n") == 1);
  CHECK(line_of("R/2 key 1\nR(a; b) junk\n") == 2);
}

TEST_CASE("parse_database: comments, full keys, duplicates") {
  std::vector<std::string> warnings;
  Database db = parse_database(
      "# schema\nE/2 key 1,2   # no constraint\nE(a, b)\nE(a, c)\nE(a, b)\n", &warnings);
  CHECK(db.size() == 2);
  CHECK(db.block_count() == 2);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("line 5") != std::string::npos);

  Database nokey = parse_database("T/2 key\nT(; a, b)\nT(; c, d)\n");
  CHECK(nokey.block_count() == 1);
  CHECK(nokey.block(0).size() == 2);
}

TEST_CASE("parse_database: non-leading key positions") {
  Database db = parse_database("S/3 key 2\nS(k; a, b)\nS(k; c, d)\nS(j; a, b)\n");
  CHECK(db.block_count() == 2);
  auto s = testing::positional(db, *db.find(Fact{"S", {"k"}, {"a", "b"}}));
  CHECK(s == std::vector<std::string>{"a", "k", "b"});
}

TEST_CASE("parse_query: the example queries") {
  ConjunctiveQuery q1 = parse_query("R1(x; y) & R2(y; z)");
  CHECK(q1.size() == 2);
  CHECK(q1.is_self_join_free());
  CHECK(q1.atom(0).key == std::vector<std::string>{"x"});

  ConjunctiveQuery q4 = parse_query("R(x; y, z) & R(z; x, y)");
  CHECK_FALSE(q4.is_self_join_free());
  CHECK_FALSE(q4.is_path());
  CHECK(queries::is_q4_shape(q4));

  ConjunctiveQuery p = parse_query("R(x0; x1) & X(x1; x2)");
  CHECK(p.is_path());

  CHECK(parse_query("R(x;\n y) &\n S(y; z) # trailing\n").size() == 2);
  CHECK_THROWS_AS(parse_query("R(x; y) & R(x; y, z)"), ParseError);
  CHECK_THROWS_AS(parse_query("   # nothing\n"), ParseError);
  CHECK_THROWS_AS(parse_query("R(x; y) S(y; z)"), ParseError);
}

TEST_CASE("is_path rejects repeated variables and wrong shapes") {
  CHECK_FALSE(parse_query("R(x; y) & S(y; x)").is_path());
  CHECK_FALSE(parse_query("R(x; y) & S(z; w)").is_path());
  CHECK_FALSE(parse_query("R(x, y; z)").is_path());
  CHECK(queries::q2p().is_path());
  CHECK(queries::q3p().is_path());
}

TEST_CASE("render and parse round-trip") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    gen::RandomProfile p;
    p.relations = {{"R", 3, 1}, {"S", 2, 2}, {"T", 4, 2}};
    p.n_blocks = 8;
    p.max_block_size = 3;
    p.seed = seed;
    Database db = gen::gen_random(p);
    CHECK(parse_database(render_database(db)) == db);
  }
  ConjunctiveQuery q = queries::q5();
  CHECK(parse_query(render_query(q)) == q);
}

TEST_CASE("solutions: unique valuation and self-loop") {
  Database db = parse_database("R1/2 key 1\nR2/2 key 1\nR1(a; b)\nR2(b; c)\n");
  auto sols = solutions(db, queries::q1());
  REQUIRE(sols.size() == 1);
  CHECK(to_string(db.fact(sols[0][0])) == "R1(a; b)");
  CHECK(to_string(db.fact(sols[0][1])) == "R2(b; c)");

  Database loop = parse_database("R/3 key 1\nR(a; a, a)\n");
  auto s4 = solutions(loop, queries::q4());
  REQUIRE(s4.size() == 1);
  CHECK(s4[0] == Solution{0, 0});
}

TEST_CASE("solutions agree with brute-force assignment on small random databases") {
  std::vector<ConjunctiveQuery> qs = {queries::q1(), queries::q2(), queries::q3(), queries::q4(),
                                      queries::q5(), parse_query("R(x; y, x) & R(y; x, z)")};
  for (const auto& q : qs) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      Database db = testing::random_db_for(q, seed, 3, 2, 3);
      if (db.size() > 6) continue;
      auto got = solutions(db, q);
      std::set<std::vector<FactId>> mine(got.begin(), got.end());
      CHECK(mine.size() == got.size());
      CHECK(mine == testing::brute_solutions(db, q));
    }
  }
}

TEST_CASE("solutions: schema mismatch between query and database") {
  Database db = parse_database("R1/3 key 1\nR1(a; b, c)\n");
  CHECK_THROWS_AS(solutions(db, queries::q1()), SchemaError);
  Database other = parse_database("Q/1 key 1\nQ(a)\n");
  CHECK(solutions(other, queries::q1()).empty());
}

TEST_CASE("repairs: counts and enumeration") {
  Database db = parse_database("R/2 key 1\nR(a; 1)\nR(a; 2)\nR(b; 1)\nR(b; 2)\nR(b; 3)\n");
  CHECK(repair_count(db) == 6);
  std::set<std::vector<FactId>> seen;
  for (RepairCursor it(db); !it.done(); it.next()) {
    CHECK(it->chosen == repair_at(db, it.index()).chosen);
    seen.insert(it->chosen);
  }
  CHECK(seen.size() == 6);

  Database consistent = parse_database("R/2 key 1\nR(a; 1)\nR(b; 1)\n");
  CHECK(repair_count(consistent) == 1);

  CHECK(repair_count(gen::gen_dn(4)) == 648);
  CHECK_THROWS_AS(RepairCursor(db, 5), LimitExceeded);
}

TEST_CASE("repair properties on random databases") {
  auto q = queries::q2();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Database db = testing::random_db_for(q, seed, 5, 3, 3);
    auto all = testing::brute_solutions(db, q);
    for (RepairCursor it(db); !it.done(); it.next()) {
      REQUIRE(it->chosen.size() == db.block_count());
      for (BlockId b = 0; b < db.block_count(); ++b) CHECK(db.block_of(it->chosen[b]) == b);
      for (const Solution& s : solutions(db, q, fact_mask(db, *it))) CHECK(all.count(s) == 1);
    }
  }
}

TEST_CASE("blocks partition the facts by relation and key") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Database db = testing::random_db_for(queries::q5(), seed, 8, 3, 3);
    for (FactId a = 0; a < db.size(); ++a) {
      for (FactId b = 0; b < db.size(); ++b) {
        bool same = db.fact(a).relation == db.fact(b).relation && db.fact(a).key == db.fact(b).key;
        CHECK(same == (db.block_of(a) == db.block_of(b)));
      }
    }
  }
}

TEST_CASE("KSetIndex: rank and unrank are inverse, levels are colex") {
  KSetIndex idx(7, 3, 1000);
  CHECK(idx.size() == count_ksets(7, 3));
  CHECK(idx.size() == 1 + 7 + 21 + 35);
  std::vector<FactId> s;
  for (std::uint64_t r = 0; r < idx.size(); ++r) {
    idx.unrank(r, s);
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(idx.rank(s) == r);
    CHECK(idx.level_of(r) == s.size());
  }
  for (std::size_t m = 0; m <= 3; ++m) {
    std::vector<FactId> set(m);
    for (std::size_t i = 0; i < m; ++i) set[i] = static_cast<FactId>(i);
    std::uint64_t expected = idx.level_begin(m);
    do {
      CHECK(idx.rank(set) == expected++);
    } while (idx.next(set));
    CHECK(expected == idx.level_end(m));
  }
  CHECK_THROWS_AS(KSetIndex(40, 6, 1000), LimitExceeded);
}
