// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "cqa/fixpoint.hpp"
#include "cqa/generators.hpp"
#include "cqa/matching.hpp"
#include "cqa/oracle.hpp"
#include "cqa/path.hpp"
#include "cqa/queries.hpp"
#include "cqa/sjf.hpp"
#include "support.hpp"

using namespace cqa;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s criterion %d: %s (%s)\n", o.ok ? "PASS" : "FAIL", id, title, o.detail.c_str());
  std::fflush(stdout);
  if (!o.ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const OracleOptions kWide{std::uint64_t{1} << 40, Strategy::parallel};

Database q4_db(std::uint64_t seed) {
  return testing::random_db_for(queries::q4(), seed, 3 + seed % 5, 1 + (seed / 3) % 3, 2 + seed % 3);
}

Database binary_db(const ConjunctiveQuery& q, std::uint64_t seed, std::size_t blocks) {
  return testing::random_db_for(q, seed, blocks, 3, 3);
}

bool shapes_ok(const Database& db) {
  matching::SolutionGraph g(db);  // throws on a malformed component
  auto sols = solutions(db, queries::q4());
  std::set<std::pair<FactId, FactId>> edge;
  for (const auto& s : sols) edge.insert({s[0], s[1]});
  for (const auto& c : g.components()) {
    std::size_t inner = 0;
    for (FactId a : c) {
      for (FactId b : c) inner += a != b && edge.count({a, b});
    }
    if (c.size() == 1 && inner != 0) return false;
    if (c.size() == 2 && (inner != 1 || edge.count({c[0], c[0]}) || edge.count({c[1], c[1]}))) return false;
    if (c.size() == 3 && inner != 3) return false;
    if (c.size() > 3) return false;
  }
  return true;
}

}  // namespace

int main() {
  criterion(1, "under-approximation of Cqk", [] {
    std::vector<ConjunctiveQuery> qs = {queries::q1(), queries::q2(), queries::q3(),  queries::q4(),
                                        queries::q5(), queries::q2p(), queries::q3p(),
                                        queries::path_query({"R", "X", "R"})};
    auto start = Clock::now();
    std::size_t instances = 0, accepted = 0, certain_count = 0, violations = 0;
    for (const auto& q : qs) {
      for (std::uint64_t seed = 0; seed < 64; ++seed) {
        std::size_t blocks = q.size() > 3 ? 5 : 8;
        Database db = testing::random_db_for(q, 1000 + seed, blocks, 3, 3);
        bool truth = certain(db, q);
        bool acc = run_cqk(db, q, std::min<std::size_t>(q.size(), 4)).accepted;
        ++instances;
        accepted += acc;
        certain_count += truth;
        violations += acc && !truth;
      }
    }
    double t = seconds_since(start);
    return Outcome{instances >= 500 && violations == 0 && t < 120,
                   fmt("%zu instances, %zu accepted, %zu certain, %zu violations, %.1fs", instances, accepted,
                       certain_count, violations, t)};
  });

  criterion(2, "Cqk exact on q1 and q2", [] {
    std::size_t instances = 0, disagreements = 0, certain_count = 0;
    for (const auto& q : {queries::q1(), queries::q2()}) {
      for (std::uint64_t seed = 0; seed < 150; ++seed) {
        Database db = testing::random_db_for(q, 2000 + seed, 4 + seed % 7, 1 + seed % 3, 3);
        bool truth = certain(db, q);
        disagreements += run_cqk(db, q, 2).accepted != truth;
        certain_count += truth;
        ++instances;
      }
    }
    return Outcome{instances >= 300 && disagreements == 0,
                   fmt("%zu instances, %zu certain, %zu disagreements", instances, certain_count, disagreements)};
  });

  criterion(3, "D_n lower bound", [] {
    bool ok = true;
    std::string detail;
    for (int n : {4, 5}) {
      Database dn = gen::gen_dn(n);
      auto start = Clock::now();
      bool truth = certain(dn, queries::q4(), {kDefaultRepairLimit, Strategy::reference});
      double t = seconds_since(start);
      bool plus = run_cqk_plus(dn, queries::q4(), static_cast<std::size_t>(n - 2)).accepted;
      bool plain = run_cqk(dn, queries::q4(), static_cast<std::size_t>(n - 2)).accepted;
      ok = ok && truth && !plus && !plain;
      if (n == 4) ok = ok && repair_count(dn) == 648 && t < 1.0;
      detail += fmt("n=%d: oracle %d, cqk+ %d, cqk %d, oracle %.3fs; ", n, truth, plus, plain, t);
    }
    detail.resize(detail.size() - 2);
    return Outcome{ok, detail};
  });

  criterion(4, "matching solver agrees with the oracle on q4", [] {
    std::size_t instances = 0, with_loops = 0, disagreements = 0, certain_count = 0;
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
      Database db = q4_db(4000 + seed);
      auto loops = self_loops(db, queries::q4());
      with_loops += std::count(loops.begin(), loops.end(), true) > 0;
      bool truth = certain(db, queries::q4());
      disagreements += matching::certain_q4(db) != truth;
      certain_count += truth;
      ++instances;
    }
    return Outcome{instances >= 300 && with_loops > 0 && disagreements == 0,
                   fmt("%zu instances, %zu with self-loops, %zu certain, %zu disagreements", instances, with_loops,
                       certain_count, disagreements)};
  });

  criterion(5, "SBM round trip", [] {
    std::size_t graphs = 0, saturating = 0, disagreements = 0;
    for (std::uint64_t seed = 0; seed < 240; ++seed) {
      std::size_t left = 1 + seed % 8, right = 1 + (seed / 8) % 8;
      auto g = gen::random_bipartite(left, right, 0.15 + 0.05 * static_cast<double>(seed % 7), 5000 + seed);
      bool exists = testing::exhaustive_injection(g);
      bool cert = matching::certain_q4(matching::sbm_to_q4(g).db);
      disagreements += exists == cert;
      saturating += exists;
      ++graphs;
    }
    return Outcome{graphs >= 200 && disagreements == 0 && saturating > 0 && saturating < graphs,
                   fmt("%zu graphs, %zu with a saturating matching, %zu disagreements", graphs, saturating,
                       disagreements)};
  });

  criterion(6, "q4 to q5 reduction", [] {
    std::size_t dbs = 0, certain_q4_count = 0, violations = 0;
    Database d4 = gen::gen_dn(4);
    std::vector<Database> corpus{d4};
    for (std::uint64_t seed = 0; seed < 100; ++seed) corpus.push_back(q4_db(6000 + seed));
    for (const auto& d : corpus) {
      ++dbs;
      if (!certain(d, queries::q4())) continue;
      ++certain_q4_count;
      violations += !certain(gen::q4_to_q5(d), queries::q5(), kWide);
    }
    Database dp = gen::q4_to_q5(d4);
    bool oracle = certain(dp, queries::q5(), kWide);
    bool cqk = run_cqk(dp, queries::q5(), 2).accepted;
    return Outcome{violations == 0 && oracle && !cqk,
                   fmt("%zu dbs, %zu certain for q4, %zu transfer violations; D4': oracle %d, cqk(k=2) %d", dbs,
                       certain_q4_count, violations, oracle, cqk)};
  });

  criterion(7, "classification table", [] {
    using sjf::Complexity;
    auto v1 = sjf::classify(queries::q1()).verdict;
    auto v2 = sjf::classify(queries::q2()).verdict;
    auto v3 = sjf::classify(queries::q3()).verdict;
    auto v5 = sjf::classify(queries::q5()).verdict;
    auto w2 = path::word_of(queries::q2p());
    auto w3 = path::word_of(queries::q3p());
    bool f2 = path::factor_condition(w2), p2 = path::prefix_condition(w2), f3 = path::factor_condition(w3);
    bool ok = v1 == Complexity::fo && v2 == Complexity::ptime_not_fo && v3 == Complexity::conp_complete &&
              v5 == Complexity::conp_complete && f2 && !p2 && !f3;
    return Outcome{ok, "q1 " + to_string(v1) + ", q2 " + to_string(v2) + ", q3 " + to_string(v3) + ", q5 " +
                           to_string(v5) + fmt(", q2' factor %d prefix %d, q3' factor %d", f2, p2, f3)};
  });

  criterion(8, "path algorithms agree on q2'", [] {
    ConjunctiveQuery q = queries::q2p();
    auto w = path::word_of(q);
    std::size_t instances = 0, disagreements = 0, certain_count = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      Database db = binary_db(q, 8000 + seed, 6 + seed % 4);
      bool truth = certain(db, q);
      bool n = path::run_n_fixpoint(db, w).accepted;
      bool c = run_cqk(db, q, 6).accepted;
      disagreements += n != truth || c != truth;
      certain_count += truth;
      ++instances;
    }
    return Outcome{instances >= 200 && disagreements == 0,
                   fmt("%zu instances, %zu certain, %zu disagreements", instances, certain_count, disagreements)};
  });

  criterion(9, "bounded rounds for FO queries", [] {
    std::size_t certain_q1 = 0, certain_path = 0, late = 0;
    int worst_q1 = 0, worst_path = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      Database db = testing::random_db_for(queries::q1(), 9000 + seed, 4 + seed % 7, 1 + seed % 3, 3);
      if (!certain(db, queries::q1())) continue;
      ++certain_q1;
      auto r = run_cqk(db, queries::q1(), 2);
      int round = r.empty_set_round.value_or(1 << 20);
      worst_q1 = std::max(worst_q1, round);
      late += round > 2;
    }
    ConjunctiveQuery p = queries::path_query({"R1", "R2"});
    bool prefix = path::prefix_condition(path::word_of(p));
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      Database db = binary_db(p, 9500 + seed, 4 + seed % 7);
      if (!certain(db, p)) continue;
      ++certain_path;
      auto r = run_cqk(db, p, p.size());
      int round = r.empty_set_round.value_or(1 << 20);
      worst_path = std::max(worst_path, round);
      late += round > static_cast<int>(p.size());
    }
    return Outcome{prefix && late == 0 && certain_q1 > 0 && certain_path > 0,
                   fmt("q1: %zu certain, worst round %d; R1 R2: %zu certain, worst round %d", certain_q1, worst_q1,
                       certain_path, worst_path)};
  });

  criterion(10, "structural invariants", [] {
    std::size_t bad_shapes = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) bad_shapes += !shapes_ok(q4_db(10000 + seed));

    bool census = true;
    for (int n : {4, 5, 6}) {
      gen::Dn dn(n);
      std::set<std::set<FactId>> expected;
      for (int j = 1; j <= n - 1; ++j) {
        expected.insert({dn.b(j, 1), dn.b(j, 2), dn.u(j, 1)});
        expected.insert({dn.b(j, n - 1), dn.b(j, n), dn.v(j, n - 3)});
        for (int l = 1; l < n - 3; ++l) expected.insert({dn.v(j, l), dn.u(j, l + 1), dn.b(j, l + 2)});
      }
      matching::SolutionGraph g(dn.db());
      std::set<std::set<FactId>> found;
      for (const auto& c : g.components()) {
        if (c.size() == 3) found.insert(std::set<FactId>(c.begin(), c.end()));
      }
      census = census && found == expected && g.components().size() == expected.size();
    }

    std::size_t sets = 0, broken = 0;
    std::vector<ConjunctiveQuery> qs = {queries::q1(), queries::q2(), queries::q3(), queries::q4(), queries::q5()};
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto& q = qs[seed % qs.size()];
      Database db = testing::random_db_for(q, 11000 + seed, 6, 3, 3);
      for (bool plus : {false, true}) {
        auto r = plus ? run_cqk_plus(db, q, 2) : run_cqk(db, q, 2);
        for (const auto& e : trace(r.table)) {
          ++sets;
          for (RepairCursor it(db); !it.done(); it.next()) {
            auto mask = fact_mask(db, *it);
            bool inside = std::all_of(e.facts.begin(), e.facts.end(), [&](FactId f) { return mask[f]; });
            if (inside && solutions(db, q, mask).empty()) {
              ++broken;
              break;
            }
          }
        }
      }
    }
    return Outcome{bad_shapes == 0 && census && broken == 0,
                   fmt("%zu bad component shapes in 1000 dbs, census %s, %zu derived sets checked, %zu broken",
                       bad_shapes, census ? "ok" : "wrong", sets, broken)};
  });

  return failures == 0 ? 0 : 1;
}
