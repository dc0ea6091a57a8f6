#pragma once

// Independent checkers used by the test suites. None of them share code
// with the library kernels they are compared against.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cqa/core.hpp"
#include "cqa/generators.hpp"
#include "cqa/matching.hpp"
#include "cqa/queries.hpp"

namespace testing {

using cqa::ConjunctiveQuery;
using cqa::Database;
using cqa::FactId;

// Strings of a fact in position order, given the relation's key positions.
inline std::vector<std::string> positional(const Database& db, FactId id) {
  const cqa::Fact& f = db.fact(id);
  const auto* rel = db.schema().find(f.relation);
  std::vector<std::string> out(static_cast<std::size_t>(rel->arity));
  std::vector<bool> is_key(out.size(), false);
  for (int p : rel->key_positions) is_key[static_cast<std::size_t>(p - 1)] = true;
  std::size_t k = 0, v = 0;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = is_key[i] ? f.key[k++] : f.value[v++];
  return out;
}

inline std::vector<std::string> atom_positional(const ConjunctiveQuery& q, std::size_t i,
                                                const Database& db) {
  const cqa::Atom& a = q.atom(i);
  const auto* rel = db.schema().find(a.relation);
  std::vector<std::string> out(static_cast<std::size_t>(a.arity()));
  std::vector<bool> is_key(out.size(), false);
  for (int p : rel->key_positions) is_key[static_cast<std::size_t>(p - 1)] = true;
  std::size_t k = 0, v = 0;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = is_key[j] ? a.key[k++] : a.value[v++];
  return out;
}

// Every assignment atom -> fact among `allowed`, kept when the implied
// variable valuation is consistent.
inline std::set<std::vector<FactId>> brute_solutions(const Database& db, const ConjunctiveQuery& q,
                                                     const std::vector<bool>& allowed) {
  std::set<std::vector<FactId>> out;
  std::vector<FactId> pick(q.size());
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == q.size()) {
      std::map<std::string, std::string> val;
      for (std::size_t a = 0; a < q.size(); ++a) {
        if (db.fact(pick[a]).relation != q.atom(a).relation) return;
        auto vars = atom_positional(q, a, db);
        auto consts = positional(db, pick[a]);
        for (std::size_t p = 0; p < vars.size(); ++p) {
          auto [it, fresh] = val.emplace(vars[p], consts[p]);
          if (!fresh && it->second != consts[p]) return;
        }
      }
      out.insert(pick);
      return;
    }
    for (FactId f = 0; f < db.size(); ++f) {
      if (!allowed[f]) continue;
      pick[i] = f;
      go(i + 1);
    }
  };
  go(0);
  return out;
}

inline std::set<std::vector<FactId>> brute_solutions(const Database& db, const ConjunctiveQuery& q) {
  return brute_solutions(db, q, std::vector<bool>(db.size(), true));
}

// Recursive choice of one fact per block; the repair check is brute force.
inline bool recursive_certain(const Database& db, const ConjunctiveQuery& q) {
  std::vector<bool> chosen(db.size(), false);
  std::function<bool(std::size_t)> go = [&](std::size_t b) {
    if (b == db.block_count()) return !brute_solutions(db, q, chosen).empty();
    for (FactId f : db.block(static_cast<cqa::BlockId>(b))) {
      chosen[f] = true;
      bool ok = go(b + 1);
      chosen[f] = false;
      if (!ok) return false;
    }
    return true;
  };
  return go(0);
}

// Injective left -> right assignment along edges, by exhaustive search.
inline bool exhaustive_injection(const cqa::matching::BipartiteInstance& g) {
  std::vector<std::set<std::size_t>> adj(g.left.size());
  for (auto [s, t] : g.edges) adj[s].insert(t);
  std::vector<bool> used(g.right.size(), false);
  std::function<bool(std::size_t)> go = [&](std::size_t s) {
    if (s == g.left.size()) return true;
    for (std::size_t t : adj[s]) {
      if (used[t]) continue;
      used[t] = true;
      bool ok = go(s + 1);
      used[t] = false;
      if (ok) return true;
    }
    return false;
  };
  return go(0);
}

// Random profiles shared by the suites.
inline Database random_db_for(const ConjunctiveQuery& q, std::uint64_t seed, std::size_t blocks = 6,
                              std::size_t block_size = 2, std::size_t domain = 4) {
  cqa::gen::RandomProfile p;
  std::set<std::string> seen;
  for (const auto& a : q.atoms()) {
    if (seen.insert(a.relation).second) {
      p.relations.push_back({a.relation, a.arity(), static_cast<int>(a.key.size())});
    }
  }
  p.n_blocks = blocks;
  p.max_block_size = block_size;
  p.domain_size = domain;
  p.seed = seed;
  p.plant = q;
  p.planted = 1 + seed % 3;
  return cqa::gen::gen_random(p);
}

}  // namespace testing
