#include "cqa/generators.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace cqa::gen {

namespace {

Fact r_fact(std::string key, std::string v1, std::string v2) {
  return Fact{"R", {std::move(key)}, {std::move(v1), std::move(v2)}};
}

Schema q4_schema() {
  Schema s;
  s.add(RelationSchema{"R", 3, {1}});
  return s;
}

}  // namespace

Dn::Dn(int n) : n_(n) {
  if (n < 4) throw Error("D_n needs n >= 4, got " + std::to_string(n));
  std::vector<Fact> facts;
  for (int j = 1; j <= n - 1; ++j) {
    facts.push_back(r_fact(a(1), a(2), e(j, 1)));
    facts.push_back(r_fact(a(2), e(j, 1), a(1)));
    for (int i = 3; i <= n - 2; ++i) facts.push_back(r_fact(a(i), e(j, i - 2), e(j, i - 1)));
    facts.push_back(r_fact(a(n - 1), e(j, n - 3), a(n)));
    facts.push_back(r_fact(a(n), a(n - 1), e(j, n - 3)));
    facts.push_back(r_fact(e(j, 1), a(1), a(2)));
    facts.push_back(r_fact(e(j, n - 3), a(n), a(n - 1)));
    for (int l = 1; l < n - 3; ++l) {
      facts.push_back(r_fact(e(j, l), e(j, l + 1), a(l + 2)));
      facts.push_back(r_fact(e(j, l + 1), a(l + 2), e(j, l)));
    }
  }
  db_ = Database(q4_schema(), std::move(facts));
}

FactId Dn::lookup(const std::string& key, const std::string& v1, const std::string& v2) const {
  auto id = db_.find(r_fact(key, v1, v2));
  if (!id) throw Error("no such fact in D_" + std::to_string(n_) + ": R(" + key + "; " + v1 + ", " + v2 + ")");
  return *id;
}

void Dn::check_j(int j) const {
  if (j < 1 || j > n_ - 1) throw Error("j out of range [1, " + std::to_string(n_ - 1) + "]");
}

FactId Dn::b(int j, int i) const {
  check_j(j);
  const int n = n_;
  if (i == 1) return lookup(a(1), a(2), e(j, 1));
  if (i == 2) return lookup(a(2), e(j, 1), a(1));
  if (i == n - 1) return lookup(a(n - 1), e(j, n - 3), a(n));
  if (i == n) return lookup(a(n), a(n - 1), e(j, n - 3));
  if (i >= 3 && i <= n - 2) return lookup(a(i), e(j, i - 2), e(j, i - 1));
  throw Error("i out of range [1, " + std::to_string(n) + "]");
}

FactId Dn::u(int j, int l) const {
  check_j(j);
  if (l < 1 || l > n_ - 3) throw Error("l out of range [1, " + std::to_string(n_ - 3) + "]");
  if (l == 1) return lookup(e(j, 1), a(1), a(2));
  return lookup(e(j, l), a(l + 1), e(j, l - 1));
}

FactId Dn::v(int j, int l) const {
  check_j(j);
  if (l < 1 || l > n_ - 3) throw Error("l out of range [1, " + std::to_string(n_ - 3) + "]");
  if (l == n_ - 3) return lookup(e(j, l), a(n_), a(n_ - 1));
  return lookup(e(j, l), e(j, l + 1), a(l + 2));
}

bool Dn::is_b_block(BlockId id) const { return db_.fact(db_.block(id)[0]).key[0].starts_with("a_"); }

int Dn::e_group(BlockId id) const {
  const std::string& key = db_.fact(db_.block(id)[0]).key[0];
  if (!key.starts_with("e_")) throw Error("not an E block");
  return std::stoi(key.substr(2, key.find('_', 2) - 2));
}

std::vector<FactId> Dn::u_set(int j, int l) const {
  check_j(j);
  if (l < 1 || l > n_) throw Error("l out of range [1, " + std::to_string(n_) + "]");
  std::vector<FactId> out;
  for (int k = 1; k <= std::min(l - 2, n_ - 3); ++k) out.push_back(u(j, k));
  return out;
}

std::vector<FactId> Dn::v_set(int j, int l) const {
  check_j(j);
  if (l < 1 || l > n_) throw Error("l out of range [1, " + std::to_string(n_) + "]");
  std::vector<FactId> out;
  for (int k = std::max(l - 1, 1); k <= n_ - 3; ++k) out.push_back(v(j, k));
  return out;
}

std::optional<std::pair<int, int>> Dn::b_label(FactId f) const {
  if (!is_b_block(db_.block_of(f))) return std::nullopt;
  const std::string& key = db_.fact(f).key[0];
  int i = std::stoi(key.substr(2));
  for (int j = 1; j <= n_ - 1; ++j) {
    if (b(j, i) == f) return std::make_pair(j, i);
  }
  return std::nullopt;
}

Database gen_dn(int n) { return Dn(n).db(); }

bool is_k_obstruction(const Dn& dn, const std::vector<FactId>& w, std::size_t k) {
  const Database& db = dn.db();
  std::set<BlockId> blocks;
  for (FactId f : w) {
    if (f >= db.size() || !blocks.insert(db.block_of(f)).second) {
      throw Error("not a partial repair: two facts from one block or an unknown fact");
    }
  }
  if (w.size() != k) throw Error("expected " + std::to_string(k) + " facts, got " + std::to_string(w.size()));

  // W restricted to the E-blocks of each j.
  std::map<int, std::set<FactId>> e_part;
  std::vector<std::pair<int, int>> b_part;
  for (FactId f : w) {
    if (auto label = dn.b_label(f)) {
      b_part.push_back(*label);
    } else {
      e_part[dn.e_group(db.block_of(f))].insert(f);
    }
  }
  auto inside = [&](int j, int l) {
    std::set<FactId> allowed;
    for (FactId f : dn.u_set(j, l)) allowed.insert(f);
    for (FactId f : dn.v_set(j, l)) allowed.insert(f);
    const auto& part = e_part[j];
    return std::includes(allowed.begin(), allowed.end(), part.begin(), part.end());
  };

  std::set<int> js;
  for (auto [j, i] : b_part) {
    if (!js.insert(j).second) return false;
    if (!inside(j, i)) return false;
  }
  for (int j = 1; j <= dn.n() - 1; ++j) {
    bool some = false;
    for (int l = 1; l <= dn.n() && !some; ++l) some = inside(j, l);
    if (!some) return false;
  }
  return true;
}

std::vector<FactId> obstruction_for(const Dn& dn, const std::vector<BlockId>& blocks) {
  const Database& db = dn.db();
  std::set<BlockId> x(blocks.begin(), blocks.end());
  std::vector<int> b_indices;
  for (int i = 1; i <= dn.n(); ++i) {
    if (x.count(dn.b_block(i))) b_indices.push_back(i);
  }
  if (b_indices.size() > static_cast<std::size_t>(dn.n() - 1)) {
    throw Error("too many B blocks for an obstruction set");
  }
  std::vector<FactId> w;
  auto take = [&](const std::vector<FactId>& facts) {
    for (FactId f : facts) {
      if (x.count(db.block_of(f))) w.push_back(f);
    }
  };
  for (int j = 1; j <= dn.n() - 1; ++j) {
    auto m = static_cast<std::size_t>(j);
    if (m <= b_indices.size()) {
      int i = b_indices[m - 1];
      w.push_back(dn.b(j, i));
      take(dn.u_set(j, i));
      take(dn.v_set(j, i));
    } else {
      take(dn.v_set(j, 1));
    }
  }
  std::sort(w.begin(), w.end());
  return w;
}

Database q4_to_q5(const Database& db) {
  matching::SolutionGraph graph(db);
  std::vector<Fact> facts;
  auto e = [&](FactId f) { return "e_" + std::to_string(db.block_of(f) + 1); };
  auto f_of = [&](FactId u) { return "f_" + std::to_string(graph.component_of(u) + 1); };
  for (FactId u : graph.vertices()) {
    facts.push_back(Fact{"R1", {e(u)}, {f_of(u)}});
    auto v = graph.successor(u);
    if (!v) continue;
    if (*v == u) {
      facts.push_back(Fact{"S1", {f_of(u), "g_" + std::to_string(u + 1)}, {e(u)}});
    } else if (db.block_of(u) != db.block_of(*v)) {
      std::string g = "g_" + std::to_string(std::min(u, *v) + 1) + "_" + std::to_string(std::max(u, *v) + 1);
      facts.push_back(Fact{"S1", {f_of(u), g}, {e(u)}});
      facts.push_back(Fact{"S1", {f_of(u), g}, {e(*v)}});
    }
  }
  Schema schema;
  schema.add(RelationSchema{"R1", 2, {1}});
  schema.add(RelationSchema{"S1", 3, {1, 2}});
  return Database(std::move(schema), std::move(facts));
}

std::uint64_t Rng::uniform(std::uint64_t lo, std::uint64_t hi) {
  std::uint64_t span = hi - lo + 1;
  if (span == 0) return engine_();
  return lo + engine_() % span;
}

bool Rng::chance(double p) {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p;
}

Database gen_random(const RandomProfile& profile) {
  Rng rng(profile.seed);
  Schema schema;
  for (const RelationSpec& r : profile.relations) {
    std::vector<int> key;
    for (int p = 1; p <= r.key_size; ++p) key.push_back(p);
    schema.add(RelationSchema{r.name, r.arity, key});
  }
  if (profile.plant) {
    for (const Atom& atom : profile.plant->atoms()) {
      if (schema.find(atom.relation)) continue;
      std::vector<int> key;
      for (int p = 1; p <= static_cast<int>(atom.key.size()); ++p) key.push_back(p);
      schema.add(RelationSchema{atom.relation, atom.arity(), key});
    }
  }
  const std::size_t d = std::max<std::size_t>(profile.domain_size, 1);
  auto constant = [&] { return "c" + std::to_string(rng.uniform(0, d - 1)); };
  auto constants = [&](std::size_t count) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(constant());
    return out;
  };

  std::vector<Fact> facts;
  if (!profile.relations.empty()) {
    const std::size_t max_size = std::max<std::size_t>(profile.max_block_size, 1);
    std::map<std::pair<std::string, std::vector<std::string>>, std::size_t> filled;
    for (std::size_t b = 0; b < profile.n_blocks; ++b) {
      const RelationSpec& r = profile.relations[rng.uniform(0, profile.relations.size() - 1)];
      auto key = constants(static_cast<std::size_t>(r.key_size));
      std::size_t size = rng.uniform(1, max_size);
      std::size_t& have = filled[{r.name, key}];
      size = std::min(size, max_size - have);
      have += size;
      for (std::size_t i = 0; i < size; ++i) {
        facts.push_back(Fact{r.name, key, constants(static_cast<std::size_t>(r.arity - r.key_size))});
      }
    }
  }
  if (profile.plant) {
    const ConjunctiveQuery& q = *profile.plant;
    for (std::size_t p = 0; p < profile.planted; ++p) {
      auto valuation = constants(q.variables().size());
      for (std::size_t a = 0; a < q.size(); ++a) {
        const auto& terms = q.atom_terms(a);
        Fact f{q.atom(a).relation, {}, {}};
        for (std::size_t t = 0; t < terms.size(); ++t) {
          auto& side = t < q.atom(a).key.size() ? f.key : f.value;
          side.push_back(valuation[static_cast<std::size_t>(terms[t])]);
        }
        facts.push_back(std::move(f));
      }
    }
  }
  return Database(std::move(schema), std::move(facts));
}

matching::BipartiteInstance random_bipartite(std::size_t left, std::size_t right,
                                             double edge_probability, std::uint64_t seed) {
  Rng rng(seed);
  matching::BipartiteInstance g;
  for (std::size_t s = 0; s < left; ++s) g.left.push_back("s" + std::to_string(s + 1));
  for (std::size_t t = 0; t < right; ++t) g.right.push_back("t" + std::to_string(t + 1));
  for (std::size_t s = 0; s < left; ++s) {
    for (std::size_t t = 0; t < right; ++t) {
      if (rng.chance(edge_probability)) g.edges.emplace_back(s, t);
    }
  }
  return g;
}

}  // namespace cqa::gen
