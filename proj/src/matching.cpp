#include "cqa/matching.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace cqa::matching {

void require_q4_schema(const Database& db) {
  const RelationSchema* r = db.schema().find("R");
  if (r == nullptr || r->arity != 3 || r->key_positions != std::vector<int>{1}) {
    throw SchemaError("q4 needs relation R declared as R/3 key 1");
  }
}

SolutionGraph::SolutionGraph(const Database& db)
    : succ_(db.size()), loop_(db.size(), false), component_of_(db.size(), std::numeric_limits<std::size_t>::max()) {
  require_q4_schema(db);
  int rel = *db.relation_index("R");
  auto facts = db.facts_of(rel);
  vertices_.assign(facts.begin(), facts.end());

  std::vector<FactId> parent(db.size());
  std::iota(parent.begin(), parent.end(), FactId{0});
  auto find = [&](FactId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<int> in_degree(db.size(), 0);
  for (FactId a : vertices_) {
    const Fact& f = db.fact(a);
    auto b = db.find(Fact{"R", {f.value[1]}, {f.key[0], f.value[0]}});
    if (!b) continue;
    succ_[a] = *b;
    if (*b == a) {
      loop_[a] = true;
      continue;
    }
    ++in_degree[*b];
    parent[find(a)] = find(*b);
  }

  std::map<FactId, std::size_t> root_index;
  for (FactId a : vertices_) {
    auto [it, fresh] = root_index.try_emplace(find(a), components_.size());
    if (fresh) components_.emplace_back();
    components_[it->second].push_back(a);
    component_of_[a] = it->second;
  }

  for (const auto& comp : components_) {
    std::size_t edges = 0;
    bool loops = false;
    for (FactId a : comp) {
      if (in_degree[a] > 1) throw Error("solution graph: fact " + to_string(db.fact(a)) + " has two predecessors");
      if (succ_[a] && *succ_[a] != a) ++edges;
      loops = loops || loop_[a];
    }
    bool ok = (comp.size() == 1) || (comp.size() == 2 && edges == 1 && !loops) ||
              (comp.size() == 3 && edges == 3 && !loops);
    if (!ok) {
      throw Error("solution graph: component of " + to_string(db.fact(comp[0])) +
                  " is not a vertex, a 2-clique or a triangle");
    }
  }
}

std::size_t SolutionGraph::triangle_count() const {
  return static_cast<std::size_t>(std::count_if(components_.begin(), components_.end(),
                                                [](const auto& c) { return c.size() == 3; }));
}

namespace {

std::vector<std::string> split_words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

BipartiteInstance parse_bipartite(std::string_view text) {
  BipartiteInstance g;
  std::map<std::string, std::size_t> left, right;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = line.substr(0, line.find('#'));
    auto words = split_words(line);
    if (words.empty()) continue;
    const std::string& kind = words[0];
    if ((kind == "left" || kind == "right") && words.size() == 2) {
      auto& names = kind == "left" ? left : right;
      auto& list = kind == "left" ? g.left : g.right;
      if (!names.emplace(words[1], list.size()).second) {
        throw ParseError(line_no, kind + " vertex " + words[1] + " declared twice");
      }
      list.push_back(words[1]);
    } else if (kind == "edge" && words.size() == 3) {
      auto s = left.find(words[1]);
      auto t = right.find(words[2]);
      if (s == left.end()) throw ParseError(line_no, "unknown left vertex " + words[1]);
      if (t == right.end()) throw ParseError(line_no, "unknown right vertex " + words[2]);
      g.edges.emplace_back(s->second, t->second);
    } else {
      throw ParseError(line_no, "expected 'left NAME', 'right NAME' or 'edge LEFT RIGHT'");
    }
  }
  return g;
}

std::string render_bipartite(const BipartiteInstance& g) {
  std::string out;
  for (const auto& s : g.left) out += "left " + s + "\n";
  for (const auto& t : g.right) out += "right " + t + "\n";
  for (auto [s, t] : g.edges) out += "edge " + g.left[s] + " " + g.right[t] + "\n";
  return out;
}

Matching maximum_matching(const BipartiteInstance& g) {
  const std::size_t n = g.left.size();
  const std::size_t m = g.right.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [s, t] : g.edges) adj[s].push_back(t);
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }

  constexpr long kFree = -1;
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  Matching match_left(n, kFree);
  std::vector<long> match_right(m, kFree);
  std::vector<std::size_t> dist(n);

  auto bfs = [&] {
    std::deque<std::size_t> queue;
    for (std::size_t s = 0; s < n; ++s) {
      dist[s] = match_left[s] == kFree ? 0 : kInf;
      if (dist[s] == 0) queue.push_back(s);
    }
    bool found = false;
    while (!queue.empty()) {
      std::size_t s = queue.front();
      queue.pop_front();
      for (std::size_t t : adj[s]) {
        long next = match_right[t];
        if (next == kFree) {
          found = true;
        } else if (dist[static_cast<std::size_t>(next)] == kInf) {
          dist[static_cast<std::size_t>(next)] = dist[s] + 1;
          queue.push_back(static_cast<std::size_t>(next));
        }
      }
    }
    return found;
  };

  std::vector<std::size_t> cursor(n);
  auto dfs = [&](auto&& self, std::size_t s) -> bool {
    for (; cursor[s] < adj[s].size(); ++cursor[s]) {
      std::size_t t = adj[s][cursor[s]];
      long next = match_right[t];
      if (next == kFree ||
          (dist[static_cast<std::size_t>(next)] == dist[s] + 1 && self(self, static_cast<std::size_t>(next)))) {
        match_left[s] = static_cast<long>(t);
        match_right[t] = static_cast<long>(s);
        ++cursor[s];
        return true;
      }
    }
    dist[s] = kInf;
    return false;
  };

  while (bfs()) {
    std::fill(cursor.begin(), cursor.end(), 0);
    for (std::size_t s = 0; s < n; ++s) {
      if (match_left[s] == kFree) dfs(dfs, s);
    }
  }
  return match_left;
}

std::optional<Matching> hopcroft_karp(const BipartiteInstance& g) {
  Matching m = maximum_matching(g);
  if (std::any_of(m.begin(), m.end(), [](long t) { return t < 0; })) return std::nullopt;
  return m;
}

BipartiteInstance block_component_instance(const Database& db, const SolutionGraph& graph) {
  BipartiteInstance g;
  std::map<BlockId, std::size_t> left;
  std::map<std::size_t, std::size_t> right;
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (FactId a : graph.vertices()) {
    auto [l, fresh_l] = left.try_emplace(db.block_of(a), g.left.size());
    if (fresh_l) g.left.push_back("B" + std::to_string(db.block_of(a)));
    if (graph.self_loop(a)) continue;
    auto [r, fresh_r] = right.try_emplace(graph.component_of(a), g.right.size());
    if (fresh_r) g.right.push_back("C" + std::to_string(graph.component_of(a)));
    edges.emplace(l->second, r->second);
  }
  g.edges.assign(edges.begin(), edges.end());
  return g;
}

bool certain_q4(const Database& db) {
  SolutionGraph graph(db);
  for (FactId a : graph.vertices()) {
    if (graph.self_loop(a) && db.block(db.block_of(a)).size() == 1) return true;
  }
  return !hopcroft_karp(block_component_instance(db, graph)).has_value();
}

DgInstance sbm_to_q4(const BipartiteInstance& g) {
  const std::size_t n = g.left.size();
  const std::size_t m = g.right.size();
  std::vector<std::set<std::size_t>> nbr_of_right(m);
  for (auto [s, t] : g.edges) nbr_of_right[t].insert(s);
  std::vector<bool> left_alive(n, true), right_alive(m, true);

  DgInstance dg;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t t = 0; t < m; ++t) {
      if (!right_alive[t]) continue;
      std::vector<std::size_t> live;
      for (std::size_t s : nbr_of_right[t]) {
        if (left_alive[s]) live.push_back(s);
      }
      if (live.size() >= 2) continue;
      right_alive[t] = false;
      changed = true;
      if (live.size() == 1) {
        left_alive[live[0]] = false;
        dg.committed.emplace_back(live[0], t);
      }
    }
  }

  auto key = [](std::size_t s) { return "a_" + std::to_string(s + 1); };
  std::vector<Fact> facts;
  std::vector<std::pair<Fact, std::pair<std::size_t, std::size_t>>> edge_facts;
  auto add = [&](std::string k, std::string v1, std::string v2) {
    facts.push_back(Fact{"R", {std::move(k)}, {std::move(v1), std::move(v2)}});
  };
  auto add_edge = [&](std::size_t s, std::size_t t, std::string v1, std::string v2) {
    add(key(s), std::move(v1), std::move(v2));
    edge_facts.emplace_back(facts.back(), std::make_pair(s, t));
  };

  std::vector<bool> has_edge(n, false);
  std::map<std::vector<std::size_t>, int> triangles_used;
  for (std::size_t t = 0; t < m; ++t) {
    if (!right_alive[t]) continue;
    std::vector<std::size_t> s;
    for (std::size_t x : nbr_of_right[t]) {
      if (left_alive[x]) s.push_back(x);
    }
    for (std::size_t x : s) has_edge[x] = true;
    const std::string tag = std::to_string(t + 1);

    if (s.size() == 2) {
      std::string y = "y_" + tag;
      add_edge(s[0], t, y, key(s[1]));
      add_edge(s[1], t, key(s[0]), y);
      continue;
    }
    if (s.size() == 3) {
      int used = triangles_used[s]++;
      const std::string k1 = key(s[0]), k2 = key(s[1]), k3 = key(s[2]);
      if (used == 0) {
        add_edge(s[0], t, k3, k2);
        add_edge(s[1], t, k1, k3);
        add_edge(s[2], t, k2, k1);
        continue;
      }
      if (used == 1) {
        add_edge(s[0], t, k2, k3);
        add_edge(s[1], t, k3, k1);
        add_edge(s[2], t, k1, k2);
        continue;
      }
    }

    // Chain of triangles over blocks k_1..k_l and fresh two-fact blocks
    // e_1..e_(l-3). A triple that already used both triangle orientations
    // becomes a chain of length 4 whose last block is a private block
    // holding the chain fact and an isolated fact.
    std::vector<std::string> k;
    for (std::size_t x : s) k.push_back(key(x));
    const bool padded = s.size() == 3;
    if (padded) k.push_back("p_" + tag);
    const std::size_t l = k.size();
    auto e = [&](std::size_t i) { return "e_" + tag + "_" + std::to_string(i); };
    auto chain = [&](std::size_t i, std::string v1, std::string v2) {  // 1-based block index
      if (i <= s.size()) {
        add_edge(s[i - 1], t, std::move(v1), std::move(v2));
      } else {
        add(k[i - 1], std::move(v1), std::move(v2));
      }
    };
    chain(1, k[1], e(1));
    chain(2, e(1), k[0]);
    for (std::size_t i = 3; i + 2 <= l; ++i) chain(i, e(i - 2), e(i - 1));
    chain(l - 1, e(l - 3), k[l - 1]);
    chain(l, k[l - 2], e(l - 3));
    add(e(1), k[0], k[1]);
    add(e(l - 3), k[l - 1], k[l - 2]);
    for (std::size_t i = 1; i + 3 < l; ++i) {
      add(e(i), e(i + 1), k[i + 1]);
      add(e(i + 1), k[i + 1], e(i));
    }
    if (padded) {
      std::string z = "z_" + tag;
      add(k[3], z, z);
    }
  }

  for (std::size_t s = 0; s < n; ++s) {
    if (left_alive[s] && !has_edge[s]) {
      dg.unmatchable = true;
      add(key(s), key(s), key(s));
    }
  }

  Schema schema;
  schema.add(RelationSchema{"R", 3, {1}});
  dg.db = Database(std::move(schema), std::move(facts));
  for (const auto& [fact, edge] : edge_facts) dg.edge_of.emplace(*dg.db.find(fact), edge);
  return dg;
}

std::optional<Matching> decode_matching(const BipartiteInstance& g, const DgInstance& dg,
                                        const Repair& repair) {
  Matching match(g.left.size(), -1);
  for (auto [s, t] : dg.committed) match[s] = static_cast<long>(t);
  for (FactId f : repair.chosen) {
    auto it = dg.edge_of.find(f);
    if (it != dg.edge_of.end()) match[it->second.first] = static_cast<long>(it->second.second);
  }
  if (std::any_of(match.begin(), match.end(), [](long t) { return t < 0; })) return std::nullopt;
  return match;
}

}  // namespace cqa::matching
