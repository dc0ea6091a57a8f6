#include "cqa/sjf.hpp"

#include <algorithm>
#include <deque>
#include <nlohmann/json.hpp>

namespace cqa::sjf {

namespace {

void require_sjf(const ConjunctiveQuery& q) {
  if (!q.is_self_join_free()) {
    throw QueryShapeError("query has a self-join: " + to_string(q));
  }
}

bool subset(const VarSet& a, const VarSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

VarSet key_vars(const ConjunctiveQuery& q, std::size_t atom) {
  const auto& terms = q.atom_terms(atom);
  return VarSet(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(q.atom(atom).key.size()));
}

VarSet all_vars(const ConjunctiveQuery& q, std::size_t atom) {
  const auto& terms = q.atom_terms(atom);
  return VarSet(terms.begin(), terms.end());
}

std::optional<std::vector<std::size_t>> gamma_derivable(const ConjunctiveQuery& q,
                                                        const VarSet& x, std::size_t target,
                                                        std::optional<std::size_t> excluded) {
  require_sjf(q);
  if (excluded == target) return std::nullopt;
  VarSet closed = x;
  std::vector<bool> used(q.size(), false);
  std::vector<std::size_t> sequence;
  bool progress = true;
  while (progress) {
    if (subset(key_vars(q, target), closed)) {
      sequence.push_back(target);
      return sequence;
    }
    progress = false;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (used[i] || i == target || excluded == i) continue;
      if (!subset(key_vars(q, i), closed)) continue;
      used[i] = true;
      sequence.push_back(i);
      for (int v : all_vars(q, i)) closed.insert(v);
      progress = true;
    }
  }
  return std::nullopt;
}

bool determines(const ConjunctiveQuery& q, std::size_t a, std::size_t b) {
  return gamma_derivable(q, all_vars(q, a), b).has_value();
}

std::vector<std::vector<std::size_t>> stable_partition_candidates(const ConjunctiveQuery& q) {
  require_sjf(q);
  std::vector<std::vector<std::size_t>> classes;
  std::vector<bool> placed(q.size(), false);
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (placed[a]) continue;
    classes.push_back({a});
    placed[a] = true;
    for (std::size_t b = a + 1; b < q.size(); ++b) {
      if (!placed[b] && determines(q, a, b) && determines(q, b, a)) {
        classes.back().push_back(b);
        placed[b] = true;
      }
    }
  }
  return classes;
}

std::vector<std::size_t> a_plus(const ConjunctiveQuery& q, std::size_t a) {
  require_sjf(q);
  std::vector<std::size_t> out;
  VarSet key = key_vars(q, a);
  for (std::size_t b = 0; b < q.size(); ++b) {
    if (b != a && gamma_derivable(q, key, b, a)) out.push_back(b);
  }
  return out;
}

VarSet a_plus_closure(const ConjunctiveQuery& q, std::size_t a) {
  VarSet closed = key_vars(q, a);
  for (std::size_t b : a_plus(q, a)) {
    for (int v : all_vars(q, b)) closed.insert(v);
  }
  return closed;
}

namespace {

// Atoms reachable from a through the "shares a free variable" relation.
std::vector<bool> attacked_from(const ConjunctiveQuery& q, std::size_t a) {
  VarSet blocked = a_plus_closure(q, a);
  std::vector<VarSet> open(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (int v : all_vars(q, i)) {
      if (!blocked.count(v)) open[i].insert(v);
    }
  }
  std::vector<bool> seen(q.size(), false);
  std::deque<std::size_t> queue{a};
  seen[a] = true;
  while (!queue.empty()) {
    std::size_t f = queue.front();
    queue.pop_front();
    for (std::size_t g = 0; g < q.size(); ++g) {
      if (seen[g]) continue;
      bool shares = std::any_of(open[f].begin(), open[f].end(),
                                [&](int v) { return open[g].count(v) != 0; });
      if (shares) {
        seen[g] = true;
        queue.push_back(g);
      }
    }
  }
  return seen;
}

}  // namespace

bool attacks(const ConjunctiveQuery& q, std::size_t a, std::size_t b) {
  require_sjf(q);
  return a != b && attacked_from(q, a)[b];
}

const AttackEdge* AttackGraph::edge(std::size_t from, std::size_t to) const {
  for (const AttackEdge& e : edges) {
    if (e.from == from && e.to == to) return &e;
  }
  return nullptr;
}

std::vector<std::vector<bool>> AttackGraph::reachability() const {
  std::vector<std::vector<bool>> reach(atom_count, std::vector<bool>(atom_count, false));
  for (const AttackEdge& e : edges) reach[e.from][e.to] = true;
  for (std::size_t k = 0; k < atom_count; ++k) {
    for (std::size_t i = 0; i < atom_count; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < atom_count; ++j) {
        if (reach[k][j]) reach[i][j] = true;
      }
    }
  }
  return reach;
}

AttackGraph build_attack_graph(const ConjunctiveQuery& q) {
  require_sjf(q);
  AttackGraph g;
  g.atom_count = q.size();
  for (std::size_t a = 0; a < q.size(); ++a) {
    std::vector<bool> hit = attacked_from(q, a);
    for (std::size_t b = 0; b < q.size(); ++b) {
      if (b != a && hit[b]) g.edges.push_back({a, b, determines(q, a, b)});
    }
  }
  return g;
}

std::string to_string(Complexity c) {
  switch (c) {
    case Complexity::fo:
      return "FO";
    case Complexity::ptime_not_fo:
      return "PTIME_NOT_FO";
    case Complexity::conp_complete:
      return "CONP_COMPLETE";
  }
  return "?";
}

namespace {

// Shortest path from `from` to `to` in the attack graph, both ends included.
std::vector<std::size_t> shortest_path(const AttackGraph& g, std::size_t from, std::size_t to) {
  std::vector<long> parent(g.atom_count, -1);
  std::vector<bool> seen(g.atom_count, false);
  std::deque<std::size_t> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    std::size_t x = queue.front();
    queue.pop_front();
    if (x == to) break;
    for (const AttackEdge& e : g.edges) {
      if (e.from == x && !seen[e.to]) {
        seen[e.to] = true;
        parent[e.to] = static_cast<long>(x);
        queue.push_back(e.to);
      }
    }
  }
  std::vector<std::size_t> path{to};
  while (path.back() != from) path.push_back(static_cast<std::size_t>(parent[path.back()]));
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

Classification classify(const ConjunctiveQuery& q) {
  Classification c;
  c.graph = build_attack_graph(q);
  const std::size_t n = q.size();
  auto reach = c.graph.reachability();

  for (const AttackEdge& e : c.graph.edges) {
    if (!e.weak && reach[e.to][e.from]) {
      c.verdict = Complexity::conp_complete;
      std::vector<std::size_t> back = shortest_path(c.graph, e.to, e.from);
      std::vector<std::size_t> cycle{e.from};
      cycle.insert(cycle.end(), back.begin(), back.end() - 1);
      c.witness = {cycle};
      return c;
    }
  }

  // Components of mutual reachability, emitted in topological order.
  std::vector<long> comp(n, -1);
  std::vector<std::vector<std::size_t>> comps;
  for (std::size_t a = 0; a < n; ++a) {
    if (comp[a] >= 0) continue;
    comp[a] = static_cast<long>(comps.size());
    comps.push_back({a});
    for (std::size_t b = a + 1; b < n; ++b) {
      if (reach[a][b] && reach[b][a]) {
        comp[b] = comp[a];
        comps.back().push_back(b);
      }
    }
  }
  std::vector<bool> done(comps.size(), false);
  for (std::size_t emitted = 0; emitted < comps.size(); ++emitted) {
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (done[i]) continue;
      bool ready = true;
      for (const AttackEdge& e : c.graph.edges) {
        auto from = static_cast<std::size_t>(comp[e.from]);
        if (comp[e.to] == static_cast<long>(i) && from != i && !done[from]) ready = false;
      }
      if (ready) {
        done[i] = true;
        c.witness.push_back(comps[i]);
        break;
      }
    }
  }

  bool cyclic = std::any_of(comps.begin(), comps.end(), [](const auto& x) { return x.size() > 1; });
  c.verdict = cyclic ? Complexity::ptime_not_fo : Complexity::fo;
  if (!cyclic) {
    std::vector<std::size_t> flat;
    for (const auto& x : c.witness) flat.push_back(x[0]);
    c.witness = {flat};
  }
  return c;
}

namespace {

std::string atom_text(const ConjunctiveQuery& q, std::size_t i) {
  return to_string(ConjunctiveQuery({q.atom(i)}));
}

}  // namespace

std::string attack_graph_dot(const ConjunctiveQuery& q, const AttackGraph& graph) {
  std::string out = "digraph attacks {\n";
  for (std::size_t i = 0; i < q.size(); ++i) {
    out += "  a" + std::to_string(i) + " [label=\"" + atom_text(q, i) + "\"];\n";
  }
  for (const AttackEdge& e : graph.edges) {
    out += "  a" + std::to_string(e.from) + " -> a" + std::to_string(e.to);
    out += e.weak ? " [style=dashed];\n" : ";\n";
  }
  out += "}\n";
  return out;
}

std::string classification_json(const ConjunctiveQuery& q, const Classification& c) {
  nlohmann::json j;
  j["query"] = to_string(q);
  j["verdict"] = to_string(c.verdict);
  j["atoms"] = nlohmann::json::array();
  for (std::size_t i = 0; i < q.size(); ++i) j["atoms"].push_back(atom_text(q, i));
  j["attacks"] = nlohmann::json::array();
  for (const AttackEdge& e : c.graph.edges) {
    j["attacks"].push_back({{"from", e.from}, {"to", e.to}, {"weak", e.weak}});
  }
  switch (c.verdict) {
    case Complexity::fo:
      j["witness"] = {{"topological_order", c.witness.at(0)}};
      break;
    case Complexity::ptime_not_fo:
      j["witness"] = {{"components", c.witness}};
      break;
    case Complexity::conp_complete:
      j["witness"] = {{"strong_cycle", c.witness.at(0)}};
      break;
  }
  return j.dump(2);
}

}  // namespace cqa::sjf
