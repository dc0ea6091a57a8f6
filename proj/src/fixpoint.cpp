#include "cqa/fixpoint.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "fixpoint_detail.hpp"

namespace cqa {

DeltaTable::DeltaTable(std::size_t fact_count, std::size_t k, FixpointMode mode, std::uint64_t cap)
    : index_(fact_count, k, cap),
      mode_(mode),
      rounds_(index_.size(), -1),
      witnesses_(index_.size()) {}

std::optional<std::uint64_t> DeltaTable::rank_of(std::span<const FactId> facts) const {
  std::vector<FactId> sorted(facts.begin(), facts.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.size() > k()) return std::nullopt;
  if (!sorted.empty() && sorted.back() >= index_.n()) return std::nullopt;
  return index_.rank(sorted);
}

std::optional<int> DeltaTable::round_of(std::span<const FactId> facts) const {
  auto r = rank_of(facts);
  if (!r || rounds_[*r] < 0) return std::nullopt;
  return rounds_[*r];
}

std::optional<Witness> DeltaTable::witness_of(std::span<const FactId> facts) const {
  auto r = rank_of(facts);
  if (!r || rounds_[*r] < 0) return std::nullopt;
  return witnesses_[*r];
}

std::uint64_t DeltaTable::size() const {
  return static_cast<std::uint64_t>(
      std::count_if(rounds_.begin(), rounds_.end(), [](std::int32_t r) { return r >= 0; }));
}

int DeltaTable::max_round() const {
  int m = -1;
  for (std::int32_t r : rounds_) m = std::max(m, static_cast<int>(r));
  return m;
}

std::vector<KSetEntry> DeltaTable::entries() const {
  std::vector<std::uint64_t> ranks;
  for (std::uint64_t r = 0; r < rounds_.size(); ++r) {
    if (rounds_[r] >= 0) ranks.push_back(r);
  }
  std::stable_sort(ranks.begin(), ranks.end(),
                   [&](std::uint64_t a, std::uint64_t b) { return rounds_[a] < rounds_[b]; });
  std::vector<KSetEntry> out;
  out.reserve(ranks.size());
  for (std::uint64_t r : ranks) {
    KSetEntry e;
    index_.unrank(r, e.facts);
    e.round = rounds_[r];
    e.witness = witnesses_[r];
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<bool> self_loops(const Database& db, const ConjunctiveQuery& q) {
  if (q.size() != 2) {
    throw QueryShapeError("self-loops are defined for two-atom queries, got " +
                          std::to_string(q.size()) + " atoms");
  }
  std::vector<bool> loop(db.size(), false);
  for (const Solution& s : solutions(db, q)) {
    if (s[0] == s[1]) loop[s[0]] = true;
  }
  return loop;
}

namespace detail {

FixpointProblem make_problem(const Database& db, const ConjunctiveQuery& q, std::size_t k,
                             FixpointMode mode) {
  if (k == 0) throw Error("k must be at least 1");
  FixpointProblem p;
  p.k = k;
  p.mode = mode;
  p.block_count = db.block_count();
  for (BlockId b = 0; b < db.block_count(); ++b) {
    auto block = db.block(b);
    p.groups.emplace_back(block.begin(), block.end());
    p.group_witness.push_back({Witness::Kind::block, b});
  }
  if (mode == FixpointMode::extended) {
    std::vector<bool> loop = self_loops(db, q);
    std::vector<std::set<FactId>> nbr(db.size());
    for (const Solution& s : solutions(db, q)) {
      nbr[s[0]].insert(s[1]);
      nbr[s[1]].insert(s[0]);
    }
    p.fact_group.assign(db.size(), -1);
    for (FactId a = 0; a < db.size(); ++a) {
      if (loop[a]) continue;
      nbr[a].insert(a);
      p.fact_group[a] = static_cast<long>(p.groups.size());
      p.groups.emplace_back(nbr[a].begin(), nbr[a].end());
      p.group_witness.push_back({Witness::Kind::fact, a});
    }
  }
  for (auto& s : solution_sets(db, q)) {
    if (s.size() <= k) p.solution_sets.push_back(std::move(s));
  }
  return p;
}

long group_of(const FixpointProblem& problem, const Witness& w) {
  switch (w.kind) {
    case Witness::Kind::block:
      return w.id < problem.block_count ? static_cast<long>(w.id) : -1;
    case Witness::Kind::fact:
      return w.id < problem.fact_group.size() ? problem.fact_group[w.id] : -1;
    case Witness::Kind::none:
      break;
  }
  return -1;
}

bool contains_solution(const FixpointProblem& problem, std::span<const FactId> sorted_set) {
  for (const auto& sol : problem.solution_sets) {
    if (std::includes(sorted_set.begin(), sorted_set.end(), sol.begin(), sol.end())) return true;
  }
  return false;
}

}  // namespace detail

namespace {

FixpointResult run(const Database& db, const ConjunctiveQuery& q, std::size_t k, FixpointMode mode,
                   const FixpointOptions& options) {
  auto problem = detail::make_problem(db, q, k, mode);
  FixpointResult result{false, DeltaTable(db.size(), k, mode, options.candidate_cap), std::nullopt,
                        0};
  result.rounds = options.strategy == Strategy::reference
                      ? detail::run_reference(problem, result.table)
                      : detail::run_parallel(problem, result.table);
  if (result.table.rounds()[0] >= 0) {
    result.accepted = true;
    result.empty_set_round = result.table.rounds()[0];
  }
  return result;
}

}  // namespace

FixpointResult run_cqk(const Database& db, const ConjunctiveQuery& q, std::size_t k,
                       const FixpointOptions& options) {
  return run(db, q, k, FixpointMode::standard, options);
}

FixpointResult run_cqk_plus(const Database& db, const ConjunctiveQuery& q, std::size_t k,
                            const FixpointOptions& options) {
  if (q.size() != 2) {
    throw QueryShapeError("the extended fixpoint needs a two-atom query, got " +
                          std::to_string(q.size()) + " atoms");
  }
  return run(db, q, k, FixpointMode::extended, options);
}

std::vector<KSetEntry> trace(const DeltaTable& table) { return table.entries(); }

std::string serialize_trace(const std::vector<KSetEntry>& entries) {
  std::string out;
  for (const KSetEntry& e : entries) {
    nlohmann::json j;
    j["round"] = e.round;
    j["kset"] = e.facts;
    if (e.witness.kind == Witness::Kind::none) {
      j["witness"] = nullptr;
    } else {
      j["witness"] = {{"type", e.witness.kind == Witness::Kind::block ? "block" : "fact"},
                      {"id", e.witness.id}};
    }
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<KSetEntry> parse_trace(const std::string& text) {
  std::vector<KSetEntry> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      KSetEntry e;
      e.round = j.at("round").get<int>();
      e.facts = j.at("kset").get<std::vector<FactId>>();
      std::sort(e.facts.begin(), e.facts.end());
      const auto& w = j.at("witness");
      if (!w.is_null()) {
        std::string type = w.at("type").get<std::string>();
        if (type == "block") {
          e.witness.kind = Witness::Kind::block;
        } else if (type == "fact") {
          e.witness.kind = Witness::Kind::fact;
        } else {
          throw ParseError(line_no, "unknown witness type '" + type + "'");
        }
        e.witness.id = w.at("id").get<std::uint32_t>();
      }
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(line_no, ex.what());
    }
  }
  return out;
}

DeltaTable replay_trace(const Database& db, const ConjunctiveQuery& q, std::size_t k,
                        FixpointMode mode, const std::vector<KSetEntry>& entries,
                        std::uint64_t candidate_cap) {
  auto problem = detail::make_problem(db, q, k, mode);
  DeltaTable table(db.size(), k, mode, candidate_cap);
  const KSetIndex& index = table.index();
  auto& rounds = table.rounds();

  // An S' subset of `set` derived strictly before `round`.
  auto covered = [&](const std::vector<FactId>& set, int round) {
    std::vector<FactId> sub;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << set.size()); ++mask) {
      sub.clear();
      for (std::size_t i = 0; i < set.size(); ++i) {
        if (mask >> i & 1) sub.push_back(set[i]);
      }
      if (sub.size() > k) continue;
      std::int32_t r = rounds[index.rank(sub)];
      if (r >= 0 && r < round) return true;
    }
    return false;
  };

  int previous = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const KSetEntry& e = entries[i];
    std::string where = "trace entry " + std::to_string(i + 1);
    if (e.round < previous) throw Error(where + ": rounds out of order");
    previous = e.round;
    std::vector<FactId> s = e.facts;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end() || s.size() > k ||
        (!s.empty() && s.back() >= db.size())) {
      throw Error(where + ": not a " + std::to_string(k) + "-set of the database");
    }
    std::uint64_t rank = index.rank(s);
    if (rounds[rank] >= 0) throw Error(where + ": set listed twice");

    if (e.round == 0) {
      if (e.witness.kind != Witness::Kind::none) throw Error(where + ": round 0 has a witness");
      if (!detail::contains_solution(problem, s)) throw Error(where + ": set does not satisfy q");
    } else {
      long g = detail::group_of(problem, e.witness);
      if (g < 0) throw Error(where + ": witness names no block or admissible fact");
      for (FactId u : problem.groups[static_cast<std::size_t>(g)]) {
        std::vector<FactId> su = s;
        if (!std::binary_search(su.begin(), su.end(), u)) {
          su.insert(std::upper_bound(su.begin(), su.end(), u), u);
        }
        if (!covered(su, e.round)) {
          throw Error(where + ": witness fails for fact " + std::to_string(u));
        }
      }
    }
    rounds[rank] = e.round;
    table.witnesses()[rank] = e.witness;
  }
  return table;
}

}  // namespace cqa
