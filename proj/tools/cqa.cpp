// cqa: certainty of conjunctive queries under primary keys.
//
//   cqa classify --query q.txt [--json] [--dot out.dot]
//   cqa certain --query q.txt --db d.txt [--method M] [--k K] [--trace t.jsonl]
//   cqa gen dn --n 4
//   cqa gen dg --graph g.txt
//   cqa gen q5 --db d.txt
//   cqa gen random --relation R/3:1 --blocks 6 --seed 7
//
// Exit codes: 0 decided, 1 input/limit error, 2 unclassified or method not
// applicable to the query.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cqa/core.hpp"
#include "cqa/fixpoint.hpp"
#include "cqa/generators.hpp"
#include "cqa/matching.hpp"
#include "cqa/oracle.hpp"
#include "cqa/parse.hpp"
#include "cqa/path.hpp"
#include "cqa/queries.hpp"
#include "cqa/sjf.hpp"

using namespace cqa;
using nlohmann::json;

namespace {

constexpr int kDecided = 0;
constexpr int kFailure = 1;
constexpr int kNotApplicable = 2;

// Raised for queries outside the fragment a command or method handles.
struct NotApplicable : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
}

Database load_db(const std::string& path) {
  std::vector<std::string> warnings;
  Database db = parse_database(read_file(path), &warnings);
  for (const auto& w : warnings) std::cerr << path << ": " << w << "\n";
  return db;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

// ---------------------------------------------------------------- classify

struct ClassifyArgs {
  std::string query;
  std::string dot;
  bool json = false;
};

int cmd_classify(const ClassifyArgs& args) {
  ConjunctiveQuery q = parse_query(read_file(args.query));
  json report{{"query", to_string(q)}};

  if (q.is_self_join_free()) {
    auto c = sjf::classify(q);
    if (!args.dot.empty()) write_file(args.dot, sjf::attack_graph_dot(q, c.graph));
    if (args.json) {
      std::cout << sjf::classification_json(q, c) << "\n";
      return kDecided;
    }
    std::cout << sjf::to_string(c.verdict) << "\n";
    auto atoms = [&](const std::vector<std::size_t>& ids) {
      std::vector<std::string> out;
      for (std::size_t i : ids) out.push_back(to_string(ConjunctiveQuery({q.atom(i)})));
      return out;
    };
    for (const auto& e : c.graph.edges) {
      std::cout << "attack: " << atoms({e.from})[0] << " -> " << atoms({e.to})[0]
                << (e.weak ? " (weak)" : " (strong)") << "\n";
    }
    switch (c.verdict) {
      case sjf::Complexity::fo:
        std::cout << "order: " << join(atoms(c.witness[0]), ", ") << "\n";
        break;
      case sjf::Complexity::ptime_not_fo:
        for (const auto& comp : c.witness) std::cout << "component: " << join(atoms(comp), ", ") << "\n";
        break;
      case sjf::Complexity::conp_complete:
        std::cout << "strong cycle: " << join(atoms(c.witness[0]), " -> ") << "\n";
        break;
    }
    return kDecided;
  }

  if (q.is_path()) {
    path::PathWord w = path::word_of(q);
    if (!args.dot.empty()) write_file(args.dot, path::PathAutomaton(w).dot());
    auto factor = path::counterexample_word(w, path::Inclusion::factor);
    auto prefix = path::counterexample_word(w, path::Inclusion::prefix);
    std::string verdict = factor ? "CONP_COMPLETE" : prefix ? "PTIME_NOT_FO" : "FO";
    report["verdict"] = verdict;
    report["word"] = path::to_string(w);
    report["factor_condition"] = !factor;
    report["prefix_condition"] = !prefix;
    if (factor) report["factor_counterexample"] = path::to_string({*factor});
    if (prefix) report["prefix_counterexample"] = path::to_string({*prefix});
    if (args.json) {
      std::cout << report.dump(2) << "\n";
      return kDecided;
    }
    std::cout << verdict << "\n";
    std::cout << "word: " << path::to_string(w) << "\n";
    if (factor) {
      std::cout << "word without the query as a factor: " << path::to_string({*factor}) << "\n";
    } else if (prefix) {
      std::cout << "every word has the query as a factor\n";
      std::cout << "word without the query as a prefix: " << path::to_string({*prefix}) << "\n";
    } else {
      std::cout << "every word has the query as a prefix\n";
    }
    return kDecided;
  }

  std::string note = queries::is_q4_shape(q) ? "equivalent to SBM (saturating bipartite matching)"
                                             : "neither self-join-free nor a path query";
  if (args.json) {
    report["verdict"] = "unclassified";
    report["note"] = note;
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << "unclassified\nnote: " << note << "\n";
  }
  return kNotApplicable;
}

// ----------------------------------------------------------------- certain

struct CertainArgs {
  std::string query;
  std::string db;
  std::string method = "oracle";
  std::size_t k = 0;
  std::string trace;
  std::uint64_t limit = kDefaultRepairLimit;
  bool json = false;
};

int cmd_certain(const CertainArgs& args) {
  ConjunctiveQuery q = parse_query(read_file(args.query));
  Database db = load_db(args.db);
  json report{{"method", args.method}};
  std::vector<std::string> lines;
  bool answer = false;

  if (args.method == "oracle") {
    auto cx = counterexample_repair(db, q, {args.limit, Strategy::parallel});
    answer = !cx;
    report["repairs"] = repair_count(db);
    lines.push_back("repairs: " + std::to_string(repair_count(db)));
    if (cx) {
      std::vector<std::string> facts;
      for (FactId f : cx->chosen) facts.push_back(to_string(db.fact(f)));
      report["counterexample"] = facts;
      lines.push_back("counterexample repair:");
      for (const auto& f : facts) lines.push_back("  " + f);
    }
  } else if (args.method == "cqk" || args.method == "cqk_plus") {
    std::size_t k = args.k ? args.k : q.size();
    if (args.method == "cqk_plus" && q.size() != 2) {
      throw NotApplicable("cqk_plus needs a two-atom query");
    }
    auto result = args.method == "cqk" ? run_cqk(db, q, k) : run_cqk_plus(db, q, k);
    answer = result.accepted;
    report["k"] = k;
    report["rounds"] = result.rounds;
    report["derived"] = result.table.size();
    lines.push_back("k: " + std::to_string(k));
    lines.push_back("rounds: " + std::to_string(result.rounds));
    lines.push_back("derived sets: " + std::to_string(result.table.size()));
    if (result.empty_set_round) {
      report["empty_set_round"] = *result.empty_set_round;
      lines.push_back("empty set derived in round " + std::to_string(*result.empty_set_round));
    }
    if (!args.trace.empty()) write_file(args.trace, serialize_trace(trace(result.table)));
  } else if (args.method == "nfix") {
    if (!q.is_path()) throw NotApplicable("nfix needs a path query");
    auto result = path::run_n_fixpoint(db, path::word_of(q));
    answer = result.accepted;
    report["rounds"] = result.rounds;
    report["derived"] = result.table.size();
    lines.push_back("rounds: " + std::to_string(result.rounds));
    lines.push_back("derived pairs: " + std::to_string(result.table.size()));
  } else if (args.method == "matching") {
    if (!queries::is_q4_shape(q)) throw NotApplicable("matching needs q4 = R(x; y, z) & R(z; x, y)");
    try {
      matching::require_q4_schema(db);
    } catch (const SchemaError& e) {
      throw NotApplicable(e.what());
    }
    answer = matching::certain_q4(db);
    matching::SolutionGraph graph(db);
    report["components"] = graph.components().size();
    report["triangles"] = graph.triangle_count();
    lines.push_back("solution graph components: " + std::to_string(graph.components().size()) +
                    " (" + std::to_string(graph.triangle_count()) + " triangles)");
  } else {
    throw NotApplicable("unknown method " + args.method);
  }

  report["certain"] = answer;
  if (args.json) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << "certain: " << (answer ? "yes" : "no") << "\n";
    for (const auto& l : lines) std::cout << l << "\n";
  }
  return kDecided;
}

// --------------------------------------------------------------------- gen

struct GenArgs {
  int n = 4;
  std::string graph;
  std::string db;
  std::string out;
  std::vector<std::string> relations;
  std::size_t blocks = 6;
  std::size_t block_size = 2;
  std::size_t domain = 4;
  std::uint64_t seed = 0;
  std::string plant;
  std::size_t planted = 1;
};

gen::RelationSpec parse_relation_spec(const std::string& text) {
  // NAME/ARITY:KEYSIZE
  auto slash = text.find('/');
  auto colon = text.find(':');
  if (slash == std::string::npos || colon == std::string::npos || colon < slash) {
    throw Error("relation spec must look like R/3:1, got " + text);
  }
  try {
    return {text.substr(0, slash), std::stoi(text.substr(slash + 1, colon - slash - 1)),
            std::stoi(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw Error("relation spec must look like R/3:1, got " + text);
  }
}

int cmd_gen_dn(const GenArgs& args) {
  emit(args.out, render_database(gen::gen_dn(args.n)));
  return kDecided;
}

int cmd_gen_dg(const GenArgs& args) {
  auto g = matching::parse_bipartite(read_file(args.graph));
  auto dg = matching::sbm_to_q4(g);
  std::string header;
  for (auto [s, t] : dg.committed) {
    header += "# committed " + g.left[s] + " -> " + g.right[t] + "\n";
  }
  if (dg.unmatchable) header += "# some left vertex has no neighbour left\n";
  emit(args.out, header + render_database(dg.db));
  return kDecided;
}

int cmd_gen_q5(const GenArgs& args) {
  emit(args.out, render_database(gen::q4_to_q5(load_db(args.db))));
  return kDecided;
}

int cmd_gen_random(const GenArgs& args) {
  gen::RandomProfile profile;
  for (const auto& r : args.relations) profile.relations.push_back(parse_relation_spec(r));
  profile.n_blocks = args.blocks;
  profile.max_block_size = args.block_size;
  profile.domain_size = args.domain;
  profile.seed = args.seed;
  if (!args.plant.empty()) {
    profile.plant = parse_query(read_file(args.plant));
    profile.planted = args.planted;
  }
  if (profile.relations.empty() && !profile.plant) throw Error("give --relation or --plant");
  emit(args.out, render_database(gen::gen_random(profile)));
  return kDecided;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certainty of conjunctive queries over databases with primary keys"};
  app.require_subcommand(1);
  int code = kDecided;
  std::function<int()> action;

  ClassifyArgs classify;
  auto* c = app.add_subcommand("classify", "Complexity of certain(q) for a query");
  c->add_option("--query", classify.query, "Query file")->required()->check(CLI::ExistingFile);
  c->add_flag("--json", classify.json, "JSON report");
  c->add_option("--dot", classify.dot, "Write the attack graph or path automaton as DOT");
  c->callback([&] { action = [&] { return cmd_classify(classify); }; });

  CertainArgs certain_args;
  auto* ce = app.add_subcommand("certain", "Decide whether every repair satisfies the query");
  ce->add_option("--query", certain_args.query, "Query file")->required()->check(CLI::ExistingFile);
  ce->add_option("--db", certain_args.db, "Database file")->required()->check(CLI::ExistingFile);
  ce->add_option("--method", certain_args.method, "oracle, cqk, cqk_plus, nfix or matching")
      ->check(CLI::IsMember({"oracle", "cqk", "cqk_plus", "nfix", "matching"}));
  ce->add_option("--k", certain_args.k, "Set size for cqk/cqk_plus (default: number of atoms)")
      ->check(CLI::PositiveNumber);
  ce->add_option("--trace", certain_args.trace, "Write the fixpoint derivations as JSON lines");
  ce->add_option("--limit-repairs", certain_args.limit, "Oracle repair limit");
  ce->add_flag("--json", certain_args.json, "JSON report");
  ce->callback([&] { action = [&] { return cmd_certain(certain_args); }; });

  GenArgs gen_args;
  auto* g = app.add_subcommand("gen", "Generate databases");
  g->require_subcommand(1);
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", gen_args.out, "Output file (default stdout)"); };

  auto* dn = g->add_subcommand("dn", "The D_n family");
  dn->add_option("--n", gen_args.n, "n >= 4")->check(CLI::Range(4, 64));
  add_out(dn);
  dn->callback([&] { action = [&] { return cmd_gen_dn(gen_args); }; });

  auto* dg = g->add_subcommand("dg", "q4 database D_G for a bipartite graph");
  dg->add_option("--graph", gen_args.graph, "Bipartite graph file")->required()->check(CLI::ExistingFile);
  add_out(dg);
  dg->callback([&] { action = [&] { return cmd_gen_dg(gen_args); }; });

  auto* q5 = g->add_subcommand("q5", "q5 database D' for a q4 database");
  q5->add_option("--db", gen_args.db, "q4 database file")->required()->check(CLI::ExistingFile);
  add_out(q5);
  q5->callback([&] { action = [&] { return cmd_gen_q5(gen_args); }; });

  auto* rnd = g->add_subcommand("random", "Random database");
  rnd->add_option("--relation", gen_args.relations, "NAME/ARITY:KEYSIZE, repeatable");
  rnd->add_option("--blocks", gen_args.blocks, "Number of blocks drawn");
  rnd->add_option("--block-size", gen_args.block_size, "Largest block size")->check(CLI::PositiveNumber);
  rnd->add_option("--domain", gen_args.domain, "Number of constants")->check(CLI::PositiveNumber);
  rnd->add_option("--seed", gen_args.seed, "Random seed");
  rnd->add_option("--plant", gen_args.plant, "Query file whose valuations are planted")->check(CLI::ExistingFile);
  rnd->add_option("--planted", gen_args.planted, "Number of planted valuations");
  add_out(rnd);
  rnd->callback([&] { action = [&] { return cmd_gen_random(gen_args); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kDecided : kFailure;
  }

  try {
    code = action();
  } catch (const NotApplicable& e) {
    std::cerr << "not applicable: " << e.what() << "\n";
    code = kNotApplicable;
  } catch (const QueryShapeError& e) {
    std::cerr << "not applicable: " << e.what() << "\n";
    code = kNotApplicable;
  } catch (const LimitExceeded& e) {
    std::cerr << "limit exceeded: " << e.what() << "\n";
    code = kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = kFailure;
  }
  return code;
}
