#include <benchmark/benchmark.h>

#include "cqa/fixpoint.hpp"
#include "cqa/generators.hpp"
#include "cqa/oracle.hpp"
#include "cqa/queries.hpp"

using namespace cqa;

namespace {

Strategy strategy_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Strategy::reference : Strategy::parallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "reference" : "parallel"); }

// run_cqk on D_n with k = n - 2; range(0) picks the kernel, range(1) is n.
void BM_CqkDn(benchmark::State& state) {
  Database db = gen::gen_dn(static_cast<int>(state.range(1)));
  FixpointOptions options;
  options.strategy = strategy_of(state);
  const auto k = static_cast<std::size_t>(state.range(1) - 2);
  for (auto _ : state) benchmark::DoNotOptimize(run_cqk(db, queries::q4(), k, options).accepted);
  label(state);
}
BENCHMARK(BM_CqkDn)->ArgsProduct({{0, 1}, {4, 5, 6}})->Unit(benchmark::kMillisecond);

void BM_CqkPlusDn(benchmark::State& state) {
  Database db = gen::gen_dn(static_cast<int>(state.range(1)));
  FixpointOptions options;
  options.strategy = strategy_of(state);
  const auto k = static_cast<std::size_t>(state.range(1) - 2);
  for (auto _ : state) benchmark::DoNotOptimize(run_cqk_plus(db, queries::q4(), k, options).accepted);
  label(state);
}
BENCHMARK(BM_CqkPlusDn)->ArgsProduct({{0, 1}, {4, 5}})->Unit(benchmark::kMillisecond);

// Random q2' database, k = 4.
void BM_CqkPath(benchmark::State& state) {
  ConjunctiveQuery q = queries::q2p();
  gen::RandomProfile p;
  p.relations = {{"R", 2, 1}, {"X", 2, 1}, {"Y", 2, 1}};
  p.n_blocks = 14;
  p.max_block_size = 3;
  p.domain_size = 5;
  p.seed = 7;
  p.plant = q;
  p.planted = 3;
  Database db = gen::gen_random(p);
  FixpointOptions options;
  options.strategy = strategy_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(run_cqk(db, q, 4, options).accepted);
  label(state);
}
BENCHMARK(BM_CqkPath)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_OracleDn(benchmark::State& state) {
  Database db = gen::gen_dn(static_cast<int>(state.range(1)));
  OracleOptions options;
  options.strategy = strategy_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(certain(db, queries::q4(), options));
  label(state);
}
BENCHMARK(BM_OracleDn)->ArgsProduct({{0, 1}, {4, 5}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
