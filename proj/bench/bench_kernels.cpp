// Serial reference versus OpenMP kernel for the exhaustive oracle, the box
// bound and the experiment grid.

#include <benchmark/benchmark.h>

#include "vrmec/coords.hpp"
#include "vrmec/experiment.hpp"
#include "vrmec/jcpt.hpp"
#include "vrmec/oracle.hpp"

using namespace vrmec;

namespace {

GenerationConfig small_config() {
  GenerationConfig g = GenerationConfig::desk_preset();
  g.sbs_count = 2;
  g.hmd_count = 2;
  g.viewpoint_count = 3;
  g.mes_cache_bits = 6e6;
  g.hmd_cache_bits = 3e6;
  return g;
}

void BM_Oracle(benchmark::State& state) {
  const Scenario s = generate_scenario(small_config(), 1);
  OracleOptions opt;
  opt.power_levels = 3;
  opt.cap = std::uint64_t{1} << 28;
  opt.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_solve(s, opt).optimal_value);
}
BENCHMARK(BM_Oracle)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Bound(benchmark::State& state) {
  const Scenario s = generate_scenario(GenerationConfig::desk_preset(), 1);
  const BoundContext ctx(s, SolverConfig{});
  const Box box = full_box(ctx.space());
  const bool parallel = state.range(0) != 0;
  for (auto _ : state) {
    const BoundResult r = parallel ? bound(ctx, box) : bound_serial(ctx, box);
    benchmark::DoNotOptimize(r.upper);
  }
}
BENCHMARK(BM_Bound)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Experiment(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.generation = small_config();
  cfg.values = {4e6, 8e6};
  cfg.seeds = {1, 2};
  cfg.solver.max_iterations = 30;
  cfg.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg).size());
}
BENCHMARK(BM_Experiment)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
