// Microbenchmarks for the hot paths: interpretation, distance assignment,
// byte probing, and a short end-to-end campaign.

#include <benchmark/benchmark.h>

#include <random>

#include "conff/bench.hpp"
#include "conff/byte_mapping.hpp"
#include "conff/campaign.hpp"
#include "conff/executor.hpp"
#include "conff/parser.hpp"
#include "conff/static_analysis.hpp"

using namespace conff;

namespace {

const char* kLoopy = R"(
fn main() {
  block entry:
    i = 0
    jmp head
  block head:
    br site=L (i < inlen) -> body, done
  block body:
    r = call digest(i)
    i = i + 1
    jmp head
  block done:
    ret 0
}
fn digest(i) {
  block e:
    br site=M (in[i] == 90) -> hit, miss
  block hit:
    crash "loop.c:7" "planted-reach"
    ret 1
  block miss:
    ret in[i] * 3 + 1
}
)";

void BM_ExecuteLoop(benchmark::State& state) {
  TargetProgram p = parse_program(kLoopy);
  Executor ex(p);
  Bytes input(static_cast<size_t>(state.range(0)), 7);
  ExecutionTrace t;
  for (auto _ : state) {
    ex.run(input, -1, kDefaultStepBudget, t);
    benchmark::DoNotOptimize(t.coverage_count);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ExecuteLoop)->Arg(16)->Arg(256)->Arg(4096);

void BM_ExecuteFocused(benchmark::State& state) {
  TargetProgram p = parse_program(kLoopy);
  Executor ex(p);
  int32_t site = p.find_site("M");
  Bytes input(256, 7);
  ExecutionTrace t;
  for (auto _ : state) {
    ex.run(input, site, kDefaultStepBudget, t);
    benchmark::DoNotOptimize(t.focused_observations.size());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ExecuteFocused);

void BM_AssignDistances(benchmark::State& state) {
  BenchProgram b = generate_bench(BenchKind::Mixed, static_cast<size_t>(state.range(0)), 1);
  StaticGraph g = build_graph(b.program, b.target_location);
  for (auto _ : state) {
    DistanceMap dm = assign_distances(b.program, g);
    benchmark::DoNotOptimize(dm.dist.data());
  }
}
BENCHMARK(BM_AssignDistances)->Arg(4)->Arg(16)->Arg(64);

void BM_BuildByteMap(benchmark::State& state) {
  TargetProgram p = parse_program(
      "fn main() {\n"
      "  block b: br site=c ((in[512] + (in[513] * 256)) == 4242) -> y, n\n"
      "  block y: ret 1\n"
      "  block n: ret 0\n"
      "}\n");
  Executor ex(p);
  int32_t site = p.find_site("c");
  ExecutionTrace t;
  RunFn run = [&](const Bytes& in, int32_t focus) -> const ExecutionTrace& {
    ex.run(in, focus, kDefaultStepBudget, t);
    return t;
  };
  Bytes input(static_cast<size_t>(state.range(0)), 0);
  for (auto _ : state) {
    std::mt19937_64 rng(3);
    ByteMap map = build_byte_map(input, site, 4, 4, rng, run);
    benchmark::DoNotOptimize(map.lhs_offsets.size());
  }
}
BENCHMARK(BM_BuildByteMap)->Arg(1024)->Arg(4096);

void BM_CampaignMagicChain(benchmark::State& state) {
  BenchProgram b = generate_bench(BenchKind::MagicChain, 2, 1);
  CampaignConfig cfg;
  cfg.target_location = b.target_location;
  cfg.seeds = {b.recommended_seed};
  cfg.max_len = 64;
  cfg.max_execs = 50000;
  cfg.stop_on_target_crash = true;
  cfg.log_events = false;
  for (auto _ : state) {
    CampaignReport rep = run_campaign(b.program, cfg);
    benchmark::DoNotOptimize(rep.execs);
  }
}
BENCHMARK(BM_CampaignMagicChain)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
