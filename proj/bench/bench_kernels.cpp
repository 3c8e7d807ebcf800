// Serial reference vs OpenMP for the two parallel kernels: the
// replenishment-period scan and the task-set campaign.

#include <benchmark/benchmark.h>

#include "rtsec/experiment.hpp"
#include "rtsec/server_opt.hpp"
#include "rtsec/workload.hpp"

using namespace rtsec;

namespace {

ServerProblem scan_problem() {
  GenSpec spec;
  spec.n_rt = 8;
  spec.n_sec = 4;
  spec.rt_util_target = 0.4;
  spec.seed = 3;
  static const TaskSet ts = generate(spec);
  const auto& tasks = ts.active_security;
  return ServerProblem(make_context(ts.rt_tasks, 4, tasks, desired_periods(tasks)));
}

std::vector<Time> grid(std::int64_t n) {
  std::vector<Time> ps;
  for (std::int64_t k = 1; k <= n; ++k) ps.push_back(Time::ticks(k * 100'000 / n + 1));
  return ps;
}

void BM_ScanSerial(benchmark::State& state) {
  const auto problem = scan_problem();
  const auto ps = grid(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(scan_serial(problem, ps));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ScanParallel(benchmark::State& state) {
  const auto problem = scan_problem();
  const auto ps = grid(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(scan_parallel(problem, ps));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

ExperimentConfig campaign(int sets) {
  ExperimentConfig cfg;
  cfg.sets_per_point = sets;
  cfg.detection_runs = 0;
  return cfg;
}

void BM_CampaignSerial(benchmark::State& state) {
  const auto cfg = campaign(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_campaign_serial(cfg));
}

void BM_CampaignParallel(benchmark::State& state) {
  const auto cfg = campaign(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_campaign_parallel(cfg));
}

}  // namespace

BENCHMARK(BM_ScanSerial)->Arg(1000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanParallel)->Arg(1000)->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CampaignSerial)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CampaignParallel)->Arg(10)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
