#include <sstream>
#include <string>

#include <benchmark/benchmark.h>

#include "dlsgd/bounds.hpp"
#include "dlsgd/engine.hpp"
#include "dlsgd/libsvm.hpp"
#include "dlsgd/topology.hpp"

namespace {

using namespace dlsgd;

void BM_SimulationStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto problem = quadratic_problem(20, 15.0, 1.0 / 12.0);
  const MixingMatrix w = metropolis_weights(gen_erdos_renyi(n, 0.3, 7));
  const auto schedule = CommSchedule::every_step(1'000'000);
  Simulation sim(*problem, w, schedule, StepSizeRule{1.0, 1000.0}, 1);
  for (auto _ : state) sim.step();
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SimulationStep)->Arg(8)->Arg(20)->Arg(64);

void BM_MetropolisPath(benchmark::State& state) {
  const Graph g = gen_path(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(metropolis_weights(g).rho());
}
BENCHMARK(BM_MetropolisPath)->Arg(16)->Arg(64)->Arg(256);

void BM_Theorem1(benchmark::State& state) {
  const auto horizon = static_cast<std::size_t>(state.range(0));
  const auto rho = CommSchedule::varying_interval(horizon, 40).rho_sequence(0.9);
  BoundParams p;
  p.sigma2 = 5.0 / 3.0;
  p.n = 20;
  p.horizon = horizon;
  p.beta = 1000.0;
  p.gap0 = 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(theorem1_rhs(p, rho));
}
BENCHMARK(BM_Theorem1)->Arg(2000)->Arg(100'000);

void BM_ParseLibsvm(benchmark::State& state) {
  std::ostringstream text;
  RngStream rng(3, 0);
  for (int j = 0; j < 2000; ++j) {
    text << (rng.uniform() < 0.5 ? "+1" : "-1");
    for (int k = 1; k <= 123; ++k)
      if (rng.uniform() < 0.11) text << ' ' << k << ":1";
    text << '\n';
  }
  const std::string data = text.str();
  for (auto _ : state) benchmark::DoNotOptimize(parse_libsvm(std::string_view(data), 123).size());
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_ParseLibsvm);

}  // namespace

BENCHMARK_MAIN();
