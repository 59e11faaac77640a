// Serial reference vs OpenMP for the three parallel kernels. Thread count
// follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "hawkes/eval.hpp"
#include "hawkes/likelihood.hpp"
#include "hawkes/mcmc.hpp"
#include "hawkes/simulator.hpp"
#include "hawkes/svi.hpp"

using namespace hawkes;

namespace {

const SimScenario& scenario() {
  static const SimScenario sc = benchmark_scenario(0.5, false, 3000.0, 11);
  return sc;
}

const EventSequence& events() {
  static const EventSequence seq = simulate_branching(scenario()).events;
  return seq;
}

template <bool Parallel>
void BM_LogLikelihood(benchmark::State& state) {
  const HawkesParams p = scenario_params(scenario());
  for (auto _ : state) {
    const double v = Parallel ? log_likelihood(p, events()) : log_likelihood_serial(p, events());
    benchmark::DoNotOptimize(v);
  }
  state.counters["events"] = static_cast<double>(events().size());
}

template <bool Parallel>
void BM_UpdateLocal(benchmark::State& state) {
  SviConfig cfg;
  Rng rng = make_rng(1, 0);
  const VariationalState s = initial_variational(cfg, events(), rng);
  const ParentWindows win(events(), cfg.support);
  const Window w = full_window(events());
  LocalState loc;
  for (auto _ : state) {
    if (Parallel) update_local(s, events(), w, win, loc);
    else update_local_serial(s, events(), w, win, loc);
    benchmark::ClobberMemory();
  }
}

template <bool Parallel>
void BM_CurveSamples(benchmark::State& state) {
  McmcConfig cfg;
  cfg.iterations = 200;
  cfg.burn_in = 0;
  cfg.h0 = cfg.h = 10;
  static const PosteriorSamples post = run_chain(cfg, simulate_branching(benchmark_scenario(0.5, false, 300.0, 2)).events);
  const GridSpec grid{512, 1.0};
  for (auto _ : state) {
    const CurveSamples cs = Parallel ? curve_samples(post.draws, grid) : curve_samples_serial(post.draws, grid);
    benchmark::DoNotOptimize(cs.values.data());
  }
}

}  // namespace

BENCHMARK(BM_LogLikelihood<false>)->Name("log_likelihood/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogLikelihood<true>)->Name("log_likelihood/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UpdateLocal<false>)->Name("update_local/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UpdateLocal<true>)->Name("update_local/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CurveSamples<false>)->Name("curve_samples/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CurveSamples<true>)->Name("curve_samples/openmp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
