#include <benchmark/benchmark.h>

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "qhist/decoherence.hpp"
#include "qhist/integral.hpp"
#include "qhist/pipeline.hpp"
#include "qhist/qmeasure.hpp"
#include "qhist/rng.hpp"
#include "qhist/verify.hpp"

namespace {

using namespace qhist;

// dim-d pipeline with `steps` stages, each a Haar gate followed by a rank-1
// measurement with d outcomes, so the path space has exactly d^steps paths.
Pipeline dense_pipeline(std::size_t dim, std::size_t steps, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Step> stages;
  for (std::size_t s = 0; s < steps; ++s) {
    Matrix gate = random_unitary(rng, dim);
    Pvm pvm = random_pvm(rng, dim, dim);
    stages.push_back({std::move(gate), std::move(pvm)});
  }
  return Pipeline(dim, random_unit_vector(rng, dim), std::move(stages));
}

// Every other path, to exercise event sums over a large id set.
Event half_event(std::size_t path_count) {
  std::vector<std::size_t> ids;
  for (std::size_t k = 0; k < path_count; k += 2) ids.push_back(k);
  return Event::from_ids(std::move(ids));
}

FunctionTable ramp_table(std::size_t path_count) {
  FunctionTable f;
  f.values.resize(path_count);
  for (std::size_t k = 0; k < path_count; ++k) {
    f.values[k] = 0.25 * static_cast<double>(k % 17);
  }
  return f;
}

void BM_PathMeasures(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto steps = static_cast<std::size_t>(state.range(1));
  const Pipeline p = dense_pipeline(dim, steps, 7);
  for (auto _ : state) {
    auto diag = path_measures(p);
    benchmark::DoNotOptimize(diag);
  }
  state.counters["paths"] = static_cast<double>(p.path_count());
}
BENCHMARK(BM_PathMeasures)->Args({2, 10})->Args({4, 5})->Args({8, 4});

void BM_PathAmplitudes(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto steps = static_cast<std::size_t>(state.range(1));
  const Pipeline p = dense_pipeline(dim, steps, 7);
  for (auto _ : state) {
    auto amps = pure_path_amplitudes(p, p.pure_initial());
    benchmark::DoNotOptimize(amps);
  }
  state.counters["paths"] = static_cast<double>(p.path_count());
}
BENCHMARK(BM_PathAmplitudes)->Args({2, 10})->Args({4, 5})->Args({8, 4});

void BM_DecoherenceMatrix(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto steps = static_cast<std::size_t>(state.range(1));
  const Pipeline p = dense_pipeline(dim, steps, 7);
  for (auto _ : state) {
    auto m = decoherence_matrix(p);
    benchmark::DoNotOptimize(m);
  }
  state.counters["paths"] = static_cast<double>(p.path_count());
}
BENCHMARK(BM_DecoherenceMatrix)->Args({2, 6})->Args({4, 4})->Args({4, 5});

void BM_PairEngine(benchmark::State& state) {
  const Pipeline p = dense_pipeline(8, 3, 7);
  const Path w1 = path_from_id(p, 13);
  const Path w2 = path_from_id(p, 200);
  for (auto _ : state) {
    auto d = decoherence_pair(p, w1, w2);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_PairEngine);

void BM_PairTraceOracle(benchmark::State& state) {
  const Pipeline p = dense_pipeline(8, 3, 7);
  const Path w1 = path_from_id(p, 13);
  const Path w2 = path_from_id(p, 200);
  for (auto _ : state) {
    auto d = trace_decoherence_pair(p, w1, w2);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_PairTraceOracle);

void BM_MeasureEvent(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto steps = static_cast<std::size_t>(state.range(1));
  const QMeasureContext ctx(dense_pipeline(dim, steps, 7));
  const Event a = half_event(ctx.pipeline().path_count());
  for (auto _ : state) {
    benchmark::DoNotOptimize(measure(ctx, a));
  }
  state.counters["paths"] = static_cast<double>(ctx.pipeline().path_count());
}
BENCHMARK(BM_MeasureEvent)->Args({2, 8})->Args({4, 5});

void BM_IntegrateLevelSet(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto steps = static_cast<std::size_t>(state.range(1));
  const QMeasureContext ctx(dense_pipeline(dim, steps, 7));
  const FunctionTable f = ramp_table(ctx.pipeline().path_count());
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_level_set(ctx, f));
  }
  state.counters["paths"] = static_cast<double>(ctx.pipeline().path_count());
}
BENCHMARK(BM_IntegrateLevelSet)->Args({2, 8})->Args({4, 5});

void BM_IntegratePairwise(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto steps = static_cast<std::size_t>(state.range(1));
  const QMeasureContext ctx(dense_pipeline(dim, steps, 7));
  const FunctionTable f = ramp_table(ctx.pipeline().path_count());
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_pairwise(ctx, f));
  }
  state.counters["paths"] = static_cast<double>(ctx.pipeline().path_count());
}
BENCHMARK(BM_IntegratePairwise)->Args({2, 8})->Args({4, 5});

void BM_PropertySuite(benchmark::State& state) {
  GeneratorConfig cfg;
  cfg.trials = static_cast<int>(state.range(0));
  cfg.seed = 42;
  for (auto _ : state) {
    auto report = run_suite(cfg);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_PropertySuite)->Arg(5)->Arg(25)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
