#include <benchmark/benchmark.h>

#include <random>

#include "dynkc/budget_sparsifier.hpp"
#include "dynkc/combined.hpp"
#include "dynkc/kcenter.hpp"
#include "dynkc/merged_sparsifier.hpp"
#include "dynkc/metric.hpp"
#include "dynkc/recourse_sparsifier.hpp"
#include "dynkc/stream.hpp"

namespace {

using namespace dynkc;

void BM_MetricDist(benchmark::State& state) {
  MetricSpace m(8);
  std::mt19937_64 rng(7);
  for (PointId i = 0; i < 1024; ++i) {
    std::vector<double> c(8);
    for (double& x : c) x = uniform_real(rng) * 100.0;
    m.add_point(i, c);
  }
  PointId a = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.dist(a & 1023, (a * 37 + 11) & 1023));
    ++a;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MetricDist);

// Steady churn: one insertion and one deletion alternating, metric registered
// around each apply exactly as the replay harness does.
template <typename Engine>
void engine_churn(benchmark::State& state) {
  GeneratorConfig cfg;
  cfg.kind = GeneratorKind::kChurn;
  cfg.n_init = static_cast<std::size_t>(state.range(0));
  cfg.dim = 2;
  cfg.seed = 11;
  Params prm;
  prm.k = 8;

  MetricSpace m(cfg.dim);
  Engine engine(m, prm);
  StreamGenerator gen(cfg);
  for (const auto& ev : gen.initial_events()) m.add_point(ev.id, ev.coords);
  engine.preprocess(gen.initial_events());
  auto view = [&]() { return engine.solution(); };

  for (auto _ : state) {
    UpdateEvent ev = gen.next(view);
    if (ev.kind == UpdateEvent::Kind::kInsert) {
      m.add_point(ev.id, ev.coords);
      engine.apply(ev);
    } else {
      engine.apply(ev);
      m.remove_point(ev.id);
    }
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_RecUpdate(benchmark::State& state) { engine_churn<RecourseSparsifier>(state); }
void BM_BudgetUpdate(benchmark::State& state) { engine_churn<BudgetSparsifier>(state); }
void BM_MergedUpdate(benchmark::State& state) { engine_churn<MergedSparsifier>(state); }
void BM_KCenterUpdate(benchmark::State& state) { engine_churn<DynamicKCenter>(state); }
void BM_CombinedUpdate(benchmark::State& state) { engine_churn<CombinedClusterer>(state); }

BENCHMARK(BM_RecUpdate)->Arg(256)->Arg(1024);
BENCHMARK(BM_BudgetUpdate)->Arg(256)->Arg(1024);
BENCHMARK(BM_MergedUpdate)->Arg(256)->Arg(1024);
BENCHMARK(BM_KCenterUpdate)->Arg(256)->Arg(1024);
BENCHMARK(BM_CombinedUpdate)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
