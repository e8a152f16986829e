#include <benchmark/benchmark.h>
#include <kemweb/canonical.hpp>
#include <kemweb/classify.hpp>
#include <kemweb/metric.hpp>
#include <kemweb/separability.hpp>
#include <kemweb/tape.hpp>

namespace {

using namespace kemweb;

// Warped product on n coordinates: base {x1, x2}, remaining coordinates as lines.
SigmaWeb warped(int n) {
  const Expr a = Expr::var(0, "x1"), b = Expr::var(0, "x2");
  std::vector<BaseCoordinate> base{{"x1", {1, 2}, 1, a + Expr(0.1) * sin(a), Expr(1.0)},
                                   {"x2", {1, 2}, 1, Expr(3.0) + b, Expr(1.0) + b * b}};
  std::vector<ConstantBlock> blocks;
  for (int k = 2; k < n; ++k) {
    const std::string name = "x" + std::to_string(k + 1);
    blocks.push_back({6.0 + k, line_web(name, {0, 1}, 1, Expr(1.0) + pow(Expr::var(0, name), 2.0))});
  }
  return warped_product_metric(base, blocks);
}

void BM_TreeEvaluation(benchmark::State& state) {
  const OrthogonalMetric m = to_metric(warped(int(state.range(0))));
  const Point p = m.box().center();
  const std::size_t n = m.dim();
  for (auto _ : state) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) s += evaluate(m.christoffel_expr(int(i), int(j), int(k)), p);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_TreeEvaluation)->Arg(3)->Arg(5);

void BM_TapeEvaluation(benchmark::State& state) {
  const OrthogonalMetric m = to_metric(warped(int(state.range(0))));
  const Point p = m.box().center();
  for (auto _ : state) benchmark::DoNotOptimize(christoffel(m, p));
}
BENCHMARK(BM_TapeEvaluation)->Arg(3)->Arg(5);

void BM_RiemannTensor(benchmark::State& state) {
  const OrthogonalMetric m = to_metric(warped(int(state.range(0))));
  const Point p = m.box().center();
  for (auto _ : state) benchmark::DoNotOptimize(riemann_tensor(m, p));
}
BENCHMARK(BM_RiemannTensor)->Arg(3)->Arg(5);

void BM_MetricCompile(benchmark::State& state) {
  const SigmaWeb w = warped(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(to_metric(w));
}
BENCHMARK(BM_MetricCompile)->Arg(3)->Arg(5);

void BM_LeviCivitaCheck(benchmark::State& state) {
  const OrthogonalMetric m = to_metric(warped(int(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(check_levi_civita(m));
}
BENCHMARK(BM_LeviCivitaCheck)->Arg(3)->Arg(5);

void BM_Classify(benchmark::State& state) {
  const SigmaWeb w = warped(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(classify(w));
}
BENCHMARK(BM_Classify)->Arg(3)->Arg(5);

}  // namespace

BENCHMARK_MAIN();
