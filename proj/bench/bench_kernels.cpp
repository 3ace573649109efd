#include <benchmark/benchmark.h>

#include "hv/operators.hpp"
#include "hv/spanning.hpp"

namespace {

using namespace hv;

Operator workload(const ModelPtr& m) {
  const GradedClass one = m->basis_class(m->unit());
  return commutator(virasoro(1, one), w(3, -1, one)) + derive(virasoro(0, one));
}

void BM_images(benchmark::State& state, bool parallel) {
  auto m = builtin_model(state.range(1) ? "torus" : "p2");
  const Operator f = workload(m);
  const auto dom = basis_up_to(static_cast<int>(state.range(0)), *m);
  for (auto _ : state) {
    auto r = parallel ? images(f, dom) : images_serial(f, dom);
    benchmark::DoNotOptimize(r);
  }
  state.counters["monomials"] = static_cast<double>(dom.size());
}

void BM_equal_up_to(benchmark::State& state, bool parallel) {
  auto m = builtin_model(state.range(1) ? "torus" : "p2");
  const GradedClass one = m->basis_class(m->unit());
  const Operator lhs = commutator(w(3, 0, one), q(-1, one));
  const Operator rhs = w(3, 0, one) * q(-1, one) - q(-1, one) * w(3, 0, one);
  const int level = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = parallel ? equal_up_to(lhs, rhs, level) : equal_up_to_serial(lhs, rhs, level);
    benchmark::DoNotOptimize(r);
  }
}

void BM_span(benchmark::State& state) {
  auto m = builtin_model("p2");
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = check_generation(n, m);
    benchmark::DoNotOptimize(r);
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_images, serial, false)->Args({4, 0})->Args({3, 1})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_images, parallel, true)->Args({4, 0})->Args({3, 1})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_equal_up_to, serial, false)->Args({4, 0})->Args({3, 1})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_equal_up_to, parallel, true)->Args({4, 0})->Args({3, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_span)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
