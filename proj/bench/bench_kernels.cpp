// Serial vs OpenMP dense kernels, plus one full engine iteration on a
// lasso instance large enough to route through the parallel path.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "psplit/engine.hpp"
#include "psplit/kernels.hpp"
#include "psplit/problems.hpp"

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

template <bool Parallel, bool Transpose>
void BM_gemv(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_vector(n * n, 1);
    const auto x = random_vector(n, 2);
    std::vector<double> y(n);
    for (auto _ : state) {
        if constexpr (Parallel) {
            if constexpr (Transpose)
                psplit::kernels::parallel::gemv_t(n, n, a, x, y);
            else
                psplit::kernels::parallel::gemv(n, n, a, x, y);
        } else {
            if constexpr (Transpose)
                psplit::kernels::serial::gemv_t(n, n, a, x, y);
            else
                psplit::kernels::serial::gemv(n, n, a, x, y);
        }
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n));
}

void BM_engine_step(benchmark::State& state) {
    psplit::RandomLassoOptions opts;
    opts.rows = static_cast<std::size_t>(state.range(0));
    opts.cols = 2 * opts.rows;
    opts.nonzeros = opts.rows / 4;
    const auto inst = psplit::make_random_lasso(3, opts);
    psplit::EngineConfig cfg;
    cfg.max_iters = 1L << 40;
    psplit::Engine engine(inst.spec, cfg, {});
    for (auto _ : state) benchmark::DoNotOptimize(engine.step());
}

}  // namespace

BENCHMARK(BM_gemv<false, false>)->Name("gemv/serial")->RangeMultiplier(4)->Range(64, 2048);
BENCHMARK(BM_gemv<true, false>)->Name("gemv/openmp")->RangeMultiplier(4)->Range(64, 2048);
BENCHMARK(BM_gemv<false, true>)->Name("gemv_t/serial")->RangeMultiplier(4)->Range(64, 2048);
BENCHMARK(BM_gemv<true, true>)->Name("gemv_t/openmp")->RangeMultiplier(4)->Range(64, 2048);
BENCHMARK(BM_engine_step)->Arg(64)->Arg(512);

BENCHMARK_MAIN();
