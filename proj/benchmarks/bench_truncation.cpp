#include <benchmark/benchmark.h>

#include "kmselect/contrast.hpp"
#include "kmselect/errors.hpp"
#include "kmselect/inference.hpp"
#include "kmselect/kmeans.hpp"
#include "kmselect/simulation.hpp"
#include "kmselect/truncation.hpp"

using namespace kmselect;

namespace {

struct Instance {
    DataMatrix x;
    ClusterTrace trace;
    ContrastContext ctx;
};

Instance make_instance(int n, int q, int k, int t_max, std::uint64_t seed) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        DataMatrix x = gen_matrix_normal(Matrix::Zero(n, q), 1.0, seed + 97ULL * attempt);
        try {
            ClusterTrace trace = lloyd(x, k, t_max, seed + attempt);
            ContrastContext ctx(x, trace.assignments.back(), 0, 1);
            return {std::move(x), std::move(trace), std::move(ctx)};
        } catch (const Error&) {
            continue;
        }
    }
}

void BM_lloyd(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    DataMatrix x = gen_matrix_normal(Matrix::Zero(n, 10), 1.0, 7ULL);
    for (auto _ : state) {
        try {
            benchmark::DoNotOptimize(lloyd(x, 3, 10, 7ULL));
        } catch (const Error&) {
        }
    }
}

void BM_truncation_set(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Instance inst = make_instance(n, 10, 3, 5, 11ULL);
    for (auto _ : state) {
        benchmark::DoNotOptimize(truncation_set(inst.trace, inst.ctx));
    }
    state.SetComplexityN(n);
}

void BM_p_selective(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Instance inst = make_instance(n, 10, 3, 5, 13ULL);
    for (auto _ : state) {
        benchmark::DoNotOptimize(p_selective(inst.x, inst.trace, 0, 1, 1.0));
    }
}

} // namespace

BENCHMARK(BM_lloyd)->Arg(100)->Arg(200)->Arg(400);
BENCHMARK(BM_truncation_set)->Arg(50)->Arg(100)->Arg(200)->Arg(400)->Arg(800)->Complexity();
BENCHMARK(BM_p_selective)->Arg(100)->Arg(400);

BENCHMARK_MAIN();
