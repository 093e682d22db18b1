// Serial reference against the OpenMP kernels on random point clouds.
//
//   trendop_bench --benchmark_filter=Knn

#include "trendop/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

using trendop::kernels::RowMatrix;
namespace kernels = trendop::kernels;

namespace {

RowMatrix cloud(Eigen::Index n, Eigen::Index dim) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g;
    RowMatrix p(n, dim);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index c = 0; c < dim; ++c)
            p(i, c) = g(rng);
    return p;
}

void sizes(benchmark::internal::Benchmark *b) {
    for (int n : {500, 1000, 2000, 4000})
        b->Arg(n);
}

constexpr int knn = 7;
constexpr int step = 1;

template <auto Knn>
void BM_Knn(benchmark::State &state) {
    const RowMatrix pts = cloud(state.range(0), 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(Knn(pts, knn, -1.0));
}

template <auto Knn, auto Kernel>
void BM_Kernel(benchmark::State &state) {
    const RowMatrix pts = cloud(state.range(0), 5);
    const auto bw = Knn(pts, knn, -1.0).distance;
    for (auto _ : state)
        benchmark::DoNotOptimize(Kernel(pts, step, bw));
}

template <auto Knn, auto Kernel, auto Normalize>
void BM_Normalize(benchmark::State &state) {
    const RowMatrix pts = cloud(state.range(0), 5);
    const Eigen::MatrixXd S = Kernel(pts, step, Knn(pts, knn, -1.0).distance);
    for (auto _ : state) {
        state.PauseTiming();
        Eigen::MatrixXd m = S;
        state.ResumeTiming();
        benchmark::DoNotOptimize(Normalize(m));
    }
}

} // namespace

BENCHMARK(BM_Knn<kernels::serial::knn_distances>)
    ->Name("Knn/serial")->Apply(sizes)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Knn<kernels::knn_distances>)
    ->Name("Knn/parallel")->Apply(sizes)->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_Kernel<kernels::serial::knn_distances, kernels::serial::variable_bandwidth_kernel>)
    ->Name("Kernel/serial")->Apply(sizes)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Kernel<kernels::knn_distances, kernels::variable_bandwidth_kernel>)
    ->Name("Kernel/parallel")->Apply(sizes)
    ->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Normalize<kernels::serial::knn_distances, kernels::serial::variable_bandwidth_kernel,
                       kernels::serial::normalize_rows>)
    ->Name("Normalize/serial")->Apply(sizes)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Normalize<kernels::knn_distances, kernels::variable_bandwidth_kernel,
                       kernels::normalize_rows>)
    ->Name("Normalize/parallel")->Apply(sizes)
    ->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
