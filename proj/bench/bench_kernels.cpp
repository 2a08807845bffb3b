#include <random>

#include <benchmark/benchmark.h>

#include "fracwave/fem.hpp"
#include "fracwave/kernels.hpp"

using namespace fracwave;

namespace {

Vector random_vector(Eigen::Index n) {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> nd;
    Vector v(n);
    for (auto& x : v) x = nd(gen);
    return v;
}

template <auto Kernel>
void BM_spmv(benchmark::State& state) {
    const StructuredMesh mesh(Box{}, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
    const SparseMatrix K = assemble_stiffness(mesh);
    const Vector x = random_vector(K.cols());
    Vector y(K.rows());
    for (auto _ : state) {
        Kernel(K, {x.data(), static_cast<std::size_t>(x.size())}, {y.data(), static_cast<std::size_t>(y.size())});
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * K.nonZeros());
}

template <auto Kernel>
void BM_lag_convolution(benchmark::State& state) {
    const auto rows = static_cast<Eigen::Index>(state.range(0));
    const std::size_t n = 200;
    Matrix h(rows, static_cast<Eigen::Index>(n + 1));
    h.setRandom();
    const std::vector<double> w(n + 1, 0.01);
    Vector out(rows);
    for (auto _ : state) {
        Kernel(w, h, n, 1, {out.data(), static_cast<std::size_t>(out.size())});
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * rows * static_cast<std::int64_t>(n));
}

void BM_assemble_serial(benchmark::State& state) {
    const StructuredMesh mesh(Box{}, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(serial::assemble_stiffness(mesh.triangulation()));
}

void BM_assemble_parallel(benchmark::State& state) {
    const StructuredMesh mesh(Box{}, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(mesh));
}

}  // namespace

BENCHMARK(BM_spmv<kernels::serial::spmv>)->Name("spmv/serial")->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_spmv<kernels::parallel::spmv>)->Name("spmv/parallel")->Arg(64)->Arg(256)->Arg(512);
BENCHMARK(BM_lag_convolution<kernels::serial::lag_convolution>)->Name("lag_convolution/serial")->Arg(4225)->Arg(66049);
BENCHMARK(BM_lag_convolution<kernels::parallel::lag_convolution>)->Name("lag_convolution/parallel")->Arg(4225)->Arg(66049);
BENCHMARK(BM_assemble_serial)->Name("assemble_stiffness/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_assemble_parallel)->Name("assemble_stiffness/parallel")->Arg(64)->Arg(256);

BENCHMARK_MAIN();
