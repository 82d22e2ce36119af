// Serial reference vs OpenMP kernels on the sizes the simulator actually
// uses: Hilbert-space products (d = 27, 81) and superoperator products and
// propagation steps (d^2 = 729). Run with --benchmark_filter as usual.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rydcorr/kernels.hpp"
#include "rydcorr/matexp.hpp"
#include "rydcorr/operators.hpp"

using rydcorr::Operator;
using rydcorr::cxd;
namespace kernels = rydcorr::kernels;

namespace {

std::vector<cxd> random_block(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cxd> out(n);
    for (cxd& v : out) v = cxd(u(rng), u(rng));
    return out;
}

void bm_matvec(benchmark::State& state, bool parallel) {
    const int n = static_cast<int>(state.range(0));
    const auto a = random_block(static_cast<std::size_t>(n) * n, 1);
    const auto x = random_block(n, 2);
    std::vector<cxd> y(n);
    for (auto _ : state) {
        if (parallel)
            kernels::matvec_omp(a.data(), x.data(), y.data(), n, n);
        else
            kernels::matvec_serial(a.data(), x.data(), y.data(), n, n);
        benchmark::DoNotOptimize(y.data());
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n);
}

void bm_matmul(benchmark::State& state, bool parallel) {
    const int n = static_cast<int>(state.range(0));
    const auto a = random_block(static_cast<std::size_t>(n) * n, 3);
    const auto b = random_block(static_cast<std::size_t>(n) * n, 4);
    std::vector<cxd> c(static_cast<std::size_t>(n) * n);
    for (auto _ : state) {
        if (parallel)
            kernels::matmul_omp(a.data(), b.data(), c.data(), n, n, n);
        else
            kernels::matmul_serial(a.data(), b.data(), c.data(), n, n, n);
        benchmark::DoNotOptimize(c.data());
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n * n);
}

void bm_expm(benchmark::State& state, kernels::ExecMode mode) {
    const int n = static_cast<int>(state.range(0));
    kernels::set_exec_mode(mode);
    Operator a(n);
    const auto block = random_block(static_cast<std::size_t>(n) * n, 5);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = 0.05 * block[static_cast<std::size_t>(i) * n + j];
    for (auto _ : state) {
        Operator e = rydcorr::expm(a);
        benchmark::DoNotOptimize(e.data());
    }
    kernels::set_exec_mode(kernels::ExecMode::Auto);
}

}  // namespace

BENCHMARK_CAPTURE(bm_matvec, serial, false)->Arg(81)->Arg(729)->Arg(6561);
BENCHMARK_CAPTURE(bm_matvec, openmp, true)->Arg(81)->Arg(729)->Arg(6561);
BENCHMARK_CAPTURE(bm_matmul, serial, false)->Arg(27)->Arg(81)->Arg(729);
BENCHMARK_CAPTURE(bm_matmul, openmp, true)->Arg(27)->Arg(81)->Arg(729);
BENCHMARK_CAPTURE(bm_expm, serial, kernels::ExecMode::Serial)->Arg(81)->Arg(729);
BENCHMARK_CAPTURE(bm_expm, openmp, kernels::ExecMode::OpenMP)->Arg(81)->Arg(729);

BENCHMARK_MAIN();
