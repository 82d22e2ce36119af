#include "rydcorr/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cstddef>

#include <omp.h>

namespace rydcorr::kernels {

namespace {

std::atomic<ExecMode> g_mode{ExecMode::Auto};

// Work sizes below this run serially even in Auto mode; the fork/join cost
// dominates for small operators (single-atom Hilbert spaces, trajectory
// states).
constexpr std::size_t kParallelThreshold = 1 << 14;

bool use_openmp(std::size_t work) {
    switch (g_mode.load(std::memory_order_relaxed)) {
        case ExecMode::Serial: return false;
        case ExecMode::OpenMP: return true;
        case ExecMode::Auto:
            return work >= kParallelThreshold && omp_get_max_threads() > 1 &&
                   !omp_in_parallel();
    }
    return false;
}

inline void matvec_row(const cxd* a, const cxd* x, cxd* y, int i, int n) {
    const cxd* ai = a + static_cast<std::size_t>(i) * n;
    cxd acc{};
    for (int j = 0; j < n; ++j) acc += ai[j] * x[j];
    y[i] = acc;
}

inline void matmul_row(const cxd* a, const cxd* b, cxd* c, int i, int k, int n) {
    cxd* ci = c + static_cast<std::size_t>(i) * n;
    std::fill(ci, ci + n, cxd{});
    const cxd* ai = a + static_cast<std::size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
        const cxd aip = ai[p];
        if (aip == cxd{}) continue;  // exact zero: skipping cannot change the sum
        const cxd* bp = b + static_cast<std::size_t>(p) * n;
        for (int j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
}

}  // namespace

void set_exec_mode(ExecMode m) { g_mode.store(m, std::memory_order_relaxed); }
ExecMode exec_mode() { return g_mode.load(std::memory_order_relaxed); }

void matvec_serial(const cxd* a, const cxd* x, cxd* y, int m, int n) {
    for (int i = 0; i < m; ++i) matvec_row(a, x, y, i, n);
}

void matvec_omp(const cxd* a, const cxd* x, cxd* y, int m, int n) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) matvec_row(a, x, y, i, n);
}

void matvec(const cxd* a, const cxd* x, cxd* y, int m, int n) {
    if (use_openmp(static_cast<std::size_t>(m) * n))
        matvec_omp(a, x, y, m, n);
    else
        matvec_serial(a, x, y, m, n);
}

void matmul_serial(const cxd* a, const cxd* b, cxd* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) matmul_row(a, b, c, i, k, n);
}

void matmul_omp(const cxd* a, const cxd* b, cxd* c, int m, int k, int n) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) matmul_row(a, b, c, i, k, n);
}

void matmul(const cxd* a, const cxd* b, cxd* c, int m, int k, int n) {
    if (use_openmp(static_cast<std::size_t>(m) * k + static_cast<std::size_t>(k) * n))
        matmul_omp(a, b, c, m, k, n);
    else
        matmul_serial(a, b, c, m, k, n);
}

}  // namespace rydcorr::kernels
