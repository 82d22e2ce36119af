#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "rydcorr/kernels.hpp"

using rydcorr::kernels::cxd;
namespace k = rydcorr::kernels;

namespace {

std::vector<cxd> random_block(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cxd> out(n);
    for (cxd& v : out) v = cxd(u(rng), u(rng));
    return out;
}

}  // namespace

TEST_CASE("matvec: OpenMP variant is bit-identical to the serial reference") {
    for (int n : {1, 7, 81, 300, 729}) {
        const auto a = random_block(static_cast<std::size_t>(n) * n, 11 + n);
        const auto x = random_block(n, 13 + n);
        std::vector<cxd> ys(n), yp(n);
        k::matvec_serial(a.data(), x.data(), ys.data(), n, n);
        k::matvec_omp(a.data(), x.data(), yp.data(), n, n);
        for (int i = 0; i < n; ++i) {
            CHECK(ys[i].real() == yp[i].real());
            CHECK(ys[i].imag() == yp[i].imag());
        }
    }
}

TEST_CASE("matmul: OpenMP variant is bit-identical to the serial reference") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 6; ++trial) {
        const int m = 1 + static_cast<int>(rng() % 90);
        const int kk = 1 + static_cast<int>(rng() % 90);
        const int n = 1 + static_cast<int>(rng() % 90);
        const auto a = random_block(static_cast<std::size_t>(m) * kk, rng());
        const auto b = random_block(static_cast<std::size_t>(kk) * n, rng());
        std::vector<cxd> cs(static_cast<std::size_t>(m) * n), cp(cs.size());
        k::matmul_serial(a.data(), b.data(), cs.data(), m, kk, n);
        k::matmul_omp(a.data(), b.data(), cp.data(), m, kk, n);
        for (std::size_t i = 0; i < cs.size(); ++i) {
            CHECK(cs[i].real() == cp[i].real());
            CHECK(cs[i].imag() == cp[i].imag());
        }
    }
}

TEST_CASE("matmul matches a direct triple loop") {
    const int m = 9, kk = 11, n = 5;
    const auto a = random_block(m * kk, 101);
    const auto b = random_block(kk * n, 102);
    std::vector<cxd> c(m * n);
    k::matmul(a.data(), b.data(), c.data(), m, kk, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            cxd acc{};
            for (int p = 0; p < kk; ++p) acc += a[i * kk + p] * b[p * n + j];
            CHECK(std::abs(c[i * n + j] - acc) < 1e-13);
        }
}

TEST_CASE("exec mode dispatch is honored") {
    k::set_exec_mode(k::ExecMode::Serial);
    CHECK(k::exec_mode() == k::ExecMode::Serial);
    k::set_exec_mode(k::ExecMode::OpenMP);
    CHECK(k::exec_mode() == k::ExecMode::OpenMP);
    k::set_exec_mode(k::ExecMode::Auto);
    CHECK(k::exec_mode() == k::ExecMode::Auto);
}
