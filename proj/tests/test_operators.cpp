#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rydcorr/liouville.hpp"
#include "rydcorr/operators.hpp"

using namespace rydcorr;
using oracles::max_abs_diff;

namespace {

Operator random_op(int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Operator a(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = cxd(u(rng), u(rng));
    return a;
}

}  // namespace

TEST_CASE("kron: identity, dimensions, diagonal index formula") {
    CHECK(max_abs_diff(kron(Operator::identity(2), Operator::identity(3)),
                       Operator::identity(6)) == 0.0);

    Operator a(2), b(3);
    CHECK(kron(a, b).dim() == 6);

    Operator d12(2), d34(2);
    d12(0, 0) = 1; d12(1, 1) = 2;
    d34(0, 0) = 3; d34(1, 1) = 4;
    const Operator k = kron(d12, d34);
    // entry ((i*2+p),(j*2+q)) = d12(i,j) * d34(p,q): diagonal 1*3,1*4,2*3,2*4
    const double expect[4] = {3, 4, 6, 8};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(std::abs(k(i, j) - (i == j ? cxd(expect[i]) : cxd(0))) == 0.0);
}

TEST_CASE("kron is associative: exactly on structured operators, to 1 ulp on dense ones") {
    // the operators the library actually composes (level projectors and
    // phase-scaled jumps) have at most one nonzero per row, where the
    // reassociated products are computed identically
    const Operator sge = level_op(LvlG, LvlE), srr = level_op(LvlR, LvlR);
    const Operator phased = cxd(0.6, 0.8) * level_op(LvlE, LvlG);
    const Operator lhs_s = kron(kron(sge, srr), phased);
    const Operator rhs_s = kron(sge, kron(srr, phased));
    for (int i = 0; i < lhs_s.dim(); ++i)
        for (int j = 0; j < lhs_s.dim(); ++j) {
            CHECK(lhs_s(i, j).real() == rhs_s(i, j).real());
            CHECK(lhs_s(i, j).imag() == rhs_s(i, j).imag());
        }

    std::mt19937_64 rng(7);
    const Operator a = random_op(2, rng), b = random_op(3, rng), c = random_op(2, rng);
    const Operator lhs = kron(kron(a, b), c);
    const Operator rhs = kron(a, kron(b, c));
    CHECK(oracles::max_abs_diff(lhs, rhs) < 4e-16);  // reassociation round-off only
}

TEST_CASE("embed: single atom, projector action, basis ordering") {
    const Operator sge = level_op(LvlG, LvlE);
    CHECK(max_abs_diff(embed(sge, 0, 1), sge) == 0.0);

    // |g r> has index 0*3 + 2 = 2 with atom 0 the slowest index
    const Operator srr1 = embed(level_op(LvlR, LvlR), 1, 2);
    for (int i = 0; i < 9; ++i)
        CHECK(srr1(i, 2) == (i == 2 ? cxd(1) : cxd(0)));

    CHECK_THROWS_AS(embed(Operator(2), 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(embed(sge, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(embed(sge, -1, 2), std::invalid_argument);
}

TEST_CASE("embed is a per-site homomorphism and distinct sites commute exactly") {
    std::mt19937_64 rng(21);
    const Operator a = random_op(3, rng), b = random_op(3, rng);
    CHECK(max_abs_diff(embed(a * b, 1, 3), embed(a, 1, 3) * embed(b, 1, 3)) < 1e-14);

    const Operator ea = embed(a, 0, 2), eb = embed(b, 1, 2);
    const Operator comm = ea * eb - eb * ea;
    for (int i = 0; i < comm.dim(); ++i)
        for (int j = 0; j < comm.dim(); ++j) {
            CHECK(comm(i, j).real() == 0.0);
            CHECK(comm(i, j).imag() == 0.0);
        }
}

TEST_CASE("vec/unvec round-trip and column-major layout") {
    std::mt19937_64 rng(3);
    const Operator a = random_op(3, rng);
    const auto v = vec(a);
    CHECK(v[1 * 3 + 2] == a(2, 1));  // vec[j*d+i] = a(i,j)
    CHECK(max_abs_diff(unvec(v, 3), a) == 0.0);
}

TEST_CASE("null_space: trivial cases") {
    Operator d(2);
    d(1, 1) = 1.0;  // diag(0, 1)
    const auto basis = null_space(d, 1e-10);
    REQUIRE(basis.size() == 1);
    CHECK(std::abs(std::abs(basis[0][0]) - 1.0) < 1e-12);
    CHECK(std::abs(basis[0][1]) < 1e-12);

    std::mt19937_64 rng(17);
    Operator full = random_op(4, rng);
    for (int i = 0; i < 4; ++i) full(i, i) += 5.0;  // comfortably full rank
    CHECK(null_space(full, 1e-10).empty());
}

TEST_CASE("null_space residual bound on rank-deficient random matrices") {
    std::mt19937_64 rng(29);
    // build rank-3 5x5: A = B * P with P killing two directions
    Operator b = random_op(5, rng);
    Operator p(5);
    p(0, 0) = p(1, 1) = p(2, 2) = 1.0;
    const Operator a = b * p;
    const double tol = 1e-10;
    const auto basis = null_space(a, tol);
    REQUIRE(basis.size() == 2);
    // ||A v||_2 <= 10 tol ||A||_2; use the Frobenius norm as an upper bound
    const double norm2_upper = a.frobenius_norm();
    for (const auto& v : basis) {
        auto av = a.apply(v);
        double r = 0;
        for (const cxd& x : av) r += std::norm(x);
        CHECK(std::sqrt(r) <= 10 * tol * norm2_upper);
    }
}

TEST_CASE("null_space of the resonant two-level Liouvillian matches the Bloch steady state") {
    // dim-2 two-level system in the project convention
    const oracles::TwoLevel tl{0.2, 1.0};
    Operator h(2);
    h(0, 1) = h(1, 0) = -tl.omega;
    Operator c(2);
    c(0, 1) = std::sqrt(tl.gamma);
    const SuperOperator l = build_liouvillian(h, {c});
    const auto basis = null_space(l.mat, 1e-10);
    REQUIRE(basis.size() == 1);
    Operator rho = unvec(basis[0], 2);
    rho *= 1.0 / rho.trace();
    CHECK(std::abs(rho(1, 1).real() - tl.ss_ee()) < 1e-12);
    CHECK(std::abs(rho(0, 1) - tl.ss_ge()) < 1e-12);
}

TEST_CASE("superoperator maps Hermitian to Hermitian and kills the trace functional") {
    std::mt19937_64 rng(31);
    const SystemSpec spec = [&] {
        SystemSpec s;
        s.n_atoms = 2;
        s.positions = {Vec3{0, 0, 0}, Vec3{1, 0, 0}};
        s.omega_p = 0.3;
        s.omega_c = 0.8;
        s.interaction = ExplicitV::uniform(2, 1.5);
        return s;
    }();
    const SuperOperator l = build_liouvillian(build_hamiltonian(spec), build_collapse_ops(spec));

    const Operator sigma = oracles::random_hermitian(l.hdim, rng);
    const Operator out = unvec(l.mat.apply(vec(sigma)), l.hdim);
    CHECK(out.is_hermitian(1e-12));
    CHECK(std::abs(out.trace()) < 1e-12);

    // trace functional in the left null space: column sums over diagonal rows
    const int d = l.hdim;
    double worst = 0;
    for (int col = 0; col < d * d; ++col) {
        cxd s{};
        for (int k = 0; k < d; ++k) s += l.mat(k * d + k, col);
        worst = std::max(worst, std::abs(s));
    }
    CHECK(worst < 1e-12);
}
