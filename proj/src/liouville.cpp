#include "rydcorr/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "rydcorr/matexp.hpp"

namespace rydcorr {

namespace {

using EigenMat = Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic>;

EigenMat to_eigen(const Operator& a) {
    const int d = a.dim();
    EigenMat m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = a(i, j);
    return m;
}

}  // namespace

double DensityMatrix::min_eigenvalue() const {
    const int d = mat.dim();
    EigenMat m = to_eigen(mat);
    EigenMat h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<EigenMat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

DensityMatrix ground_state(int dim) {
    DensityMatrix rho{Operator(dim), true};
    rho.mat(0, 0) = 1.0;
    return rho;
}

SuperOperator build_liouvillian(const Operator& h, const std::vector<Operator>& collapse) {
    const int d = h.dim();
    for (const Operator& c : collapse)
        if (c.dim() != d) throw std::invalid_argument("build_liouvillian: dimension mismatch");
    if (!h.is_hermitian(1e-10 * std::max(1.0, h.max_abs())))
        throw std::invalid_argument("build_liouvillian: Hamiltonian is not Hermitian");

    SuperOperator l{d, Operator(d * d)};
    Operator& m = l.mat;
    const cxd iu(0.0, 1.0);

    // i (sigma H - H sigma): row (jp*d+ip), column (j*d+i) in column-major vec
    for (int jp = 0; jp < d; ++jp)
        for (int j = 0; j < d; ++j) {
            const cxd hjj = h(j, jp);
            if (hjj == cxd{}) continue;
            for (int i = 0; i < d; ++i)
                m(jp * d + i, j * d + i) += iu * hjj;   // sigma H term, i == ip
        }
    for (int ip = 0; ip < d; ++ip)
        for (int i = 0; i < d; ++i) {
            const cxd hii = h(ip, i);
            if (hii == cxd{}) continue;
            for (int j = 0; j < d; ++j)
                m(j * d + ip, j * d + i) -= iu * hii;   // H sigma term, j == jp
        }

    for (const Operator& c : collapse) {
        // sparse scan: collapse operators are embedded single-level jumps
        std::vector<std::tuple<int, int, cxd>> nz;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (c(i, j) != cxd{}) nz.emplace_back(i, j, c(i, j));

        // C sigma C^dag
        for (const auto& [r1, c1, v1] : nz)
            for (const auto& [r2, c2, v2] : nz)
                m(r2 * d + r1, c2 * d + c1) += v1 * std::conj(v2);

        // -1/2 {C^dag C, sigma}
        Operator cdc(d);
        for (const auto& [r1, c1, v1] : nz)
            for (const auto& [r2, c2, v2] : nz)
                if (r1 == r2) cdc(c1, c2) += std::conj(v1) * v2;
        for (int ip = 0; ip < d; ++ip)
            for (int i = 0; i < d; ++i) {
                const cxd g = cdc(ip, i);
                if (g == cxd{}) continue;
                for (int j = 0; j < d; ++j) m(j * d + ip, j * d + i) -= 0.5 * g;
            }
        for (int jp = 0; jp < d; ++jp)
            for (int j = 0; j < d; ++j) {
                const cxd g = cdc(j, jp);
                if (g == cxd{}) continue;
                for (int i = 0; i < d; ++i) m(jp * d + i, j * d + i) -= 0.5 * g;
            }
    }
    return l;
}

namespace {

DensityMatrix finalize_steady_state(std::vector<cxd> v, const SuperOperator& l,
                                    const SteadyStateOptions& opt) {
    const int d = l.hdim;
    Operator rho = unvec(v, d);
    const cxd tr = rho.trace();
    if (std::abs(tr) < 1e-12 * rho.frobenius_norm() * std::sqrt(static_cast<double>(d)))
        throw std::runtime_error("steady_state: null vector is traceless");
    rho *= 1.0 / tr;
    // null vectors carry an arbitrary global phase; dividing by the trace
    // removes it, Hermitization then cleans round-off
    Operator herm(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            herm(i, j) = 0.5 * (rho(i, j) + std::conj(rho(j, i)));

    DensityMatrix out{std::move(herm), true};
    const double mineig = out.min_eigenvalue();
    if (mineig < -opt.negativity_tol)
        throw std::runtime_error("steady_state: negativity beyond tolerance (min eig " +
                                 std::to_string(mineig) + ")");
    const std::vector<cxd> res = l.mat.apply(vec(out.mat));
    double rmax = 0.0;
    for (const cxd& x : res) rmax = std::max(rmax, std::abs(x));
    if (rmax > opt.residual_tol)
        throw std::runtime_error("steady_state: residual " + std::to_string(rmax) +
                                 " above tolerance");
    return out;
}

}  // namespace

DensityMatrix steady_state(const SuperOperator& l, const SteadyStateOptions& opt) {
    auto basis = null_space(l.mat, opt.null_tol);
    if (basis.empty()) throw std::runtime_error("steady_state: empty null space");
    if (basis.size() > 1) throw NonUniqueSteadyState(static_cast<int>(basis.size()));
    return finalize_steady_state(std::move(basis[0]), l, opt);
}

DensityMatrix steady_state_from(const SuperOperator& l, const DensityMatrix& reference,
                                const SteadyStateOptions& opt) {
    NullPair np = null_spaces(l.mat, opt.null_tol);
    const int k = static_cast<int>(np.right.size());
    if (k == 0) throw std::runtime_error("steady_state_from: empty null space");
    const int d2 = l.hdim * l.hdim;
    if (k == 1) return finalize_steady_state(std::move(np.right[0]), l, opt);

    // spectral projection onto the null space along range(L):
    // rho* = V (W^dag V)^-1 W^dag vec(reference)
    EigenMat v(d2, k), w(d2, k);
    for (int c = 0; c < k; ++c)
        for (int i = 0; i < d2; ++i) {
            v(i, c) = np.right[c][i];
            w(i, c) = np.left[c][i];
        }
    Eigen::VectorXcd ref(d2);
    const std::vector<cxd> rv = vec(reference.mat);
    for (int i = 0; i < d2; ++i) ref(i) = rv[i];
    EigenMat g = w.adjoint() * v;
    Eigen::FullPivLU<EigenMat> lu(g);
    if (!lu.isInvertible())
        throw std::runtime_error("steady_state_from: defective null structure");
    Eigen::VectorXcd c = lu.solve(w.adjoint() * ref);
    Eigen::VectorXcd sel = v * c;
    std::vector<cxd> out(d2);
    for (int i = 0; i < d2; ++i) out[i] = sel(i);
    return finalize_steady_state(std::move(out), l, opt);
}

namespace {

// Dormand-Prince 5(4) on v' = M v with PI-free basic step control.
void dopri5(const Operator& m, std::vector<cxd>& v, double tau, double rel_tol, double abs_tol) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    (void)c2; (void)c3; (void)c4; (void)c5;

    const std::size_t n = v.size();
    const double nrm = m.one_norm();
    double t = 0.0;
    double h = std::min(tau, 0.1 / std::max(1.0, nrm));
    std::vector<cxd> k1, k2, k3, k4, k5, k6, k7, y(n);

    k1 = m.apply(v);
    while (t < tau) {
        const double remaining = tau - t;
        if (remaining <= 1e-14 * std::max(1.0, tau)) break;
        h = std::min(h, remaining);
        if (h < 1e-14 * std::max(1.0, tau)) throw StepSizeFailure(t);

        for (std::size_t i = 0; i < n; ++i) y[i] = v[i] + h * (a21 * k1[i]);
        k2 = m.apply(y);
        for (std::size_t i = 0; i < n; ++i) y[i] = v[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = m.apply(y);
        for (std::size_t i = 0; i < n; ++i)
            y[i] = v[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = m.apply(y);
        for (std::size_t i = 0; i < n; ++i)
            y[i] = v[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = m.apply(y);
        for (std::size_t i = 0; i < n; ++i)
            y[i] = v[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = m.apply(y);
        for (std::size_t i = 0; i < n; ++i)
            y[i] = v[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = m.apply(y);

        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const cxd e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                               e7 * k7[i]);
            err = std::max(err, std::abs(e));
            scale = std::max(scale, std::abs(y[i]));
        }
        const double tol = abs_tol + rel_tol * std::max(scale, 1e-300);
        if (err <= tol) {
            t += h;
            v.swap(y);
            k1.swap(k7);  // FSAL
        }
        const double factor = (err > 0) ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
    }
}

}  // namespace

DensityMatrix propagate(const DensityMatrix& sigma0, const SuperOperator& l, double tau) {
    if (tau < 0) throw std::invalid_argument("propagate: tau must be nonnegative");
    if (sigma0.dim() != l.hdim) throw std::invalid_argument("propagate: dimension mismatch");
    if (tau == 0.0) return sigma0;
    std::vector<cxd> v = vec(sigma0.mat);
    if (l.hdim <= 32) {
        const Operator e = expm(l.mat * cxd(tau));
        v = e.apply(v);
    } else {
        dopri5(l.mat, v, tau, 1e-11, 1e-13);
    }
    return DensityMatrix{unvec(v, l.hdim), sigma0.normalized};
}

DensityMatrix propagate_rk(const DensityMatrix& sigma0, const SuperOperator& l, double tau,
                           double rel_tol, double abs_tol) {
    if (tau < 0) throw std::invalid_argument("propagate_rk: tau must be nonnegative");
    if (sigma0.dim() != l.hdim) throw std::invalid_argument("propagate_rk: dimension mismatch");
    std::vector<cxd> v = vec(sigma0.mat);
    if (tau > 0) dopri5(l.mat, v, tau, rel_tol, abs_tol);
    return DensityMatrix{unvec(v, l.hdim), sigma0.normalized};
}

Propagator::Propagator(const SuperOperator& l, double dt) : hdim_(l.hdim), dt_(dt) {
    if (dt < 0) throw std::invalid_argument("Propagator: dt must be nonnegative");
    use_expm_ = l.hdim <= 32;
    if (use_expm_)
        step_ = expm(l.mat * cxd(dt));
    else
        generator_ = l.mat;
}

void Propagator::advance(std::vector<cxd>& state) const {
    if (static_cast<int>(state.size()) != hdim_ * hdim_)
        throw std::invalid_argument("Propagator::advance: state size mismatch");
    if (dt_ == 0.0) return;
    if (use_expm_)
        state = step_.apply(state);
    else
        dopri5(generator_, state, dt_, 1e-11, 1e-13);
}

}  // namespace rydcorr
