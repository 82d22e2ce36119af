#pragma once

// Independent test oracles. Everything here deliberately avoids the library's
// superoperator / matrix-exponential path: plain RK4 on handwritten equations
// of motion, analytic closed forms, and a naive tensor-product Liouvillian.

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "rydcorr/liouville.hpp"
#include "rydcorr/model.hpp"
#include "rydcorr/operators.hpp"

namespace oracles {

using rydcorr::cxd;
using rydcorr::Operator;

// Two-level optical Bloch equations in the project convention
// H = -omega (|e><g| + |g><e|), population decay gamma. State is
// (rho_gg, rho_ge, rho_eg, rho_ee).
struct TwoLevel {
    double omega = 0.2;
    double gamma = 1.0;

    std::array<cxd, 4> deriv(const std::array<cxd, 4>& r) const {
        const cxd i(0, 1);
        const auto& [gg, ge, eg, ee] = r;
        return {
            i * omega * (eg - ge) + gamma * ee,
            i * omega * (ee - gg) - 0.5 * gamma * ge,
            -i * omega * (ee - gg) - 0.5 * gamma * eg,
            i * omega * (ge - eg) - gamma * ee,
        };
    }

    std::array<cxd, 4> integrate(std::array<cxd, 4> r, double t_end, double dt = 2e-4) const {
        double t = 0;
        while (t < t_end) {
            const double h = std::min(dt, t_end - t);
            const auto k1 = deriv(r);
            std::array<cxd, 4> tmp;
            for (int i = 0; i < 4; ++i) tmp[i] = r[i] + 0.5 * h * k1[i];
            const auto k2 = deriv(tmp);
            for (int i = 0; i < 4; ++i) tmp[i] = r[i] + 0.5 * h * k2[i];
            const auto k3 = deriv(tmp);
            for (int i = 0; i < 4; ++i) tmp[i] = r[i] + h * k3[i];
            const auto k4 = deriv(tmp);
            for (int i = 0; i < 4; ++i)
                r[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            t += h;
        }
        return r;
    }

    double ss_ee() const {
        return 4 * omega * omega / (gamma * gamma + 8 * omega * omega);
    }
    cxd ss_ge() const {
        // from 0 = i omega (ee - gg) - gamma/2 ge
        return cxd(0, 2 * omega / gamma) * (ss_ee() - (1 - ss_ee()));
    }

    // conditional g2: after a click the atom is projected to |g><g|
    double g2(double tau, double dt = 2e-4) const {
        const auto r = integrate({cxd(1), cxd(0), cxd(0), cxd(0)}, tau, dt);
        return r[3].real() / ss_ee();
    }
};

// Liouvillian assembled the straightforward way from tensor products, as an
// independent route to the library's index-based assembly.
inline Operator naive_liouvillian(const Operator& h, const std::vector<Operator>& collapse) {
    const int d = h.dim();
    const Operator id = Operator::identity(d);
    const cxd i(0, 1);
    Operator l = i * (rydcorr::kron(h.transpose(), id) - rydcorr::kron(id, h));
    for (const Operator& c : collapse) {
        const Operator cdc = c.adjoint() * c;
        l += rydcorr::kron(c.conjugate(), c);
        l -= 0.5 * rydcorr::kron(id, cdc);
        l -= 0.5 * rydcorr::kron(cdc.transpose(), id);
    }
    return l;
}

inline double max_abs_diff(const Operator& a, const Operator& b) {
    double m = 0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

inline Operator random_hermitian(int d, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Operator h(d);
    for (int i = 0; i < d; ++i) {
        h(i, i) = u(rng);
        for (int j = i + 1; j < d; ++j) {
            h(i, j) = cxd(u(rng), u(rng));
            h(j, i) = std::conj(h(i, j));
        }
    }
    return h;
}

inline Operator random_density(int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Operator a(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = cxd(u(rng), u(rng));
    Operator rho = a * a.adjoint();
    rho *= 1.0 / rho.trace();
    return rho;
}

inline rydcorr::SystemSpec random_spec(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    rydcorr::SystemSpec s;
    const double pick = u(rng);
    s.n_atoms = pick < 0.4 ? 1 : (pick < 0.8 ? 2 : 3);
    s.positions.clear();
    for (int i = 0; i < s.n_atoms; ++i)
        s.positions.push_back(
            rydcorr::Vec3{3.0 * i + u(rng), 2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0});
    s.omega_p = 0.05 + 1.45 * u(rng);
    s.omega_c = u(rng) < 0.3 ? 0.0 : 0.2 + 1.8 * u(rng);
    s.gamma_e = 1.0;
    s.k_ratio = u(rng) < 0.5 ? 1.0 : 0.5 + u(rng);
    s.phase_mode = u(rng) < 0.5 ? rydcorr::PhaseMode::Gauged : rydcorr::PhaseMode::Physical;
    if (u(rng) < 0.7) {
        s.interaction = rydcorr::ExplicitV::uniform(s.n_atoms, -3.0 + 6.0 * u(rng));
    } else {
        s.interaction = rydcorr::VanDerWaals{0.5 + 10.0 * u(rng)};
    }
    return s;
}

}  // namespace oracles
