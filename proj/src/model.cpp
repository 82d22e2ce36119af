#include "rydcorr/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rydcorr {

ExplicitV ExplicitV::zero(int n) {
    return ExplicitV{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
}

ExplicitV ExplicitV::uniform(int n, double value) {
    ExplicitV out = zero(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) out.v[static_cast<std::size_t>(i) * n + j] = value;
    return out;
}

int SystemSpec::dim() const {
    int d = 1;
    for (int i = 0; i < n_atoms; ++i) d *= 3;
    return d;
}

void SystemSpec::validate() const {
    if (n_atoms < 1 || n_atoms > 4)
        throw std::invalid_argument("SystemSpec: n_atoms must be between 1 and 4");
    if (positions.size() != static_cast<std::size_t>(n_atoms))
        throw std::invalid_argument("SystemSpec: positions list must have n_atoms entries");
    if (omega_p < 0 || omega_c < 0)
        throw std::invalid_argument("SystemSpec: Rabi frequencies must be nonnegative");
    if (gamma_e <= 0) throw std::invalid_argument("SystemSpec: gamma_e must be positive");
    if (gamma_reg < 0) throw std::invalid_argument("SystemSpec: gamma_reg must be nonnegative");
    if (k_ratio <= 0) throw std::invalid_argument("SystemSpec: k_ratio must be positive");
    if (const auto* ev = std::get_if<ExplicitV>(&interaction)) {
        if (ev->n_atoms != n_atoms ||
            ev->v.size() != static_cast<std::size_t>(n_atoms) * n_atoms)
            throw std::invalid_argument("SystemSpec: explicit V matrix size mismatch");
        for (int i = 0; i < n_atoms; ++i) {
            if (ev->at(i, i) != 0.0)
                throw std::invalid_argument("SystemSpec: explicit V diagonal must be zero");
            for (int j = 0; j < n_atoms; ++j)
                if (ev->at(i, j) != ev->at(j, i))
                    throw std::invalid_argument("SystemSpec: explicit V must be symmetric");
        }
    }
}

std::vector<double> interaction_matrix(const SystemSpec& spec) {
    spec.validate();
    const int n = spec.n_atoms;
    if (const auto* ev = std::get_if<ExplicitV>(&spec.interaction)) return ev->v;

    const double c6 = std::get<VanDerWaals>(spec.interaction).c6;
    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const Vec3 a = spec.positions[i], b = spec.positions[j];
            const double r2 = (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                              (a.z - b.z) * (a.z - b.z);
            if (r2 == 0.0)
                throw std::invalid_argument(
                    "interaction_matrix: coincident atoms in Van der Waals mode");
            const double shift = std::abs(c6) / (r2 * r2 * r2);
            v[static_cast<std::size_t>(i) * n + j] = shift;
            v[static_cast<std::size_t>(j) * n + i] = shift;
        }
    return v;
}

Operator build_hamiltonian(const SystemSpec& spec) {
    spec.validate();
    const int n = spec.n_atoms;
    const std::vector<double> vmat = interaction_matrix(spec);

    Operator h(spec.dim());
    const double two_pi = 2.0 * std::numbers::pi;
    for (int i = 0; i < n; ++i) {
        cxd phase_p = 1.0, phase_c = 1.0;
        if (spec.phase_mode == PhaseMode::Physical) {
            const double z = spec.positions[i].z;
            phase_p = std::polar(1.0, two_pi * z);                    // k_p = +k z_hat
            phase_c = std::polar(1.0, -two_pi * spec.k_ratio * z);    // k_c = -k' z_hat
        }
        Operator drive = spec.omega_p * phase_p * embed(level_op(LvlE, LvlG), i, n) +
                         spec.omega_c * phase_c * embed(level_op(LvlR, LvlE), i, n);
        h -= drive + drive.adjoint();
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double vij = vmat[static_cast<std::size_t>(i) * n + j];
            if (vij == 0.0) continue;
            h += cxd(vij) * (embed(level_op(LvlR, LvlR), i, n) *
                             embed(level_op(LvlR, LvlR), j, n));
        }
    return h;
}

std::vector<Operator> build_collapse_ops(const SystemSpec& spec) {
    spec.validate();
    const int n = spec.n_atoms;
    std::vector<Operator> ops;
    ops.reserve(spec.gamma_reg > 0 ? 2 * n : n);
    for (int i = 0; i < n; ++i)
        ops.push_back(cxd(std::sqrt(spec.gamma_e)) * embed(level_op(LvlG, LvlE), i, n));
    if (spec.gamma_reg > 0)
        for (int i = 0; i < n; ++i)
            ops.push_back(cxd(std::sqrt(spec.gamma_reg)) * embed(level_op(LvlR, LvlR), i, n));
    return ops;
}

double blockade_radius(double c6, double omega_c) {
    if (c6 <= 0 || omega_c <= 0)
        throw std::invalid_argument("blockade_radius: c6 and omega_c must be positive");
    return std::pow(c6 / omega_c, 1.0 / 6.0);
}

}  // namespace rydcorr
