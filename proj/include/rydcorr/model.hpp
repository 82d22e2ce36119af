#pragma once

#include <variant>
#include <vector>

#include "rydcorr/operators.hpp"

namespace rydcorr {

struct Vec3 {
    double x = 0, y = 0, z = 0;
};

// Pairwise Rydberg level shifts given directly, in units of gamma_e. Stored
// as a full symmetric matrix with zero diagonal.
struct ExplicitV {
    int n_atoms = 1;
    std::vector<double> v;  // n x n row-major

    static ExplicitV zero(int n);
    static ExplicitV uniform(int n, double value);
    double at(int i, int j) const { return v[static_cast<std::size_t>(i) * n_atoms + j]; }
};

// V(R) = -c6 / R^6; the stored shift is its magnitude (see build_hamiltonian).
struct VanDerWaals {
    double c6 = 0;  // units gamma_e * lambda_p^6
};

using Interaction = std::variant<ExplicitV, VanDerWaals>;

enum class PhaseMode { Gauged, Physical };

// Full physical scenario. Frequencies and rates are in units of gamma_e,
// positions in units of the probe wavelength. The probe propagates along +z,
// the coupling along -z with |k_c| = k_ratio * |k_p|.
//
// Rabi convention: the drive enters the Hamiltonian as -omega * sigma_eg
// without the textbook factor 1/2, so a two-level steady state is
// rho_ee = 4 omega_p^2 / (gamma_e^2 + 8 omega_p^2).
struct SystemSpec {
    int n_atoms = 1;
    std::vector<Vec3> positions = {Vec3{}};
    double omega_p = 0;
    double omega_c = 0;
    double gamma_e = 1;
    Interaction interaction = ExplicitV::zero(1);
    double k_ratio = 1.0;
    PhaseMode phase_mode = PhaseMode::Gauged;
    // optional pure dephasing of |r>, used only to regularize dark steady
    // states in the correlation engine; not part of the physical presets
    double gamma_reg = 0;

    int dim() const;
    void validate() const;  // throws std::invalid_argument
};

// H/hbar = -sum_i [omega_p e^{i k_p.r_i} sigma_eg^i
//                  + omega_c e^{i k_c.r_i} sigma_re^i + h.c.]
//          + sum_{i<j} V_ij sigma_rr^i sigma_rr^j
// The doubly-Rydberg matrix element is +V_ij; in gauged mode all results are
// invariant under V -> -V, so the sign is immaterial there.
Operator build_hamiltonian(const SystemSpec& spec);

// N emission operators sqrt(gamma_e) sigma_ge^i, followed by N dephasing
// operators sqrt(gamma_reg) sigma_rr^i when gamma_reg > 0.
std::vector<Operator> build_collapse_ops(const SystemSpec& spec);

// R_b = (c6 / omega_c)^(1/6); requires both positive.
double blockade_radius(double c6, double omega_c);

// n x n symmetric pair-shift matrix (zero diagonal). VanDerWaals mode fills
// |c6| / R_ij^6 and rejects coincident positions.
std::vector<double> interaction_matrix(const SystemSpec& spec);

}  // namespace rydcorr
