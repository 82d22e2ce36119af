#pragma once

#include <stdexcept>
#include <vector>

#include "rydcorr/operators.hpp"

namespace rydcorr {

// Ensemble state. Conditional (post-jump) states are carried unnormalized
// with normalized == false; their trace is the first-detection rate.
struct DensityMatrix {
    Operator mat;
    bool normalized = true;

    int dim() const { return mat.dim(); }
    double trace_real() const { return mat.trace().real(); }
    double min_eigenvalue() const;  // smallest eigenvalue of the Hermitian part
};

// All-population-in-|g...g> reference state (basis index 0).
DensityMatrix ground_state(int dim);

struct NonUniqueSteadyState final : std::runtime_error {
    int null_dim;
    explicit NonUniqueSteadyState(int nd)
        : std::runtime_error("steady state is not unique (null-space dimension " +
                             std::to_string(nd) + ")"),
          null_dim(nd) {}
};

struct StepSizeFailure final : std::runtime_error {
    double tau_reached;
    explicit StepSizeFailure(double t)
        : std::runtime_error("integrator step size underflow at tau = " + std::to_string(t)),
          tau_reached(t) {}
};

// Vectorized generator of sigma_dot = i[sigma, H] + sum_i (C_i sigma C_i^dag
// - 1/2 {C_i^dag C_i, sigma}), acting on column-vectorized density matrices.
SuperOperator build_liouvillian(const Operator& h, const std::vector<Operator>& collapse);

struct SteadyStateOptions {
    double null_tol = 1e-10;       // relative SVD cutoff
    double residual_tol = 1e-10;   // max |L rho_ss| entry
    double negativity_tol = 1e-10; // allowed eigenvalue undershoot
};

// Unique normalized steady state; throws NonUniqueSteadyState when the null
// space has dimension > 1 and std::runtime_error on residual/negativity
// violations.
DensityMatrix steady_state(const SuperOperator& l, const SteadyStateOptions& opt = {});

// Fixed point selected by the conserved functionals (left null vectors) from
// a reference state; equals steady_state() whenever the null space is
// one-dimensional. Used to condition on the state reached from |g...g> when
// decoupled sectors (omega_c = 0) make the null space degenerate.
DensityMatrix steady_state_from(const SuperOperator& l, const DensityMatrix& reference,
                                const SteadyStateOptions& opt = {});

// sigma(tau) = exp(L tau) sigma0. Dense exponential for hdim <= 32, adaptive
// embedded Runge-Kutta otherwise. Preserves trace and the normalized flag.
DensityMatrix propagate(const DensityMatrix& sigma0, const SuperOperator& l, double tau);

// Adaptive Dormand-Prince 5(4) route, kept as an independent validation path.
DensityMatrix propagate_rk(const DensityMatrix& sigma0, const SuperOperator& l, double tau,
                           double rel_tol = 1e-9, double abs_tol = 1e-12);

// Fixed-step propagator for uniform tau grids: the exponential of one grid
// step is computed once and each step is a single matrix-vector product.
// Immutable after construction; safe to share across scan workers.
class Propagator {
public:
    Propagator(const SuperOperator& l, double dt);
    double dt() const { return dt_; }
    void advance(std::vector<cxd>& state) const;

private:
    int hdim_ = 0;
    double dt_ = 0;
    Operator step_;        // expm(L dt) when hdim <= 32
    Operator generator_;   // kept for the RK path otherwise
    bool use_expm_ = true;
};

}  // namespace rydcorr
