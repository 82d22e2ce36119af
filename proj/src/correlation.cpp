#include "rydcorr/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "rydcorr/matexp.hpp"

namespace rydcorr {

std::vector<double> uniform_tau_grid(double tau_max, int points) {
    if (points < 2 || tau_max <= 0)
        throw std::invalid_argument("uniform_tau_grid: need points >= 2 and tau_max > 0");
    std::vector<double> g(points);
    for (int k = 0; k < points; ++k) g[k] = tau_max * k / (points - 1);
    return g;
}

void DetectorSpec::validate(int n_atoms) const {
    const double norm2 = direction.x * direction.x + direction.y * direction.y +
                         direction.z * direction.z;
    if (std::abs(norm2 - 1.0) > 2e-12)
        throw std::invalid_argument("DetectorSpec: direction must be a unit vector");
    if (std::abs(direction.z) > 1.0 - 1e-9)
        throw std::invalid_argument("DetectorSpec: detector must be off the probe axis");
    if (mode == DetectionMode::IncoherentAtom && (atom < 0 || atom >= n_atoms))
        throw std::invalid_argument("DetectorSpec: atom index out of range");
}

DetectionOperator detection_operator(const SystemSpec& spec, const DetectorSpec& det) {
    spec.validate();
    det.validate(spec.n_atoms);
    const int n = spec.n_atoms;
    DetectionOperator out;
    out.mode = det.mode;
    switch (det.mode) {
        case DetectionMode::Coherent: {
            Operator pi_minus(spec.dim());
            const double two_pi = 2.0 * std::numbers::pi;
            for (int i = 0; i < n; ++i) {
                const Vec3 r = spec.positions[i];
                const double phase =
                    -two_pi * (det.direction.x * r.x + det.direction.y * r.y +
                               det.direction.z * r.z);
                pi_minus += std::polar(1.0, phase) * embed(level_op(LvlG, LvlE), i, n);
            }
            out.parts.push_back(std::move(pi_minus));
            break;
        }
        case DetectionMode::IncoherentTotal:
            for (int i = 0; i < n; ++i)
                out.parts.push_back(embed(level_op(LvlG, LvlE), i, n));
            break;
        case DetectionMode::IncoherentAtom:
            out.parts.push_back(embed(level_op(LvlG, LvlE), det.atom, n));
            break;
    }
    return out;
}

DensityMatrix conditional_jump(const DensityMatrix& sigma, const DetectionOperator& d) {
    if (d.parts.empty()) throw std::invalid_argument("conditional_jump: empty detection operator");
    const int dim = sigma.dim();
    Operator out(dim);
    for (const Operator& p : d.parts) {
        if (p.dim() != dim) throw std::invalid_argument("conditional_jump: dimension mismatch");
        out += p * sigma.mat * p.adjoint();
    }
    return DensityMatrix{std::move(out), false};
}

namespace {

// sum_parts p^dag p: the second-detection observable (photon flux up to the
// absorbed geometric prefactor, which cancels in g2)
Operator flux_observable(const DetectionOperator& d) {
    Operator out(d.parts.front().dim());
    for (const Operator& p : d.parts) out += p.adjoint() * p;
    return out;
}

double detection_rate(const DensityMatrix& rho, const DetectionOperator& d) {
    return (flux_observable(d) * rho.mat).trace().real();
}

CorrelationResult g2_engine(const SystemSpec& spec, const DetectionOperator& jump_op,
                            const DetectionOperator& observe_op,
                            const std::vector<double>& tau_grid, const G2Options& opt) {
    for (std::size_t k = 0; k < tau_grid.size(); ++k) {
        if (tau_grid[k] < 0)
            throw std::invalid_argument("g2: tau grid must be nonnegative");
        if (k > 0 && tau_grid[k] < tau_grid[k - 1])
            throw std::invalid_argument("g2: tau grid must be sorted");
    }

    const Operator h = build_hamiltonian(spec);
    const SuperOperator l = build_liouvillian(h, build_collapse_ops(spec));
    const DensityMatrix rho_ss = steady_state_from(l, ground_state(l.hdim), opt.steady);

    CorrelationResult res;
    res.tau_grid = tau_grid;
    const std::size_t npts = tau_grid.size();
    res.g2.assign(npts, std::numeric_limits<double>::quiet_NaN());
    res.numerator.assign(npts, 0.0);
    res.denominator.assign(npts, 0.0);

    const double rate_a = detection_rate(rho_ss, jump_op);
    const double rate_b = detection_rate(rho_ss, observe_op);
    const double den = rate_a * rate_b;
    const Operator ob = flux_observable(observe_op);

    DensityMatrix cond = conditional_jump(rho_ss, jump_op);
    std::vector<cxd> state = vec(cond.mat);

    // one cached exponential per distinct grid spacing (one for uniform grids)
    std::map<long long, Propagator> steps;
    auto advance = [&](double dt) {
        if (dt <= 0) return;
        const long long key = std::llround(dt * 1e12);
        auto it = steps.find(key);
        if (it == steps.end()) it = steps.emplace(key, Propagator(l, dt)).first;
        it->second.advance(state);
    };

    double num_scale = 0.0, imag_max = 0.0;
    for (std::size_t k = 0; k < npts; ++k) {
        advance(k == 0 ? tau_grid[0] : tau_grid[k] - tau_grid[k - 1]);
        const cxd num = (ob * unvec(state, l.hdim)).trace();
        res.numerator[k] = num.real();
        res.denominator[k] = den;
        num_scale = std::max(num_scale, std::abs(num.real()));
        imag_max = std::max(imag_max, std::abs(num.imag()));
    }
    if (imag_max > 1e-10 * std::max(num_scale, 1e-100))
        throw std::runtime_error("g2: correlation numerator has a non-real residue");

    if (rate_a < opt.rate_epsilon || den < opt.rate_epsilon) {
        res.flags.denominator_below_threshold = true;
        return res;  // g2 stays undefined
    }
    for (std::size_t k = 0; k < npts; ++k) res.g2[k] = res.numerator[k] / den;
    return res;
}

}  // namespace

CorrelationResult g2(const SystemSpec& spec, const DetectorSpec& det_a,
                     const DetectorSpec& det_b, const std::vector<double>& tau_grid,
                     const G2Options& opt) {
    spec.validate();
    det_a.validate(spec.n_atoms);
    det_b.validate(spec.n_atoms);

    // first pass without the regularizer: gamma_reg participates only as a
    // fallback for dark steady states
    SystemSpec bare = spec;
    bare.gamma_reg = 0;
    CorrelationResult res = g2_engine(bare, detection_operator(bare, det_a),
                                      detection_operator(bare, det_b), tau_grid, opt);
    if (res.flags.denominator_below_threshold && spec.gamma_reg > 0) {
        CorrelationResult reg = g2_engine(spec, detection_operator(spec, det_a),
                                          detection_operator(spec, det_b), tau_grid, opt);
        reg.flags.denominator_below_threshold = true;
        reg.flags.regularized = true;
        return reg;
    }
    return res;
}

CorrelationResult g2_cross(const SystemSpec& spec, int atom_i, int atom_j,
                           const std::vector<double>& tau_grid, const G2Options& opt) {
    spec.validate();
    if (atom_i < 0 || atom_i >= spec.n_atoms || atom_j < 0 || atom_j >= spec.n_atoms)
        throw std::invalid_argument("g2_cross: atom index out of range");
    DetectorSpec a{Vec3{1, 0, 0}, DetectionMode::IncoherentAtom, atom_i};
    DetectorSpec b{Vec3{1, 0, 0}, DetectionMode::IncoherentAtom, atom_j};
    return g2(spec, a, b, tau_grid, opt);
}

std::vector<CorrelationResult> separation_scan(const SystemSpec& spec_template, ScanAxis axis,
                                               const std::vector<double>& r_values,
                                               const DetectorSpec& det_a,
                                               const DetectorSpec& det_b,
                                               const std::vector<double>& tau_grid,
                                               const G2Options& opt) {
    if (spec_template.n_atoms != 2)
        throw std::invalid_argument("separation_scan: template must describe two atoms");
    if (spec_template.phase_mode != PhaseMode::Physical)
        throw std::invalid_argument("separation_scan: physical phase mode required");
    if (det_a.mode != DetectionMode::Coherent || det_b.mode != DetectionMode::Coherent)
        throw std::invalid_argument("separation_scan: coherent detection required");

    std::vector<CorrelationResult> out(r_values.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < static_cast<int>(r_values.size()); ++k) {
        try {
            const double r = r_values[k];
            SystemSpec spec = spec_template;
            if (axis == ScanAxis::ParallelToProbe) {
                spec.positions = {Vec3{0, 0, +r / 2}, Vec3{0, 0, -r / 2}};
            } else {
                spec.positions = {Vec3{+r / 2, 0, 0}, Vec3{-r / 2, 0, 0}};
            }
            out[k] = g2(spec, det_a, det_b, tau_grid, opt);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace rydcorr
