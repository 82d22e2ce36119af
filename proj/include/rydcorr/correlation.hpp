#pragma once

#include <optional>
#include <vector>

#include "rydcorr/liouville.hpp"
#include "rydcorr/model.hpp"

namespace rydcorr {

enum class DetectionMode { Coherent, IncoherentTotal, IncoherentAtom };

// Detector direction is a unit vector off the probe (z) axis; positions enter
// the coherent phases as e^{-i 2 pi r_hat . r_i} with positions in lambda_p
// units. Incoherent modes ignore the direction but it is validated anyway.
struct DetectorSpec {
    Vec3 direction{1, 0, 0};
    DetectionMode mode = DetectionMode::IncoherentTotal;
    int atom = -1;  // selected atom for IncoherentAtom

    void validate(int n_atoms) const;
};

// Coherent mode: one combined lowering operator Pi^- with unit-modulus
// per-atom coefficients. Incoherent modes: the per-atom operator list.
struct DetectionOperator {
    DetectionMode mode = DetectionMode::IncoherentTotal;
    std::vector<Operator> parts;
};

struct CorrelationFlags {
    bool denominator_below_threshold = false;
    bool regularized = false;
};

struct CorrelationResult {
    std::vector<double> tau_grid;   // units 1/gamma_e
    std::vector<double> g2;         // NaN where undefined
    std::vector<double> numerator;
    std::vector<double> denominator;
    std::vector<double> std_err;    // filled by the trajectory estimator only
    CorrelationFlags flags;
};

struct G2Options {
    double rate_epsilon = 1e-12;  // no division below this first-detection rate
    SteadyStateOptions steady;
};

// Default uniform grid: 400 points spanning [0, 20/gamma_e].
std::vector<double> uniform_tau_grid(double tau_max = 20.0, int points = 400);

DetectionOperator detection_operator(const SystemSpec& spec, const DetectorSpec& det);

// Quantum jump for one detection: Pi^- sigma Pi^+ (coherent) or the operator
// sum over the selected atoms. Result is unnormalized; its trace is the
// first-detection rate functional.
DensityMatrix conditional_jump(const DensityMatrix& sigma, const DetectionOperator& d);

// Normalized second-order correlation of detections A then B, evaluated by
// the quantum regression theorem on the driven steady state. When the
// first-detection rate is below rate_epsilon the result is flagged and g2 is
// undefined (NaN); if spec.gamma_reg > 0 the curve is recomputed with the
// |r> dephasing regularizer and flagged regularized. gamma_reg takes part in
// the physics only through that fallback.
CorrelationResult g2(const SystemSpec& spec, const DetectorSpec& det_a,
                     const DetectorSpec& det_b, const std::vector<double>& tau_grid,
                     const G2Options& opt = {});

// Distinguishable-atom self/cross correlation: jump on atom_i, observe
// atom_j; atom_i == atom_j gives the self-correlation.
CorrelationResult g2_cross(const SystemSpec& spec, int atom_i, int atom_j,
                           const std::vector<double>& tau_grid, const G2Options& opt = {});

enum class ScanAxis { ParallelToProbe, AlongDetectorAxis };

// Two-atom separation scan: atoms at +-R/2 along z (ParallelToProbe) or x
// (AlongDetectorAxis); requires coherent detectors and physical phase mode.
std::vector<CorrelationResult> separation_scan(const SystemSpec& spec_template, ScanAxis axis,
                                               const std::vector<double>& r_values,
                                               const DetectorSpec& det_a,
                                               const DetectorSpec& det_b,
                                               const std::vector<double>& tau_grid,
                                               const G2Options& opt = {});

}  // namespace rydcorr
