#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rydcorr/correlation.hpp"
#include "rydcorr/model.hpp"

namespace rydcorr {

struct ClickEvent {
    double time = 0;  // units 1/gamma_e
    int atom = 0;
};

struct ClickRecord {
    std::vector<ClickEvent> events;  // strictly increasing times in [0, duration]
    double duration = 0;
    std::uint64_t seed = 0;  // derived per-trajectory seed
};

struct TrajectoryOptions {
    // Base step for the exponential stepper. The drift is constant between
    // jumps and the squared norm decreases monotonically, so correctness does
    // not depend on dt; it only sets how often the threshold is polled.
    double dt = 0.05;
    double jump_time_tol = 1e-10;
};

// Seed splitting rule: trajectory k uses splitmix64(master_seed + GOLDEN*(k+1))
// where GOLDEN = 0x9E3779B97F4A7C15. Results are therefore independent of the
// number of worker threads and bit-for-bit reproducible.
std::uint64_t derive_seed(std::uint64_t master_seed, int trajectory_index);

// First-order quantum-jump unraveling with non-Hermitian drift
// H - (i/2) sum_i C_i^dag C_i. Jumps are timed by bisection on the squared
// norm threshold to jump_time_tol; emission channels produce clicks tagged
// with the atom index, dephasing (gamma_reg) channels jump without a click.
std::vector<ClickRecord> run_trajectories(const SystemSpec& spec, double duration, int n_traj,
                                          std::uint64_t seed,
                                          const TrajectoryOptions& opt = {});

// Trajectory-averaged density matrix at time t with entrywise standard errors
// of the real and imaginary parts (unraveling-equivalence cross-check).
struct EnsembleState {
    Operator mean;
    Operator stderr_re;  // imaginary parts are zero; stored as real entries
    Operator stderr_im;
    int n_traj = 0;
};
EnsembleState average_state(const SystemSpec& spec, double t, int n_traj, std::uint64_t seed,
                            const TrajectoryOptions& opt = {});

// Coincidence-histogram estimate of g2 from ordered same-trajectory pairs
// (B-click at delay tau after an A-click), normalized by the singles rates
// with the finite-duration edge correction. Bin centers go to tau_grid;
// std_err carries the per-bin Poisson standard error. Atom filters restrict
// each side to one atom (empty optional = all atoms).
CorrelationResult estimate_g2(const std::vector<ClickRecord>& records, double bin_width,
                              double tau_max, std::optional<int> atom_filter_a = {},
                              std::optional<int> atom_filter_b = {});

// Columnar text round-trip: "time,atom" per line, with header comments
// carrying the spec hash, master seed and per-record metadata.
void save_click_records(const std::string& path, const std::vector<ClickRecord>& records,
                        std::uint64_t spec_hash, std::uint64_t master_seed);
std::vector<ClickRecord> load_click_records(const std::string& path);

}  // namespace rydcorr
