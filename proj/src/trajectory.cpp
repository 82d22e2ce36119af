#include "rydcorr/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rydcorr/matexp.hpp"

namespace rydcorr {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// xorshift generator seeded via splitmix64; uniforms are built from the high
// bits directly so streams are platform-independent
struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed ? seed : 1ULL) {}
    std::uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s * 0x2545F4914F6CDD1DULL;
    }
    double uniform() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }  // (0,1]
};

double norm2(const std::vector<cxd>& v) {
    double s = 0;
    for (const cxd& x : v) s += std::norm(x);
    return s;
}

// Exponential stepper on the dyadic time lattice. The drift is constant, so
// exp(-i H_eff s) is exact for every lattice step; the squared norm decreases
// monotonically, which makes threshold crossings impossible to miss and lets
// jump times be pinned down by dyadic refinement. All bookkeeping is integer
// (time = count of quanta q = dt / 2^levels), so trajectories are exactly
// reproducible and event times are strictly increasing.
struct Engine {
    int dim = 0;
    int n_emission = 0;  // leading collapse channels produce clicks
    std::vector<Operator> collapse;
    std::vector<Operator> pow_step;  // pow_step[k] = exp(-i H_eff 2^k q), k = 0..levels
    int levels = 0;
    double quantum = 0;               // q
    std::int64_t quanta_total = 0;    // duration / q (exact by construction)

    Engine(const SystemSpec& spec, double t_end, const TrajectoryOptions& opt) {
        spec.validate();
        if (t_end <= 0) throw std::invalid_argument("trajectory: duration must be positive");
        if (opt.dt <= 0) throw std::invalid_argument("trajectory: dt must be positive");
        if (opt.jump_time_tol <= 0)
            throw std::invalid_argument("trajectory: jump_time_tol must be positive");
        dim = spec.dim();
        collapse = build_collapse_ops(spec);
        n_emission = spec.n_atoms;

        // adjust the base step so t_end is an exact number of steps
        const auto n_steps = static_cast<std::int64_t>(std::ceil(t_end / opt.dt));
        const double dt = t_end / static_cast<double>(n_steps);
        levels = 1;
        while (std::ldexp(dt, -levels) > opt.jump_time_tol) {
            ++levels;
            if (levels > 60) throw std::runtime_error("trajectory: step size underflow");
        }
        quantum = std::ldexp(dt, -levels);
        quanta_total = n_steps << levels;
        if ((quanta_total >> levels) != n_steps)
            throw std::runtime_error("trajectory: step size underflow");

        Operator drift = build_hamiltonian(spec) * cxd(0.0, -1.0);  // -i H
        for (const Operator& c : collapse) drift -= 0.5 * (c.adjoint() * c);
        pow_step.reserve(levels + 1);
        for (int k = 0; k <= levels; ++k)
            pow_step.push_back(expm(drift * cxd(std::ldexp(quantum, k))));
    }

    int pick_channel(const std::vector<cxd>& psi, Rng& rng, std::vector<cxd>& jumped) const {
        std::vector<std::vector<cxd>> cand(collapse.size());
        std::vector<double> w(collapse.size());
        double total = 0;
        for (std::size_t i = 0; i < collapse.size(); ++i) {
            cand[i] = collapse[i].apply(psi);
            w[i] = norm2(cand[i]);
            total += w[i];
        }
        if (total <= 0) throw std::runtime_error("trajectory: zero jump weight");
        double u = rng.uniform() * total;
        std::size_t pick = collapse.size() - 1;
        for (std::size_t i = 0; i < collapse.size(); ++i) {
            if (u <= w[i]) { pick = i; break; }
            u -= w[i];
        }
        const double inv = 1.0 / std::sqrt(w[pick]);
        jumped = std::move(cand[pick]);
        for (cxd& x : jumped) x *= inv;
        return static_cast<int>(pick);
    }

    void run_one(std::uint64_t seed, std::vector<ClickEvent>* clicks,
                 std::vector<cxd>* final_state) const {
        Rng rng(seed);
        std::vector<cxd> psi(dim), scratch;
        psi[0] = 1.0;  // prepared in |g...g>
        std::int64_t pos = 0;
        double threshold = rng.uniform();
        while (pos < quanta_total) {
            const std::int64_t remaining = quanta_total - pos;
            // largest lattice step that fits the remaining budget
            int max_k = levels;
            while (max_k > 0 && (std::int64_t{1} << max_k) > remaining) --max_k;
            if ((std::int64_t{1} << max_k) > remaining) max_k = 0;

            scratch = pow_step[max_k].apply(psi);
            if (norm2(scratch) > threshold) {
                psi.swap(scratch);
                pos += std::int64_t{1} << max_k;
                continue;
            }
            // crossing inside this step: dyadic refinement, then one quantum
            // to land just below the threshold
            std::int64_t offset = 0;
            for (int k = max_k - 1; k >= 0; --k) {
                scratch = pow_step[k].apply(psi);
                if (norm2(scratch) > threshold) {
                    psi.swap(scratch);
                    offset += std::int64_t{1} << k;
                }
            }
            scratch = pow_step[0].apply(psi);
            psi.swap(scratch);
            offset += 1;
            pos += offset;

            std::vector<cxd> jumped;
            const int channel = pick_channel(psi, rng, jumped);
            psi = std::move(jumped);
            if (clicks && channel < n_emission)
                clicks->push_back(ClickEvent{static_cast<double>(pos) * quantum, channel});
            threshold = rng.uniform();
        }
        if (final_state) {
            const double nrm = std::sqrt(norm2(psi));
            if (nrm > 0)
                for (cxd& x : psi) x *= 1.0 / nrm;
            *final_state = std::move(psi);
        }
    }
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, int trajectory_index) {
    return splitmix64(master_seed + 0x9E3779B97F4A7C15ULL *
                                        static_cast<std::uint64_t>(trajectory_index + 1));
}

std::vector<ClickRecord> run_trajectories(const SystemSpec& spec, double duration, int n_traj,
                                          std::uint64_t seed, const TrajectoryOptions& opt) {
    if (n_traj < 1) throw std::invalid_argument("run_trajectories: n_traj must be >= 1");
    const Engine eng(spec, duration, opt);
    std::vector<ClickRecord> out(n_traj);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n_traj; ++k) {
        ClickRecord rec;
        rec.duration = duration;
        rec.seed = derive_seed(seed, k);
        eng.run_one(rec.seed, &rec.events, nullptr);
        out[k] = std::move(rec);
    }
    return out;
}

EnsembleState average_state(const SystemSpec& spec, double t, int n_traj, std::uint64_t seed,
                            const TrajectoryOptions& opt) {
    if (n_traj < 2) throw std::invalid_argument("average_state: n_traj must be >= 2");
    const Engine eng(spec, t, opt);
    const int d = eng.dim;
    std::vector<std::vector<cxd>> states(n_traj);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n_traj; ++k)
        eng.run_one(derive_seed(seed, k), nullptr, &states[k]);

    EnsembleState res;
    res.n_traj = n_traj;
    res.mean = Operator(d);
    res.stderr_re = Operator(d);
    res.stderr_im = Operator(d);
    Operator sum_sq_re(d), sum_sq_im(d);
    for (int k = 0; k < n_traj; ++k) {  // reduce in index order for determinism
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const cxd e = states[k][i] * std::conj(states[k][j]);
                res.mean(i, j) += e;
                sum_sq_re(i, j) += e.real() * e.real();
                sum_sq_im(i, j) += e.imag() * e.imag();
            }
    }
    const double inv_n = 1.0 / n_traj;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const cxd m = res.mean(i, j) * inv_n;
            res.mean(i, j) = m;
            const double var_re =
                std::max(0.0, sum_sq_re(i, j).real() * inv_n - m.real() * m.real());
            const double var_im =
                std::max(0.0, sum_sq_im(i, j).real() * inv_n - m.imag() * m.imag());
            res.stderr_re(i, j) = std::sqrt(var_re / (n_traj - 1));
            res.stderr_im(i, j) = std::sqrt(var_im / (n_traj - 1));
        }
    return res;
}

CorrelationResult estimate_g2(const std::vector<ClickRecord>& records, double bin_width,
                              double tau_max, std::optional<int> atom_filter_a,
                              std::optional<int> atom_filter_b) {
    if (bin_width <= 0 || tau_max <= bin_width)
        throw std::invalid_argument("estimate_g2: need 0 < bin_width < tau_max");
    const int nbins = static_cast<int>(std::floor(tau_max / bin_width + 1e-9));

    auto match = [](const std::optional<int>& f, int atom) { return !f || *f == atom; };

    std::size_t n_a = 0, n_b = 0, total_events = 0;
    double total_time = 0;
    std::vector<double> counts(nbins, 0.0);
    std::vector<double> window(nbins, 0.0);  // sum_rec integral_bin (T_rec - tau) dtau

    for (const ClickRecord& rec : records) {
        total_time += rec.duration;
        total_events += rec.events.size();
        for (int b = 0; b < nbins; ++b) {
            const double t0 = b * bin_width;
            const double t1 = std::min((b + 1) * bin_width, rec.duration);
            if (t1 > t0) window[b] += rec.duration * (t1 - t0) - 0.5 * (t1 * t1 - t0 * t0);
        }
        for (std::size_t ia = 0; ia < rec.events.size(); ++ia) {
            const ClickEvent& a = rec.events[ia];
            if (match(atom_filter_a, a.atom)) ++n_a;
            if (match(atom_filter_b, a.atom)) ++n_b;
            if (!match(atom_filter_a, a.atom)) continue;
            for (std::size_t ib = ia + 1; ib < rec.events.size(); ++ib) {
                const ClickEvent& ev = rec.events[ib];
                const double delay = ev.time - a.time;
                if (delay >= tau_max) break;
                if (!match(atom_filter_b, ev.atom)) continue;
                const int bin = std::min(nbins - 1, static_cast<int>(delay / bin_width));
                counts[bin] += 1.0;
            }
        }
    }
    if (total_events < 2) throw std::invalid_argument("estimate_g2: need at least two clicks");
    if (total_time <= 0) throw std::invalid_argument("estimate_g2: empty records");

    const double rate_a = static_cast<double>(n_a) / total_time;
    const double rate_b = static_cast<double>(n_b) / total_time;
    CorrelationResult res;
    res.tau_grid.resize(nbins);
    res.g2.resize(nbins);
    res.numerator = counts;
    res.denominator.resize(nbins);
    res.std_err.resize(nbins);
    for (int b = 0; b < nbins; ++b) {
        res.tau_grid[b] = (b + 0.5) * bin_width;
        const double expected = rate_a * rate_b * window[b];
        res.denominator[b] = expected;
        if (expected > 0) {
            res.g2[b] = counts[b] / expected;
            res.std_err[b] = std::sqrt(std::max(counts[b], 1.0)) / expected;
        } else {
            res.g2[b] = std::numeric_limits<double>::quiet_NaN();
            res.std_err[b] = std::numeric_limits<double>::quiet_NaN();
            res.flags.denominator_below_threshold = true;
        }
    }
    return res;
}

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

}  // namespace

void save_click_records(const std::string& path, const std::vector<ClickRecord>& records,
                        std::uint64_t spec_hash, std::uint64_t master_seed) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("save_click_records: cannot open " + path);
    char hashbuf[32];
    std::snprintf(hashbuf, sizeof(hashbuf), "%016llx",
                  static_cast<unsigned long long>(spec_hash));
    f << "# rydcorr-clicks v1 spec_hash=" << hashbuf << " master_seed=" << master_seed
      << " n_records=" << records.size() << "\n";
    f << "# time,atom\n";
    for (std::size_t k = 0; k < records.size(); ++k) {
        const ClickRecord& r = records[k];
        f << "# record " << k << " seed=" << r.seed << " duration=" << fmt_double(r.duration)
          << " n_events=" << r.events.size() << "\n";
        for (const ClickEvent& e : r.events) f << fmt_double(e.time) << "," << e.atom << "\n";
    }
    if (!f) throw std::runtime_error("save_click_records: write failed for " + path);
}

std::vector<ClickRecord> load_click_records(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_click_records: cannot open " + path);
    std::vector<ClickRecord> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line);
            std::string hash_mark, word;
            ss >> hash_mark >> word;
            if (word == "record") {
                ClickRecord rec;
                std::string tok;
                ss >> tok;  // record index, unused
                while (ss >> tok) {
                    const auto eq = tok.find('=');
                    if (eq == std::string::npos) continue;
                    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
                    if (key == "seed") rec.seed = std::stoull(val);
                    if (key == "duration") rec.duration = std::stod(val);
                }
                out.push_back(std::move(rec));
            }
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || out.empty())
            throw std::runtime_error("load_click_records: malformed line: " + line);
        ClickEvent e;
        e.time = std::stod(line.substr(0, comma));
        e.atom = std::stoi(line.substr(comma + 1));
        out.back().events.push_back(e);
    }
    return out;
}

}  // namespace rydcorr
