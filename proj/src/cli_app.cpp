#include "rydcorr/cli_app.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rydcorr/config.hpp"
#include "rydcorr/output.hpp"
#include "rydcorr/trajectory.hpp"
#include "rydcorr/version.hpp"

namespace rydcorr {

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
    std::optional<std::string> preset;
    std::optional<std::string> config_path;
    std::vector<std::string> sets;
    std::optional<std::string> out_dir;
    std::optional<int> workers;
    std::optional<int> tau_points;
    std::optional<double> tau_max;
    bool svg = false;
    bool oracle = false;
    bool clicks = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--preset,-p", a.preset, "scenario preset (see 'presets')");
    cmd->add_option("--config,-c", a.config_path, "key-value config file (manifests reload)");
    cmd->add_option("--set,-s", a.sets, "override a key, e.g. --set omega_p=0.4")
        ->take_all();
    cmd->add_option("--out,-o", a.out_dir, "output directory (env RYDCORR_OUTDIR)");
    cmd->add_option("--workers,-j", a.workers, "worker threads (env RYDCORR_WORKERS)");
    cmd->add_option("--tau-points", a.tau_points, "points on the tau grid");
    cmd->add_option("--tau-max", a.tau_max, "largest tau, units 1/gamma_e");
    cmd->add_flag("--svg", a.svg, "also write an SVG chart per family");
    cmd->add_flag("--oracle", a.oracle, "run the trajectory cross-check on incoherent curves");
    cmd->add_flag("--clicks", a.clicks, "save trajectory click records (with --oracle)");
}

KeyValues resolve_from_args(const CommonArgs& a) {
    std::optional<std::string> config_text;
    if (a.config_path) {
        std::ifstream f(*a.config_path);
        if (!f)
            throw ConfigError(CliStatus::OutputError, *a.config_path,
                              "cannot read config file '" + *a.config_path + "'");
        std::ostringstream ss;
        ss << f.rdbuf();
        config_text = ss.str();
    }
    std::vector<std::string> sets = a.sets;
    // environment defaults apply only where no flag/override was given
    if (const char* env = std::getenv("RYDCORR_OUTDIR"); env && !a.out_dir)
        sets.insert(sets.begin(), std::string("output.dir=") + env);
    if (const char* env = std::getenv("RYDCORR_WORKERS"); env && !a.workers)
        sets.insert(sets.begin(), std::string("workers=") + env);
    if (a.out_dir) sets.push_back("output.dir=" + *a.out_dir);
    if (a.workers) sets.push_back("workers=" + std::to_string(*a.workers));
    if (a.tau_points) sets.push_back("tau.points=" + std::to_string(*a.tau_points));
    if (a.tau_max) sets.push_back("tau.max=" + format_exact(*a.tau_max));
    if (a.svg) sets.push_back("output.svg=true");
    if (a.oracle) sets.push_back("oracle.enabled=true");
    if (a.clicks) sets.push_back("output.clicks=true");
    return resolve_config(a.preset, config_text, sets);
}

CorrelationResult evaluate_job(const CurveJob& job, const std::vector<double>& grid) {
    if (job.cross) return g2_cross(job.spec, job.cross->first, job.cross->second, grid);
    return g2(job.spec, job.det_a, job.det_b, grid);
}

std::string family_csv(const RunPlan& plan, const FamilyPlan& fam,
                       const std::vector<CorrelationResult>& results) {
    std::vector<Column> cols;
    if (!fam.long_format) {
        Column tau{"tau", plan.tau_grid};
        cols.push_back(std::move(tau));
        for (int idx : fam.job_indices)
            cols.push_back(Column{plan.jobs[idx].column, results[idx].g2});
    } else {
        Column r{"R_over_lambda", {}}, tau{"tau", {}}, g{"g2", {}};
        for (int idx : fam.job_indices) {
            for (std::size_t k = 0; k < plan.tau_grid.size(); ++k) {
                r.values.push_back(plan.jobs[idx].r_value);
                tau.values.push_back(plan.tau_grid[k]);
                g.values.push_back(results[idx].g2[k]);
            }
        }
        cols = {std::move(r), std::move(tau), std::move(g)};
    }
    return render_csv(cols);
}

void write_family_svg(const RunPlan& plan, const FamilyPlan& fam,
                      const std::vector<CorrelationResult>& results) {
    std::vector<SvgCurve> curves;
    for (int idx : fam.job_indices) {
        std::string label = plan.jobs[idx].column;
        if (fam.long_format) label = "R=" + format_sig12(plan.jobs[idx].r_value);
        curves.push_back(SvgCurve{label, results[idx].g2});
    }
    const std::string svg = render_svg_chart(fam.name, "tau (1/gamma_e)", plan.tau_grid, curves);
    atomic_write((fs::path(plan.out_dir) / (fam.name + ".svg")).string(), svg);
}

// trajectory cross-check against the regression curve for incoherent jobs
void run_oracle(const RunPlan& plan, const CurveJob& job, std::ostream& log) {
    std::optional<int> filter_a, filter_b;
    if (job.cross) {
        filter_a = job.cross->first;
        filter_b = job.cross->second;
    } else if (job.det_a.mode == DetectionMode::IncoherentTotal &&
               job.det_b.mode == DetectionMode::IncoherentTotal) {
        // no filters: all atoms on both sides
    } else {
        log << "oracle: skipping " << job.family << "/" << job.column
            << " (only incoherent detection has a trajectory unraveling)\n";
        return;
    }
    SystemSpec spec = job.spec;  // regularizers are not unraveled unless engaged
    const auto records =
        run_trajectories(spec, plan.oracle_duration, plan.oracle_n_traj, plan.oracle_seed);
    std::size_t clicks = 0;
    for (const auto& r : records) clicks += r.events.size();
    const std::string stem = "oracle_" + job.family + "_" + job.column;
    if (plan.write_clicks)
        save_click_records((fs::path(plan.out_dir) / (stem + "_clicks.csv")).string(), records,
                           spec_hash(spec), plan.oracle_seed);
    if (clicks < 100) {
        log << "oracle: " << job.family << "/" << job.column << " produced only " << clicks
            << " clicks; skipping the comparison (raise oracle.duration or oracle.n_traj)\n";
        return;
    }
    CorrelationResult est =
        estimate_g2(records, plan.oracle_bin_width, plan.oracle_tau_max, filter_a, filter_b);
    CorrelationResult reg = evaluate_job(job, est.tau_grid);

    std::vector<double> z(est.tau_grid.size(), 0.0);
    double chi2 = 0, zmax = 0;
    int dof = 0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        if (!std::isfinite(est.g2[k]) || !std::isfinite(reg.g2[k]) || est.std_err[k] <= 0)
            continue;
        z[k] = (est.g2[k] - reg.g2[k]) / est.std_err[k];
        chi2 += z[k] * z[k];
        zmax = std::max(zmax, std::abs(z[k]));
        ++dof;
    }
    std::vector<Column> cols = {Column{"tau", est.tau_grid}, Column{"g2_regression", reg.g2},
                                Column{"g2_trajectory", est.g2}, Column{"std_err", est.std_err},
                                Column{"z", z}};
    atomic_write((fs::path(plan.out_dir) / (stem + ".csv")).string(), render_csv(cols));
    log << "oracle: " << job.family << "/" << job.column << ": " << clicks << " clicks, "
        << dof << " bins, max|z| = " << format_sig12(zmax)
        << ", chi2/bins = " << format_sig12(dof ? chi2 / dof : 0.0) << "\n";
}

int do_run(const CommonArgs& args) {
    const KeyValues resolved = resolve_from_args(args);
    RunPlan plan = build_plan(resolved);
    if (plan.workers > 0) omp_set_num_threads(plan.workers);

    std::vector<CorrelationResult> results(plan.jobs.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < static_cast<int>(plan.jobs.size()); ++k) {
        try {
            results[k] = evaluate_job(plan.jobs[k], plan.tau_grid);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    for (const FamilyPlan& fam : plan.families) {
        const std::string csv = family_csv(plan, fam, results);
        atomic_write((fs::path(plan.out_dir) / (fam.name + ".csv")).string(), csv);
        if (plan.write_svg) write_family_svg(plan, fam, results);
        for (int idx : fam.job_indices) {
            const auto& f = results[idx].flags;
            if (f.regularized)
                std::cout << fam.name << "/" << plan.jobs[idx].column
                          << ": dark steady state, curve regularized with gamma_reg = "
                          << format_sig12(plan.jobs[idx].spec.gamma_reg) << "\n";
            else if (f.denominator_below_threshold)
                std::cout << fam.name << "/" << plan.jobs[idx].column
                          << ": dark steady state, g2 undefined (set system.gamma_reg > 0 "
                             "to regularize)\n";
        }
    }

    // manifest: reloadable config plus metadata
    KeyValues manifest = plan.resolved;
    manifest.set("meta.version", std::string(kVersion));
    manifest.set("meta.config_hash", [&] {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(plan.resolved.serialize())));
        return std::string(buf);
    }());
    for (std::size_t k = 0; k < plan.jobs.size(); ++k) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(spec_hash(plan.jobs[k].spec)));
        manifest.set("meta.spec_hash." + plan.jobs[k].family + "." + plan.jobs[k].column,
                     std::string(buf));
    }
    atomic_write((fs::path(plan.out_dir) / "manifest.txt").string(), manifest.serialize());

    if (plan.oracle_enabled)
        for (const CurveJob& job : plan.jobs) run_oracle(plan, job, std::cout);

    std::cout << "wrote " << plan.families.size() << " famil"
              << (plan.families.size() == 1 ? "y" : "ies") << " to " << plan.out_dir << "\n";
    return 0;
}

int do_validate(const CommonArgs& args) {
    const KeyValues resolved = resolve_from_args(args);
    const RunPlan plan = build_plan(resolved);
    std::cout << "# resolved configuration\n" << resolved.serialize();
    std::cout << "# plan\n";
    double total_mem = 0, total_sec = 0;
    for (const FamilyPlan& fam : plan.families) {
        std::cout << fam.name << ": " << fam.job_indices.size() << " curve(s), "
                  << plan.tau_grid.size() << " tau points\n";
        for (int idx : fam.job_indices) {
            const CurveJob& job = plan.jobs[idx];
            const double d = job.spec.dim();
            const double d2 = d * d;
            const double mem = d2 * d2 * 16.0 * 8.0;       // superoperator + workspaces
            const double sec = 4e-9 * d2 * d2 * d2 +       // factorizations + exponential
                               2e-9 * d2 * d2 * plan.tau_grid.size();
            total_mem = std::max(total_mem, mem);
            total_sec += sec;
            std::cout << "  " << job.column << ": n_atoms=" << job.spec.n_atoms << " d=" << d
                      << " d^2=" << d2 << "\n";
        }
    }
    std::cout << "estimated peak memory ~ " << format_sig12(total_mem / 1048576.0)
              << " MiB, core compute ~ " << format_sig12(total_sec) << " s (rough)\n";
    std::cout << "ok\n";
    return 0;
}

int do_presets() {
    for (const std::string& name : preset_names())
        std::cout << name << "\n  " << preset_summary(name) << "\n";
    return 0;
}

}  // namespace

int cli_main(std::vector<std::string> args) {
    CLI::App app{"steady-state photon correlation simulator for small Rydberg-EIT ensembles"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    CommonArgs run_args, val_args;
    CLI::App* run_cmd = app.add_subcommand("run", "compute curves and write CSV outputs");
    add_common(run_cmd, run_args);
    CLI::App* val_cmd = app.add_subcommand("validate", "resolve and check a configuration");
    add_common(val_cmd, val_args);
    CLI::App* presets_cmd = app.add_subcommand("presets", "list scenario presets");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : static_cast<int>(CliStatus::BadPreset);
    }

    try {
        if (presets_cmd->parsed()) return do_presets();
        if (run_cmd->parsed()) return do_run(run_args);
        if (val_cmd->parsed()) return do_validate(val_args);
        return static_cast<int>(CliStatus::Unexpected);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.code);
    } catch (const NonUniqueSteadyState& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(CliStatus::NumericError);
    } catch (const StepSizeFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(CliStatus::NumericError);
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(CliStatus::OutputError);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(CliStatus::BadKey);
    } catch (const std::runtime_error& e) {
        // distinguish output-path failures from numeric ones by message origin
        const std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        if (msg.find("cannot open") != std::string::npos ||
            msg.find("write failed") != std::string::npos ||
            msg.find("rename") != std::string::npos)
            return static_cast<int>(CliStatus::OutputError);
        return static_cast<int>(CliStatus::NumericError);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(CliStatus::Unexpected);
    }
}

}  // namespace rydcorr
