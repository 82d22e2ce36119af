#include "rydcorr/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "rydcorr/output.hpp"

namespace rydcorr {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(CliStatus::BadKey, key, "invalid numeric value for '" + key + "': " + v);
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(CliStatus::BadKey, key, "invalid integer value for '" + key + "': " + v);
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(CliStatus::BadKey, key, "invalid boolean value for '" + key + "': " + v);
}

// "a,b,c" or "start:stop:step"
std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    if (v.find(':') != std::string::npos) {
        const auto parts = split(v, ':');
        if (parts.size() != 3)
            throw ConfigError(CliStatus::BadKey, key, "range for '" + key + "' needs start:stop:step");
        const double a = parse_double(key, parts[0]), b = parse_double(key, parts[1]),
                     s = parse_double(key, parts[2]);
        if (s <= 0) throw ConfigError(CliStatus::BadKey, key, "range step must be positive");
        for (double x = a; x <= b + 1e-12; x += s) out.push_back(std::round(x / s) * s);
        return out;
    }
    for (const std::string& item : split(v, ','))
        if (!item.empty()) out.push_back(parse_double(key, item));
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const std::string& item : split(v, ','))
        if (!item.empty()) out.push_back(parse_int(key, item));
    return out;
}

std::vector<Vec3> parse_positions(const std::string& key, const std::string& v) {
    std::vector<Vec3> out;
    for (const std::string& triple : split(v, ';')) {
        if (triple.empty()) continue;
        const auto xyz = split(triple, ',');
        if (xyz.size() != 3)
            throw ConfigError(CliStatus::BadKey, key, "positions need x,y,z triples separated by ';'");
        out.push_back(Vec3{parse_double(key, xyz[0]), parse_double(key, xyz[1]),
                           parse_double(key, xyz[2])});
    }
    return out;
}

Vec3 parse_direction(const std::string& key, const std::string& v) {
    const auto xyz = split(v, ',');
    if (xyz.size() != 3)
        throw ConfigError(CliStatus::BadKey, key, "direction for '" + key + "' needs x,y,z");
    Vec3 d{parse_double(key, xyz[0]), parse_double(key, xyz[1]), parse_double(key, xyz[2])};
    const double n = std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
    if (n <= 0) throw ConfigError(CliStatus::BadKey, key, "direction must be nonzero");
    d.x /= n;
    d.y /= n;
    d.z /= n;
    return d;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "preset",
        "family.n_values",
        "family.omega_p_values",
        "system.n_atoms",
        "system.positions",
        "system.omega_p",
        "system.omega_c",
        "system.gamma_e",
        "system.gamma_reg",
        "system.k_ratio",
        "system.phase_mode",
        "system.interaction",
        "system.v",
        "system.v_matrix",
        "system.c6",
        "detector_a.direction",
        "detector_a.mode",
        "detector_b.direction",
        "detector_b.mode",
        "cross.atom_i",
        "cross.atom_j",
        "mode",
        "tau.max",
        "tau.points",
        "scan.axis",
        "scan.r_values",
        "oracle.enabled",
        "oracle.n_traj",
        "oracle.duration",
        "oracle.seed",
        "oracle.bin_width",
        "oracle.tau_max",
        "output.dir",
        "output.svg",
        "output.clicks",
        "workers",
    };
    return keys;
}

// bare aliases accepted in --set for the common physics knobs
const std::map<std::string, std::string>& key_aliases() {
    static const std::map<std::string, std::string> aliases = {
        {"n_atoms", "system.n_atoms"},   {"omega_p", "system.omega_p"},
        {"omega_c", "system.omega_c"},   {"gamma_e", "system.gamma_e"},
        {"gamma_reg", "system.gamma_reg"}, {"k_ratio", "system.k_ratio"},
        {"phase_mode", "system.phase_mode"}, {"v", "system.v"},
        {"c6", "system.c6"},             {"positions", "system.positions"},
        {"interaction", "system.interaction"},
    };
    return aliases;
}

std::string canonical_key(const std::string& key) {
    const auto it = key_aliases().find(key);
    return it == key_aliases().end() ? key : it->second;
}

void check_key(const std::string& key) {
    if (key.rfind("meta.", 0) == 0) return;  // manifest metadata, ignored
    if (!known_keys().count(key))
        throw ConfigError(CliStatus::BadKey, key, "unknown configuration key '" + key + "'");
}

}  // namespace

void KeyValues::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : items_)
        if (k == key) {
            v = value;
            return;
        }
    items_.emplace_back(key, value);
}

bool KeyValues::has(const std::string& key) const {
    return std::any_of(items_.begin(), items_.end(),
                       [&](const auto& kv) { return kv.first == key; });
}

const std::string& KeyValues::get(const std::string& key) const {
    for (const auto& [k, v] : items_)
        if (k == key) return v;
    throw ConfigError(CliStatus::BadKey, key, "missing configuration key '" + key + "'");
}

std::string KeyValues::get_or(const std::string& key, const std::string& fallback) const {
    for (const auto& [k, v] : items_)
        if (k == key) return v;
    return fallback;
}

KeyValues KeyValues::parse(const std::string& text) {
    KeyValues out;
    std::istringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(CliStatus::BadKey, line,
                              "config line " + std::to_string(lineno) + " is not 'key = value'");
        const std::string key = canonical_key(trim(line.substr(0, eq)));
        check_key(key);
        out.set(key, trim(line.substr(eq + 1)));
    }
    return out;
}

std::string KeyValues::serialize() const {
    std::vector<std::pair<std::string, std::string>> sorted = items_;
    std::sort(sorted.begin(), sorted.end());
    std::string out;
    for (const auto& [k, v] : sorted) out += k + " = " + v + "\n";
    return out;
}

namespace {

KeyValues preset_defaults(const std::string& preset) {
    KeyValues kv;
    kv.set("preset", preset);
    kv.set("system.gamma_e", "1");
    kv.set("system.k_ratio", "1");
    kv.set("tau.max", "20");
    kv.set("tau.points", "400");
    kv.set("oracle.enabled", "false");
    kv.set("oracle.n_traj", "400");
    kv.set("oracle.duration", "1000");
    kv.set("oracle.seed", "7");
    kv.set("oracle.bin_width", "0.2");
    kv.set("oracle.tau_max", "15");
    kv.set("output.dir", "out");
    kv.set("output.svg", "false");
    kv.set("output.clicks", "false");
    kv.set("workers", "0");

    if (preset == "fig2a") {
        kv.set("family.n_values", "1,2,3");
        kv.set("system.omega_p", "0.2");
        kv.set("system.omega_c", "0");
        kv.set("system.interaction", "explicit");
        kv.set("system.v", "0");
        kv.set("system.gamma_reg", "0");
        kv.set("system.phase_mode", "gauged");
        kv.set("detector_a.mode", "incoherent_total");
        kv.set("detector_b.mode", "incoherent_total");
        kv.set("detector_a.direction", "1,0,0");
        kv.set("detector_b.direction", "0,1,0");
    } else if (preset == "fig2bcd") {
        kv.set("family.n_values", "1,2,3");
        kv.set("family.omega_p_values", "0.2,0.5,1.0");
        kv.set("system.omega_c", "1");
        kv.set("system.interaction", "explicit");
        kv.set("system.v", "2");
        kv.set("system.gamma_reg", "0.001");
        kv.set("system.phase_mode", "gauged");
        kv.set("detector_a.mode", "incoherent_total");
        kv.set("detector_b.mode", "incoherent_total");
        kv.set("detector_a.direction", "1,0,0");
        kv.set("detector_b.direction", "0,1,0");
    } else if (preset == "fig3") {
        kv.set("family.omega_p_values", "0.2,0.5,1.0");
        kv.set("system.n_atoms", "2");
        kv.set("system.omega_c", "1");
        kv.set("system.interaction", "explicit");
        kv.set("system.v", "2");
        kv.set("system.gamma_reg", "0");
        kv.set("system.phase_mode", "gauged");
    } else if (preset == "fig4a" || preset == "fig4b") {
        kv.set("system.n_atoms", "2");
        kv.set("system.omega_p", "0.5");
        kv.set("system.omega_c", "1");
        kv.set("system.interaction", "explicit");
        kv.set("system.v", "2");
        kv.set("system.gamma_reg", "0");
        kv.set("system.phase_mode", "physical");
        kv.set("detector_a.mode", "coherent");
        kv.set("detector_b.mode", "coherent");
        kv.set("detector_a.direction", "1,0,0");
        kv.set("detector_b.direction", "-1,0,0");
        kv.set("scan.axis", preset == "fig4a" ? "parallel_to_probe" : "along_detector_axis");
        kv.set("scan.r_values", "0.05:1.0:0.05");
    } else if (preset == "custom") {
        kv.set("mode", "ensemble");
        kv.set("system.n_atoms", "1");
        kv.set("system.positions", "0,0,0");
        kv.set("system.omega_p", "0.2");
        kv.set("system.omega_c", "0");
        kv.set("system.interaction", "explicit");
        kv.set("system.v", "0");
        kv.set("system.gamma_reg", "0");
        kv.set("system.phase_mode", "gauged");
        kv.set("detector_a.mode", "incoherent_total");
        kv.set("detector_b.mode", "incoherent_total");
        kv.set("detector_a.direction", "1,0,0");
        kv.set("detector_b.direction", "0,1,0");
    } else {
        throw ConfigError(CliStatus::BadPreset, preset, "unknown preset '" + preset + "'");
    }
    return kv;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig2a", "fig2bcd", "fig3", "fig4a", "fig4b", "custom"};
}

std::string preset_summary(const std::string& preset) {
    if (preset == "fig2a")
        return "independent two-level atoms (omega_c=0), N in {1,2,3}, omega_p=0.2; "
               "incoherent ensemble g2(tau)";
    if (preset == "fig2bcd")
        return "blockaded ladder system, omega_c=1, V=2, N in {1,2,3}, omega_p in "
               "{0.2,0.5,1.0} (panels b,c,d); incoherent ensemble g2(tau)";
    if (preset == "fig3")
        return "two distinguishable atoms: self g2_11 and cross g2_21; panel a two-level "
               "omega_p=0.2, panels b-d blockaded ladder omega_p in {0.2,0.5,1.0}";
    if (preset == "fig4a")
        return "coherent detection, atom pair along the probe axis, R scan 0.05..1.0 "
               "lambda; omega_p=0.5, omega_c=1, V=2, opposed detectors on +-x";
    if (preset == "fig4b")
        return "coherent detection, atom pair along the detector axis (+-x), R scan "
               "0.05..1.0 lambda; shows interference minima at R=0.25, 0.75 lambda";
    if (preset == "custom") return "single curve built entirely from system.* keys";
    throw ConfigError(CliStatus::BadPreset, preset, "unknown preset '" + preset + "'");
}

KeyValues resolve_config(const std::optional<std::string>& preset_flag,
                         const std::optional<std::string>& config_text,
                         const std::vector<std::string>& set_overrides) {
    std::optional<KeyValues> from_file;
    if (config_text) from_file = KeyValues::parse(*config_text);

    std::string preset;
    if (preset_flag)
        preset = *preset_flag;
    else if (from_file && from_file->has("preset"))
        preset = from_file->get("preset");
    else
        throw ConfigError(CliStatus::BadPreset, "preset",
                          "no preset given: pass --preset or a config with a 'preset' key");

    KeyValues kv = preset_defaults(preset);
    if (from_file)
        for (const auto& [k, v] : from_file->items()) {
            if (k == "preset" || k.rfind("meta.", 0) == 0) continue;
            check_key(k);
            kv.set(k, v);
        }
    for (const std::string& ov : set_overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError(CliStatus::BadKey, ov, "--set needs key=value, got '" + ov + "'");
        const std::string key = canonical_key(trim(ov.substr(0, eq)));
        check_key(key);
        kv.set(key, trim(ov.substr(eq + 1)));
    }
    return kv;
}

namespace {

SystemSpec spec_from_keys(const KeyValues& kv, int n_atoms,
                          const std::vector<Vec3>& positions, double omega_p, double omega_c) {
    SystemSpec s;
    s.n_atoms = n_atoms;
    s.positions = positions;
    s.omega_p = omega_p;
    s.omega_c = omega_c;
    s.gamma_e = parse_double("system.gamma_e", kv.get("system.gamma_e"));
    s.gamma_reg = parse_double("system.gamma_reg", kv.get_or("system.gamma_reg", "0"));
    s.k_ratio = parse_double("system.k_ratio", kv.get_or("system.k_ratio", "1"));
    const std::string pm = kv.get_or("system.phase_mode", "gauged");
    if (pm == "gauged")
        s.phase_mode = PhaseMode::Gauged;
    else if (pm == "physical")
        s.phase_mode = PhaseMode::Physical;
    else
        throw ConfigError(CliStatus::BadKey, "system.phase_mode",
                          "system.phase_mode must be 'gauged' or 'physical'");
    const std::string inter = kv.get_or("system.interaction", "explicit");
    if (inter == "explicit") {
        if (kv.has("system.v_matrix")) {
            const auto rows = split(kv.get("system.v_matrix"), ';');
            if (static_cast<int>(rows.size()) != n_atoms)
                throw ConfigError(CliStatus::BadKey, "system.v_matrix",
                                  "system.v_matrix must have n_atoms rows");
            ExplicitV ev = ExplicitV::zero(n_atoms);
            for (int i = 0; i < n_atoms; ++i) {
                const auto cols = parse_double_list("system.v_matrix", rows[i]);
                if (static_cast<int>(cols.size()) != n_atoms)
                    throw ConfigError(CliStatus::BadKey, "system.v_matrix",
                                      "system.v_matrix must be square");
                for (int j = 0; j < n_atoms; ++j)
                    ev.v[static_cast<std::size_t>(i) * n_atoms + j] = cols[j];
            }
            s.interaction = ev;
        } else {
            const double v = parse_double("system.v", kv.get_or("system.v", "0"));
            s.interaction = ExplicitV::uniform(n_atoms, v);
        }
    } else if (inter == "vdw") {
        s.interaction = VanDerWaals{parse_double("system.c6", kv.get("system.c6"))};
    } else {
        throw ConfigError(CliStatus::BadKey, "system.interaction",
                          "system.interaction must be 'explicit' or 'vdw'");
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(CliStatus::BadKey, "system", e.what());
    }
    return s;
}

DetectorSpec detector_from_keys(const KeyValues& kv, const std::string& prefix, int n_atoms) {
    DetectorSpec d;
    d.direction = parse_direction(prefix + ".direction", kv.get(prefix + ".direction"));
    const std::string mode = kv.get(prefix + ".mode");
    if (mode == "coherent") {
        d.mode = DetectionMode::Coherent;
    } else if (mode == "incoherent_total") {
        d.mode = DetectionMode::IncoherentTotal;
    } else if (mode.rfind("atom:", 0) == 0) {
        d.mode = DetectionMode::IncoherentAtom;
        d.atom = parse_int(prefix + ".mode", mode.substr(5));
    } else {
        throw ConfigError(CliStatus::BadKey, prefix + ".mode",
                          prefix + ".mode must be coherent, incoherent_total or atom:<k>");
    }
    try {
        d.validate(n_atoms);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(CliStatus::BadKey, prefix, e.what());
    }
    return d;
}

// default line of distinct positions (gauged presets: values are irrelevant
// to the physics but the spec requires a valid list)
std::vector<Vec3> default_positions(int n) {
    std::vector<Vec3> p(n);
    for (int i = 0; i < n; ++i) p[i] = Vec3{static_cast<double>(i), 0, 0};
    return p;
}

}  // namespace

std::uint64_t spec_hash(const SystemSpec& spec) {
    std::string s = "n=" + std::to_string(spec.n_atoms) + ";op=" + format_exact(spec.omega_p) +
                    ";oc=" + format_exact(spec.omega_c) + ";ge=" + format_exact(spec.gamma_e) +
                    ";gr=" + format_exact(spec.gamma_reg) + ";kr=" + format_exact(spec.k_ratio) +
                    ";pm=" + (spec.phase_mode == PhaseMode::Gauged ? "g" : "p") + ";pos=";
    for (const Vec3& r : spec.positions)
        s += format_exact(r.x) + "," + format_exact(r.y) + "," + format_exact(r.z) + ";";
    if (const auto* ev = std::get_if<ExplicitV>(&spec.interaction)) {
        s += "ev=";
        for (double v : ev->v) s += format_exact(v) + ",";
    } else {
        s += "c6=" + format_exact(std::get<VanDerWaals>(spec.interaction).c6);
    }
    return fnv1a64(s);
}

RunPlan build_plan(const KeyValues& kv) {
    RunPlan plan;
    plan.resolved = kv;
    const std::string preset = kv.get("preset");

    const double tau_max = parse_double("tau.max", kv.get("tau.max"));
    const int tau_points = parse_int("tau.points", kv.get("tau.points"));
    if (tau_max <= 0 || tau_points < 2)
        throw ConfigError(CliStatus::BadKey, "tau", "tau.max must be > 0 and tau.points >= 2");
    plan.tau_grid = uniform_tau_grid(tau_max, tau_points);

    plan.out_dir = kv.get("output.dir");
    plan.write_svg = parse_bool("output.svg", kv.get("output.svg"));
    plan.write_clicks = parse_bool("output.clicks", kv.get("output.clicks"));
    plan.oracle_enabled = parse_bool("oracle.enabled", kv.get("oracle.enabled"));
    plan.oracle_n_traj = parse_int("oracle.n_traj", kv.get("oracle.n_traj"));
    plan.oracle_duration = parse_double("oracle.duration", kv.get("oracle.duration"));
    plan.oracle_bin_width = parse_double("oracle.bin_width", kv.get("oracle.bin_width"));
    plan.oracle_tau_max = parse_double("oracle.tau_max", kv.get("oracle.tau_max"));
    plan.oracle_seed = static_cast<std::uint64_t>(
        std::stoull(kv.get("oracle.seed")));
    plan.workers = parse_int("workers", kv.get("workers"));

    auto add_family = [&](const std::string& name, bool long_format) -> FamilyPlan& {
        plan.families.push_back(FamilyPlan{name, long_format, {}});
        return plan.families.back();
    };
    auto add_job = [&](FamilyPlan& fam, CurveJob job) {
        fam.job_indices.push_back(static_cast<int>(plan.jobs.size()));
        plan.jobs.push_back(std::move(job));
    };

    if (preset == "fig2a" || preset == "fig2bcd") {
        const auto n_values = parse_int_list("family.n_values", kv.get("family.n_values"));
        if (n_values.empty())
            throw ConfigError(CliStatus::BadKey, "family.n_values", "family.n_values is empty");
        std::vector<double> omega_ps;
        std::vector<std::string> panels;
        if (preset == "fig2a") {
            omega_ps = {parse_double("system.omega_p", kv.get("system.omega_p"))};
            panels = {"fig2a"};
        } else {
            omega_ps = parse_double_list("family.omega_p_values", kv.get("family.omega_p_values"));
            for (std::size_t k = 0; k < omega_ps.size(); ++k)
                panels.push_back("fig2" + std::string(1, static_cast<char>('b' + k)));
        }
        const double omega_c = parse_double("system.omega_c", kv.get("system.omega_c"));
        for (std::size_t p = 0; p < omega_ps.size(); ++p) {
            FamilyPlan& fam = add_family(panels[p], false);
            for (int n : n_values) {
                CurveJob job;
                job.family = panels[p];
                job.column = "g2_N" + std::to_string(n);
                job.spec = spec_from_keys(kv, n, default_positions(n), omega_ps[p], omega_c);
                job.det_a = detector_from_keys(kv, "detector_a", n);
                job.det_b = detector_from_keys(kv, "detector_b", n);
                add_job(fam, std::move(job));
            }
        }
    } else if (preset == "fig3") {
        const auto omega_ps =
            parse_double_list("family.omega_p_values", kv.get("family.omega_p_values"));
        // panel a: the non-interacting two-level pair at the weakest drive
        struct Panel {
            std::string name;
            double omega_p, omega_c, v;
        };
        std::vector<Panel> panel_list;
        panel_list.push_back(Panel{"fig3a", omega_ps.front(), 0.0, 0.0});
        const double omega_c = parse_double("system.omega_c", kv.get("system.omega_c"));
        const double v = parse_double("system.v", kv.get("system.v"));
        for (std::size_t k = 0; k < omega_ps.size(); ++k)
            panel_list.push_back(
                Panel{"fig3" + std::string(1, static_cast<char>('b' + k)), omega_ps[k], omega_c, v});
        for (const Panel& p : panel_list) {
            FamilyPlan& fam = add_family(p.name, false);
            KeyValues tmp = kv;
            tmp.set("system.v", format_exact(p.v));
            SystemSpec spec = spec_from_keys(tmp, 2, default_positions(2), p.omega_p, p.omega_c);
            CurveJob self;
            self.family = p.name;
            self.column = "g2_11";
            self.spec = spec;
            self.cross = std::make_pair(0, 0);
            add_job(fam, std::move(self));
            CurveJob crossj;
            crossj.family = p.name;
            crossj.column = "g2_21";
            crossj.spec = spec;
            crossj.cross = std::make_pair(1, 0);
            add_job(fam, std::move(crossj));
        }
    } else if (preset == "fig4a" || preset == "fig4b") {
        const auto r_values = parse_double_list("scan.r_values", kv.get("scan.r_values"));
        if (r_values.empty())
            throw ConfigError(CliStatus::BadKey, "scan.r_values", "scan.r_values is empty");
        const std::string axis = kv.get("scan.axis");
        if (axis != "parallel_to_probe" && axis != "along_detector_axis")
            throw ConfigError(CliStatus::BadKey, "scan.axis",
                              "scan.axis must be parallel_to_probe or along_detector_axis");
        const double omega_p = parse_double("system.omega_p", kv.get("system.omega_p"));
        const double omega_c = parse_double("system.omega_c", kv.get("system.omega_c"));
        FamilyPlan& fam = add_family(preset, true);
        for (double r : r_values) {
            CurveJob job;
            job.family = preset;
            job.column = "g2";
            job.r_value = r;
            std::vector<Vec3> pos;
            if (axis == "parallel_to_probe")
                pos = {Vec3{0, 0, +r / 2}, Vec3{0, 0, -r / 2}};
            else
                pos = {Vec3{+r / 2, 0, 0}, Vec3{-r / 2, 0, 0}};
            job.spec = spec_from_keys(kv, 2, pos, omega_p, omega_c);
            if (job.spec.phase_mode != PhaseMode::Physical)
                throw ConfigError(CliStatus::BadKey, "system.phase_mode",
                                  "separation scans require system.phase_mode = physical");
            job.det_a = detector_from_keys(kv, "detector_a", 2);
            job.det_b = detector_from_keys(kv, "detector_b", 2);
            if (job.det_a.mode != DetectionMode::Coherent ||
                job.det_b.mode != DetectionMode::Coherent)
                throw ConfigError(CliStatus::BadKey, "detector_a.mode",
                                  "separation scans require coherent detectors");
            add_job(fam, std::move(job));
        }
    } else if (preset == "custom") {
        const int n = parse_int("system.n_atoms", kv.get("system.n_atoms"));
        std::vector<Vec3> pos = kv.has("system.positions")
                                    ? parse_positions("system.positions", kv.get("system.positions"))
                                    : default_positions(n);
        const double omega_p = parse_double("system.omega_p", kv.get("system.omega_p"));
        const double omega_c = parse_double("system.omega_c", kv.get("system.omega_c"));
        SystemSpec spec = spec_from_keys(kv, n, pos, omega_p, omega_c);
        FamilyPlan& fam = add_family("custom", false);
        const std::string mode = kv.get("mode");
        if (mode == "ensemble") {
            CurveJob job;
            job.family = "custom";
            job.column = "g2";
            job.spec = spec;
            job.det_a = detector_from_keys(kv, "detector_a", n);
            job.det_b = detector_from_keys(kv, "detector_b", n);
            add_job(fam, std::move(job));
        } else if (mode == "cross") {
            CurveJob job;
            job.family = "custom";
            const int i = parse_int("cross.atom_i", kv.get("cross.atom_i"));
            const int j = parse_int("cross.atom_j", kv.get("cross.atom_j"));
            if (i < 0 || i >= n || j < 0 || j >= n)
                throw ConfigError(CliStatus::BadKey, "cross.atom_i",
                                  "cross atom indices must be in [0, n_atoms)");
            job.column = "g2_" + std::to_string(i) + std::to_string(j);
            job.spec = spec;
            job.cross = std::make_pair(i, j);
            add_job(fam, std::move(job));
        } else {
            throw ConfigError(CliStatus::BadKey, "mode", "mode must be 'ensemble' or 'cross'");
        }
    } else {
        throw ConfigError(CliStatus::BadPreset, preset, "unknown preset '" + preset + "'");
    }
    return plan;
}

}  // namespace rydcorr
