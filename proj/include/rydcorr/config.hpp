#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rydcorr/correlation.hpp"
#include "rydcorr/model.hpp"

namespace rydcorr {

enum class CliStatus : int {
    Ok = 0,
    Unexpected = 1,
    BadPreset = 2,
    BadKey = 3,
    OutputError = 4,
    NumericError = 5,
};

struct ConfigError final : std::runtime_error {
    CliStatus code;
    std::string key;
    ConfigError(CliStatus c, std::string k, const std::string& msg)
        : std::runtime_error(msg), code(c), key(std::move(k)) {}
};

// Flat dotted-key configuration. Lines are "key = value", '#' starts a
// comment; unknown keys are rejected with the offending name. meta.* keys
// (written into manifests) are accepted and ignored on load.
class KeyValues {
public:
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;

    static KeyValues parse(const std::string& text);
    std::string serialize() const;  // canonical: sorted keys, one per line

    const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

private:
    std::vector<std::pair<std::string, std::string>> items_;
};

// One correlation curve to evaluate.
struct CurveJob {
    std::string family;  // output file stem
    std::string column;  // column name in the family CSV
    SystemSpec spec;
    DetectorSpec det_a, det_b;
    std::optional<std::pair<int, int>> cross;  // set for self/cross correlations
    double r_value = -1;                       // separation for scan families
};

struct FamilyPlan {
    std::string name;
    bool long_format = false;  // R_over_lambda,tau,g2 rows instead of one column per curve
    std::vector<int> job_indices;
};

struct RunPlan {
    KeyValues resolved;  // full canonical configuration (manifest content)
    std::vector<double> tau_grid;
    std::vector<CurveJob> jobs;
    std::vector<FamilyPlan> families;
    std::string out_dir;
    bool write_svg = false;
    bool write_clicks = false;
    bool oracle_enabled = false;
    int oracle_n_traj = 400;
    double oracle_duration = 1000;
    double oracle_bin_width = 0.2;
    double oracle_tau_max = 15;
    std::uint64_t oracle_seed = 7;
    int workers = 0;  // 0 = library default
};

// Known preset names, in listing order.
std::vector<std::string> preset_names();
std::string preset_summary(const std::string& preset);

// Resolve preset defaults + config file + overrides into a canonical key set.
// Throws ConfigError naming the offending key/preset.
KeyValues resolve_config(const std::optional<std::string>& preset_flag,
                         const std::optional<std::string>& config_text,
                         const std::vector<std::string>& set_overrides);

// Build the executable plan (validates everything down to SystemSpec level).
RunPlan build_plan(const KeyValues& resolved);

std::uint64_t spec_hash(const SystemSpec& spec);

}  // namespace rydcorr
