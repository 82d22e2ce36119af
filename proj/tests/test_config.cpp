#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rydcorr/cli_app.hpp"
#include "rydcorr/config.hpp"
#include "rydcorr/output.hpp"

using namespace rydcorr;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("fig3 preset resolves to the blockaded pair with three probe strengths") {
    const KeyValues kv = resolve_config(std::string("fig3"), std::nullopt, {});
    CHECK(kv.get("system.n_atoms") == "2");
    CHECK(kv.get("system.omega_c") == "1");
    CHECK(kv.get("system.v") == "2");
    CHECK(kv.get("family.omega_p_values") == "0.2,0.5,1.0");

    const RunPlan plan = build_plan(kv);
    REQUIRE(plan.families.size() == 4);  // two-level panel + three ladder panels
    CHECK(plan.families[0].name == "fig3a");
    CHECK(plan.families[3].name == "fig3d");
    for (const CurveJob& job : plan.jobs) CHECK(job.spec.n_atoms == 2);
    CHECK(plan.jobs[plan.families[1].job_indices[0]].spec.omega_p == 0.2);
    CHECK(plan.jobs[plan.families[3].job_indices[0]].spec.omega_p == 1.0);
}

TEST_CASE("atom-count limit is reported with the offending key") {
    const KeyValues kv =
        resolve_config(std::string("custom"), std::nullopt, {"n_atoms=5", "positions=0,0,0"});
    try {
        build_plan(kv);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.code == CliStatus::BadKey);
        CHECK(std::string(e.what()).find("between 1 and 4") != std::string::npos);
    }
}

TEST_CASE("missing preset is an error naming 'preset'") {
    try {
        resolve_config(std::nullopt, std::nullopt, {});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.code == CliStatus::BadPreset);
        CHECK(e.key == "preset");
    }
}

TEST_CASE("unknown preset and unknown key carry distinct exit codes") {
    CHECK(cli_main({"run", "--preset", "fig9"}) == 2);
    CHECK(cli_main({"validate", "--preset", "fig2a", "--set", "bogus_key=1"}) == 3);
    const fs::path bad_parent = fs::temp_directory_path() / "rydcorr_not_a_dir";
    std::ofstream(bad_parent) << "file in the way";
    const std::string out = (bad_parent / "sub").string();
    CHECK(cli_main({"run", "--preset", "fig2a", "--tau-points", "5", "--out", out}) == 4);
    fs::remove(bad_parent);
}

TEST_CASE("validate resolves without computing") {
    CHECK(cli_main({"validate", "--preset", "fig4b"}) == 0);
    CHECK(cli_main({"presets"}) == 0);
}

TEST_CASE("config text parsing: comments, aliases, meta keys, bad lines") {
    const KeyValues kv = KeyValues::parse("# comment\nomega_p = 0.3  # inline\nmeta.version = x\n");
    CHECK(kv.get("system.omega_p") == "0.3");
    CHECK_THROWS_AS(KeyValues::parse("not a key value line\n"), ConfigError);
    CHECK_THROWS_AS(KeyValues::parse("nope = 1\n"), ConfigError);
}

TEST_CASE("run --preset fig2a writes the documented CSV shape") {
    const fs::path dir = fresh_dir("rydcorr_fig2a_full");
    REQUIRE(cli_main({"run", "--preset", "fig2a", "--out", dir.string()}) == 0);
    const std::string csv = slurp(dir / "fig2a.csv");
    CHECK(csv.rfind("tau,g2_N1,g2_N2,g2_N3\n", 0) == 0);
    CHECK(count_lines(csv) == 401);  // header + 400 rows

    // 12-significant-digit formatting
    CHECK(csv.find("0.666666666667") != std::string::npos);

    // no leftover temp files from the atomic writes
    for (const auto& entry : fs::directory_iterator(dir))
        CHECK(entry.path().string().find(".tmp.") == std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("overrides change results and are recorded in the manifest") {
    const fs::path dir_a = fresh_dir("rydcorr_override_a");
    const fs::path dir_b = fresh_dir("rydcorr_override_b");
    REQUIRE(cli_main({"run", "--preset", "fig2a", "--tau-points", "24", "--out",
                      dir_a.string()}) == 0);
    REQUIRE(cli_main({"run", "--preset", "fig2a", "--tau-points", "24", "--set",
                      "omega_p=0.4", "--out", dir_b.string()}) == 0);
    CHECK(slurp(dir_a / "fig2a.csv") != slurp(dir_b / "fig2a.csv"));
    const std::string manifest = slurp(dir_b / "manifest.txt");
    CHECK(manifest.find("system.omega_p = 0.4") != std::string::npos);
    CHECK(manifest.find("meta.version = ") != std::string::npos);
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("re-running from a manifest reproduces byte-identical CSVs") {
    const fs::path dir_a = fresh_dir("rydcorr_manifest_a");
    const fs::path dir_b = fresh_dir("rydcorr_manifest_b");
    REQUIRE(cli_main({"run", "--preset", "fig3", "--tau-points", "16", "--out",
                      dir_a.string()}) == 0);
    REQUIRE(cli_main({"run", "--config", (dir_a / "manifest.txt").string(), "--out",
                      dir_b.string()}) == 0);
    for (const char* name : {"fig3a.csv", "fig3b.csv", "fig3c.csv", "fig3d.csv"})
        CHECK(slurp(dir_a / name) == slurp(dir_b / name));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("fig4b preset writes the long-format scan") {
    const fs::path dir = fresh_dir("rydcorr_fig4b");
    REQUIRE(cli_main({"run", "--preset", "fig4b", "--tau-points", "8", "--set",
                      "scan.r_values=0.25,0.5", "--out", dir.string()}) == 0);
    const std::string csv = slurp(dir / "fig4b.csv");
    CHECK(csv.rfind("R_over_lambda,tau,g2\n", 0) == 0);
    CHECK(count_lines(csv) == 1 + 2 * 8);
    CHECK(csv.find("\n0.25,") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("environment variables supply defaults and flags win") {
    const fs::path dir_env = fresh_dir("rydcorr_envdir");
    setenv("RYDCORR_OUTDIR", dir_env.string().c_str(), 1);
    REQUIRE(cli_main({"run", "--preset", "fig2a", "--tau-points", "4", "--set",
                      "family.n_values=1"}) == 0);
    CHECK(fs::exists(dir_env / "fig2a.csv"));

    const fs::path dir_flag = fresh_dir("rydcorr_flagdir");
    REQUIRE(cli_main({"run", "--preset", "fig2a", "--tau-points", "4", "--set",
                      "family.n_values=1", "--out", dir_flag.string()}) == 0);
    CHECK(fs::exists(dir_flag / "fig2a.csv"));
    unsetenv("RYDCORR_OUTDIR");
    fs::remove_all(dir_env);
    fs::remove_all(dir_flag);
}

TEST_CASE("svg output is written on request") {
    const fs::path dir = fresh_dir("rydcorr_svg");
    REQUIRE(cli_main({"run", "--preset", "fig2a", "--tau-points", "12", "--set",
                      "family.n_values=1,2", "--svg", "--out", dir.string()}) == 0);
    const std::string svg = slurp(dir / "fig2a.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") == std::string::npos);  // paths, not polylines
    CHECK(svg.find("<path") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("dark fig2bcd single-atom column is regularized and noted") {
    const fs::path dir = fresh_dir("rydcorr_fig2b_reg");
    REQUIRE(cli_main({"run", "--preset", "fig2bcd", "--tau-points", "12", "--set",
                      "family.n_values=1", "--set", "family.omega_p_values=0.2", "--out",
                      dir.string()}) == 0);
    const std::string csv = slurp(dir / "fig2b.csv");
    CHECK(csv.rfind("tau,g2_N1\n", 0) == 0);
    CHECK(csv.find("nan") == std::string::npos);  // regularized, finite
    fs::remove_all(dir);
}

TEST_CASE("format_sig12 and fnv1a64 basics") {
    CHECK(format_sig12(2.0 / 3.0) == "0.666666666667");
    CHECK(format_sig12(0.0) == "0");
    CHECK(format_sig12(-1.25) == "-1.25");
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") != fnv1a64("b"));
}
