#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddestab/cli/commands.hpp"
#include "ddestab/cli/config.hpp"
#include "ddestab/error.hpp"

using namespace ddestab;
using namespace ddestab::cli;

namespace {

const char* kMinimal = R"({
  "system": {
    "n": 1,
    "parameters": ["a", "b"],
    "a0": {"coeffs": {"a": [[1]]}},
    "delayed": [{"delay": [1, 10], "coeffs": {"b": [[1]]}}]
  },
  "solver": {"box": {"lower": [-1, -1], "upper": [1, 1]}}
})";

std::string config_error(const std::string& text) {
    try {
        load_config(text);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
        return e.what();
    }
    FAIL("config accepted");
    return {};
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("ddestab_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

std::string read(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("minimal config loads and round-trips") {
    const RunConfig cfg = load_config(kMinimal);
    CHECK(cfg.system.n() == 1);
    CHECK(cfg.system.delayed()[0].tau == Rational(1, 10));
    CHECK(cfg.stencil_points == 2);
    const std::string canonical = emit_config(cfg);
    CHECK(emit_config(load_config(canonical)) == canonical);
    CHECK(canonical.find("\"a\"") != std::string::npos);
}

TEST_CASE("config errors name the field") {
    CHECK(config_error(replace(kMinimal, R"("box": {"lower": [-1, -1], "upper": [1, 1]})", R"("tol": 0.1)"))
              .find("solver.box") != std::string::npos);
    CHECK(config_error(replace(kMinimal, "[1, 10]", "[1, 0]")).find("zero denominator") != std::string::npos);
    CHECK(config_error(replace(kMinimal, "[[1]]}},", "[[1, 2]]}},")).find("system.a0.coeffs.a[0]") !=
          std::string::npos);
    CHECK(config_error(replace(kMinimal, "\"n\": 1,", "\"n\": 1, \"colour\": 2,")).find("system.colour") !=
          std::string::npos);
    CHECK(config_error("{\n  \"system\": ,\n}").find("line 2") != std::string::npos);
    CHECK(config_error(replace(kMinimal, "[1, 1]}", "[1, 1e999]}")).find("overflow") != std::string::npos);
}

TEST_CASE("shortest round-trip number format") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.0) == "-2");
    CHECK(format_double(1e-20) == "1e-20");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("single-cell sweep") {
    RunConfig cfg = load_config(kMinimal);
    cfg.sweep = SweepSpec{{0, -0.5, -0.5, 1}, {1, 0.25, 0.25, 1}};
    const SweepResult r = run_sweep(cfg, 2);
    REQUIRE(r.cells.size() == 1);
    CHECK(r.cells[0].verdict == "stable");
    CHECK(r.cells[0].agree);
    const std::string csv = sweep_csv(r);
    CHECK(csv.substr(0, csv.find('\n')) == "p1,p2,projected_value,verdict,rho,agree");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("sweep order and thread independence") {
    RunConfig cfg = load_config(kMinimal);
    cfg.sweep = SweepSpec{{0, -2, 2, 7}, {1, -2, 2, 5}};
    const SweepResult one = run_sweep(cfg, 1);
    const SweepResult many = run_sweep(cfg, 8);
    CHECK(sweep_csv(one) == sweep_csv(many));
    REQUIRE(one.cells.size() == 35);
    CHECK(one.cells[1].p1 == -2.0);
    CHECK(one.cells[1].p2 == -1.0);
    CHECK(one.cells[5].p1 == doctest::Approx(-2.0 + 4.0 / 6.0));
    const std::string svg = sweep_svg(one);
    CHECK(svg.find("<svg") == 0);
    CHECK(std::count(svg.begin(), svg.end(), '\n') > 35);
}

TEST_CASE("exit codes") {
    const auto dir = scratch("exit");
    const auto cfg_path = dir / "cfg.json";
    std::ofstream(cfg_path) << replace(kMinimal, "\"solver\"", "\"discretization\": {\"dt\": [1, 10], \"window\": 2},\n  \"solver\"");
    std::ostringstream out, err;
    const std::string cfg_arg = cfg_path.string();
    const std::string out_arg = dir.string();

    const char* analyze[] = {"dde-stab", "analyze", "--config", cfg_arg.c_str(), "--out", out_arg.c_str()};
    CHECK(run_cli(6, analyze, out, err) == kExitOk);
    CHECK(std::filesystem::exists(dir / "analyze.json"));
    CHECK(out.str().find("theta*: -1 -1\n") != std::string::npos);
    CHECK(read(dir / "analyze.json").find("\"stabilizable\": true") != std::string::npos);

    const char* transposed[] = {"dde-stab", "analyze", "--config", cfg_arg.c_str(), "--out", out_arg.c_str(),
                                "--form", "transposed"};
    CHECK(run_cli(8, transposed, out, err) == kExitNegative);

    const char* bad_command[] = {"dde-stab", "frobnicate", "--config", cfg_arg.c_str()};
    CHECK(run_cli(4, bad_command, out, err) == kExitUsage);
    const char* no_config[] = {"dde-stab", "analyze"};
    CHECK(run_cli(2, no_config, out, err) == kExitUsage);
    const std::string missing = (dir / "nope.json").string();
    const char* missing_file[] = {"dde-stab", "analyze", "--config", missing.c_str()};
    CHECK(run_cli(4, missing_file, out, err) == kExitUsage);

    const char* sweep[] = {"dde-stab", "sweep", "--config", cfg_arg.c_str(), "--out", out_arg.c_str()};
    CHECK(run_cli(6, sweep, out, err) == kExitUsage);  // no sweep block
}

TEST_CASE("simulate and verify write their files") {
    const auto dir = scratch("files");
    const auto cfg_path = dir / "cfg.json";
    std::ofstream(cfg_path) << replace(kMinimal, "\"solver\"", "\"oracle\": {\"theta\": [-1, 0.5]},\n  \"solver\"");
    std::ostringstream out, err;
    const std::string cfg_arg = cfg_path.string();
    const std::string out_arg = dir.string();
    const char* sim[] = {"dde-stab", "simulate", "--config", cfg_arg.c_str(), "--out", out_arg.c_str()};
    CHECK(run_cli(6, sim, out, err) == kExitOk);
    CHECK(read(dir / "simulate.csv").rfind("t,x1\n", 0) == 0);
    const char* verify[] = {"dde-stab", "verify", "--config", cfg_arg.c_str(), "--out", out_arg.c_str(), "--seed", "3"};
    CHECK(run_cli(8, verify, out, err) == kExitOk);
    CHECK(read(dir / "verify_report.txt").find("FAIL") == std::string::npos);
}
