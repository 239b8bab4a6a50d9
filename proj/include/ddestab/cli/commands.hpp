#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ddestab/cli/config.hpp"

namespace ddestab::cli {

enum ExitCode : int {
    kExitOk = 0,        // success / stabilizable
    kExitNegative = 1,  // clean negative verdict
    kExitUsage = 2,     // usage or config error
    kExitNumerical = 3, // internal numerical failure
};

struct CommandContext {
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 0;
    std::ostream* out = nullptr;
};

struct SweepCell {
    double p1 = 0.0;
    double p2 = 0.0;
    double projected_value = 0.0;  // NaN outside case iii
    std::string verdict;           // stable | unstable | boundary
    double rho = 0.0;              // NaN when the transition matrix is singular
    bool agree = true;
};

struct SweepResult {
    SweepSpec spec;
    std::string x_name;
    std::string y_name;
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<SweepCell> cells;  // row-major: x index outer, y index inner
};

/// Evaluates every grid cell (concurrently; merged in row-major order).
SweepResult run_sweep(const RunConfig& cfg, unsigned threads = 0);
std::string sweep_csv(const SweepResult& r);
std::string sweep_svg(const SweepResult& r);

/// Shortest round-trip decimal text.
std::string format_double(double v);

int cmd_weights(const RunConfig& cfg, const CommandContext& ctx);
int cmd_discretize(const RunConfig& cfg, const CommandContext& ctx);
int cmd_classify(const RunConfig& cfg, const CommandContext& ctx);
int cmd_analyze(const RunConfig& cfg, const CommandContext& ctx);
int cmd_sweep(const RunConfig& cfg, const CommandContext& ctx);
int cmd_simulate(const RunConfig& cfg, const CommandContext& ctx);
int cmd_verify(const RunConfig& cfg, const CommandContext& ctx);

/// dde-stab <command> --config <path> [--out <dir>] [--seed <u64>] [--form paper|transposed]
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ddestab::cli
