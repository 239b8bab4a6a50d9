#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ddestab/lmi.hpp"
#include "ddestab/model.hpp"
#include "ddestab/oracle.hpp"
#include "ddestab/sdp.hpp"

namespace ddestab::cli {

struct SweepAxis {
    std::size_t param = 0;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 1;

    double value(std::size_t i) const {
        return count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
};

struct SweepSpec {
    SweepAxis x;
    SweepAxis y;
};

/// Validated run configuration. See README for the file schema.
struct RunConfig {
    DdeSystem system;
    std::size_t stencil_points = 2;
    std::size_t samples_per_smallest_delay = 1;
    std::optional<Rational> dt;
    std::optional<std::size_t> window;
    ParamBox box;
    double tol = 1e-6;
    std::size_t max_iter = 2000;
    GapForm form = GapForm::Paper;
    bool oracle_enabled = false;
    OracleOptions oracle;
    std::optional<std::vector<double>> theta;  // simulate/verify evaluation point
    std::optional<SweepSpec> sweep;

    AnalyzeOptions analyze_options() const;
    /// oracle.theta when given, else the box center.
    Vector evaluation_point() const;
};

/// Parses the structured text. Syntax errors report line and column; schema
/// violations name the offending field path (e.g. "solver.box").
RunConfig load_config(std::string_view text);
RunConfig load_config_file(const std::filesystem::path& path);

/// Canonical text: fixed key order, zero coefficient matrices omitted.
std::string emit_config(const RunConfig& cfg);

}  // namespace ddestab::cli
