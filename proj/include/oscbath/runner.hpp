// Run orchestration: executes a parsed config and emits trajectory CSV,
// report JSON, and a manifest recording the config hash and achieved
// tolerances. Identical (config, seed) produces byte-identical artifacts.

#pragma once

#include "oscbath/config.hpp"

#include <string>
#include <vector>

namespace oscbath {

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> artifacts;  // paths relative to the output dir
    std::string output_dir;
};

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<bool> emit_bath;
    std::optional<std::uint64_t> resource_cap;
};

RunResult run(const RunConfig& config, const RunOverrides& overrides = {});

// Trajectory CSV schema: header "t,x_1..x_d,p_1..p_d,E_S,E_total"; bath
// columns y_1..y_N,k_1..k_N appended only when emit_bath is set. Values are
// written with 17 significant digits (round-trip exact for doubles).
std::string format_csv_double(double v);

}  // namespace oscbath
