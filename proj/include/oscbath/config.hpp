// JSON run configuration: strict schema (unknown and duplicate keys are
// errors), physics validation with field-path messages.

#pragma once

#include "oscbath/bath.hpp"
#include "oscbath/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace oscbath {

enum class RunMode { reference, exact, walk, diagnose, sweep };

std::string to_string(RunMode mode);

struct SweepSection {
    std::string param;           // dotted path, e.g. "run.phase_bits"
    std::vector<double> values;
    RunMode point_mode = RunMode::reference;
};

struct RunSection {
    RunMode mode = RunMode::reference;
    double t_final = 1.0;
    double sample_dt = 0.1;
    double epsilon = 1e-2;
    int phase_bits = 8;
    std::uint64_t shots = 4096;
    std::uint64_t seed = 0;
    std::uint64_t resource_cap = std::uint64_t{1} << 22;
};

struct OutputSection {
    std::string dir = "out";
    bool emit_bath = false;
};

struct RunConfig {
    SystemSpec system;
    SpectralModel bath_model;
    Index bath_N = 0;
    Vector x0, p0;
    RunSection run;
    OutputSection output;
    std::optional<SweepSection> sweep;
    std::string canonical_json;  // sorted-key dump used for hashing

    CompositeModel build() const;
};

// Parses and fully validates a config document. Every error message names
// the offending field path.
RunConfig parse_config(const std::string& json_text);

RunConfig load_config(const std::string& path);

// Re-parse with one scalar field overridden (used by sweep grids).
RunConfig override_scalar(const std::string& json_text, const std::string& dotted_path,
                          double value);

}  // namespace oscbath
