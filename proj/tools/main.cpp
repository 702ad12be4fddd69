// Command-line entry point: run | diagnose | sweep over a JSON config.

#include "oscbath/runner.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct CommonFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    bool emit_bath = false;
    std::uint64_t resource_cap = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("config", flags.config_path, "JSON run configuration")->required();
    cmd->add_option("--seed", flags.seed, "override run.seed")
        ->each([&flags](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--out-dir", flags.out_dir, "override output.dir");
    cmd->add_flag("--emit-bath", flags.emit_bath, "append bath columns to the trajectory CSV");
    cmd->add_option("--resource-cap", flags.resource_cap,
                    "override run.resource_cap (walk-state entries)");
}

oscbath::RunOverrides to_overrides(const CommonFlags& flags) {
    oscbath::RunOverrides ov;
    if (flags.seed_set) ov.seed = flags.seed;
    if (!flags.out_dir.empty()) ov.out_dir = flags.out_dir;
    if (flags.emit_bath) ov.emit_bath = true;
    if (flags.resource_cap > 0) ov.resource_cap = flags.resource_cap;
    return ov;
}

int execute(const oscbath::RunConfig& config, const CommonFlags& flags) {
    const oscbath::RunResult res = oscbath::run(config, to_overrides(flags));
    for (const auto& artifact : res.artifacts)
        std::cout << res.output_dir << "/" << artifact << "\n";
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oscillator-network simulation testbed"};
    app.require_subcommand(1);

    CommonFlags run_flags, diag_flags, sweep_flags;
    std::string sweep_param, sweep_values;

    CLI::App* cmd_run = app.add_subcommand("run", "execute the mode named in the config");
    add_common(cmd_run, run_flags);

    CLI::App* cmd_diag = app.add_subcommand("diagnose", "norms, stable rank, arboricity, "
                                                        "decay and recurrence");
    add_common(cmd_diag, diag_flags);

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "grid over one scalar config field");
    add_common(cmd_sweep, sweep_flags);
    cmd_sweep->add_option("--param", sweep_param, "dotted field path, e.g. run.phase_bits")
        ->required();
    cmd_sweep->add_option("--values", sweep_values, "comma-separated values")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            return execute(oscbath::parse_config(slurp(run_flags.config_path)), run_flags);
        }
        if (cmd_diag->parsed()) {
            oscbath::RunConfig config = oscbath::parse_config(slurp(diag_flags.config_path));
            if (config.run.mode != oscbath::RunMode::diagnose) {
                nlohmann::json doc = nlohmann::json::parse(config.canonical_json);
                doc["run"]["mode"] = "diagnose";
                doc.erase("sweep");
                config = oscbath::parse_config(doc.dump());
            }
            return execute(config, diag_flags);
        }
        // sweep: validate the file as-is, then rewrite it as a sweep config.
        oscbath::RunConfig base = oscbath::parse_config(slurp(sweep_flags.config_path));
        nlohmann::json doc = nlohmann::json::parse(base.canonical_json);
        const std::string point_mode = base.run.mode == oscbath::RunMode::sweep
                                           ? to_string(base.sweep->point_mode)
                                           : to_string(base.run.mode);
        nlohmann::json values = nlohmann::json::array();
        std::istringstream vs(sweep_values);
        std::string tok;
        while (std::getline(vs, tok, ',')) {
            if (tok.empty()) continue;
            values.push_back(std::stod(tok));
        }
        if (values.empty()) throw std::invalid_argument("--values: no values given");
        doc["run"]["mode"] = "sweep";
        doc["sweep"] = nlohmann::json{
            {"param", sweep_param}, {"values", values}, {"point_mode", point_mode}};
        return execute(oscbath::parse_config(doc.dump()), sweep_flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
