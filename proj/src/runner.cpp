#include "oscbath/runner.hpp"

#include "oscbath/diagnostics.hpp"
#include "oscbath/dynamics.hpp"
#include "oscbath/hamsim.hpp"
#include "oscbath/qstate.hpp"
#include "oscbath/qwalk.hpp"
#include "oscbath/rng.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace oscbath {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string format_csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

constexpr const char* kVersion = "0.1.0";

std::string hash_hex(const std::string& s) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(s.data(), s.size())));
    return buf;
}

void set_number_at(json& doc, const std::string& dotted_path, double value) {
    json* cur = &doc;
    std::string rest = dotted_path;
    while (true) {
        const auto dot = rest.find('.');
        const std::string head = rest.substr(0, dot);
        if (!cur->is_object() || !cur->contains(head))
            throw std::invalid_argument("sweep: no such field \"" + dotted_path + "\"");
        cur = &cur->at(head);
        if (dot == std::string::npos) break;
        rest = rest.substr(dot + 1);
    }
    if (!cur->is_number())
        throw std::invalid_argument("sweep: \"" + dotted_path + "\" is not a numeric scalar");
    if (cur->is_number_integer() || cur->is_number_unsigned()) {
        if (std::nearbyint(value) != value)
            throw std::invalid_argument("sweep: integer field \"" + dotted_path +
                                        "\" requires an integral value");
        *cur = static_cast<std::int64_t>(std::llround(value));
    } else {
        *cur = value;
    }
}

RunConfig apply_overrides(const RunConfig& config, const RunOverrides& ov) {
    if (!ov.seed && !ov.out_dir && !ov.emit_bath && !ov.resource_cap) return config;
    json doc = json::parse(config.canonical_json);
    if (ov.seed) doc["run"]["seed"] = *ov.seed;
    if (ov.resource_cap) doc["run"]["resource_cap"] = *ov.resource_cap;
    if (ov.out_dir || ov.emit_bath) {
        if (!doc.contains("output")) doc["output"] = json::object();
        if (ov.out_dir) doc["output"]["dir"] = *ov.out_dir;
        if (ov.emit_bath) doc["output"]["emit_bath"] = *ov.emit_bath;
    }
    return parse_config(doc.dump());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

struct TrajectoryRow {
    PhaseState state;
    double e_sys = 0.0, e_total = 0.0;
};

std::string trajectory_csv(const CompositeModel& model, const std::vector<TrajectoryRow>& rows,
                           bool emit_bath) {
    std::string out = "t";
    for (Index i = 0; i < model.d(); ++i) out += ",x_" + std::to_string(i + 1);
    for (Index i = 0; i < model.d(); ++i) out += ",p_" + std::to_string(i + 1);
    out += ",E_S,E_total";
    if (emit_bath) {
        for (Index a = 0; a < model.N(); ++a) out += ",y_" + std::to_string(a + 1);
        for (Index a = 0; a < model.N(); ++a) out += ",k_" + std::to_string(a + 1);
    }
    out += "\n";
    for (const auto& row : rows) {
        out += format_csv_double(row.state.t);
        for (Index i = 0; i < model.d(); ++i) out += "," + format_csv_double(row.state.x[i]);
        for (Index i = 0; i < model.d(); ++i) out += "," + format_csv_double(row.state.p[i]);
        out += "," + format_csv_double(row.e_sys);
        out += "," + format_csv_double(row.e_total);
        if (emit_bath) {
            for (Index a = 0; a < model.N(); ++a) out += "," + format_csv_double(row.state.y[a]);
            for (Index a = 0; a < model.N(); ++a) out += "," + format_csv_double(row.state.k[a]);
        }
        out += "\n";
    }
    return out;
}

std::size_t sample_count(const RunSection& run) {
    return static_cast<std::size_t>(std::floor(run.t_final / run.sample_dt + 1e-9)) + 1;
}

json make_manifest(const RunConfig& config, const std::vector<std::string>& artifacts,
                   const json& tolerances) {
    json m;
    m["config_hash"] = hash_hex(config.canonical_json);
    m["config"] = json::parse(config.canonical_json);
    m["mode"] = to_string(config.run.mode);
    m["seed"] = config.run.seed;
    m["version"] = kVersion;
    m["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                         std::to_string(EIGEN_MAJOR_VERSION) + "." +
                         std::to_string(EIGEN_MINOR_VERSION);
    m["artifacts"] = artifacts;
    m["tolerances"] = tolerances;
    return m;
}

RunResult run_reference(const RunConfig& config, const fs::path& dir) {
    const CompositeModel model = config.build();
    const NormalModes nm(model);
    const PhaseState s0 = initial_state(model, config.x0, config.p0);
    const double e0 = total_energy(model, s0);

    std::vector<TrajectoryRow> rows;
    double drift = 0.0;
    const std::size_t n = sample_count(config.run);
    for (std::size_t i = 0; i < n; ++i) {
        TrajectoryRow row;
        row.state = nm.evolve(s0, static_cast<double>(i) * config.run.sample_dt);
        row.e_sys = system_energy(model, row.state);
        row.e_total = total_energy(model, row.state);
        drift = std::max(drift, std::abs(row.e_total - e0) / e0);
        rows.push_back(std::move(row));
    }
    write_text(dir / "trajectory.csv", trajectory_csv(model, rows, config.output.emit_bath));

    RunResult res;
    res.artifacts = {"trajectory.csv", "manifest.json"};
    write_json(dir / "manifest.json",
               make_manifest(config, res.artifacts, json{{"energy_drift_rel", drift}}));
    return res;
}

RunResult run_exact(const RunConfig& config, const fs::path& dir) {
    const CompositeModel model = config.build();
    const ExactPropagator prop(model);
    const PhaseState s0 = initial_state(model, config.x0, config.p0);
    const EncodedState psi0 = encode(model, s0);
    const double e0 = psi0.E0;

    std::vector<TrajectoryRow> rows;
    double drift = 0.0, residue = 0.0;
    const std::size_t n = sample_count(config.run);
    for (std::size_t i = 0; i < n; ++i) {
        const EncodedState psi =
            prop.propagate(psi0, static_cast<double>(i) * config.run.sample_dt);
        residue = std::max(residue, psi.amplitudes.imag().cwiseAbs().maxCoeff());
        TrajectoryRow row;
        row.state = decode(model, psi, 1e-8);
        row.e_sys = system_energy(model, row.state);
        row.e_total = total_energy(model, row.state);
        drift = std::max(drift, std::abs(row.e_total - e0) / e0);
        rows.push_back(std::move(row));
    }
    write_text(dir / "trajectory.csv", trajectory_csv(model, rows, config.output.emit_bath));

    RunResult res;
    res.artifacts = {"trajectory.csv", "manifest.json"};
    write_json(dir / "manifest.json",
               make_manifest(config, res.artifacts,
                             json{{"energy_drift_rel", drift}, {"max_imag_residue", residue}}));
    return res;
}

RunResult run_walk(const RunConfig& config, const fs::path& dir) {
    const CompositeModel model = config.build();
    const WalkSimulator sim(model);
    const PhaseState s0 = initial_state(model, config.x0, config.p0);
    const EncodedState psi0 = encode(model, s0);

    PhaseConfig pc;
    pc.phase_bits = config.run.phase_bits;
    pc.target_eps = config.run.epsilon;
    pc.resource_cap = config.run.resource_cap;

    std::vector<TrajectoryRow> rows;
    json samples = json::array();
    double max_err = 0.0, min_fid = 1.0;
    bool best_effort = false;
    std::uint64_t total_queries = 0;
    const std::size_t n = sample_count(config.run);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * config.run.sample_dt;
        WalkRunReport rep;
        EncodedState psi = sim.simulate(psi0, t, pc, &rep);
        psi.amplitudes = phase_align(psi.amplitudes);
        TrajectoryRow row;
        row.state = decode(model, psi, 1e100);
        row.e_sys = system_energy(model, row.state);
        row.e_total = total_energy(model, row.state);
        rows.push_back(std::move(row));

        samples.push_back(json{{"t", t},
                               {"fidelity", rep.fidelity},
                               {"traj_error", rep.traj_error},
                               {"achieved_eps", rep.achieved_eps},
                               {"norm_leakage", rep.norm_leakage},
                               {"segments", rep.segments},
                               {"walk_queries", rep.walk_queries},
                               {"best_effort", rep.best_effort}});
        max_err = std::max(max_err, rep.traj_error);
        min_fid = std::min(min_fid, rep.fidelity);
        best_effort = best_effort || rep.best_effort;
        total_queries += rep.walk_queries;
    }
    write_text(dir / "trajectory.csv", trajectory_csv(model, rows, config.output.emit_bath));

    const ResourceEstimate est =
        resource_estimate(model, config.run.t_final, config.run.epsilon, config.run.phase_bits);
    json walk_report;
    walk_report["hnorm"] = sim.walk_space().hnorm;
    walk_report["phase_bits"] = config.run.phase_bits;
    walk_report["target_eps"] = config.run.epsilon;
    walk_report["samples"] = samples;
    walk_report["summary"] = json{{"max_traj_error", max_err},
                                  {"min_fidelity", min_fid},
                                  {"best_effort", best_effort},
                                  {"total_walk_queries", total_queries}};
    walk_report["resource_formula"] = json{{"queries", est.formula_queries},
                                           {"repetitions", est.formula_repetitions},
                                           {"arboricity_bound", est.arboricity_bound},
                                           {"segments", est.segments},
                                           {"state_size", est.state_size}};
    write_json(dir / "walk_report.json", walk_report);

    RunResult res;
    res.artifacts = {"trajectory.csv", "walk_report.json", "manifest.json"};
    write_json(dir / "manifest.json",
               make_manifest(config, res.artifacts,
                             json{{"max_traj_error", max_err}, {"min_fidelity", min_fid}}));
    return res;
}

RunResult run_diagnose(const RunConfig& config, const fs::path& dir) {
    const CompositeModel model = config.build();

    TrajectoryOptions topt;
    topt.enabled = true;
    topt.x0 = config.x0;
    topt.p0 = config.p0;
    topt.t_final = config.run.t_final;
    topt.sample_dt = config.run.sample_dt;
    const DiagnosticsReport rep = diagnose(model, topt);

    json j;
    j["spectral_norm"] = rep.spectral_norm;
    j["frobenius_norm_sq"] = rep.frobenius_norm_sq;
    j["frobenius_entrywise"] =
        rep.frobenius_entrywise >= 0.0 ? json(rep.frobenius_entrywise) : json(nullptr);
    j["abs_norm"] = rep.abs_norm;
    j["abs_ratio"] = rep.abs_ratio;
    j["stable_rank"] = rep.stable_rank;
    j["arboricity_bound"] = rep.arboricity_bound;
    if (rep.decay) {
        j["decay"] = json{{"gamma", rep.decay->gamma},
                          {"r2", rep.decay->r2},
                          {"window", json::array({rep.decay->window_lo, rep.decay->window_hi})},
                          {"peaks_used", rep.decay->peaks_used}};
    } else {
        j["decay"] = nullptr;
    }
    j["recurrence_time"] = rep.recurrence_time ? json(*rep.recurrence_time) : json(nullptr);
    write_json(dir / "diagnostics.json", j);

    RunResult res;
    res.artifacts = {"diagnostics.json", "manifest.json"};
    write_json(dir / "manifest.json", make_manifest(config, res.artifacts, json::object()));
    return res;
}

RunResult run_sweep(const RunConfig& config, const fs::path& dir) {
    const SweepSection& sw = *config.sweep;
    json points = json::array();
    RunResult res;
    for (std::size_t i = 0; i < sw.values.size(); ++i) {
        json doc = json::parse(config.canonical_json);
        set_number_at(doc, sw.param, sw.values[i]);
        doc["run"]["mode"] = to_string(sw.point_mode);
        doc["run"]["seed"] = mix_seed(config.run.seed, i);
        doc.erase("sweep");
        char name[32];
        std::snprintf(name, sizeof(name), "point_%03zu", i);
        if (!doc.contains("output")) doc["output"] = json::object();
        doc["output"]["dir"] = (dir / name).string();
        const RunConfig point = parse_config(doc.dump());
        const RunResult pr = run(point);  // points are independent (derived seeds)
        for (const auto& a : pr.artifacts)
            res.artifacts.push_back(std::string(name) + "/" + a);
        points.push_back(json{{"dir", name},
                              {"value", sw.values[i]},
                              {"seed", point.run.seed},
                              {"config_hash", hash_hex(point.canonical_json)}});
    }
    json manifest = make_manifest(config, res.artifacts, json::object());
    manifest["sweep"] = json{{"param", sw.param},
                             {"values", sw.values},
                             {"point_mode", to_string(sw.point_mode)},
                             {"points", points}};
    write_json(dir / "sweep_manifest.json", manifest);
    res.artifacts.push_back("sweep_manifest.json");
    return res;
}

}  // namespace

RunResult run(const RunConfig& config_in, const RunOverrides& overrides) {
    const RunConfig config = apply_overrides(config_in, overrides);
    const fs::path dir(config.output.dir);
    fs::create_directories(dir);

    RunResult res;
    switch (config.run.mode) {
        case RunMode::reference: res = run_reference(config, dir); break;
        case RunMode::exact: res = run_exact(config, dir); break;
        case RunMode::walk: res = run_walk(config, dir); break;
        case RunMode::diagnose: res = run_diagnose(config, dir); break;
        case RunMode::sweep: res = run_sweep(config, dir); break;
    }
    res.output_dir = dir.string();
    return res;
}

}  // namespace oscbath
