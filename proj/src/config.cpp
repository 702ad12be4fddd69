#include "oscbath/config.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace oscbath {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail_at(const std::string& path, const std::string& msg) {
    throw std::invalid_argument("config: " + path + ": " + msg);
}

// Strict parse: duplicate keys anywhere in the document are an error.
json parse_strict(const std::string& text) {
    std::vector<std::set<std::string>> scopes;
    json::parser_callback_t cb = [&scopes](int, json::parse_event_t event, json& parsed) {
        if (event == json::parse_event_t::object_start) {
            scopes.emplace_back();
        } else if (event == json::parse_event_t::object_end) {
            scopes.pop_back();
        } else if (event == json::parse_event_t::key) {
            const auto key = parsed.get<std::string>();
            if (!scopes.back().insert(key).second)
                throw std::invalid_argument("config: duplicate key \"" + key + "\"");
        }
        return true;
    };
    try {
        return json::parse(text, cb);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed,
                const std::set<std::string>& required) {
    if (!obj.is_object()) fail_at(path, "must be an object");
    for (const auto& item : obj.items())
        if (!allowed.count(item.key())) fail_at(path + "." + item.key(), "unknown key");
    for (const auto& key : required)
        if (!obj.contains(key)) fail_at(path + "." + key, "missing required key");
}

double get_number(const json& obj, const std::string& path, const std::string& key) {
    const auto& v = obj.at(key);
    if (!v.is_number()) fail_at(path + "." + key, "must be a number");
    return v.get<double>();
}

double get_number_or(const json& obj, const std::string& path, const std::string& key,
                     double fallback) {
    if (!obj.contains(key)) return fallback;
    return get_number(obj, path, key);
}

std::int64_t get_integer(const json& obj, const std::string& path, const std::string& key,
                         std::int64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        fail_at(path + "." + key, "must be an integer");
    return v.get<std::int64_t>();
}

std::uint64_t get_unsigned(const json& obj, const std::string& path, const std::string& key,
                           std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        fail_at(path + "." + key, "must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

Vector get_vector(const json& obj, const std::string& path, const std::string& key) {
    const auto& v = obj.at(key);
    if (!v.is_array() || v.empty()) fail_at(path + "." + key, "must be a non-empty array");
    Vector out(static_cast<Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) {
            std::ostringstream os;
            os << path << "." << key << "[" << i << "]";
            fail_at(os.str(), "must be a number");
        }
        out[static_cast<Index>(i)] = v[i].get<double>();
    }
    return out;
}

Matrix get_matrix(const json& obj, const std::string& path, const std::string& key) {
    const auto& v = obj.at(key);
    if (!v.is_array() || v.empty()) fail_at(path + "." + key, "must be an array of arrays");
    const auto rows = static_cast<Index>(v.size());
    Matrix out;
    for (Index i = 0; i < rows; ++i) {
        const auto& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != rows)
            fail_at(path + "." + key, "must be a square array of arrays");
        if (i == 0) out.resize(rows, rows);
        for (Index j = 0; j < rows; ++j) {
            const auto& cell = row[static_cast<std::size_t>(j)];
            if (!cell.is_number()) fail_at(path + "." + key, "entries must be numbers");
            out(i, j) = cell.get<double>();
        }
    }
    return out;
}

RunMode parse_mode(const std::string& s, const std::string& path) {
    if (s == "reference") return RunMode::reference;
    if (s == "exact") return RunMode::exact;
    if (s == "walk") return RunMode::walk;
    if (s == "diagnose") return RunMode::diagnose;
    if (s == "sweep") return RunMode::sweep;
    fail_at(path, "mode must be one of reference|exact|walk|diagnose|sweep");
}

SystemSpec parse_system(const json& sys) {
    const std::string path = "model.system";
    check_keys(sys, path, {"masses", "kappa", "star_index"}, {"masses", "kappa"});
    SystemSpec out;
    out.masses = get_vector(sys, path, "masses");
    out.kappa = get_matrix(sys, path, "kappa");
    out.star_index = get_integer(sys, path, "star_index", 0);
    try {
        out.validate();
    } catch (const std::exception& e) {
        fail_at(path, e.what());
    }
    return out;
}

std::pair<SpectralModel, Index> parse_bath(const json& bath) {
    const std::string path = "model.bath";
    check_keys(bath, path,
               {"kind", "N", "nu_max", "coupling_scale", "band", "frequencies", "couplings",
                "csv", "seed"},
               {"kind"});
    if (!bath.at("kind").is_string()) fail_at(path + ".kind", "must be a string");
    const std::string kind = bath.at("kind").get<std::string>();

    SpectralModel model;
    model.seed = get_unsigned(bath, path, "seed", 0);
    Index n = 0;

    auto forbid = [&](const char* key) {
        if (bath.contains(key))
            fail_at(path + "." + key, "not allowed for kind \"" + kind + "\"");
    };

    if (kind == "uniform-flat" || kind == "band-limited") {
        model.kind = kind == "uniform-flat" ? SpectralKind::uniform_flat
                                            : SpectralKind::band_limited;
        forbid("frequencies");
        forbid("couplings");
        forbid("csv");
        if (!bath.contains("N")) fail_at(path + ".N", "missing required key");
        n = get_integer(bath, path, "N", 0);
        if (n < 1) fail_at(path + ".N", "must be at least 1");
        if (!bath.contains("nu_max")) fail_at(path + ".nu_max", "missing required key");
        model.nu_max = get_number(bath, path, "nu_max");
        model.coupling_scale = get_number_or(bath, path, "coupling_scale", 1.0);
        if (kind == "band-limited") {
            if (!bath.contains("band")) fail_at(path + ".band", "missing required key");
            const Vector band = get_vector(bath, path, "band");
            if (band.size() != 2) fail_at(path + ".band", "must be [lo, hi]");
            model.band_lo = band[0];
            model.band_hi = band[1];
        } else {
            forbid("band");
        }
    } else if (kind == "explicit-list") {
        model.kind = SpectralKind::explicit_list;
        forbid("band");
        forbid("coupling_scale");
        if (bath.contains("csv")) {
            if (bath.contains("frequencies") || bath.contains("couplings"))
                fail_at(path, "give either csv or frequencies/couplings, not both");
            if (!bath.at("csv").is_string()) fail_at(path + ".csv", "must be a string path");
            BathSpec loaded;
            try {
                loaded = bath_from_csv(bath.at("csv").get<std::string>());
            } catch (const std::exception& e) {
                fail_at(path + ".csv", e.what());
            }
            model.frequencies = loaded.nu;
            model.couplings = loaded.g;
        } else {
            if (!bath.contains("frequencies"))
                fail_at(path + ".frequencies", "missing required key");
            if (!bath.contains("couplings")) fail_at(path + ".couplings", "missing required key");
            model.frequencies = get_vector(bath, path, "frequencies");
            model.couplings = get_vector(bath, path, "couplings");
        }
        if (model.frequencies.size() != model.couplings.size())
            fail_at(path, "frequencies and couplings must have the same length");
        for (Index a = 0; a < model.frequencies.size(); ++a) {
            if (!(model.frequencies[a] > 0.0)) {
                std::ostringstream os;
                os << path << ".frequencies[" << a << "]";
                fail_at(os.str(), "frequency must be > 0");
            }
        }
        model.nu_max = get_number_or(bath, path, "nu_max", model.frequencies.maxCoeff());
        if (model.frequencies.maxCoeff() > model.nu_max)
            fail_at(path + ".nu_max", "smaller than the largest listed frequency");
        n = model.frequencies.size();
        if (bath.contains("N") && get_integer(bath, path, "N", 0) != n)
            fail_at(path + ".N", "does not match the explicit list length");
        model.coupling_scale = 1.0;  // unused for explicit lists
    } else {
        fail_at(path + ".kind", "must be uniform-flat|band-limited|explicit-list");
    }

    try {
        model.validate();
    } catch (const std::exception& e) {
        fail_at(path, e.what());
    }
    return {model, n};
}

}  // namespace

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::reference: return "reference";
        case RunMode::exact: return "exact";
        case RunMode::walk: return "walk";
        case RunMode::diagnose: return "diagnose";
        case RunMode::sweep: return "sweep";
    }
    return "?";
}

CompositeModel RunConfig::build() const {
    return build_model(system, generate(bath_model, bath_N));
}

RunConfig parse_config(const std::string& json_text) {
    const json doc = parse_strict(json_text);
    check_keys(doc, "(root)", {"model", "initial", "run", "output", "sweep"},
               {"model", "initial", "run"});

    RunConfig cfg;

    const auto& model = doc.at("model");
    check_keys(model, "model", {"system", "bath"}, {"system", "bath"});
    cfg.system = parse_system(model.at("system"));
    std::tie(cfg.bath_model, cfg.bath_N) = parse_bath(model.at("bath"));

    const auto& init = doc.at("initial");
    check_keys(init, "initial", {"x0", "p0"}, {"x0", "p0"});
    cfg.x0 = get_vector(init, "initial", "x0");
    cfg.p0 = get_vector(init, "initial", "p0");
    if (cfg.x0.size() != cfg.system.d()) fail_at("initial.x0", "length must equal d");
    if (cfg.p0.size() != cfg.system.d()) fail_at("initial.p0", "length must equal d");

    const auto& run = doc.at("run");
    check_keys(run, "run",
               {"mode", "t_final", "sample_dt", "epsilon", "phase_bits", "shots", "seed",
                "resource_cap"},
               {"mode", "t_final", "sample_dt"});
    if (!run.at("mode").is_string()) fail_at("run.mode", "must be a string");
    cfg.run.mode = parse_mode(run.at("mode").get<std::string>(), "run.mode");
    cfg.run.t_final = get_number(run, "run", "t_final");
    cfg.run.sample_dt = get_number(run, "run", "sample_dt");
    if (!(cfg.run.t_final > 0.0)) fail_at("run.t_final", "must be > 0");
    if (!(cfg.run.sample_dt > 0.0)) fail_at("run.sample_dt", "must be > 0");
    cfg.run.epsilon = get_number_or(run, "run", "epsilon", 1e-2);
    if (!(cfg.run.epsilon > 0.0 && cfg.run.epsilon < 1.0))
        fail_at("run.epsilon", "must lie in (0,1)");
    const std::int64_t pb = get_integer(run, "run", "phase_bits", 8);
    if (pb < 1 || pb > 30) fail_at("run.phase_bits", "must lie in [1, 30]");
    cfg.run.phase_bits = static_cast<int>(pb);
    cfg.run.shots = get_unsigned(run, "run", "shots", 4096);
    if (cfg.run.shots < 1) fail_at("run.shots", "must be at least 1");
    cfg.run.seed = get_unsigned(run, "run", "seed", 0);
    cfg.run.resource_cap =
        get_unsigned(run, "run", "resource_cap", std::uint64_t{1} << 22);

    if (doc.contains("output")) {
        const auto& out = doc.at("output");
        check_keys(out, "output", {"dir", "emit_bath"}, {});
        if (out.contains("dir")) {
            if (!out.at("dir").is_string()) fail_at("output.dir", "must be a string");
            cfg.output.dir = out.at("dir").get<std::string>();
        }
        if (out.contains("emit_bath")) {
            if (!out.at("emit_bath").is_boolean()) fail_at("output.emit_bath", "must be a boolean");
            cfg.output.emit_bath = out.at("emit_bath").get<bool>();
        }
    }

    if (doc.contains("sweep")) {
        if (cfg.run.mode != RunMode::sweep)
            fail_at("sweep", "section requires run.mode == \"sweep\"");
        const auto& sw = doc.at("sweep");
        check_keys(sw, "sweep", {"param", "values", "point_mode"}, {"param", "values"});
        SweepSection sec;
        if (!sw.at("param").is_string()) fail_at("sweep.param", "must be a string");
        sec.param = sw.at("param").get<std::string>();
        const Vector vals = get_vector(sw, "sweep", "values");
        sec.values.assign(vals.data(), vals.data() + vals.size());
        if (sw.contains("point_mode")) {
            if (!sw.at("point_mode").is_string()) fail_at("sweep.point_mode", "must be a string");
            sec.point_mode = parse_mode(sw.at("point_mode").get<std::string>(), "sweep.point_mode");
        }
        if (sec.point_mode == RunMode::sweep)
            fail_at("sweep.point_mode", "must be a non-sweep mode");
        cfg.sweep = std::move(sec);
    } else if (cfg.run.mode == RunMode::sweep) {
        fail_at("sweep", "missing section for run.mode == \"sweep\"");
    }

    // Physics validation of the composite model, surfaced with field paths.
    try {
        cfg.build();
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        if (what.find("spring matrix") != std::string::npos)
            fail_at("model.system.kappa", what);
        fail_at("model", what);
    }

    cfg.canonical_json = doc.dump();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

RunConfig override_scalar(const std::string& json_text, const std::string& dotted_path,
                          double value) {
    json doc = parse_strict(json_text);
    json* cur = &doc;
    std::string rest = dotted_path, walked;
    while (true) {
        const auto dot = rest.find('.');
        const std::string head = rest.substr(0, dot);
        walked = walked.empty() ? head : walked + "." + head;
        if (!cur->is_object() || !cur->contains(head))
            fail_at(walked, "no such field to override");
        cur = &cur->at(head);
        if (dot == std::string::npos) break;
        rest = rest.substr(dot + 1);
    }
    if (!cur->is_number()) fail_at(dotted_path, "override target must be a numeric scalar");
    if (cur->is_number_integer() || cur->is_number_unsigned()) {
        if (std::nearbyint(value) != value)
            fail_at(dotted_path, "integer field requires an integral value");
        *cur = static_cast<std::int64_t>(std::llround(value));
    } else {
        *cur = value;
    }
    return parse_config(doc.dump());
}

}  // namespace oscbath
