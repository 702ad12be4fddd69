#include "oscbath/config.hpp"

#include "doctest.h"

#include <cstdio>
#include <fstream>

using namespace oscbath;

namespace {

const char* kMinimal = R"({
  "model": {
    "system": {"masses": [1.0], "kappa": [[1.0]]},
    "bath": {"kind": "explicit-list", "frequencies": [1.0], "couplings": [0.1]}
  },
  "initial": {"x0": [1.0], "p0": [0.0]},
  "run": {"mode": "reference", "t_final": 1.0, "sample_dt": 0.1}
})";

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("minimal config parses with defaults") {
    const RunConfig cfg = parse_config(kMinimal);
    CHECK(cfg.run.mode == RunMode::reference);
    CHECK(cfg.bath_N == 1);
    CHECK(cfg.run.phase_bits == 8);
    CHECK(cfg.run.seed == 0);
    CHECK(cfg.output.dir == "out");
    CHECK(!cfg.canonical_json.empty());
    const CompositeModel m = cfg.build();
    CHECK(m.dim() == 4);
}

TEST_CASE("zero frequency names the offending entry") {
    std::string text = kMinimal;
    const auto pos = text.find("[1.0], \"couplings\"");
    text.replace(pos, 5, "[0.0]");
    try {
        parse_config(text);
        FAIL("expected a parse error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("frequencies[0]") != std::string::npos);
    }
}

TEST_CASE("duplicate and unknown keys are rejected") {
    const char* dup = R"({"model": {}, "model": {}, "initial": {}, "run": {}})";
    CHECK_THROWS_WITH_AS(parse_config(dup),
                         doctest::Contains("duplicate key"), std::invalid_argument);

    std::string unknown = kMinimal;
    unknown.insert(unknown.rfind('}'), R"(, "extra": 1)");
    CHECK_THROWS_WITH_AS(parse_config(unknown),
                         doctest::Contains("extra"), std::invalid_argument);
}

TEST_CASE("physics violations carry field paths") {
    std::string text = kMinimal;
    text.replace(text.find("[[1.0]]"), 7, "[[0.0]]");  // K loses positive-definiteness
    CHECK_THROWS_WITH_AS(parse_config(text),
                         doctest::Contains("kappa"), std::invalid_argument);

    std::string bad_star = kMinimal;
    bad_star.replace(bad_star.find("\"kappa\": [[1.0]]"), 16,
                     "\"kappa\": [[1.0]], \"star_index\": 3");
    CHECK_THROWS_WITH_AS(parse_config(bad_star),
                         doctest::Contains("model.system"), std::invalid_argument);

    std::string bad_x0 = kMinimal;
    bad_x0.replace(bad_x0.find("\"x0\": [1.0]"), 11, "\"x0\": [1.0, 2.0]");
    CHECK_THROWS_WITH_AS(parse_config(bad_x0),
                         doctest::Contains("x0"), std::invalid_argument);
}

TEST_CASE("mode and sweep constraints") {
    std::string bad_mode = kMinimal;
    bad_mode.replace(bad_mode.find("\"reference\""), 11, "\"warp\"");
    CHECK_THROWS_WITH_AS(parse_config(bad_mode),
                         doctest::Contains("run.mode"), std::invalid_argument);

    std::string stray_sweep = kMinimal;
    stray_sweep.insert(stray_sweep.rfind('}'),
                       R"(, "sweep": {"param": "run.t_final", "values": [1, 2]})");
    CHECK_THROWS_WITH_AS(parse_config(stray_sweep),
                         doctest::Contains("sweep"), std::invalid_argument);

    std::string sweep_noconf = kMinimal;
    sweep_noconf.replace(sweep_noconf.find("\"reference\""), 11, "\"sweep\"");
    CHECK_THROWS_WITH_AS(parse_config(sweep_noconf),
                         doctest::Contains("sweep"), std::invalid_argument);

    std::string good_sweep = kMinimal;
    good_sweep.replace(good_sweep.find("\"reference\""), 11, "\"sweep\"");
    good_sweep.insert(good_sweep.rfind('}'),
                      R"(, "sweep": {"param": "run.t_final", "values": [1, 2],
                          "point_mode": "exact"})");
    const RunConfig cfg = parse_config(good_sweep);
    REQUIRE(cfg.sweep.has_value());
    CHECK(cfg.sweep->param == "run.t_final");
    CHECK(cfg.sweep->values.size() == 2);
    CHECK(cfg.sweep->point_mode == RunMode::exact);
}

TEST_CASE("uniform-flat bath section") {
    const char* text = R"({
      "model": {
        "system": {"masses": [1.0], "kappa": [[1.0]]},
        "bath": {"kind": "uniform-flat", "N": 8, "nu_max": 2.0, "coupling_scale": 0.5}
      },
      "initial": {"x0": [1.0], "p0": [0.0]},
      "run": {"mode": "exact", "t_final": 1.0, "sample_dt": 0.5}
    })";
    const RunConfig cfg = parse_config(text);
    CHECK(cfg.bath_N == 8);
    const CompositeModel m = cfg.build();
    CHECK(m.bath.nu[7] == 2.0);
    CHECK(m.bath.g[0] == 0.5 / std::sqrt(8.0));
}

TEST_CASE("csv bath source") {
    const std::string path = "config_bath_tmp.csv";
    {
        std::ofstream out(path);
        out << "nu,g\n0.4,0.05\n0.9,0.05\n";
    }
    const std::string text = std::string(R"({
      "model": {
        "system": {"masses": [1.0], "kappa": [[1.0]]},
        "bath": {"kind": "explicit-list", "csv": ")") + path + R"("}
      },
      "initial": {"x0": [1.0], "p0": [0.0]},
      "run": {"mode": "reference", "t_final": 1.0, "sample_dt": 0.1}
    })";
    const RunConfig cfg = parse_config(text);
    CHECK(cfg.bath_N == 2);
    CHECK(cfg.bath_model.frequencies[1] == 0.9);
    std::remove(path.c_str());

    CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains("csv"),
                         std::invalid_argument);  // file gone now
}

TEST_CASE("scalar override") {
    const RunConfig base = parse_config(kMinimal);
    const RunConfig changed = override_scalar(base.canonical_json, "run.t_final", 4.0);
    CHECK(changed.run.t_final == 4.0);

    CHECK_THROWS_WITH_AS(override_scalar(base.canonical_json, "run.nonsense", 1.0),
                         doctest::Contains("nonsense"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(override_scalar(base.canonical_json, "run.mode", 1.0),
                         doctest::Contains("numeric"), std::invalid_argument);
}

TEST_SUITE_END();
