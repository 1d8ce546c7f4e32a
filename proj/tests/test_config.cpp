#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"

#include "crystalwalk/config.hpp"
#include "crystalwalk/errors.hpp"

using namespace crystalwalk;

namespace {

std::string write_temp(const std::string& body) {
    const std::string path = "test_config_tmp.json";
    std::ofstream out(path);
    out << body;
    return path;
}

}  // namespace

TEST_CASE("builtin catalogue") {
    CHECK(builtin_names().size() == 4);
    for (const std::string& name : builtin_names()) CHECK_NOTHROW(builtin_config(name));
    CHECK_THROWS_AS(builtin_config("nope"), ConfigError);

    const RunConfig ice = builtin_config("ice-symmetric");
    CHECK(ice.table.kind == LatticeKind::Ice1h);
    CHECK(ice.table.p == 0.2);
    CHECK(ice.table.alpha == 0.5);
    CHECK(ice.table.geometry.a == 1.0);
    CHECK(ice.table.geometry.h == 1.0);
    CHECK(ice.table.ice_rows[0][0] == doctest::Approx(0.8 / 3.0));

    const RunConfig zig = builtin_config("ice-zigzag");
    CHECK(zig.table.p == 0.0);
    CHECK(zig.table.ice_rows[0][0] == 1.0);
}

TEST_CASE("full graphite document round-trips") {
    const RunConfig cfg = parse_config(R"({
        "lattice": "graphite",
        "a": 1.5,
        "h": 0.75,
        "p": 0.4,
        "alpha": 0.25,
        "horizontal": [[[0.2, 0.2, 0.2], [0.5, 0.25, 0.25]],
                       [[0.1, 0.3, 0.2], [0.3, 0.3, 0.4]]],
        "steps": 1234,
        "replicates": 99,
        "seed": 777,
        "mode": "trajectory",
        "trajectory_out": "walk.csv",
        "summary_out": "walk.json",
        "report_out": "report.json"
    })");
    CHECK(cfg.table.kind == LatticeKind::Graphite2h);
    CHECK(cfg.table.geometry.a == 1.5);
    CHECK(cfg.table.geometry.h == 0.75);
    CHECK(cfg.table.p == 0.4);
    CHECK(cfg.table.alpha == 0.25);
    CHECK(cfg.table.graphite_rows[0][1][0] == 0.5);
    CHECK(cfg.table.graphite_rows[1][0][1] == 0.3);
    CHECK(cfg.steps == 1234);
    CHECK(cfg.replicates == 99);
    CHECK(cfg.seed == 777);
    CHECK(cfg.seed_set);
    CHECK(cfg.mode == SimMode::Trajectory);
    CHECK(cfg.trajectory_out == "walk.csv");
    CHECK(cfg.summary_out == "walk.json");
    CHECK(cfg.report_out == "report.json");
}

TEST_CASE("omitted keys fall back to the symmetric defaults") {
    const RunConfig cfg = parse_config(R"({"lattice": "ice", "p": 0.5})");
    CHECK(cfg.table.p == 0.5);
    // Rows re-uniformized against the requested p.
    CHECK(cfg.table.ice_rows[1][2] == doctest::Approx(0.5 / 3.0));
    CHECK(!cfg.seed_set);
    CHECK(cfg.seed == kDefaultSeed);
}

TEST_CASE("unknown keys are rejected by name") {
    try {
        parse_config(R"({"lattice": "ice", "bogus_knob": 3})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bogus_knob") != std::string::npos);
    }
}

TEST_CASE("malformed documents are rejected with context") {
    CHECK_THROWS_AS(parse_config("not json at all"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"([1,2,3])"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"lattice": "diamond"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"mode": "fancy"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"steps": -5})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"replicates": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"p": "many"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"horizontal": [[0.1]]})"), ConfigError);
    // Ice document with a graphite-shaped horizontal block.
    CHECK_THROWS_AS(parse_config(R"({"lattice": "ice",
        "horizontal": [[[0.2,0.2,0.2],[0.4,0.3,0.3]],[[0.2,0.2,0.2],[0.4,0.3,0.3]]]})"),
                    ConfigError);
}

TEST_CASE("row normalization violations surface as config errors") {
    try {
        parse_config(R"({"lattice": "ice", "p": 0.2,
                         "horizontal": [[0.5, 0.5, 0.5], [0.3, 0.3, 0.2]]})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row") != std::string::npos);
        CHECK(msg.find("i=0") != std::string::npos);
    }
}

TEST_CASE("load_config resolves builtin references and files") {
    CHECK(load_config("builtin:graphite-symmetric").table.kind == LatticeKind::Graphite2h);
    CHECK_THROWS_AS(load_config("builtin:whatever"), ConfigError);
    CHECK_THROWS_AS(load_config("no_such_file.json"), ConfigError);

    const std::string path = write_temp(R"({"lattice": "ice", "p": 0.25, "seed": 8})");
    const RunConfig cfg = load_config(path);
    CHECK(cfg.table.p == 0.25);
    CHECK(cfg.seed == 8);
    std::remove(path.c_str());
}
