#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "eitmem/config.hpp"
#include "eitmem/errors.hpp"

using namespace eitmem;
using doctest::Approx;

TEST_CASE("empty config yields the defaults") {
    const auto c = parse_config("{}");
    CHECK(c.seed == 1);
    CHECK(c.jobs == 1);
    CHECK(c.ensemble.od == 126.0);
    CHECK(c.control.omega_peak == 7.6);
    CHECK(std::isnan(c.control.off_time));
    CHECK(UnitSystem::to_ns(c.storage_time) == Approx(900.0));
    CHECK(UnitSystem::to_ns(c.dt) == Approx(1.0));
    CHECK(c.pump == PumpShape::gaussian);
}

TEST_CASE("times are read in nanoseconds") {
    const auto c = parse_config(R"({
        "grid": {"dt": 2},
        "control": {"omega_peak": 5, "off_time": 600, "on_time": 1500, "edge_10_90": 50},
        "storage": {"storage_time": 1200, "unbounded_window": true},
        "decay": {"kind": "combined", "tau0": 3000, "gamma12": 0.001},
        "scan": {"storage_time": [0, 1000], "od": [50]},
        "source": {"pump": "constant"},
        "seed": 42, "jobs": 3, "out_dir": "somewhere"
    })");
    CHECK(c.dt == Approx(UnitSystem::from_ns(2.0)));
    CHECK(c.control.off_time == Approx(UnitSystem::from_ns(600.0)));
    CHECK(c.control.edge_10_90 == Approx(UnitSystem::from_ns(50.0)));
    CHECK(c.storage_time == Approx(UnitSystem::from_ns(1200.0)));
    CHECK(c.unbounded_window);
    CHECK(c.decay.kind == DecayModel::Kind::combined);
    CHECK(c.decay.tau0 == Approx(UnitSystem::from_us(3.0)));
    CHECK(c.scan.storage_time[1] == Approx(UnitSystem::from_ns(1000.0)));
    CHECK(c.scan.od == std::vector<double>{50.0});
    CHECK(c.pump == PumpShape::constant);
    CHECK(c.seed == 42);
    CHECK(c.jobs == 3);
    CHECK(c.out_dir == std::filesystem::path("somewhere"));
}

TEST_CASE("unknown keys and wrong types are configuration errors") {
    CHECK_THROWS_AS(parse_config(R"({"bogus": 1})"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"ensemble": {"odd": 3}})"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"ensemble": {"od": "high"}})"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"jobs": -2})"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"source": {"pump": "square"}})"), config_error);
    CHECK_THROWS_AS(parse_config(R"([1, 2])"), config_error);
}

TEST_CASE("invalid values are configuration errors") {
    CHECK_THROWS_AS(parse_config(R"({"ensemble": {"od": -1}})"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"source": {"od1": 0}})"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"grid": {"dt": 0}})"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"jobs": 0})"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"control": {"off_time": 900, "on_time": 100}})"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"stats": {"pair_probability": 1.5}})"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"stats": {"bin": 0.5}})"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"scan": {"od": [500]}})"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"scan": {"omega_min": 5, "omega_max": 2}})"), config_error);
    CHECK_THROWS_AS(parse_config(R"({"decay": {"tau0": 0}})"), config_error);
}

TEST_CASE("JSON syntax errors are parse errors with a byte offset") {
    try {
        parse_config("{\"seed\": 1,, }");
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.position() == 12);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), config_error);
}

TEST_CASE("shipped configs load") {
    const std::filesystem::path dir = EITMEM_CONFIG_DIR;
    int n = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() != ".json") continue;
        CAPTURE(e.path().string());
        CHECK_NOTHROW(load_config(e.path()));
        ++n;
    }
    CHECK(n >= 5);
}
