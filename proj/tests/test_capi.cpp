#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "aggro/aggro.h"

namespace {

const char* kOneD = R"({"dimension": 1, "domain": [-1, 1], "n_cells": 64,
    "potential": {"name": "morse-like", "params": {"a": 1}},
    "initial": "smooth_bump", "flux": "upw", "order": 2, "integrator": "ssprk3",
    "cfl": 0.4, "t_end": 0.05})";

struct Config {
    aggro_config* p = nullptr;
    explicit Config(const char* j) { REQUIRE(aggro_config_parse(j, &p) == AGGRO_OK); }
    ~Config() { aggro_config_free(p); }
};

struct Measure {
    aggro_measure* p = nullptr;
    ~Measure() { aggro_measure_free(p); }
};

std::string take(char* s) {
    std::string out = s ? s : "";
    aggro_string_free(s);
    return out;
}

}  // namespace

TEST_CASE("status names and version") {
    CHECK(std::string(aggro_version()).size() > 0);
    CHECK(std::string(aggro_status_name(AGGRO_OK)) == "ok");
    CHECK(std::string(aggro_status_name(AGGRO_E_CFL)) == "cfl");
    CHECK(std::string(aggro_status_name(static_cast<aggro_status>(42))) == "unknown");
}

TEST_CASE("config handles") {
    aggro_config* c = nullptr;
    CHECK(aggro_config_parse("{", &c) == AGGRO_E_INVALID);
    CHECK(c == nullptr);
    CHECK(std::string(aggro_last_error()).size() > 0);
    CHECK(aggro_config_parse(nullptr, &c) == AGGRO_E_INVALID);
    CHECK(aggro_config_load("/nonexistent/cfg.json", &c) != AGGRO_OK);

    Config cfg(kOneD);
    CHECK(std::string(aggro_last_error()).empty());
    CHECK(aggro_config_dimension(cfg.p) == 1);
    CHECK(aggro_config_update(cfg.p, R"({"n_cells": 128})") == AGGRO_OK);
    char* js = nullptr;
    REQUIRE(aggro_config_json(cfg.p, &js) == AGGRO_OK);
    const std::string dumped = take(js);
    CHECK(dumped.find("\"n_cells\": 128") != std::string::npos);
    CHECK(aggro_config_update(cfg.p, "[1]") == AGGRO_E_INVALID);
    CHECK(aggro_config_update(cfg.p, R"({"t_end": -3})") == AGGRO_E_INVALID);
    Config again(dumped.c_str());
    char* js2 = nullptr;
    REQUIRE(aggro_config_json(again.p, &js2) == AGGRO_OK);
    CHECK(take(js2) == dumped);
    CHECK(aggro_config_dimension(nullptr) == 0);
}

TEST_CASE("measures through the C API") {
    Config cfg(kOneD);
    Measure m0, m1, big;
    REQUIRE(aggro_initial(cfg.p, 64, &m0.p) == AGGRO_OK);
    CHECK(aggro_measure_dimension(m0.p) == 1);
    int nx = 0, ny = 0;
    aggro_measure_shape(m0.p, &nx, &ny);
    CHECK(nx == 64);
    CHECK(ny == 1);
    size_t count = 0;
    const double* rho = aggro_measure_density(m0.p, &count);
    REQUIRE(count == 64);
    double mass = 0.0;
    for (size_t i = 0; i < count; ++i) mass += rho[i] * (2.0 / 64.0);
    CHECK(mass == doctest::Approx(aggro_measure_mass(m0.p)).epsilon(1e-14));
    CHECK(aggro_measure_mass(m0.p) == doctest::Approx(1.0).epsilon(1e-13));

    REQUIRE(aggro_simulate(cfg.p, 64, -1.0, &m1.p) == AGGRO_OK);
    CHECK(aggro_measure_mass(m1.p) == doctest::Approx(1.0).epsilon(1e-13));
    double d = -1.0;
    REQUIRE(aggro_distance(m0.p, m1.p, &d) == AGGRO_OK);
    CHECK(d > 0.0);
    REQUIRE(aggro_distance(m0.p, m0.p, &d) == AGGRO_OK);
    CHECK(d == 0.0);

    REQUIRE(aggro_initial(cfg.p, 256, &big.p) == AGGRO_OK);
    REQUIRE(aggro_distance(big.p, m0.p, &d) == AGGRO_OK);
    CHECK(d < 1e-8);

    Measure odd;
    REQUIRE(aggro_initial(cfg.p, 96, &odd.p) == AGGRO_OK);
    CHECK(aggro_distance(odd.p, m0.p, &d) == AGGRO_E_INVALID);
    CHECK(aggro_simulate(cfg.p, 64, NAN, &odd.p) == AGGRO_E_INVALID);

    const auto path = std::filesystem::temp_directory_path() / "aggro_capi_rho.csv";
    CHECK(aggro_measure_write_csv(m1.p, path.c_str()) == AGGRO_OK);
    CHECK(std::filesystem::file_size(path) > 0);
    std::filesystem::remove(path);
    CHECK(aggro_measure_write_csv(m1.p, "/nonexistent/dir/x.csv") == AGGRO_E_IO);

    CHECK(aggro_measure_density(nullptr, &count) == nullptr);
    CHECK(count == 0);
    CHECK(std::isnan(aggro_measure_mass(nullptr)));
}

TEST_CASE("2D measures") {
    Config cfg(R"({"dimension": 2, "domain": [0, 1, 0, 1], "initial": "three_blobs", "potential": "abs"})");
    Measure a, b, one;
    REQUIRE(aggro_initial(cfg.p, 16, &a.p) == AGGRO_OK);
    REQUIRE(aggro_initial(cfg.p, 32, &b.p) == AGGRO_OK);
    CHECK(aggro_measure_dimension(a.p) == 2);
    int nx = 0, ny = 0;
    aggro_measure_shape(b.p, &nx, &ny);
    CHECK(nx == 32);
    CHECK(ny == 32);
    double d = -1.0;
    REQUIRE(aggro_distance(a.p, b.p, &d) == AGGRO_OK);
    CHECK(d >= 0.0);
    CHECK(d < 1e-2);

    Config line(kOneD);
    REQUIRE(aggro_initial(line.p, 16, &one.p) == AGGRO_OK);
    CHECK(aggro_distance(a.p, one.p, &d) == AGGRO_E_INVALID);
}

TEST_CASE("errors carry scheme codes") {
    Config cfg(kOneD);
    REQUIRE(aggro_config_update(cfg.p, R"({"cfl": 0.9})") == AGGRO_OK);
    Measure m;
    const aggro_status s = aggro_simulate(cfg.p, 64, -1.0, &m.p);
    CHECK(s == AGGRO_E_CFL);
    CHECK(m.p == nullptr);
    CHECK(std::string(aggro_last_error()).size() > 0);
}

TEST_CASE("studies") {
    Config cfg(R"({"dimension": 1, "domain": [-1, 1], "n_cells": 32,
        "potential": "abs", "initial": "smooth_bump", "flux": "upw", "order": 2,
        "t_end": 0.05, "reference": {"kind": "burgers_fine", "level": 12}})");
    char* rows = nullptr;
    const auto csv = std::filesystem::temp_directory_path() / "aggro_capi_conv.csv";
    REQUIRE(aggro_converge(cfg.p, 3, csv.c_str(), &rows) == AGGRO_OK);
    const std::string r = take(rows);
    CHECK(r.find("\"ooc\": null") != std::string::npos);
    CHECK(r.find("\"n\": 128") != std::string::npos);
    CHECK(std::filesystem::exists(csv));
    std::filesystem::remove(csv);

    Measure ref;
    REQUIRE(aggro_burgers(cfg.p, 10, &ref.p) == AGGRO_OK);
    CHECK(aggro_measure_mass(ref.p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(aggro_burgers(cfg.p, 0, &ref.p) == AGGRO_E_INVALID);
}

TEST_CASE("steady distance and runs") {
    const auto dir = std::filesystem::temp_directory_path() / "aggro_capi_run";
    std::filesystem::remove_all(dir);
    const std::string j = R"({"domain": [-2, 2], "n_cells": 64, "potential": "attrep",
        "initial": "cosine_bump", "flux": "upw", "t_end": 2, "energy": true,
        "reference": {"kind": "exact_steady", "name": "half_indicator"},
        "output": {"dir": ")" + dir.string() + R"(", "prefix": "c"}})";
    Config cfg(j.c_str());
    double d = -1.0;
    REQUIRE(aggro_steady(cfg.p, &d) == AGGRO_OK);
    CHECK(d > 0.0);
    CHECK(aggro_steady(cfg.p, nullptr) == AGGRO_E_INVALID);
    char* summary = nullptr;
    REQUIRE(aggro_run(cfg.p, &summary) == AGGRO_OK);
    CHECK(take(summary).find("K_hat") != std::string::npos);
    char* rows = nullptr;
    REQUIRE(aggro_energy(cfg.p, 2, &rows) == AGGRO_OK);
    CHECK(take(rows).find("\"n\": 128") != std::string::npos);
    std::filesystem::remove_all(dir);
}
