#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "aggro/aggro.h"

namespace {

int report(aggro_status s) {
    if (s != AGGRO_OK) std::fprintf(stderr, "aggro: %s: %s\n", aggro_status_name(s), aggro_last_error());
    return int(s);
}

void print(char* s) {
    if (!s) return;
    std::printf("%s\n", s);
    aggro_string_free(s);
}

struct Loaded {
    aggro_config* cfg = nullptr;
    ~Loaded() { aggro_config_free(cfg); }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-volume solver for the aggregation equation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(aggro_version()));

    std::string path;
    std::string csv;
    std::string set;
    int levels = 2;
    int level = -1;

    auto* run = app.add_subcommand("run", "simulate and write snapshots, energy log and summary");
    auto* converge = app.add_subcommand("converge", "refinement study against the configured reference");
    auto* steady = app.add_subcommand("steady", "d1 distance between the final state and the exact steady state");
    auto* energy = app.add_subcommand("energy", "discrete energy monotonicity over a refinement ladder");
    auto* burgers = app.add_subcommand("burgers", "reference solution from the integrated Burgers problem");
    for (auto* s : {run, converge, steady, energy, burgers}) {
        s->add_option("config", path, "JSON config file")->required()->check(CLI::ExistingFile);
        s->add_option("--set", set, "JSON object merged into the config");
    }
    converge->add_option("--levels", levels, "number of grids n_cells * 2^k")->required()->check(CLI::Range(1, 16));
    converge->add_option("--csv", csv, "write the table here");
    energy->add_option("--levels", levels, "number of grids")->check(CLI::Range(1, 16));
    burgers->add_option("--level", level, "2^level cells (default: reference.level)")->check(CLI::Range(1, 24));
    burgers->add_option("--out", csv, "write the density as CSV");

    CLI11_PARSE(app, argc, argv);

    Loaded l;
    if (aggro_status s = aggro_config_load(path.c_str(), &l.cfg)) return report(s);
    if (!set.empty())
        if (aggro_status s = aggro_config_update(l.cfg, set.c_str())) return report(s);

    if (*run) {
        char* summary = nullptr;
        const aggro_status s = aggro_run(l.cfg, &summary);
        print(summary);
        return report(s);
    }
    if (*converge) {
        char* rows = nullptr;
        const aggro_status s = aggro_converge(l.cfg, levels, csv.empty() ? nullptr : csv.c_str(), &rows);
        print(rows);
        return report(s);
    }
    if (*steady) {
        double d = 0.0;
        const aggro_status s = aggro_steady(l.cfg, &d);
        if (s == AGGRO_OK) std::printf("d1 %.6e\n", d);
        return report(s);
    }
    if (*energy) {
        char* rows = nullptr;
        const aggro_status s = aggro_energy(l.cfg, levels, &rows);
        print(rows);
        return report(s);
    }
    if (level < 0) {
        char* js = nullptr;
        if (aggro_status s = aggro_config_json(l.cfg, &js)) return report(s);
        const auto j = nlohmann::json::parse(js);
        aggro_string_free(js);
        level = j["reference"].value("level", 12);
    }
    aggro_measure* m = nullptr;
    aggro_status s = aggro_burgers(l.cfg, level, &m);
    if (s == AGGRO_OK) {
        int nx = 0, ny = 0;
        aggro_measure_shape(m, &nx, &ny);
        std::printf("cells %d mass %.15g\n", nx, aggro_measure_mass(m));
        if (!csv.empty()) s = aggro_measure_write_csv(m, csv.c_str());
    }
    aggro_measure_free(m);
    return report(s);
}
