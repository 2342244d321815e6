#include "aggro/aggro.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <variant>

#include <json.hpp>

#include "aggro/error.hpp"
#include "aggro/harness.hpp"
#include "aggro/metrics.hpp"
#include "aggro/transport.hpp"

struct aggro_config {
    aggro::ExperimentConfig c;
};

struct aggro_measure {
    std::variant<aggro::Measure1D, aggro::Measure2D> m;
};

namespace {

using json = nlohmann::json;

thread_local std::string last_error;

template <class F>
aggro_status guard(F&& f) {
    try {
        f();
        last_error.clear();
        return AGGRO_OK;
    } catch (const aggro::Error& e) {
        last_error = e.what();
        return static_cast<aggro_status>(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return AGGRO_E_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return AGGRO_E_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) aggro::fail(aggro::Errc::invalid_argument, std::string(what) + " is NULL");
}

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

json rows_json(const std::vector<aggro::ConvergenceRow>& rows) {
    json a = json::array();
    for (const auto& r : rows) {
        json j{{"n", r.n}, {"d1", r.d1}};
        j["ooc"] = r.ooc ? json(*r.ooc) : json(nullptr);
        a.push_back(j);
    }
    return a;
}

}  // namespace

extern "C" {

const char* aggro_version(void) { return "1.0.0"; }

const char* aggro_status_name(aggro_status s) {
    switch (s) {
        case AGGRO_OK: return "ok";
        case AGGRO_E_INVALID: return "invalid_argument";
        case AGGRO_E_DOMAIN: return "domain";
        case AGGRO_E_CFL: return "cfl";
        case AGGRO_E_BOUNDARY: return "boundary";
        case AGGRO_E_NONFINITE: return "nonfinite";
        case AGGRO_E_MASS: return "mass_mismatch";
        case AGGRO_E_CAP: return "cap_exceeded";
        case AGGRO_E_IO: return "io";
        case AGGRO_E_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* aggro_last_error(void) { return last_error.c_str(); }

void aggro_string_free(char* s) { std::free(s); }

aggro_status aggro_config_parse(const char* text, aggro_config** out) {
    return guard([&] {
        need(text, "json");
        need(out, "out");
        *out = nullptr;
        auto* h = new aggro_config{aggro::parse_config(text)};
        *out = h;
    });
}

aggro_status aggro_config_load(const char* path, aggro_config** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        auto* h = new aggro_config{aggro::load_config(path)};
        *out = h;
    });
}

aggro_status aggro_config_update(aggro_config* cfg, const char* patch) {
    return guard([&] {
        need(cfg, "config");
        need(patch, "patch");
        json p;
        try {
            p = json::parse(patch);
        } catch (const json::exception& e) {
            aggro::fail(aggro::Errc::invalid_argument, std::string("patch: ") + e.what());
        }
        if (!p.is_object()) aggro::fail(aggro::Errc::invalid_argument, "patch must be a JSON object");
        json j = json::parse(aggro::dump_config(cfg->c));
        j.merge_patch(p);
        cfg->c = aggro::parse_config(j.dump());
    });
}

aggro_status aggro_config_json(const aggro_config* cfg, char** out) {
    return guard([&] {
        need(cfg, "config");
        need(out, "out");
        *out = dup(aggro::dump_config(cfg->c));
    });
}

int aggro_config_dimension(const aggro_config* cfg) { return cfg ? cfg->c.dimension : 0; }

void aggro_config_free(aggro_config* cfg) { delete cfg; }

aggro_status aggro_run(const aggro_config* cfg, char** summary) {
    return guard([&] {
        need(cfg, "config");
        const aggro::RunSummary s = aggro::run_experiment(cfg->c);
        if (summary) *summary = dup(aggro::summary_json(s));
    });
}

aggro_status aggro_converge(const aggro_config* cfg, int levels, const char* csv_path, char** rows) {
    return guard([&] {
        need(cfg, "config");
        const auto r = aggro::convergence_study(cfg->c, levels);
        if (csv_path) aggro::write_convergence_csv(r, csv_path);
        if (rows) *rows = dup(rows_json(r).dump(2));
    });
}

aggro_status aggro_steady(const aggro_config* cfg, double* d1) {
    return guard([&] {
        need(cfg, "config");
        need(d1, "d1");
        *d1 = aggro::steady_state_distance(cfg->c);
    });
}

aggro_status aggro_energy(const aggro_config* cfg, int levels, char** rows) {
    return guard([&] {
        need(cfg, "config");
        const auto r = aggro::energy_study(cfg->c, levels);
        json a = json::array();
        for (const auto& e : r)
            a.push_back({{"n", e.n}, {"K_hat", e.K_hat}, {"max_increment", e.max_increment}, {"steps", e.steps}});
        if (rows) *rows = dup(a.dump(2));
    });
}

aggro_status aggro_burgers(const aggro_config* cfg, int level, aggro_measure** out) {
    return guard([&] {
        need(cfg, "config");
        need(out, "out");
        *out = nullptr;
        if (level < 1 || level > 24) aggro::fail(aggro::Errc::invalid_argument, "level must lie in [1, 24]");
        *out = new aggro_measure{aggro::burgers_reference(cfg->c, level)};
    });
}

aggro_status aggro_initial(const aggro_config* cfg, int n, aggro_measure** out) {
    return guard([&] {
        need(cfg, "config");
        need(out, "out");
        *out = nullptr;
        if (cfg->c.dimension == 1) *out = new aggro_measure{aggro::initial_measure1d(cfg->c, n)};
        else *out = new aggro_measure{aggro::initial_measure2d(cfg->c, n)};
    });
}

aggro_status aggro_simulate(const aggro_config* cfg, int n, double t, aggro_measure** out) {
    return guard([&] {
        need(cfg, "config");
        need(out, "out");
        *out = nullptr;
        if (!std::isfinite(t)) aggro::fail(aggro::Errc::invalid_argument, "t must be finite");
        if (cfg->c.dimension == 1) *out = new aggro_measure{aggro::simulate1d(cfg->c, n, t)};
        else *out = new aggro_measure{aggro::simulate2d(cfg->c, n, t)};
    });
}

int aggro_measure_dimension(const aggro_measure* m) { return m ? int(m->m.index()) + 1 : 0; }

void aggro_measure_shape(const aggro_measure* m, int* nx, int* ny) {
    int a = 0, b = 0;
    if (m) {
        if (auto* p = std::get_if<aggro::Measure1D>(&m->m)) {
            a = p->grid.n;
            b = 1;
        } else {
            const auto& q = std::get<aggro::Measure2D>(m->m);
            a = q.grid.nx;
            b = q.grid.ny;
        }
    }
    if (nx) *nx = a;
    if (ny) *ny = b;
}

const double* aggro_measure_density(const aggro_measure* m, size_t* count) {
    if (!m) {
        if (count) *count = 0;
        return nullptr;
    }
    const auto& rho = std::visit([](const auto& x) -> const std::vector<double>& { return x.rho; }, m->m);
    if (count) *count = rho.size();
    return rho.data();
}

double aggro_measure_mass(const aggro_measure* m) {
    if (!m) return NAN;
    return std::visit([](const auto& x) { return x.mass(); }, m->m);
}

aggro_status aggro_measure_write_csv(const aggro_measure* m, const char* path) {
    return guard([&] {
        need(m, "measure");
        need(path, "path");
        std::visit([&](const auto& x) { aggro::write_csv(x, path); }, m->m);
    });
}

aggro_status aggro_distance(const aggro_measure* a, const aggro_measure* b, double* d1) {
    return guard([&] {
        need(a, "first measure");
        need(b, "second measure");
        need(d1, "d1");
        if (a->m.index() != b->m.index()) aggro::fail(aggro::Errc::invalid_argument, "measures differ in dimension");
        if (a->m.index() == 0) {
            aggro::Measure1D x = std::get<0>(a->m), y = std::get<0>(b->m);
            if (x.grid.n > y.grid.n) std::swap(x, y);
            if (y.grid.n % x.grid.n != 0) aggro::fail(aggro::Errc::invalid_argument, "grids are not nested");
            *d1 = aggro::d1_1d(x, aggro::aggregate(y, y.grid.n / x.grid.n));
        } else {
            aggro::Measure2D x = std::get<1>(a->m), y = std::get<1>(b->m);
            if (x.grid.nx > y.grid.nx) std::swap(x, y);
            if (y.grid.nx % x.grid.nx != 0 || y.grid.nx / x.grid.nx != y.grid.ny / x.grid.ny)
                aggro::fail(aggro::Errc::invalid_argument, "grids are not nested");
            *d1 = aggro::d1_2d(x, aggro::aggregate(y, y.grid.nx / x.grid.nx));
        }
    });
}

void aggro_measure_free(aggro_measure* m) { delete m; }

}  // extern "C"
