#include "aggro/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "aggro/burgers.hpp"
#include "aggro/error.hpp"
#include "aggro/metrics.hpp"
#include "aggro/scheme2d.hpp"

namespace aggro {

using nlohmann::json;

namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double def) {
    auto it = p.find(key);
    return it == p.end() ? def : it->second;
}

void only_keys(const std::map<std::string, double>& p, std::initializer_list<const char*> keys, const std::string& what) {
    for (const auto& kv : p) {
        bool ok = false;
        for (const char* k : keys) ok = ok || kv.first == k;
        if (!ok) fail(Errc::invalid_argument, "initial condition '" + what + "' has no parameter '" + kv.first + "'");
    }
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct Blob {
    double x0, y0, C, w;
};

std::vector<Blob> blobs_of(const ExperimentConfig& c) {
    const auto& p = c.initial_params;
    if (c.initial == "blob") {
        only_keys(p, {"x0", "y0", "C"}, c.initial);
        return {{param(p, "x0", 0.75), param(p, "y0", 0.75), param(p, "C", 10.0), 1.0}};
    }
    if (c.initial == "table5_blob") {
        only_keys(p, {}, c.initial);
        return {{1.0, 1.0, 36.0, 1.0}};
    }
    if (c.initial == "three_blobs") {
        only_keys(p, {"C"}, c.initial);
        const double C = param(p, "C", 100.0);
        return {{0.25, 1.0 / 3.0, C, 1.0}, {0.8, 0.7, C, 1.0}, {0.4, 0.6, C, 0.9}};
    }
    fail(Errc::invalid_argument, "unknown 2D initial condition '" + c.initial + "'");
}

// integral of exp(-C (x-x0)^2) over [a, b]
double gauss_integral(double C, double x0, double a, double b) {
    const double s = std::sqrt(C);
    return 0.5 * std::sqrt(M_PI / C) * (std::erf(s * (b - x0)) - std::erf(s * (a - x0)));
}

struct Profile1D {
    Density1D f;
    std::vector<double> breaks;
};

Profile1D profile1d(const ExperimentConfig& c) {
    const auto& p = c.initial_params;
    if (c.initial == "gaussian36") {
        only_keys(p, {"a", "x0"}, c.initial);
        const double a = param(p, "a", 36.0), x0 = param(p, "x0", 0.0);
        return {[a, x0](double x) { return std::exp(-a * (x - x0) * (x - x0)) / std::sqrt(M_PI); }, {}};
    }
    if (c.initial == "cosine_bump") {
        only_keys(p, {"w", "x0"}, c.initial);
        const double w = param(p, "w", 0.3), x0 = param(p, "x0", 0.0);
        if (!(w > 0.0)) fail(Errc::invalid_argument, "cosine_bump: w must be positive");
        return {[w, x0](double x) {
                    const double s = x - x0;
                    return std::abs(s) <= w ? M_PI / (4.0 * w) * std::cos(M_PI * s / (2.0 * w)) : 0.0;
                },
                {x0 - w, x0 + w}};
    }
    if (c.initial == "smooth_bump") {
        only_keys(p, {"R", "x0"}, c.initial);
        const double R = param(p, "R", 0.5), x0 = param(p, "x0", 0.0);
        if (!(R > 0.0)) fail(Errc::invalid_argument, "smooth_bump: R must be positive");
        return {[R, x0](double x) {
                    const double s = (x - x0) / R;
                    return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
                },
                {x0 - R, x0 + R}};
    }
    fail(Errc::invalid_argument, "unknown 1D initial condition '" + c.initial + "'");
}

}  // namespace

double ExperimentConfig::time_scale() const { return mass_time_unit ? raw_mass(*this) : 1.0; }

Grid1D ExperimentConfig::grid1d(int n) const {
    if (!(domain[1] > domain[0])) fail(Errc::invalid_argument, "domain must satisfy a < b");
    return Grid1D::span(domain[0], domain[1], n);
}

Grid2D ExperimentConfig::grid2d(int n) const {
    if (!(domain[1] > domain[0]) || !(domain[3] > domain[2])) fail(Errc::invalid_argument, "domain must satisfy a < b");
    return Grid2D::span(domain[0], domain[1], domain[2], domain[3], n, n);
}

FluxConfig ExperimentConfig::flux_config() const {
    FluxConfig f;
    f.flux = flux;
    f.order = order;
    f.c_mode = c_mode;
    f.cfl = cfl;
    f.c_override = c_value;
    f.fast = fast;
    f.wall_check = wall_check;
    return f;
}

namespace {

std::map<std::string, double> read_params(const json& j) {
    std::map<std::string, double> out;
    if (j.is_null()) return out;
    if (!j.is_object()) fail(Errc::invalid_argument, "params must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = it.value().get<double>();
    return out;
}

std::string order_name(const json& j) { return j.is_number() ? std::to_string(j.get<int>()) : j.get<std::string>(); }

void validate(const ExperimentConfig& c) {
    if (c.dimension != 1 && c.dimension != 2) fail(Errc::invalid_argument, "dimension must be 1 or 2");
    if (c.n_cells < 2) fail(Errc::invalid_argument, "n_cells must be at least 2");
    if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) fail(Errc::invalid_argument, "t_end must be finite and nonnegative");
    if (!(c.cfl > 0.0)) fail(Errc::invalid_argument, "cfl must be positive");
    for (std::size_t k = 0; k < c.snapshot_times.size(); ++k) {
        const double s = c.snapshot_times[k];
        if (!(s >= 0.0 && s <= c.t_end)) fail(Errc::invalid_argument, "snapshot times must lie in [0, t_end]");
        if (k > 0 && s < c.snapshot_times[k - 1]) fail(Errc::invalid_argument, "snapshot times must be sorted");
    }
    static const std::vector<std::string> kinds{"none", "burgers_fine", "self_fine", "particle_oracle", "closed_form",
                                                "exact_steady"};
    if (std::find(kinds.begin(), kinds.end(), c.reference.kind) == kinds.end())
        fail(Errc::invalid_argument, "unknown reference kind '" + c.reference.kind + "'");
    const Potential p = Potential::make(c.potential, c.potential_params);
    if (!p.supports(c.dimension)) fail(Errc::invalid_argument, "potential '" + c.potential + "' is two-dimensional");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(Errc::invalid_argument, std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c;
    try {
        c.dimension = j.value("dimension", 1);
        if (c.dimension == 2) {
            c.domain = {0.0, 2.0, 0.0, 2.0};
            c.integrator = IntegratorKind::heun;
            c.cfl = 0.2;
            c.initial = "table5_blob";
        }
        if (j.contains("domain")) {
            const auto d = j.at("domain").get<std::vector<double>>();
            if (d.size() == 2) c.domain = {d[0], d[1], d[0], d[1]};
            else if (d.size() == 4) c.domain = {d[0], d[1], d[2], d[3]};
            else fail(Errc::invalid_argument, "domain must have 2 or 4 entries");
        }
        c.n_cells = j.value("n_cells", c.n_cells);
        if (j.contains("potential")) {
            const auto& p = j.at("potential");
            if (p.is_string()) {
                c.potential = p.get<std::string>();
            } else {
                c.potential = p.at("name").get<std::string>();
                if (p.contains("params")) c.potential_params = read_params(p.at("params"));
            }
        }
        if (j.contains("initial")) {
            const auto& p = j.at("initial");
            if (p.is_string()) {
                c.initial = p.get<std::string>();
            } else {
                c.initial = p.at("name").get<std::string>();
                if (p.contains("params")) c.initial_params = read_params(p.at("params"));
                c.normalize = p.value("normalize", true);
            }
        }
        if (j.contains("flux")) c.flux = flux_from_string(j.at("flux").get<std::string>());
        if (j.contains("order")) c.order = order_from_string(order_name(j.at("order")));
        if (j.contains("integrator")) c.integrator = integrator_from_string(j.at("integrator").get<std::string>());
        c.cfl = j.value("cfl", c.cfl);
        if (j.contains("c_mode")) c.c_mode = cmode_from_string(j.at("c_mode").get<std::string>());
        c.c_value = j.value("c", 0.0);
        if (c.c_value < 0.0) fail(Errc::invalid_argument, "c must be nonnegative");
        c.fast = j.value("fast", c.fast);
        c.wall_check = j.value("wall_check", c.wall_check);
        c.t_end = j.value("t_end", 0.0);
        if (j.contains("snapshot_times")) c.snapshot_times = j.at("snapshot_times").get<std::vector<double>>();
        const std::string unit = j.value("time_unit", std::string("1"));
        if (unit == "M") c.mass_time_unit = true;
        else if (unit != "1") fail(Errc::invalid_argument, "time_unit must be \"1\" or \"M\"");
        if (j.contains("reference")) {
            const auto& r = j.at("reference");
            if (r.is_string()) {
                c.reference.kind = r.get<std::string>();
            } else {
                c.reference.kind = r.value("kind", std::string("none"));
                c.reference.level = r.value("level", c.reference.level);
                c.reference.name = r.value("name", std::string());
                c.reference.project = r.value("project", true);
            }
        }
        c.energy = j.value("energy", false);
        if (j.contains("output")) {
            const auto& o = j.at("output");
            c.output_dir = o.value("dir", c.output_dir);
            c.prefix = o.value("prefix", c.prefix);
        }
    } catch (const json::exception& e) {
        fail(Errc::invalid_argument, std::string("bad config field: ") + e.what());
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(Errc::io, "cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c) {
    static const char* kinds[] = {"euler", "heun", "ssprk3"};
    json j;
    j["dimension"] = c.dimension;
    if (c.dimension == 1) j["domain"] = {c.domain[0], c.domain[1]};
    else j["domain"] = {c.domain[0], c.domain[1], c.domain[2], c.domain[3]};
    j["n_cells"] = c.n_cells;
    j["potential"] = {{"name", c.potential}, {"params", c.potential_params}};
    j["initial"] = {{"name", c.initial}, {"params", c.initial_params}, {"normalize", c.normalize}};
    j["flux"] = to_string(c.flux);
    j["order"] = c.order == Order::first ? "first" : "second";
    j["integrator"] = kinds[int(c.integrator)];
    j["cfl"] = c.cfl;
    j["c_mode"] = c.c_mode == CMode::lipschitz ? "lipschitz" : "adaptive";
    if (c.c_value > 0.0) j["c"] = c.c_value;
    j["fast"] = c.fast;
    j["wall_check"] = c.wall_check;
    j["t_end"] = c.t_end;
    j["snapshot_times"] = c.snapshot_times;
    j["time_unit"] = c.mass_time_unit ? "M" : "1";
    j["reference"] = {{"kind", c.reference.kind}, {"level", c.reference.level}, {"name", c.reference.name},
                      {"project", c.reference.project}};
    j["energy"] = c.energy;
    j["output"] = {{"dir", c.output_dir}, {"prefix", c.prefix}};
    return j.dump(2);
}

std::vector<std::string> initial_catalogue() {
    return {"gaussian36", "cosine_bump", "smooth_bump", "two_dirac", "dlv_pair", "blob", "three_blobs", "table5_blob"};
}

bool initial_is_atomic(const ExperimentConfig& c) { return c.initial == "two_dirac" || c.initial == "dlv_pair"; }

namespace {

std::vector<Atom1D> raw_atoms(const ExperimentConfig& c) {
    const auto& p = c.initial_params;
    only_keys(p, {"x1", "x2", "m1", "m2"}, c.initial);
    const double x = c.initial == "dlv_pair" ? 0.25 : 0.5;
    return {{param(p, "x1", -x), param(p, "m1", 0.5)}, {param(p, "x2", x), param(p, "m2", 0.5)}};
}

}  // namespace

double raw_mass(const ExperimentConfig& c) {
    if (c.dimension == 2) {
        double M = 0.0;
        for (const auto& b : blobs_of(c))
            M += b.w * gauss_integral(b.C, b.x0, c.domain[0], c.domain[1]) * gauss_integral(b.C, b.y0, c.domain[2], c.domain[3]);
        return M;
    }
    if (initial_is_atomic(c)) {
        double M = 0.0;
        for (const auto& a : raw_atoms(c)) M += a.m;
        return M;
    }
    const Profile1D pr = profile1d(c);
    const Measure1D fine = project_density(pr.f, c.grid1d(1 << 14), pr.breaks);
    return fine.mass();
}

std::vector<Atom1D> initial_atoms1d(const ExperimentConfig& c) {
    if (!initial_is_atomic(c)) fail(Errc::invalid_argument, "initial condition '" + c.initial + "' is not atomic");
    std::vector<Atom1D> a = raw_atoms(c);
    for (const auto& x : a)
        if (!(x.m > 0.0) || !std::isfinite(x.x)) fail(Errc::invalid_argument, "atoms need positive mass and finite position");
    if (c.normalize) {
        const double M = a[0].m + a[1].m;
        for (auto& x : a) x.m /= M;
    }
    return a;
}

Measure1D initial_measure1d(const ExperimentConfig& c, int n) {
    const Grid1D g = c.grid1d(n);
    Measure1D m;
    if (initial_is_atomic(c)) {
        m = project_atoms(initial_atoms1d(c), g);
    } else {
        const Profile1D pr = profile1d(c);
        m = project_density(pr.f, g, pr.breaks);
        if (c.normalize) normalize(m);
    }
    return m;
}

Measure2D initial_measure2d(const ExperimentConfig& c, int n) {
    const std::vector<Blob> bl = blobs_of(c);
    Measure2D m = project_density(
        [&bl](double x, double y) {
            double s = 0.0;
            for (const auto& b : bl) s += b.w * std::exp(-b.C * ((x - b.x0) * (x - b.x0) + (y - b.y0) * (y - b.y0)));
            return s;
        },
        c.grid2d(n));
    if (c.normalize) normalize(m);
    return m;
}

namespace {

template <class Atom, class Vel>
std::vector<Atom> rk4_particles(std::vector<Atom> atoms, double t_end, const ParticleOptions& opt, Vel velocity,
                                bool (*close)(const Atom&, const Atom&, double), void (*merge)(Atom&, const Atom&)) {
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) fail(Errc::invalid_argument, "t_end must be finite and nonnegative");
    if (t_end == 0.0 || atoms.size() < 2) return atoms;
    const long steps = std::lround(1.0 / opt.step_fraction);
    const double h = t_end / double(steps);
    auto join = [&]() {
        std::vector<Atom> out;
        for (const auto& a : atoms) {
            bool done = false;
            for (auto& b : out)
                if (close(a, b, opt.merge_distance)) {
                    merge(b, a);
                    done = true;
                    break;
                }
            if (!done) out.push_back(a);
        }
        atoms.swap(out);
    };
    join();
    for (long s = 0; s < steps; ++s) {
        const auto k1 = velocity(atoms);
        auto shifted = [&](const decltype(k1)& k, double f) {
            std::vector<Atom> y = atoms;
            for (std::size_t i = 0; i < y.size(); ++i) k[i].apply(y[i], f * h);
            return y;
        };
        const auto k2 = velocity(shifted(k1, 0.5));
        const auto k3 = velocity(shifted(k2, 0.5));
        const auto k4 = velocity(shifted(k3, 1.0));
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            auto v = k1[i];
            v.combine(k2[i], k3[i], k4[i]);
            v.apply(atoms[i], h);
            if (!v.finite(atoms[i])) fail(Errc::nonfinite, "particle position became non-finite");
        }
        join();
    }
    return atoms;
}

struct V1 {
    double v;
    void apply(Atom1D& a, double h) const { a.x += h * v; }
    void combine(const V1& b, const V1& c, const V1& d) { v = (v + 2.0 * b.v + 2.0 * c.v + d.v) / 6.0; }
    bool finite(const Atom1D& a) const { return std::isfinite(a.x); }
};

struct V2 {
    double vx, vy;
    void apply(Atom2D& a, double h) const {
        a.x += h * vx;
        a.y += h * vy;
    }
    void combine(const V2& b, const V2& c, const V2& d) {
        vx = (vx + 2.0 * b.vx + 2.0 * c.vx + d.vx) / 6.0;
        vy = (vy + 2.0 * b.vy + 2.0 * c.vy + d.vy) / 6.0;
    }
    bool finite(const Atom2D& a) const { return std::isfinite(a.x) && std::isfinite(a.y); }
};

bool close1(const Atom1D& a, const Atom1D& b, double eps) { return std::abs(a.x - b.x) < eps; }
void merge1(Atom1D& into, const Atom1D& a) {
    const double m = into.m + a.m;
    into.x = (into.m * into.x + a.m * a.x) / m;
    into.m = m;
}
bool close2(const Atom2D& a, const Atom2D& b, double eps) { return std::hypot(a.x - b.x, a.y - b.y) < eps; }
void merge2(Atom2D& into, const Atom2D& a) {
    const double m = into.m + a.m;
    into.x = (into.m * into.x + a.m * a.x) / m;
    into.y = (into.m * into.y + a.m * a.y) / m;
    into.m = m;
}

}  // namespace

std::vector<Atom1D> particle_oracle(const std::vector<Atom1D>& atoms, const Potential& p, double t_end,
                                    const ParticleOptions& opt) {
    for (const auto& a : atoms)
        if (!std::isfinite(a.x) || !std::isfinite(a.m)) fail(Errc::nonfinite, "non-finite atom");
    auto vel = [&p](const std::vector<Atom1D>& y) {
        std::vector<V1> v(y.size(), V1{0.0});
        for (std::size_t k = 0; k < y.size(); ++k)
            for (std::size_t l = 0; l < y.size(); ++l)
                if (l != k) v[k].v -= y[l].m * p.grad(y[k].x - y[l].x);
        return v;
    };
    return rk4_particles<Atom1D>(atoms, t_end, opt, vel, close1, merge1);
}

std::vector<Atom2D> particle_oracle(const std::vector<Atom2D>& atoms, const Potential& p, double t_end,
                                    const ParticleOptions& opt) {
    for (const auto& a : atoms)
        if (!std::isfinite(a.x) || !std::isfinite(a.y) || !std::isfinite(a.m)) fail(Errc::nonfinite, "non-finite atom");
    auto vel = [&p](const std::vector<Atom2D>& y) {
        std::vector<V2> v(y.size(), V2{0.0, 0.0});
        for (std::size_t k = 0; k < y.size(); ++k)
            for (std::size_t l = 0; l < y.size(); ++l)
                if (l != k) {
                    const auto g = p.grad(y[k].x - y[l].x, y[k].y - y[l].y);
                    v[k].vx -= y[l].m * g[0];
                    v[k].vy -= y[l].m * g[1];
                }
        return v;
    };
    return rk4_particles<Atom2D>(atoms, t_end, opt, vel, close2, merge2);
}

std::vector<Atom1D> closed_form_atoms(const ExperimentConfig& c, double t) {
    const std::vector<Atom1D> a = initial_atoms1d(c);
    if (c.dimension != 1 || a.size() != 2) fail(Errc::invalid_argument, "closed form needs two atoms in 1D");
    const Potential p = Potential::make(c.potential, c.potential_params);
    Atom1D l = a[0], r = a[1];
    if (l.x > r.x) std::swap(l, r);
    if (p.kind() == PotentialKind::dlv) {
        // symmetric pair inside the quadratic core: separation shrinks like exp(-4 (m_l + m_r) t)
        if (l.m != r.m || l.x != -r.x || r.x - l.x > 1.0) fail(Errc::invalid_argument, "closed form needs a symmetric pair within |x| <= 1/2");
        const double x = r.x * std::exp(-4.0 * (l.m + r.m) * t);
        return {{-x, l.m}, {x, r.m}};
    }
    if (p.kind() == PotentialKind::abs) {
        const double s = p.grad(1.0);
        const double meet = (r.x - l.x) / (s * (l.m + r.m));
        if (s > 0.0 && t >= meet) {
            const double com = (l.m * l.x + r.m * r.x) / (l.m + r.m);
            return {{com, l.m + r.m}};
        }
        return {{l.x + s * r.m * t, l.m}, {r.x - s * l.m * t, r.m}};
    }
    fail(Errc::invalid_argument, "no closed form for potential '" + c.potential + "'");
}

std::vector<ConvergenceRow> with_ooc(const std::vector<int>& n, const std::vector<double>& err) {
    if (n.size() != err.size()) fail(Errc::invalid_argument, "resolution and error lists differ in length");
    std::vector<ConvergenceRow> rows;
    for (std::size_t k = 0; k < n.size(); ++k) {
        ConvergenceRow r{n[k], err[k], std::nullopt};
        if (k > 0) {
            if (n[k] != 2 * n[k - 1]) fail(Errc::invalid_argument, "resolutions must double per row");
            r.ooc = std::log2(err[k - 1] / err[k]);
        }
        rows.push_back(r);
    }
    return rows;
}

double fitted_order(const std::vector<ConvergenceRow>& rows) {
    if (rows.size() < 2) fail(Errc::invalid_argument, "a fit needs at least two rows");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& r : rows) {
        const double x = -std::log(double(r.n)), y = std::log(r.d1);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double k = double(rows.size());
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

Measure1D simulate1d(const ExperimentConfig& c, int n, double t) {
    if (c.dimension != 1) fail(Errc::invalid_argument, "simulate1d needs a 1D config");
    Measure1D m = initial_measure1d(c, n);
    Scheme1D s(m.grid, Potential::make(c.potential, c.potential_params), c.flux_config());
    const auto snaps = integrate(c.integrator, s, m.rho, t < 0.0 ? c.final_time() : t, {});
    m.rho = snaps.back().state;
    return m;
}

Measure2D simulate2d(const ExperimentConfig& c, int n, double t) {
    if (c.dimension != 2) fail(Errc::invalid_argument, "simulate2d needs a 2D config");
    Measure2D m = initial_measure2d(c, n);
    Scheme2D s(m.grid, Potential::make(c.potential, c.potential_params), c.flux_config());
    const auto snaps = integrate(c.integrator, s, m.rho, t < 0.0 ? c.final_time() : t, {});
    m.rho = snaps.back().state;
    return m;
}

Measure1D burgers_reference(const ExperimentConfig& c, int level) {
    const Potential p = Potential::make(c.potential, c.potential_params);
    if (c.dimension != 1 || p.kind() != PotentialKind::abs)
        fail(Errc::invalid_argument, "the Burgers reference needs W = s|x| in 1D");
    const double sign = p.grad(1.0);
    const Measure1D m = initial_measure1d(c, 1 << level);
    BurgersState u = primitive(m);
    const double M = u.right;
    BurgersOperator op(u.grid, BurgersFlux{sign, M}, u.left, u.right, std::min(c.cfl, 0.5), std::abs(sign) * M);
    const auto snaps = integrate(IntegratorKind::ssprk3, op, u.u, c.final_time(), {});
    u.u = snaps.back().state;
    return difference(u);
}

namespace {

int refinement_factor(int fine, int n) {
    if (fine % n != 0 || fine < n) fail(Errc::invalid_argument, "reference grid does not refine the run grid");
    return fine / n;
}

// fine-grid or atomic reference in 1D, shared across a ladder
struct Reference1D {
    std::optional<Measure1D> fine;
    std::vector<Atom1D> atoms;
};

Reference1D reference1d(const ExperimentConfig& c) {
    Reference1D r;
    const std::string& k = c.reference.kind;
    if (k == "burgers_fine") {
        r.fine = burgers_reference(c, c.reference.level);
    } else if (k == "self_fine") {
        r.fine = simulate1d(c, 1 << c.reference.level);
    } else if (k == "particle_oracle") {
        r.atoms = particle_oracle(initial_atoms1d(c), Potential::make(c.potential, c.potential_params), c.final_time());
    } else if (k == "closed_form") {
        r.atoms = closed_form_atoms(c, c.final_time());
    } else if (k != "exact_steady") {
        fail(Errc::invalid_argument, "no reference configured");
    }
    return r;
}

double error1d(const ExperimentConfig& c, const Reference1D& ref, const Measure1D& run) {
    if (ref.fine) return d1_1d(run, aggregate(*ref.fine, refinement_factor(ref.fine->grid.n, run.grid.n)));
    if (c.reference.kind == "exact_steady") {
        const Moments1D mo = moments(run);
        if (!c.reference.project && c.reference.name == "two_dirac_cooling")
            return d1_1d(mixed_atoms(run), mixed_atoms(steady_atoms1d(c.reference.name, mo.mass, mo.com)));
        const Potential p = Potential::make(c.potential, c.potential_params);
        return d1_1d(run, steady_state1d(c.reference.name, p, run.grid, mo.mass, mo.com));
    }
    if (c.reference.project) return d1_1d(run, project_atoms(ref.atoms, run.grid));
    return d1_1d(mixed_atoms(run), mixed_atoms(ref.atoms));
}

Measure2D reference2d(const ExperimentConfig& c) {
    if (c.reference.kind != "self_fine") fail(Errc::invalid_argument, "2D studies support the self_fine reference only");
    return simulate2d(c, 1 << c.reference.level);
}

}  // namespace

double reference_error(const ExperimentConfig& c, int n) {
    if (c.dimension == 2) {
        if (c.reference.kind == "exact_steady") return steady_state_distance(c);
        const Measure2D fine = reference2d(c);
        return d1_2d(simulate2d(c, n), aggregate(fine, refinement_factor(fine.grid.nx, n)));
    }
    return error1d(c, reference1d(c), simulate1d(c, n));
}

std::vector<ConvergenceRow> convergence_study(const ExperimentConfig& c, int levels) {
    if (levels < 3) fail(Errc::invalid_argument, "a convergence study needs at least three levels");
    if (!is_power_of_two(c.n_cells)) fail(Errc::invalid_argument, "n_cells must be a power of two");
    std::vector<int> ns;
    for (int k = 0; k < levels; ++k) ns.push_back(c.n_cells << k);
    std::vector<double> err;
    if (c.dimension == 1) {
        const Reference1D ref = reference1d(c);
        for (int n : ns) err.push_back(error1d(c, ref, simulate1d(c, n)));
    } else {
        if (c.reference.kind == "exact_steady") {
            for (int n : ns) {
                ExperimentConfig cn = c;
                cn.n_cells = n;
                err.push_back(steady_state_distance(cn));
            }
        } else {
            const Measure2D fine = reference2d(c);
            for (int n : ns) err.push_back(d1_2d(simulate2d(c, n), aggregate(fine, refinement_factor(fine.grid.nx, n))));
        }
    }
    return with_ooc(ns, err);
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::string& path) {
    std::ofstream f(path);
    if (!f) fail(Errc::io, "cannot write " + path);
    f << "n,d1,ooc\n" << std::setprecision(6);
    for (const auto& r : rows) {
        f << r.n << ',' << std::scientific << r.d1 << std::defaultfloat << ',';
        if (r.ooc) f << std::fixed << std::setprecision(3) << *r.ooc << std::defaultfloat << std::setprecision(6);
        f << '\n';
    }
}

std::vector<std::string> steady_catalogue() {
    return {"half_indicator", "two_dirac_cooling", "halfcircle", "delta_ring", "unit_disk"};
}

std::vector<Atom1D> steady_atoms1d(const std::string& name, double mass, double com) {
    if (name != "two_dirac_cooling") fail(Errc::invalid_argument, "steady state '" + name + "' is not atomic");
    return {{com - 0.5, 0.5 * mass}, {com + 0.5, 0.5 * mass}};
}

Measure1D steady_state1d(const std::string& name, const Potential& p, const Grid1D& g, double mass, double com) {
    if (name == "half_indicator") {
        const double a = com - 1.0, b = com + 1.0;
        Measure1D m(g);
        for (int i = 0; i < g.n; ++i) {
            const double len = std::max(0.0, std::min(b, g.point(i + 1)) - std::max(a, g.point(i)));
            m.rho[std::size_t(i)] = 0.5 * mass * len / g.dx;
        }
        if (std::abs(m.mass() - mass) > 1e-12 * mass) fail(Errc::domain, "steady support leaves the grid");
        return m;
    }
    if (name == "two_dirac_cooling") return project_atoms(steady_atoms1d(name, mass, com), g);
    if (name == "halfcircle") {
        if (p.kind() != PotentialKind::log) fail(Errc::invalid_argument, "halfcircle belongs to the logarithmic potential");
        // density (M / (k pi)) sqrt(2k - x^2) on |x| <= sqrt(2k)
        const double k = 1.0 - p.grad(1.0);
        const double R = std::sqrt(2.0 * k), h = mass / (k * M_PI);
        auto F = [R](double x) {
            x = std::clamp(x, -R, R);
            return 0.5 * (x * std::sqrt(R * R - x * x) + R * R * std::asin(x / R));
        };
        Measure1D m(g);
        for (int i = 0; i < g.n; ++i) m.rho[std::size_t(i)] = h * (F(g.point(i + 1) - com) - F(g.point(i) - com)) / g.dx;
        if (std::abs(m.mass() - mass) > 1e-12 * mass) fail(Errc::domain, "steady support leaves the grid");
        return m;
    }
    fail(Errc::invalid_argument, "unknown 1D steady state '" + name + "'");
}

namespace {

// area of the centred disk of radius R inside [a, b] x [c, d]
double disk_rect_area(double R, double a, double b, double c, double d) {
    const double lo = std::max(a, -R), hi = std::min(b, R);
    if (!(hi > lo)) return 0.0;
    std::vector<double> cuts{lo, hi};
    for (double v : {c, d})
        if (std::abs(v) < R) {
            const double x = std::sqrt(R * R - v * v);
            for (double p : {-x, x})
                if (p > lo && p < hi) cuts.push_back(p);
        }
    std::sort(cuts.begin(), cuts.end());
    auto S = [R](double x) {
        x = std::clamp(x, -R, R);
        return 0.5 * (x * std::sqrt(R * R - x * x) + R * R * std::asin(x / R));
    };
    double area = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double u = cuts[k], v = cuts[k + 1];
        if (!(v > u)) continue;
        const double xm = 0.5 * (u + v), sm = std::sqrt(std::max(0.0, R * R - xm * xm));
        const bool top_flat = d < sm, bottom_flat = c > -sm;
        const double up = top_flat ? d : sm, dn = bottom_flat ? c : -sm;
        if (!(up > dn)) continue;
        double val = 0.0;
        if (top_flat) val += d * (v - u);
        else val += S(v) - S(u);
        if (bottom_flat) val -= c * (v - u);
        else val += S(v) - S(u);
        area += val;
    }
    return area;
}

}  // namespace

Measure2D steady_state2d(const std::string& name, const Potential& p, const Grid2D& g, double mass,
                         std::array<double, 2> com) {
    Measure2D m(g);
    if (name == "delta_ring") {
        if (p.kind() != PotentialKind::quartic) fail(Errc::invalid_argument, "delta_ring belongs to the quartic potential");
        const double R = std::sqrt(3.0) / 3.0;
        std::vector<double> th{0.0, 2.0 * M_PI};
        auto add = [&th](double t) {
            t = std::fmod(t, 2.0 * M_PI);
            if (t < 0.0) t += 2.0 * M_PI;
            th.push_back(t);
        };
        for (int i = 0; i <= g.nx; ++i) {
            const double s = (g.x0 + i * g.dx - com[0]) / R;
            if (std::abs(s) <= 1.0) {
                add(std::acos(s));
                add(-std::acos(s));
            }
        }
        for (int j = 0; j <= g.ny; ++j) {
            const double s = (g.y0 + j * g.dy - com[1]) / R;
            if (std::abs(s) <= 1.0) {
                add(std::asin(s));
                add(M_PI - std::asin(s));
            }
        }
        std::sort(th.begin(), th.end());
        const Grid1D gx = g.xaxis(), gy = g.yaxis();
        for (std::size_t k = 0; k + 1 < th.size(); ++k) {
            const double len = th[k + 1] - th[k];
            if (!(len > 0.0)) continue;
            const double t = 0.5 * (th[k] + th[k + 1]);
            const int i = gx.locate(com[0] + R * std::cos(t)), j = gy.locate(com[1] + R * std::sin(t));
            if (i < 0 || j < 0) fail(Errc::domain, "steady ring leaves the grid");
            m.rho[g.idx(i, j)] += mass * len / (2.0 * M_PI) / g.area();
        }
        return m;
    }
    if (name == "unit_disk") {
        if (p.kind() != PotentialKind::log) fail(Errc::invalid_argument, "unit_disk belongs to the logarithmic potential");
        // height M / (pi k) on the disk of radius sqrt(k)
        const double k = 1.0 - p.grad(1.0, 0.0)[0];
        const double R = std::sqrt(k), h = mass / (M_PI * k);
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) {
                const double a = g.x0 + i * g.dx - com[0], c = g.y0 + j * g.dy - com[1];
                m.rho[g.idx(i, j)] = h * disk_rect_area(R, a, a + g.dx, c, c + g.dy) / g.area();
            }
        if (std::abs(m.mass() - mass) > 1e-10 * mass) fail(Errc::domain, "steady disk leaves the grid");
        return m;
    }
    fail(Errc::invalid_argument, "unknown 2D steady state '" + name + "'");
}

double steady_state_distance(const ExperimentConfig& c) {
    const auto names = steady_catalogue();
    if (std::find(names.begin(), names.end(), c.reference.name) == names.end())
        fail(Errc::invalid_argument, "unknown steady state '" + c.reference.name + "'");
    ExperimentConfig k = c;
    k.reference.kind = "exact_steady";
    if (c.dimension == 1) return error1d(k, Reference1D{}, simulate1d(c, c.n_cells));
    const Measure2D run = simulate2d(c, c.n_cells);
    const Moments2D mo = moments(run);
    const Potential p = Potential::make(c.potential, c.potential_params);
    return d1_2d(run, steady_state2d(c.reference.name, p, run.grid, mo.mass, mo.com));
}

namespace {

template <class M>
double min_of(const M& m) {
    return m.rho.empty() ? 0.0 : *std::min_element(m.rho.begin(), m.rho.end());
}

double com_distance(const Moments1D& a, const Moments1D& b) { return std::abs(a.com - b.com); }
double com_distance(const Moments2D& a, const Moments2D& b) { return std::hypot(a.com[0] - b.com[0], a.com[1] - b.com[1]); }

template <class Meas, class Scheme>
RunSummary run_generic(const ExperimentConfig& c, Meas m, Scheme& scheme, double dx) {
    namespace fs = std::filesystem;
    fs::create_directories(c.output_dir);
    const double scale = c.time_scale();
    const double T = c.t_end * scale;
    std::vector<double> times;
    for (double s : c.snapshot_times) times.push_back(std::min(s * scale, T));
    if (times.empty() || times.back() < T) times.push_back(T);

    RunSummary out;
    out.t_end = T;
    out.lipschitz = scheme.lipschitz();
    const auto mo0 = moments(m);
    out.mass0 = out.mass = mo0.mass;
    out.min_density = min_of(m);

    std::unique_ptr<EnergyEvaluator> energy;
    EnergyReport report;
    if (c.energy) {
        energy = std::make_unique<EnergyEvaluator>(m.grid, scheme.potential(), c.fast);
        report.push(0.0, (*energy)(m.rho));
    }
    Meas probe = m;
    auto observer = [&](const StepInfo& info) {
        out.steps = info.step;
        out.dt = std::max(out.dt, info.dt);
        out.max_speed = std::max(out.max_speed, scheme.last_max_speed());
        probe.rho = info.after;
        const auto mo = moments(probe);
        out.mass = mo.mass;
        out.mass_drift = std::max(out.mass_drift, std::abs(mo.mass - mo0.mass) / mo0.mass);
        out.com_drift = std::max(out.com_drift, com_distance(mo, mo0));
        out.min_density = std::min(out.min_density, min_of(probe));
        if (energy) report.push(info.t, (*energy)(info.after));
    };
    const auto snaps = integrate(c.integrator, scheme, m.rho, T, times, observer);

    for (std::size_t k = 0; k < snaps.size(); ++k) {
        Meas s = m;
        s.rho = snaps[k].state;
        std::ostringstream name;
        name << c.prefix << "_snap" << k << ".csv";
        const std::string path = (fs::path(c.output_dir) / name.str()).string();
        write_csv(s, path);
        out.files.push_back(path);
    }
    if (energy) {
        const std::string path = (fs::path(c.output_dir) / (c.prefix + "_energy.csv")).string();
        report.write_csv(path);
        out.files.push_back(path);
        const Dissipation d = out.dt > 0.0 ? dissipation_check(report, dx, out.dt) : Dissipation{};
        out.K_hat = d.K_hat;
        out.energy_max_increment = d.max_increment;
    }
    const std::string path = (fs::path(c.output_dir) / (c.prefix + "_summary.json")).string();
    out.files.push_back(path);
    std::ofstream f(path);
    if (!f) fail(Errc::io, "cannot write " + path);
    f << summary_json(out) << '\n';
    return out;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& c) {
    const Potential p = Potential::make(c.potential, c.potential_params);
    if (c.dimension == 1) {
        Measure1D m = initial_measure1d(c, c.n_cells);
        Scheme1D s(m.grid, p, c.flux_config());
        return run_generic(c, m, s, m.grid.dx);
    }
    Measure2D m = initial_measure2d(c, c.n_cells);
    Scheme2D s(m.grid, p, c.flux_config());
    return run_generic(c, m, s, m.grid.dx);
}

std::string summary_json(const RunSummary& s) {
    json j;
    j["t_end"] = s.t_end;
    j["steps"] = s.steps;
    j["dt"] = s.dt;
    j["mass_initial"] = s.mass0;
    j["mass_final"] = s.mass;
    j["mass_drift"] = s.mass_drift;
    j["com_drift"] = s.com_drift;
    j["max_speed"] = s.max_speed;
    j["lipschitz"] = s.lipschitz;
    j["min_density"] = s.min_density;
    j["K_hat"] = s.K_hat;
    j["energy_max_increment"] = s.energy_max_increment;
    j["files"] = s.files;
    return j.dump(2);
}

std::vector<EnergyRow> energy_study(const ExperimentConfig& c, int levels) {
    if (levels < 1) fail(Errc::invalid_argument, "an energy study needs at least one level");
    std::vector<EnergyRow> rows;
    for (int k = 0; k < levels; ++k) {
        ExperimentConfig cn = c;
        cn.n_cells = c.n_cells << k;
        cn.energy = true;
        cn.prefix = c.prefix + "_n" + std::to_string(cn.n_cells);
        const RunSummary s = run_experiment(cn);
        rows.push_back({cn.n_cells, s.K_hat, s.energy_max_increment, s.steps});
    }
    return rows;
}

}  // namespace aggro
