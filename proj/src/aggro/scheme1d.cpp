#include "aggro/scheme1d.hpp"

#include <algorithm>
#include <cmath>

#include "aggro/error.hpp"

namespace aggro {

FluxKind flux_from_string(const std::string& s) {
    if (s == "lax_friedrichs" || s == "lxf") return FluxKind::lax_friedrichs;
    if (s == "upwind" || s == "upw") return FluxKind::upwind;
    fail(Errc::invalid_argument, "unknown flux '" + s + "'");
}

Order order_from_string(const std::string& s) {
    if (s == "first" || s == "1") return Order::first;
    if (s == "second" || s == "2") return Order::second;
    fail(Errc::invalid_argument, "unknown order '" + s + "'");
}

CMode cmode_from_string(const std::string& s) {
    if (s == "lipschitz") return CMode::lipschitz;
    if (s == "adaptive") return CMode::adaptive;
    fail(Errc::invalid_argument, "unknown c_mode '" + s + "'");
}

std::string to_string(FluxKind f) { return f == FluxKind::lax_friedrichs ? "lxf" : "upw"; }
std::string to_string(Order o) { return o == Order::first ? "1st" : "2nd"; }

Reconstruction1D reconstruct(const std::vector<double>& rho, Order order) {
    const std::size_t n = rho.size();
    Reconstruction1D r;
    r.sigma.assign(n + 1, 0.0);
    r.rho_tilde.assign(n, 0.0);
    r.plus.assign(n + 1, 0.0);
    r.minus.assign(n + 1, 0.0);
    if (order == Order::second)
        for (std::size_t i = 1; i < n; ++i) r.sigma[i] = std::min(rho[i - 1], rho[i]);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = rho[i], sl = r.sigma[i], sr = r.sigma[i + 1];
        r.rho_tilde[i] = p - 0.5 * (sl + sr);
        // plus[i] + minus[i+1] == 2 p holds exactly: 2p - big is a Sterbenz subtraction
        const double d = 0.5 * (sl - sr);
        const double big = p + std::abs(d);
        const double small = 2.0 * p - big;
        r.plus[i] = d >= 0.0 ? big : small;
        r.minus[i + 1] = d >= 0.0 ? small : big;
    }
    return r;
}

std::vector<double> velocities_dense(const std::vector<double>& table, const std::vector<double>& v, double dx) {
    const std::size_t m = v.size();
    const std::size_t n = m - 1;
    if (table.size() != 2 * n + 1) fail(Errc::invalid_argument, "kernel table does not match the grid");
    std::vector<double> a(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double* t = table.data() + n + i;  // t[-j] = table[i - j]
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += *(t - std::ptrdiff_t(j)) * v[j];
        a[i] = dx * s;
    }
    return a;
}

std::vector<double> flux_lxf(const Reconstruction1D& rec, const std::vector<double>& ap, const std::vector<double>& am, double c) {
    const std::size_t m = rec.plus.size();
    std::vector<double> J(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double rp = rec.plus[i], rm = rec.minus[i];
        J[i] = 0.5 * (std::max(ap[i] + c, 0.0) * rp + std::min(am[i] - c, 0.0) * rm);
    }
    return J;
}

std::vector<double> flux_upwind(const Reconstruction1D& rec, const std::vector<double>& ap, const std::vector<double>& am) {
    const std::size_t m = rec.plus.size();
    std::vector<double> J(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i)
        J[i] = std::max(ap[i], 0.0) * rec.plus[i] + std::min(am[i], 0.0) * rec.minus[i];
    return J;
}

Scheme1D::Scheme1D(const Grid1D& grid, const Potential& potential, const FluxConfig& config)
    : grid_(grid), potential_(potential), config_(config) {
    if (!potential_.supports(1)) fail(Errc::invalid_argument, "potential '" + potential_.name() + "' is not one-dimensional");
    if (!(config_.cfl > 0.0 && config_.cfl < 0.5)) fail(Errc::cfl, "1D CFL number must lie in (0, 1/2)");
    table_ = kernel_table(potential_, grid_);
    lip_ = potential_.lipschitz_on(grid_.length());
    if (config_.c_mode == CMode::lipschitz && !std::isfinite(lip_))
        fail(Errc::cfl, "potential '" + potential_.name() + "' has no finite Lipschitz constant on the domain; use c_mode adaptive");
    if (config_.fast) {
        const int n = grid_.n;
        conv_ = std::make_unique<Convolver1D>(n + 1, [this, n](int k) { return table_[std::size_t(k + n)]; });
    }
}

Scheme1D::~Scheme1D() = default;

void Scheme1D::velocities(const Reconstruction1D& rec, std::vector<double>& ap, std::vector<double>& am) {
    if (!conv_) {
        ap = velocities_dense(table_, rec.plus, grid_.dx);
        am = velocities_dense(table_, rec.minus, grid_.dx);
        return;
    }
    const std::size_t m = rec.plus.size();
    ap.resize(m);
    am.resize(m);
    conv_->apply(rec.plus.data(), ap.data());
    conv_->apply(rec.minus.data(), am.data());
    for (std::size_t i = 0; i < m; ++i) {
        ap[i] *= grid_.dx;
        am[i] *= grid_.dx;
    }
}

double Scheme1D::pick_c(const std::vector<double>& ap, const std::vector<double>& am) const {
    double amax = 0.0;
    for (std::size_t i = 0; i < ap.size(); ++i) amax = std::max({amax, std::abs(ap[i]), std::abs(am[i])});
    double c = config_.c_override > 0.0 ? config_.c_override : (config_.c_mode == CMode::lipschitz ? lip_ : amax);
    if (config_.strict && c < amax * (1.0 - 1e-12) - 1e-14)
        fail(Errc::cfl, "LxF coefficient " + std::to_string(c) + " is below max|a| = " + std::to_string(amax));
    return c;
}

std::vector<double> Scheme1D::fluxes(const std::vector<double>& rho) {
    const Reconstruction1D rec = reconstruct(rho, config_.order);
    std::vector<double> ap, am;
    velocities(rec, ap, am);
    double amax = 0.0;
    for (std::size_t i = 0; i < ap.size(); ++i) amax = std::max({amax, std::abs(ap[i]), std::abs(am[i])});
    last_speed_ = amax;
    if (config_.flux == FluxKind::upwind) {
        last_c_ = 0.0;
        return flux_upwind(rec, ap, am);
    }
    last_c_ = pick_c(ap, am);
    return flux_lxf(rec, ap, am, last_c_);
}

void Scheme1D::rhs(const Field& rho, Field& out) {
    if (rho.size() != std::size_t(grid_.n)) fail(Errc::invalid_argument, "state size does not match grid");
    const std::vector<double> J = fluxes(rho);
    out.resize(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) out[i] = (J[i + 1] - J[i]) / grid_.dx;
}

double Scheme1D::max_dt(const Field& rho) {
    if (config_.c_mode == CMode::lipschitz) return config_.cfl * grid_.dx / lip_;
    const Reconstruction1D rec = reconstruct(rho, config_.order);
    std::vector<double> ap, am;
    velocities(rec, ap, am);
    double amax = 0.0;
    for (std::size_t i = 0; i < ap.size(); ++i) amax = std::max({amax, std::abs(ap[i]), std::abs(am[i])});
    return config_.cfl * grid_.dx / std::max(amax, eps_c);
}

void Scheme1D::check(const Field& rho, long step) const {
    SpatialOperator::check(rho, step);
    if (!config_.wall_check) return;
    const int n = grid_.n;
    double left = 0.0, right = 0.0;
    for (int i = 0; i < std::min(2, n); ++i) {
        left += rho[std::size_t(i)];
        right += rho[std::size_t(n - 1 - i)];
    }
    if (grid_.dx * std::max(left, right) > 1e-8)
        fail(Errc::boundary, "mass reached the domain boundary at step " + std::to_string(step) + " (left " +
                                 std::to_string(grid_.dx * left) + ", right " + std::to_string(grid_.dx * right) + ")");
}

Measure1D Scheme1D::spatial_operator(const Measure1D& m) {
    Measure1D out(grid_);
    Field d;
    rhs(m.rho, d);
    out.rho = std::move(d);
    return out;
}

}  // namespace aggro
