#include "aggro/scheme2d.hpp"

#include <algorithm>
#include <cmath>

#include "aggro/error.hpp"

namespace aggro {

namespace {

// returns (big, small) with big + small == 2p exactly
inline void split(double p, double d, double& hi, double& lo) {
    const double big = p + std::abs(d);
    const double small = 2.0 * p - big;
    hi = d >= 0.0 ? big : small;
    lo = d >= 0.0 ? small : big;
}

double max_abs(const std::vector<double>& v, double acc) {
    for (double x : v) acc = std::max(acc, std::abs(x));
    return acc;
}

}  // namespace

Reconstruction2D reconstruct2d(const std::vector<double>& rho, int nx, int ny, Order order) {
    if (rho.size() != std::size_t(nx) * std::size_t(ny)) fail(Errc::invalid_argument, "state size does not match grid");
    Reconstruction2D r;
    r.nx = nx;
    r.ny = ny;
    r.sigma.assign(std::size_t(nx + 1) * std::size_t(ny + 1), 0.0);
    r.rho_tilde.assign(rho.size(), 0.0);
    r.east.assign(std::size_t(nx + 1) * std::size_t(ny), 0.0);
    r.west.assign(r.east.size(), 0.0);
    r.north.assign(std::size_t(nx) * std::size_t(ny + 1), 0.0);
    r.south.assign(r.north.size(), 0.0);
    auto v = [&](int p, int q) { return rho[std::size_t(p) * std::size_t(ny) + std::size_t(q)]; };
    if (order == Order::second)
        for (int i = 1; i < nx; ++i)
            for (int j = 1; j < ny; ++j)
                r.sigma[r.gp(i, j)] = std::min(std::min(v(i - 1, j - 1), v(i - 1, j)), std::min(v(i, j - 1), v(i, j)));
    for (int p = 0; p < nx; ++p) {
        for (int q = 0; q < ny; ++q) {
            const double rh = v(p, q);
            const double s00 = r.sigma[r.gp(p, q)], s01 = r.sigma[r.gp(p, q + 1)];
            const double s10 = r.sigma[r.gp(p + 1, q)], s11 = r.sigma[r.gp(p + 1, q + 1)];
            r.rho_tilde[std::size_t(p) * std::size_t(ny) + std::size_t(q)] = rh - 0.25 * ((s00 + s11) + (s01 + s10));
            const double A = 0.25 * ((s00 + s01) - (s10 + s11));
            const double B = 0.25 * ((s00 + s10) - (s01 + s11));
            split(rh, A, r.east[r.xs(p, q)], r.west[r.xs(p + 1, q)]);
            split(rh, B, r.north[r.ys(p, q)], r.south[r.ys(p, q + 1)]);
        }
    }
    return r;
}

std::vector<double> velocities2d_dense(const KernelTable2D& t, bool x_component, const std::vector<double>& v,
                                       int sx, int sy, double area) {
    if (v.size() != std::size_t(sx) * std::size_t(sy)) fail(Errc::invalid_argument, "station array size mismatch");
    if (sx - 1 > t.kx || sy - 1 > t.ky) fail(Errc::invalid_argument, "kernel table too small for station array");
    const std::vector<double>& K = x_component ? t.gx : t.gy;
    std::vector<double> a(v.size(), 0.0);
    for (int i = 0; i < sx; ++i)
        for (int j = 0; j < sy; ++j) {
            double s = 0.0;
            for (int k = 0; k < sx; ++k) {
                const double* row = v.data() + std::size_t(k) * std::size_t(sy);
                const std::size_t base = t.idx(i - k, j);
                for (int l = 0; l < sy; ++l) s += K[base - std::size_t(l)] * row[l];
            }
            a[std::size_t(i) * std::size_t(sy) + std::size_t(j)] = area * s;
        }
    return a;
}

Scheme2D::Scheme2D(const Grid2D& grid, const Potential& potential, const FluxConfig& config)
    : grid_(grid), potential_(potential), config_(config) {
    if (!(config_.cfl > 0.0 && config_.cfl < 0.25)) fail(Errc::cfl, "2D CFL number must lie in (0, 1/4)");
    lip_ = potential_.lipschitz_on(grid_.diameter());
    if (config_.c_mode == CMode::lipschitz && !std::isfinite(lip_))
        fail(Errc::cfl, "potential '" + potential_.name() + "' has no finite Lipschitz constant on the domain; use c_mode adaptive");
    table_ = kernel_table(potential_, grid_);
    if (config_.fast) {
        const int nx = grid_.nx, ny = grid_.ny;
        conv_x_ = std::make_unique<Convolver2D>(nx + 1, ny, [this](int k, int l) { return table_.gx[table_.idx(k, l)]; });
        conv_y_ = std::make_unique<Convolver2D>(nx, ny + 1, [this](int k, int l) { return table_.gy[table_.idx(k, l)]; });
        // the dense table is not needed once the spectra exist
        table_.gx = {};
        table_.gy = {};
    }
}

Scheme2D::~Scheme2D() = default;

Velocities2D Scheme2D::velocities(const Reconstruction2D& rec) {
    const int nx = grid_.nx, ny = grid_.ny;
    const double A = grid_.area();
    Velocities2D a;
    if (!conv_x_) {
        a.east = velocities2d_dense(table_, true, rec.east, nx + 1, ny, A);
        a.west = velocities2d_dense(table_, true, rec.west, nx + 1, ny, A);
        a.north = velocities2d_dense(table_, false, rec.north, nx, ny + 1, A);
        a.south = velocities2d_dense(table_, false, rec.south, nx, ny + 1, A);
        return a;
    }
    a.east.resize(rec.east.size());
    a.west.resize(rec.west.size());
    a.north.resize(rec.north.size());
    a.south.resize(rec.south.size());
    conv_x_->apply(rec.east.data(), a.east.data());
    conv_x_->apply(rec.west.data(), a.west.data());
    conv_y_->apply(rec.north.data(), a.north.data());
    conv_y_->apply(rec.south.data(), a.south.data());
    for (auto* f : {&a.east, &a.west, &a.north, &a.south})
        for (double& x : *f) x *= A;
    return a;
}

void Scheme2D::fluxes(const std::vector<double>& rho, std::vector<double>& jx, std::vector<double>& jy) {
    const int nx = grid_.nx, ny = grid_.ny;
    const Reconstruction2D rec = reconstruct2d(rho, nx, ny, config_.order);
    const Velocities2D a = velocities(rec);
    double amax = max_abs(a.east, 0.0);
    amax = max_abs(a.west, amax);
    amax = max_abs(a.north, amax);
    amax = max_abs(a.south, amax);
    last_speed_ = amax;
    const bool lxf = config_.flux == FluxKind::lax_friedrichs;
    double c = 0.0;
    if (lxf) {
        c = config_.c_override > 0.0 ? config_.c_override : (config_.c_mode == CMode::lipschitz ? lip_ : amax);
        if (config_.strict && c < amax * (1.0 - 1e-12) - 1e-14)
            fail(Errc::cfl, "LxF coefficient " + std::to_string(c) + " is below max|a| = " + std::to_string(amax));
    }
    last_c_ = c;
    jx.assign(rec.east.size(), 0.0);
    jy.assign(rec.north.size(), 0.0);
    for (int i = 1; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const std::size_t s = rec.xs(i, j);
            const double e = rec.east[s], w = rec.west[s];
            jx[s] = lxf ? 0.5 * (std::max(a.east[s] + c, 0.0) * e + std::min(a.west[s] - c, 0.0) * w)
                        : std::max(a.east[s], 0.0) * e + std::min(a.west[s], 0.0) * w;
        }
    for (int i = 0; i < nx; ++i)
        for (int j = 1; j < ny; ++j) {
            const std::size_t s = rec.ys(i, j);
            const double nn = rec.north[s], ss = rec.south[s];
            jy[s] = lxf ? 0.5 * (std::max(a.north[s] + c, 0.0) * nn + std::min(a.south[s] - c, 0.0) * ss)
                        : std::max(a.north[s], 0.0) * nn + std::min(a.south[s], 0.0) * ss;
        }
}

void Scheme2D::rhs(const Field& rho, Field& out) {
    const int nx = grid_.nx, ny = grid_.ny;
    std::vector<double> jx, jy;
    fluxes(rho, jx, jy);
    out.resize(rho.size());
    const double dx = grid_.dx, dy = grid_.dy;
    for (int p = 0; p < nx; ++p)
        for (int q = 0; q < ny; ++q) {
            const std::size_t x0 = std::size_t(p) * std::size_t(ny) + std::size_t(q);
            const std::size_t x1 = std::size_t(p + 1) * std::size_t(ny) + std::size_t(q);
            const std::size_t y0 = std::size_t(p) * std::size_t(ny + 1) + std::size_t(q);
            out[x0] = (jx[x1] - jx[x0]) / dx + (jy[y0 + 1] - jy[y0]) / dy;
        }
}

double Scheme2D::max_dt(const Field& rho) {
    const double h = std::min(grid_.dx, grid_.dy);
    if (config_.c_mode == CMode::lipschitz) return config_.cfl * h / lip_;
    const Reconstruction2D rec = reconstruct2d(rho, grid_.nx, grid_.ny, config_.order);
    const Velocities2D a = velocities(rec);
    double amax = max_abs(a.east, 0.0);
    amax = max_abs(a.west, amax);
    amax = max_abs(a.north, amax);
    amax = max_abs(a.south, amax);
    return config_.cfl * h / std::max(amax, Scheme1D::eps_c);
}

void Scheme2D::check(const Field& rho, long step) const {
    SpatialOperator::check(rho, step);
    if (!config_.wall_check) return;
    const int nx = grid_.nx, ny = grid_.ny;
    double s = 0.0;
    for (int p = 0; p < nx; ++p)
        for (int q = 0; q < ny; ++q)
            if (p < 2 || q < 2 || p >= nx - 2 || q >= ny - 2) s += rho[std::size_t(p) * std::size_t(ny) + std::size_t(q)];
    if (grid_.area() * s > 1e-8)
        fail(Errc::boundary, "mass reached the domain boundary at step " + std::to_string(step) + " (" +
                                 std::to_string(grid_.area() * s) + ")");
}

Measure2D Scheme2D::spatial_operator(const Measure2D& m) {
    Measure2D out(grid_);
    Field d;
    rhs(m.rho, d);
    out.rho = std::move(d);
    return out;
}

}  // namespace aggro
