#include "aggro/burgers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "aggro/error.hpp"

namespace aggro {

namespace {

double minmod(double a, double b) {
    if (a > 0.0 && b > 0.0) return std::min(a, b);
    if (a < 0.0 && b < 0.0) return std::max(a, b);
    return 0.0;
}

}  // namespace

std::vector<double> minmod_slopes(const std::vector<double>& u, double dx, double left, double right) {
    const std::size_t n = u.size();
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double um = i == 0 ? left : u[i - 1];
        const double up = i + 1 == n ? right : u[i + 1];
        s[i] = minmod((u[i] - um) / dx, (up - u[i]) / dx);
    }
    return s;
}

std::vector<double> minmod_slopes(const std::vector<double>& u, double dx) {
    if (u.empty()) return {};
    return minmod_slopes(u, dx, u.front(), u.back());
}

BurgersOperator::BurgersOperator(const Grid1D& grid, const BurgersFlux& flux, double left, double right, double cfl,
                                 double c_override)
    : grid_(grid), flux_(flux), left_(left), right_(right), cfl_(cfl), c_override_(c_override) {
    if (!(cfl_ > 0.0 && cfl_ <= 0.5)) fail(Errc::cfl, "Burgers CFL number must lie in (0, 1/2]");
}

double BurgersOperator::coefficient(const std::vector<double>& u) const {
    if (c_override_ > 0.0) return c_override_;
    double c = 0.0;
    for (double v : u) c = std::max(c, std::abs(flux_.df(v)));
    return c;
}

std::vector<double> BurgersOperator::fluxes(const std::vector<double>& u) {
    const std::size_t n = u.size();
    if (n != std::size_t(grid_.n)) fail(Errc::invalid_argument, "state size does not match grid");
    const double dx = grid_.dx;
    const std::vector<double> s = minmod_slopes(u, dx, left_, right_);
    const double c = coefficient(u);
    last_c_ = c;
    std::vector<double> F(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        // interface between cells k-1 and k
        const double ul = k == 0 ? left_ : u[k - 1] + 0.5 * dx * s[k - 1];
        const double ur = k == n ? right_ : u[k] - 0.5 * dx * s[k];
        F[k] = 0.5 * (flux_.f(ul) + flux_.f(ur)) - 0.5 * c * (ur - ul);
    }
    return F;
}

void BurgersOperator::rhs(const Field& u, Field& out) {
    const std::vector<double> F = fluxes(u);
    out.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = -(F[i + 1] - F[i]) / grid_.dx;
}

double BurgersOperator::max_dt(const Field& u) {
    const double c = std::max(coefficient(u), 1e-12);
    return cfl_ * grid_.dx / c;
}

BurgersState burgers_step(const BurgersState& s, double dt, double sign, double c_override) {
    BurgersFlux flux{sign, s.right - s.left};
    BurgersOperator op(s.grid, flux, s.left, s.right, 0.5, c_override);
    const double c = op.coefficient(s.u);
    if (dt * c / s.grid.dx > 0.5 * (1.0 + 1e-12)) fail(Errc::cfl, "Burgers step violates dt c / dx <= 1/2");
    Field d;
    op.rhs(s.u, d);
    BurgersState out = s;
    for (std::size_t i = 0; i < s.u.size(); ++i) out.u[i] = s.u[i] + dt * d[i];
    return out;
}

BurgersState primitive(const Measure1D& m) {
    const Grid1D& g = m.grid;
    BurgersState s;
    s.grid = Grid1D(g.x0 - 0.5 * g.dx, g.dx, g.n + 1);
    s.u.assign(std::size_t(g.n) + 1, 0.0);
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i) {
        acc += g.dx * m.rho[std::size_t(i)];
        s.u[std::size_t(i) + 1] = acc;
    }
    s.left = 0.0;
    s.right = acc;
    return s;
}

Measure1D difference(const BurgersState& s) {
    const Grid1D& g = s.grid;
    if (g.n < 2) fail(Errc::invalid_argument, "difference needs at least two cells");
    Measure1D m(Grid1D(g.x0 + 0.5 * g.dx, g.dx, g.n - 1));
    for (int i = 0; i + 1 < g.n; ++i) {
        const double d = s.u[std::size_t(i) + 1] - s.u[std::size_t(i)];
        if (d < 0.0) fail(Errc::invalid_argument, "difference of a decreasing profile at cell " + std::to_string(i));
        m.rho[std::size_t(i)] = d / g.dx;
    }
    return m;
}

void write_csv(const BurgersState& s, const std::string& path) {
    std::ofstream f(path);
    if (!f) fail(Errc::io, "cannot write " + path);
    f << "x,u\n" << std::setprecision(17);
    for (int i = 0; i < s.grid.n; ++i) f << s.grid.mid(i) << ',' << s.u[std::size_t(i)] << '\n';
}

}  // namespace aggro
