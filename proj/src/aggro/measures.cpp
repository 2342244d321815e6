#include "aggro/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "aggro/error.hpp"

namespace aggro {

namespace {

constexpr std::array<double, 5> gl_nodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                            0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> gl_weights = {0.2369268850561891, 0.4786286704993665,
                                              0.5688888888888889, 0.4786286704993665,
                                              0.2369268850561891};

double gauss5(const Density1D& f, double a, double b) {
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    double s = 0.0;
    for (int k = 0; k < 5; ++k) s += gl_weights[k] * f(c + h * gl_nodes[k]);
    return h * s;
}

void check_nonneg(const std::vector<double>& rho) {
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!std::isfinite(rho[i])) fail(Errc::nonfinite, "non-finite density at cell " + std::to_string(i));
        if (rho[i] < 0.0) fail(Errc::domain, "negative density at cell " + std::to_string(i));
    }
}

double fixed_sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

Grid1D::Grid1D(double x0_, double dx_, int n_) : x0(x0_), dx(dx_), n(n_) {
    if (!(dx > 0.0) || !std::isfinite(dx) || !std::isfinite(x0)) fail(Errc::invalid_argument, "grid spacing must be positive and finite");
    if (n < 1) fail(Errc::invalid_argument, "grid needs at least one cell");
}

Grid1D Grid1D::span(double a, double b, int n) {
    if (!(b > a)) fail(Errc::invalid_argument, "empty grid span");
    if (n < 1) fail(Errc::invalid_argument, "grid needs at least one cell");
    return Grid1D(a, (b - a) / n, n);
}

int Grid1D::locate(double p) const {
    if (!std::isfinite(p)) return -1;
    if (!(p > x0) || p > x1()) return -1;
    int i = int(std::ceil((p - x0) / dx)) - 1;
    i = std::clamp(i, 0, n - 1);
    while (i > 0 && p <= point(i)) --i;
    while (i < n - 1 && p > point(i + 1)) ++i;
    return i;
}

Grid2D::Grid2D(double x0_, double y0_, double dx_, double dy_, int nx_, int ny_)
    : x0(x0_), y0(y0_), dx(dx_), dy(dy_), nx(nx_), ny(ny_) {
    if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy))
        fail(Errc::invalid_argument, "grid spacing must be positive and finite");
    if (nx < 1 || ny < 1) fail(Errc::invalid_argument, "grid needs at least one cell per axis");
}

Grid2D Grid2D::span(double ax, double bx, double ay, double by, int nx, int ny) {
    if (!(bx > ax) || !(by > ay)) fail(Errc::invalid_argument, "empty grid span");
    if (nx < 1 || ny < 1) fail(Errc::invalid_argument, "grid needs at least one cell per axis");
    return Grid2D(ax, ay, (bx - ax) / nx, (by - ay) / ny, nx, ny);
}

double Grid2D::diameter() const { return std::hypot(nx * dx, ny * dy); }

Measure1D::Measure1D(const Grid1D& g, std::vector<double> r) : grid(g), rho(std::move(r)) {
    if (rho.size() != std::size_t(g.n)) fail(Errc::invalid_argument, "density size does not match grid");
    check_nonneg(rho);
}

double Measure1D::mass() const { return grid.dx * fixed_sum(rho); }

Measure2D::Measure2D(const Grid2D& g, std::vector<double> r) : grid(g), rho(std::move(r)) {
    if (rho.size() != g.size()) fail(Errc::invalid_argument, "density size does not match grid");
    check_nonneg(rho);
}

double Measure2D::mass() const { return grid.area() * fixed_sum(rho); }

Measure1D project_density(const Density1D& f, const Grid1D& g, const std::vector<double>& breaks) {
    std::vector<double> bs(breaks);
    std::sort(bs.begin(), bs.end());
    Measure1D m(g);
    for (int i = 0; i < g.n; ++i) {
        const double a = g.point(i), b = g.point(i + 1);
        double lo = a, s = 0.0;
        for (double p : bs) {
            if (p > a && p < b) {
                s += gauss5(f, lo, p);
                lo = p;
            }
        }
        s += gauss5(f, lo, b);
        if (!std::isfinite(s)) fail(Errc::nonfinite, "non-finite quadrature in cell " + std::to_string(i));
        if (s < 0.0) fail(Errc::domain, "negative quadrature in cell " + std::to_string(i));
        m.rho[i] = s / g.dx;
    }
    return m;
}

Measure2D project_density(const Density2D& f, const Grid2D& g) {
    Measure2D m(g);
    const double hx = 0.5 * g.dx, hy = 0.5 * g.dy;
    for (int i = 0; i < g.nx; ++i) {
        const double cx = g.midx(i);
        for (int j = 0; j < g.ny; ++j) {
            const double cy = g.midy(j);
            double s = 0.0;
            for (int a = 0; a < 5; ++a) {
                double r = 0.0;
                for (int b = 0; b < 5; ++b) r += gl_weights[b] * f(cx + hx * gl_nodes[a], cy + hy * gl_nodes[b]);
                s += gl_weights[a] * r;
            }
            s *= 0.25;
            if (!std::isfinite(s)) fail(Errc::nonfinite, "non-finite quadrature in cell " + std::to_string(i) + "," + std::to_string(j));
            if (s < 0.0) fail(Errc::domain, "negative quadrature in cell " + std::to_string(i) + "," + std::to_string(j));
            m.rho[g.idx(i, j)] = s;
        }
    }
    return m;
}

Measure1D project_atoms(const std::vector<Atom1D>& atoms, const Grid1D& g) {
    Measure1D m(g);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        const auto& a = atoms[k];
        if (!(a.m >= 0.0) || !std::isfinite(a.m)) fail(Errc::invalid_argument, "atom " + std::to_string(k) + " has invalid mass");
        const int i = g.locate(a.x);
        if (i < 0) fail(Errc::domain, "atom " + std::to_string(k) + " at x=" + std::to_string(a.x) + " lies outside the grid");
        m.rho[i] += a.m / g.dx;
    }
    return m;
}

Measure2D project_atoms(const std::vector<Atom2D>& atoms, const Grid2D& g) {
    Measure2D m(g);
    const Grid1D gx = g.xaxis(), gy = g.yaxis();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        const auto& a = atoms[k];
        if (!(a.m >= 0.0) || !std::isfinite(a.m)) fail(Errc::invalid_argument, "atom " + std::to_string(k) + " has invalid mass");
        const int i = gx.locate(a.x), j = gy.locate(a.y);
        if (i < 0 || j < 0) fail(Errc::domain, "atom " + std::to_string(k) + " lies outside the grid");
        m.rho[g.idx(i, j)] += a.m / g.area();
    }
    return m;
}

void normalize(Measure1D& m) {
    const double M = m.mass();
    if (!(M > 0.0)) fail(Errc::domain, "cannot normalize a measure of zero mass");
    for (double& r : m.rho) r /= M;
}

void normalize(Measure2D& m) {
    const double M = m.mass();
    if (!(M > 0.0)) fail(Errc::domain, "cannot normalize a measure of zero mass");
    for (double& r : m.rho) r /= M;
}

Moments1D moments(const Measure1D& m) {
    const Grid1D& g = m.grid;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, sx = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double x = g.mid(i), r = m.rho[i];
        s0 += r;
        s1 += std::abs(x) * r;
        s2 += x * x * r;
        sx += x * r;
    }
    Moments1D out{g.dx * s0, g.dx * s1, g.dx * s2, 0.0};
    if (!(out.mass > 0.0)) fail(Errc::domain, "center of mass undefined for zero mass");
    out.com = g.dx * sx / out.mass;
    return out;
}

Moments2D moments(const Measure2D& m) {
    const Grid2D& g = m.grid;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, sx = 0.0, sy = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.midx(i);
        for (int j = 0; j < g.ny; ++j) {
            const double y = g.midy(j), r = m.rho[g.idx(i, j)];
            const double q = x * x + y * y;
            s0 += r;
            s1 += std::sqrt(q) * r;
            s2 += q * r;
            sx += x * r;
            sy += y * r;
        }
    }
    const double A = g.area();
    Moments2D out{A * s0, A * s1, A * s2, {0.0, 0.0}};
    if (!(out.mass > 0.0)) fail(Errc::domain, "center of mass undefined for zero mass");
    out.com = {A * sx / out.mass, A * sy / out.mass};
    return out;
}

double tail_first_moment(const Measure1D& m, double R) {
    if (!(R >= 0.0)) fail(Errc::invalid_argument, "tail radius must be nonnegative");
    double s = 0.0;
    for (int i = 0; i < m.grid.n; ++i) {
        const double x = std::abs(m.grid.mid(i));
        if (x > R) s += x * m.rho[i];
    }
    return m.grid.dx * s;
}

double StepCdf::operator()(double t) const {
    auto it = std::upper_bound(x.begin(), x.end(), t);
    if (it == x.begin()) return 0.0;
    return F[std::size_t(it - x.begin()) - 1];
}

StepCdf cdf(const Measure1D& m) {
    StepCdf c;
    c.x.resize(std::size_t(m.grid.n));
    c.F.resize(std::size_t(m.grid.n));
    double s = 0.0;
    for (int i = 0; i < m.grid.n; ++i) {
        s += m.grid.dx * m.rho[i];
        c.x[i] = m.grid.mid(i);
        c.F[i] = s;
    }
    return c;
}

std::vector<Atom1D> atoms_of(const Measure1D& m) {
    std::vector<Atom1D> out;
    out.reserve(m.rho.size());
    for (int i = 0; i < m.grid.n; ++i)
        if (m.rho[i] > 0.0) out.push_back({m.grid.mid(i), m.grid.dx * m.rho[i]});
    return out;
}

std::vector<Atom2D> atoms_of(const Measure2D& m, double threshold) {
    std::vector<Atom2D> out;
    const Grid2D& g = m.grid;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double w = g.area() * m.rho[g.idx(i, j)];
            if (w > threshold) out.push_back({g.midx(i), g.midy(j), w});
        }
    return out;
}

Measure1D aggregate(const Measure1D& fine, int factor) {
    const Grid1D& g = fine.grid;
    if (factor < 1 || g.n % factor != 0) fail(Errc::invalid_argument, "aggregation factor must divide the cell count");
    Measure1D c(Grid1D(g.x0, g.dx * factor, g.n / factor));
    for (int i = 0; i < c.grid.n; ++i) {
        double s = 0.0;
        for (int k = 0; k < factor; ++k) s += fine.rho[std::size_t(i) * factor + k];
        c.rho[i] = s / factor;
    }
    return c;
}

Measure2D aggregate(const Measure2D& fine, int factor) {
    const Grid2D& g = fine.grid;
    if (factor < 1 || g.nx % factor != 0 || g.ny % factor != 0)
        fail(Errc::invalid_argument, "aggregation factor must divide the cell counts");
    Measure2D c(Grid2D(g.x0, g.y0, g.dx * factor, g.dy * factor, g.nx / factor, g.ny / factor));
    const double w = 1.0 / (double(factor) * double(factor));
    for (int i = 0; i < c.grid.nx; ++i)
        for (int j = 0; j < c.grid.ny; ++j) {
            double s = 0.0;
            for (int a = 0; a < factor; ++a)
                for (int b = 0; b < factor; ++b) s += fine.at(i * factor + a, j * factor + b);
            c.rho[c.grid.idx(i, j)] = s * w;
        }
    return c;
}

void write_csv(const Measure1D& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) fail(Errc::io, "cannot open " + path);
    os << std::setprecision(17) << "x,rho\n";
    for (int i = 0; i < m.grid.n; ++i) os << m.grid.mid(i) << ',' << m.rho[i] << '\n';
}

void write_csv(const Measure2D& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) fail(Errc::io, "cannot open " + path);
    os << std::setprecision(17) << "x,y,rho\n";
    for (int i = 0; i < m.grid.nx; ++i)
        for (int j = 0; j < m.grid.ny; ++j) os << m.grid.midx(i) << ',' << m.grid.midy(j) << ',' << m.at(i, j) << '\n';
}

}  // namespace aggro
