#include "aggro/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "aggro/error.hpp"

namespace aggro {

double Mixed1D::mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.m;
    for (const auto& p : pieces) s += p.density * (p.b - p.a);
    return s;
}

Mixed1D mixed_atoms(const Measure1D& m) {
    Mixed1D out;
    out.atoms.reserve(m.rho.size());
    for (int i = 0; i < m.grid.n; ++i)
        if (m.rho[std::size_t(i)] != 0.0) out.atoms.push_back({m.grid.mid(i), m.grid.dx * m.rho[std::size_t(i)]});
    return out;
}

Mixed1D mixed_density(const Measure1D& m) {
    Mixed1D out;
    out.pieces.reserve(m.rho.size());
    for (int i = 0; i < m.grid.n; ++i)
        if (m.rho[std::size_t(i)] != 0.0) out.pieces.push_back({m.grid.point(i), m.grid.point(i + 1), m.rho[std::size_t(i)]});
    return out;
}

Mixed1D mixed_atoms(const std::vector<Atom1D>& atoms) {
    Mixed1D out;
    out.atoms = atoms;
    return out;
}

Mixed1D reconstructed_measure(const Measure1D& m, Order order) {
    const Reconstruction1D rec = reconstruct(m, order);
    const Grid1D& g = m.grid;
    Mixed1D out;
    for (int i = 0; i < g.n; ++i) {
        const double w = g.dx * rec.rho_tilde[std::size_t(i)];
        if (w != 0.0) out.atoms.push_back({g.mid(i), w});
    }
    for (int i = 1; i < g.n; ++i) {
        const double s = rec.sigma[std::size_t(i)];
        if (s != 0.0) out.pieces.push_back({g.mid(i - 1), g.mid(i), s});
    }
    return out;
}

double balance_masses(double ma, double mb) {
    if (!std::isfinite(ma) || !std::isfinite(mb)) fail(Errc::nonfinite, "non-finite mass");
    const double big = std::max(ma, mb);
    if (big == 0.0) return 1.0;
    if (std::abs(ma - mb) > 1e-9 * big)
        fail(Errc::mass_mismatch, "masses differ beyond tolerance: " + std::to_string(ma) + " vs " + std::to_string(mb));
    const double small = std::min(ma, mb);
    return small > 0.0 ? big / small : 1.0;
}

namespace {

struct Event {
    double x;
    double jump;
    double slope;
};

void add_events(const Mixed1D& m, double sign, std::vector<Event>& ev) {
    for (const auto& a : m.atoms) {
        if (!(a.m >= 0.0) || !std::isfinite(a.x) || !std::isfinite(a.m))
            fail(Errc::invalid_argument, "atoms must have finite positions and nonnegative masses");
        ev.push_back({a.x, sign * a.m, 0.0});
    }
    for (const auto& p : m.pieces) {
        if (!(p.density >= 0.0) || !(p.b >= p.a) || !std::isfinite(p.a) || !std::isfinite(p.b))
            fail(Errc::invalid_argument, "density pieces must be ordered with nonnegative density");
        ev.push_back({p.a, 0.0, sign * p.density});
        ev.push_back({p.b, 0.0, -sign * p.density});
    }
}

// integral of |D0 + (D1-D0) s / L| over [0, L]
long double abs_linear(long double D0, long double D1, long double L) {
    if ((D0 >= 0 && D1 >= 0) || (D0 <= 0 && D1 <= 0)) return 0.5L * std::abs(D0 + D1) * L;
    return 0.5L * (D0 * D0 + D1 * D1) / std::abs(D1 - D0) * L;
}

}  // namespace

double d1_1d(const Mixed1D& mu, const Mixed1D& nu) {
    const double ma = mu.mass(), mb = nu.mass();
    const double f = balance_masses(ma, mb);
    std::vector<Event> ev;
    add_events(mu, ma < mb ? f : 1.0, ev);
    add_events(nu, ma < mb ? -1.0 : -f, ev);
    std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.x < b.x; });
    long double D = 0.0L, slope = 0.0L, total = 0.0L;
    std::size_t k = 0;
    while (k < ev.size()) {
        const double x = ev[k].x;
        for (; k < ev.size() && ev[k].x == x; ++k) {
            D += ev[k].jump;
            slope += ev[k].slope;
        }
        if (k == ev.size()) break;
        const long double L = (long double)ev[k].x - x;
        const long double D1 = D + slope * L;
        total += abs_linear(D, D1, L);
        D = D1;
    }
    return double(total);
}

double d1_1d(const Measure1D& mu, const Measure1D& nu) { return d1_1d(mixed_atoms(mu), mixed_atoms(nu)); }

double d1_1d(const std::vector<Atom1D>& mu, const std::vector<Atom1D>& nu) {
    return d1_1d(mixed_atoms(mu), mixed_atoms(nu));
}

double interaction_energy(const Measure1D& m, const Potential& p) {
    const Grid1D& g = m.grid;
    const int n = g.n;
    std::vector<double> W(std::size_t(2 * n - 1));
    for (int k = -(n - 1); k <= n - 1; ++k) W[std::size_t(k + n - 1)] = k == 0 ? 0.0 : p.value(k * g.dx);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        if (m.rho[std::size_t(i)] == 0.0) continue;
        double inner = 0.0;
        for (int j = 0; j < n; ++j) inner += W[std::size_t(i - j + n - 1)] * m.rho[std::size_t(j)];
        s += m.rho[std::size_t(i)] * inner;
    }
    return 0.5 * g.dx * g.dx * s;
}

double interaction_energy(const Measure2D& m, const Potential& p) {
    const Grid2D& g = m.grid;
    const int nx = g.nx, ny = g.ny;
    const int wy = 2 * ny - 1;
    std::vector<double> W(std::size_t(2 * nx - 1) * std::size_t(wy));
    for (int k = -(nx - 1); k <= nx - 1; ++k)
        for (int l = -(ny - 1); l <= ny - 1; ++l)
            W[std::size_t(k + nx - 1) * std::size_t(wy) + std::size_t(l + ny - 1)] =
                k == 0 && l == 0 ? 0.0 : p.value(k * g.dx, l * g.dy);
    double s = 0.0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const double r = m.rho[g.idx(i, j)];
            if (r == 0.0) continue;
            double inner = 0.0;
            for (int k = 0; k < nx; ++k) {
                const double* row = W.data() + std::size_t(i - k + nx - 1) * std::size_t(wy) + std::size_t(j + ny - 1);
                const double* v = m.rho.data() + g.idx(k, 0);
                for (int l = 0; l < ny; ++l) inner += *(row - l) * v[l];
            }
            s += r * inner;
        }
    return 0.5 * g.area() * g.area() * s;
}

EnergyEvaluator::EnergyEvaluator(const Grid1D& g, const Potential& p, bool fast) : dim_(1), nx_(g.n), ny_(1), h_(g.dx) {
    const int n = g.n;
    auto kernel = [&p, &g](int k) { return k == 0 ? 0.0 : p.value(k * g.dx); };
    if (fast) {
        c1_ = std::make_unique<Convolver1D>(n, kernel);
    } else {
        table_.resize(std::size_t(2 * n - 1));
        for (int k = -(n - 1); k <= n - 1; ++k) table_[std::size_t(k + n - 1)] = kernel(k);
    }
}

EnergyEvaluator::EnergyEvaluator(const Grid2D& g, const Potential& p, bool fast)
    : dim_(2), nx_(g.nx), ny_(g.ny), h_(g.area()) {
    auto kernel = [&p, &g](int k, int l) { return k == 0 && l == 0 ? 0.0 : p.value(k * g.dx, l * g.dy); };
    if (fast) {
        c2_ = std::make_unique<Convolver2D>(nx_, ny_, kernel);
    } else {
        const int wy = 2 * ny_ - 1;
        table_.resize(std::size_t(2 * nx_ - 1) * std::size_t(wy));
        for (int k = -(nx_ - 1); k <= nx_ - 1; ++k)
            for (int l = -(ny_ - 1); l <= ny_ - 1; ++l)
                table_[std::size_t(k + nx_ - 1) * std::size_t(wy) + std::size_t(l + ny_ - 1)] = kernel(k, l);
    }
}

EnergyEvaluator::~EnergyEvaluator() = default;

double EnergyEvaluator::operator()(const std::vector<double>& rho) {
    const std::size_t N = std::size_t(nx_) * std::size_t(ny_);
    if (rho.size() != N) fail(Errc::invalid_argument, "density size does not match the energy grid");
    work_.resize(N);
    if (c1_) {
        c1_->apply(rho.data(), work_.data());
    } else if (c2_) {
        c2_->apply(rho.data(), work_.data());
    } else if (dim_ == 1) {
        const int n = nx_;
        for (int i = 0; i < n; ++i) {
            double inner = 0.0;
            for (int j = 0; j < n; ++j) inner += table_[std::size_t(i - j + n - 1)] * rho[std::size_t(j)];
            work_[std::size_t(i)] = inner;
        }
    } else {
        const int wy = 2 * ny_ - 1;
        for (int i = 0; i < nx_; ++i)
            for (int j = 0; j < ny_; ++j) {
                double inner = 0.0;
                for (int k = 0; k < nx_; ++k) {
                    const double* row = table_.data() + std::size_t(i - k + nx_ - 1) * std::size_t(wy) + std::size_t(j + ny_ - 1);
                    const double* v = rho.data() + std::size_t(k) * std::size_t(ny_);
                    for (int l = 0; l < ny_; ++l) inner += *(row - l) * v[l];
                }
                work_[std::size_t(i) * std::size_t(ny_) + std::size_t(j)] = inner;
            }
    }
    double s = 0.0;
    for (std::size_t k = 0; k < N; ++k) s += rho[k] * work_[k];
    const double E = 0.5 * h_ * h_ * s;
    if (!std::isfinite(E)) fail(Errc::nonfinite, "interaction energy is not finite");
    return E;
}

void EnergyReport::push(double time, double energy) {
    if (!std::isfinite(energy)) fail(Errc::nonfinite, "energy sample is not finite");
    if (!t.empty() && !(time > t.back())) fail(Errc::invalid_argument, "energy sample times must increase");
    t.push_back(time);
    E.push_back(energy);
}

double EnergyReport::max_increment() const {
    double m = 0.0;
    for (std::size_t k = 1; k < E.size(); ++k) m = std::max(m, E[k] - E[k - 1]);
    return m;
}

void EnergyReport::write_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) fail(Errc::io, "cannot write " + path);
    f << "t,E\n" << std::setprecision(17);
    for (std::size_t k = 0; k < t.size(); ++k) f << t[k] << ',' << E[k] << '\n';
}

Dissipation dissipation_check(const EnergyReport& report, double dx, double dt) {
    if (!(dx > 0.0) || !(dt > 0.0)) fail(Errc::invalid_argument, "dx and dt must be positive");
    Dissipation d;
    d.max_increment = report.max_increment();
    d.K_hat = d.max_increment / (dx * dt);
    return d;
}

Dissipation dissipation_check(const EnergyReport& report, double dx) {
    if (!(dx > 0.0)) fail(Errc::invalid_argument, "dx must be positive");
    Dissipation d;
    for (std::size_t k = 1; k < report.E.size(); ++k) {
        const double inc = report.E[k] - report.E[k - 1];
        d.max_increment = std::max(d.max_increment, inc);
        d.K_hat = std::max(d.K_hat, inc / (dx * (report.t[k] - report.t[k - 1])));
    }
    return d;
}

}  // namespace aggro
