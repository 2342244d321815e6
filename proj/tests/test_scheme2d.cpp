#include <doctest.h>

#include <cmath>
#include <random>

#include "aggro/error.hpp"
#include "aggro/scheme2d.hpp"

using namespace aggro;

namespace {

FluxConfig cfg(FluxKind f, Order o) {
    FluxConfig c;
    c.flux = f;
    c.order = o;
    c.cfl = 0.2;
    c.wall_check = false;
    return c;
}

std::vector<double> random_field(std::mt19937_64& rng, int nx, int ny, int pad) {
    std::uniform_real_distribution<double> w(0.0, 1.0);
    std::vector<double> r(std::size_t(nx) * std::size_t(ny), 0.0);
    for (int i = pad; i < nx - pad; ++i)
        for (int j = pad; j < ny - pad; ++j) r[std::size_t(i) * std::size_t(ny) + std::size_t(j)] = w(rng) < 0.2 ? 0.0 : w(rng);
    return r;
}

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

TEST_CASE("2D reconstruction examples") {
    SUBCASE("constant") {
        const int n = 5;
        std::vector<double> rho(25, 3.0);
        const Reconstruction2D r = reconstruct2d(rho, n, n, Order::second);
        CHECK(r.sigma[r.gp(2, 2)] == 3.0);
        CHECK(r.rho_tilde[12] == 0.0);
        CHECK(r.east[r.xs(2, 2)] == 3.0);
        CHECK(r.west[r.xs(3, 2)] == 3.0);
        CHECK(r.north[r.ys(2, 2)] == 3.0);
        CHECK(r.south[r.ys(2, 3)] == 3.0);
    }
    SUBCASE("single vertex spike") {
        std::vector<double> rho(16, 0.0);
        rho[1 * 4 + 2] = 5.0;
        const Reconstruction2D r = reconstruct2d(rho, 4, 4, Order::second);
        for (double s : r.sigma) CHECK(s == 0.0);
        CHECK(r.east[r.xs(1, 2)] == 5.0);
        CHECK(r.west[r.xs(2, 2)] == 5.0);
        CHECK(r.north[r.ys(1, 2)] == 5.0);
        CHECK(r.south[r.ys(1, 3)] == 5.0);
        CHECK(sum(r.east) == 5.0);
        CHECK(sum(r.south) == 5.0);
    }
}

TEST_CASE("2D reconstruction identities on random data") {
    std::mt19937_64 rng(61);
    for (int inst = 0; inst < 100; ++inst) {
        const int nx = 5, ny = 5;
        const auto rho = random_field(rng, nx, ny, 0);
        const Reconstruction2D r = reconstruct2d(rho, nx, ny, Order::second);
        auto sg = [&](int i, int j) { return r.sigma[r.gp(i, j)]; };
        for (int p = 0; p < nx; ++p)
            for (int q = 0; q < ny; ++q) {
                const std::size_t c = std::size_t(p * ny + q);
                const double E = r.east[r.xs(p, q)], W = r.west[r.xs(p + 1, q)];
                const double N = r.north[r.ys(p, q)], S = r.south[r.ys(p, q + 1)];
                CHECK(0.25 * ((E + W) + (N + S)) == rho[c]);
                CHECK(r.rho_tilde[c] >= 0.0);
                CHECK(std::min({E, W, N, S}) >= 0.0);
                // masses of r over the half-open windows around each station
                const double rt = r.rho_tilde[c];
                CHECK(E == doctest::Approx(rt + 0.5 * (sg(p, q) + sg(p, q + 1))).epsilon(1e-14));
                CHECK(W == doctest::Approx(rt + 0.5 * (sg(p + 1, q) + sg(p + 1, q + 1))).epsilon(1e-14));
                CHECK(N == doctest::Approx(rt + 0.5 * (sg(p, q) + sg(p + 1, q))).epsilon(1e-14));
                CHECK(S == doctest::Approx(rt + 0.5 * (sg(p, q + 1) + sg(p + 1, q + 1))).epsilon(1e-14));
                const double m = std::min({p > 0 && q > 0 ? rho[c - ny - 1] : 0.0, p > 0 ? rho[c - ny] : 0.0,
                                           q > 0 ? rho[c - 1] : 0.0, rho[c]});
                CHECK(sg(p, q) == m);
            }
    }
}

TEST_CASE("2D velocities") {
    const Grid2D g = Grid2D::span(0.0, 1.0, 0.0, 1.0, 8, 8);
    const Potential absw = Potential::make("abs");
    const KernelTable2D t = kernel_table(absw, g);
    const int sx = 9, sy = 8;

    SUBCASE("unit spike gives the radial unit vector") {
        std::vector<double> v(std::size_t(sx * sy), 0.0);
        const int i0 = 3, j0 = 4;
        v[std::size_t(i0 * sy + j0)] = 1.0 / g.area();
        const auto ax = velocities2d_dense(t, true, v, sx, sy, g.area());
        for (int i = 0; i < sx; ++i)
            for (int j = 0; j < sy; ++j) {
                const double x = (i - i0) * g.dx, y = (j - j0) * g.dy;
                const double want = (i == i0 && j == j0) ? 0.0 : x / std::hypot(x, y);
                CHECK(ax[std::size_t(i * sy + j)] == doctest::Approx(want).epsilon(1e-14).scale(1e-14));
            }
    }
    SUBCASE("point-symmetric data gives antisymmetric velocities") {
        std::mt19937_64 rng(67);
        std::uniform_real_distribution<double> w(0.0, 1.0);
        std::vector<double> v(std::size_t(sx * sy));
        for (int i = 0; i < sx; ++i)
            for (int j = 0; j < sy; ++j) {
                if (v[std::size_t(i * sy + j)] != 0.0) continue;
                const double x = w(rng);
                v[std::size_t(i * sy + j)] = x;
                v[std::size_t((sx - 1 - i) * sy + (sy - 1 - j))] = x;
            }
        const auto ax = velocities2d_dense(t, true, v, sx, sy, g.area());
        for (int i = 0; i < sx; ++i)
            for (int j = 0; j < sy; ++j)
                CHECK(ax[std::size_t(i * sy + j)] ==
                      doctest::Approx(-ax[std::size_t((sx - 1 - i) * sy + (sy - 1 - j))]).epsilon(1e-13).scale(1e-13));
    }
    SUBCASE("quadruple loop oracle") {
        std::mt19937_64 rng(71);
        std::uniform_real_distribution<double> w(0.0, 1.0);
        const Potential q = Potential::make("quadform");
        const KernelTable2D tq = kernel_table(q, g);
        std::vector<double> v(std::size_t(sx * sy));
        for (auto& x : v) x = w(rng);
        const auto ay = velocities2d_dense(tq, false, v, sx, sy, g.area());
        for (int i = 0; i < sx; ++i)
            for (int j = 0; j < sy; ++j) {
                double s = 0.0;
                for (int k = 0; k < sx; ++k)
                    for (int l = 0; l < sy; ++l)
                        if (k != i || l != j) s += q.grad((i - k) * g.dx, (j - l) * g.dy)[1] * v[std::size_t(k * sy + l)];
                CHECK(ay[std::size_t(i * sy + j)] == doctest::Approx(g.area() * s).epsilon(1e-13));
            }
    }
    SUBCASE("FFT path agrees with the dense sum at n = 32") {
        std::mt19937_64 rng(73);
        const Grid2D g32 = Grid2D::span(0.0, 2.0, 0.0, 2.0, 32, 32);
        const auto rho = random_field(rng, 32, 32, 0);
        for (const char* name : {"quadform", "abs", "morse-like"}) {
            FluxConfig dense = cfg(FluxKind::upwind, Order::second), fast = dense;
            fast.fast = true;
            Scheme2D sd(g32, Potential::make(name), dense), sf(g32, Potential::make(name), fast);
            const Reconstruction2D r = reconstruct2d(rho, 32, 32, Order::second);
            const Velocities2D a = sd.velocities(r), b = sf.velocities(r);
            for (std::size_t i = 0; i < a.east.size(); ++i) {
                CHECK(std::abs(a.east[i] - b.east[i]) <= 1e-12);
                CHECK(std::abs(a.west[i] - b.west[i]) <= 1e-12);
            }
            for (std::size_t i = 0; i < a.north.size(); ++i) {
                CHECK(std::abs(a.north[i] - b.north[i]) <= 1e-12);
                CHECK(std::abs(a.south[i] - b.south[i]) <= 1e-12);
            }
        }
    }
}

TEST_CASE("2D operator") {
    const Grid2D g = Grid2D::span(-1.0, 1.0, -1.0, 1.0, 12, 12);
    std::mt19937_64 rng(79);
    for (auto f : {FluxKind::lax_friedrichs, FluxKind::upwind})
        for (auto o : {Order::first, Order::second}) {
            Scheme2D s(g, Potential::make("quadform"), cfg(f, o));
            Field d;
            s.rhs(Field(144, 0.0), d);
            for (double x : d) CHECK(x == 0.0);
            for (int inst = 0; inst < 5; ++inst) {
                s.rhs(random_field(rng, 12, 12, 0), d);
                double scale = 0.0;
                for (double x : d) scale = std::max(scale, std::abs(x));
                CHECK(std::abs(sum(d)) <= 1e-13 * scale * 144);
            }
        }
    Scheme2D up(g, Potential::make("abs"), cfg(FluxKind::upwind, Order::second));
    Field spike(144, 0.0), d;
    spike[5 * 12 + 7] = 2.0;
    up.rhs(spike, d);
    for (double x : d) CHECK(x == 0.0);
}

TEST_CASE("2D time step") {
    const std::vector<double> rho(100 * 100, 0.0);
    Scheme2D s(Grid2D::span(0.0, 1.0, 0.0, 1.0, 100, 100), Potential::make("abs"), cfg(FluxKind::lax_friedrichs, Order::second));
    CHECK(s.max_dt(rho) == doctest::Approx(0.002).epsilon(1e-14));
    Scheme2D s2(Grid2D::span(0.0, 1.0, 0.0, 1.0, 100, 100), Potential::make("abs", {{"scale", 2.0}}),
                cfg(FluxKind::lax_friedrichs, Order::second));
    CHECK(s2.max_dt(rho) == doctest::Approx(0.001).epsilon(1e-14));
    Scheme2D s3(Grid2D::span(0.0, 1.0, 0.0, 2.0, 100, 100), Potential::make("abs"), cfg(FluxKind::upwind, Order::second));
    CHECK(s3.max_dt(rho) == doctest::Approx(0.002).epsilon(1e-14));
    FluxConfig hi = cfg(FluxKind::upwind, Order::second);
    hi.cfl = 0.25;
    CHECK_THROWS_AS(Scheme2D(Grid2D::span(0.0, 1.0, 0.0, 1.0, 4, 4), Potential::make("abs"), hi), Error);
    CHECK_THROWS_AS(Scheme2D(Grid2D::span(0.0, 1.0, 0.0, 1.0, 4, 4), Potential::make("log"), cfg(FluxKind::lax_friedrichs, Order::first)),
                    Error);
}

TEST_CASE("2D Euler steps keep the invariants") {
    std::mt19937_64 rng(83);
    const Grid2D g = Grid2D::span(-1.0, 1.0, -1.0, 1.0, 32, 32);
    for (const char* name : {"abs", "quadform", "morse-like"})
        for (auto f : {FluxKind::lax_friedrichs, FluxKind::upwind})
            for (auto o : {Order::first, Order::second}) {
                Scheme2D s(g, Potential::make(name), cfg(f, o));
                Measure2D m(g, random_field(rng, 32, 32, 11));
                normalize(m);
                const Moments2D m0 = moments(m);
                for (int k = 0; k < 8; ++k) {
                    Field d;
                    s.rhs(m.rho, d);
                    CHECK(s.last_max_speed() <= s.lipschitz() + 1e-12);
                    if (f == FluxKind::lax_friedrichs) CHECK(s.last_c() <= s.lipschitz());
                    const double dt = s.max_dt(m.rho);
                    for (std::size_t i = 0; i < m.rho.size(); ++i) m.rho[i] += dt * d[i];
                    for (double x : m.rho) CHECK(x >= 0.0);
                }
                const Moments2D m1 = moments(m);
                CHECK(std::abs(m1.mass - m0.mass) <= 1e-13 * m0.mass);
                if (f == FluxKind::upwind && o == Order::second) continue;
                CHECK(std::abs(m1.com[0] - m0.com[0]) <= 1e-12);
                CHECK(std::abs(m1.com[1] - m0.com[1]) <= 1e-12);
            }
}

TEST_CASE("2D second-order upwind moves the centre of mass") {
    const Grid2D g = Grid2D::span(-1.0, 1.0, -1.0, 1.0, 16, 16);
    Scheme2D s(g, Potential::make("morse-like"), cfg(FluxKind::upwind, Order::second));
    std::mt19937_64 rng(101);
    Measure2D m(g, random_field(rng, 16, 16, 4));
    normalize(m);
    std::vector<double> jx, jy;
    s.fluxes(m.rho, jx, jy);
    CHECK(std::abs(g.area() * sum(jx)) + std::abs(g.area() * sum(jy)) > 1e-4);
    Scheme2D l(g, Potential::make("morse-like"), cfg(FluxKind::lax_friedrichs, Order::second));
    l.fluxes(m.rho, jx, jy);
    CHECK(std::abs(g.area() * sum(jx)) + std::abs(g.area() * sum(jy)) <= 1e-14);
}
