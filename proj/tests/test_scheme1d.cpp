#include <doctest.h>

#include <cmath>
#include <random>

#include "aggro/error.hpp"
#include "aggro/scheme1d.hpp"

using namespace aggro;

namespace {

FluxConfig cfg(FluxKind f, Order o, bool wall = false) {
    FluxConfig c;
    c.flux = f;
    c.order = o;
    c.wall_check = wall;
    return c;
}

std::vector<double> random_density(std::mt19937_64& rng, int n, int pad) {
    std::uniform_real_distribution<double> w(0.0, 1.0);
    std::vector<double> r(std::size_t(n), 0.0);
    for (int i = pad; i < n - pad; ++i) r[std::size_t(i)] = w(rng) < 0.2 ? 0.0 : w(rng);
    return r;
}

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

TEST_CASE("reconstruction examples") {
    SUBCASE("constant interior") {
        const Reconstruction1D r = reconstruct(std::vector<double>{0.0, 2.0, 2.0, 2.0, 2.0, 0.0}, Order::second);
        CHECK(r.sigma[2] == 2.0);
        CHECK(r.sigma[3] == 2.0);
        CHECK(r.rho_tilde[2] == 0.0);
        CHECK(r.plus[2] == 2.0);
        CHECK(r.minus[3] == 2.0);
    }
    SUBCASE("hand evaluation") {
        const Reconstruction1D r = reconstruct(std::vector<double>{1.0, 3.0, 2.0}, Order::second);
        CHECK(r.sigma == std::vector<double>{0.0, 1.0, 2.0, 0.0});
        CHECK(r.rho_tilde == std::vector<double>{0.5, 1.5, 1.0});
        CHECK(r.plus[1] == 2.5);
        CHECK(r.minus[2] == 3.5);
        CHECK(r.plus[1] + r.minus[2] == 6.0);
    }
    SUBCASE("isolated spike") {
        const std::vector<double> rho{0.0, 0.0, 4.0, 0.0, 0.0};
        const Reconstruction1D r = reconstruct(rho, Order::second);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(r.plus[i] == rho[i]);
            CHECK(r.minus[i + 1] == rho[i]);
        }
    }
    SUBCASE("first order has no slopes") {
        const Reconstruction1D r = reconstruct(std::vector<double>{1.0, 3.0, 2.0}, Order::first);
        CHECK(r.sigma == std::vector<double>{0.0, 0.0, 0.0, 0.0});
        CHECK(r.plus[1] == 3.0);
        CHECK(r.minus[2] == 3.0);
    }
}

TEST_CASE("reconstruction invariants on random data") {
    std::mt19937_64 rng(41);
    for (int inst = 0; inst < 200; ++inst) {
        const auto rho = random_density(rng, 30, 0);
        const Reconstruction1D r = reconstruct(rho, Order::second);
        CHECK(r.plus[30] == 0.0);
        CHECK(r.minus[0] == 0.0);
        for (std::size_t i = 0; i < 30; ++i) {
            CHECK(r.rho_tilde[i] >= 0.0);
            CHECK(r.plus[i] >= 0.0);
            CHECK(r.minus[i + 1] >= 0.0);
            CHECK(r.plus[i] <= 1.5 * rho[i]);
            CHECK(r.minus[i + 1] <= 1.5 * rho[i]);
            CHECK(r.plus[i] + r.minus[i + 1] == 2.0 * rho[i]);
            CHECK(r.rho_tilde[i] + 0.5 * (r.sigma[i] + r.sigma[i + 1]) == doctest::Approx(rho[i]).epsilon(1e-15));
        }
    }
}

TEST_CASE("velocities") {
    const Grid1D g = Grid1D::span(-1.0, 1.0, 16);
    const Potential absw = Potential::make("abs");
    const auto table = kernel_table(absw, g);

    SUBCASE("symmetric data gives zero velocity at the centre") {
        std::vector<double> v(17, 0.0);
        v[3] = v[13] = 1.0;
        v[6] = v[10] = 0.5;
        const auto a = velocities_dense(kernel_table(Potential::make("morse-like"), g), v, g.dx);
        CHECK(a[8] == 0.0);
    }
    SUBCASE("single spike under |x|") {
        std::vector<double> v(17, 0.0);
        const int k = 5;
        v[k] = 1.0 / g.dx;
        const auto a = velocities_dense(table, v, g.dx);
        for (int i = 0; i < 17; ++i) CHECK(a[std::size_t(i)] == doctest::Approx(double((i > k) - (i < k))).epsilon(1e-15));
    }
    SUBCASE("double loop oracle and the FFT path") {
        std::mt19937_64 rng(43);
        std::uniform_real_distribution<double> w(0.0, 1.0);
        for (const char* name : {"abs", "morse-like", "attrep", "dlv", "quartic"}) {
            const Potential p = Potential::make(name);
            const auto t = kernel_table(p, g);
            std::vector<double> v(17);
            for (auto& x : v) x = w(rng);
            const auto a = velocities_dense(t, v, g.dx);
            for (int i = 0; i <= 16; ++i) {
                double s = 0.0;
                for (int j = 0; j <= 16; ++j)
                    if (j != i) s += p.grad((i - j) * g.dx) * v[std::size_t(j)];
                CHECK(a[std::size_t(i)] == g.dx * s);
            }
        }
        std::vector<double> rho(256);
        for (auto& x : rho) x = w(rng);
        for (const char* name : {"abs", "morse-like", "attrep"}) {
            FluxConfig dense = cfg(FluxKind::upwind, Order::second), fast = dense;
            fast.fast = true;
            const Grid1D g2 = Grid1D::span(-2.0, 2.0, 256);
            Scheme1D sd(g2, Potential::make(name), dense), sf(g2, Potential::make(name), fast);
            const Reconstruction1D r = reconstruct(rho, Order::second);
            std::vector<double> ap, am, bp, bm;
            sd.velocities(r, ap, am);
            sf.velocities(r, bp, bm);
            for (std::size_t i = 0; i < ap.size(); ++i) {
                CHECK(std::abs(ap[i] - bp[i]) <= 1e-12);
                CHECK(std::abs(am[i] - bm[i]) <= 1e-12);
            }
        }
    }
}

TEST_CASE("Lax-Friedrichs flux") {
    const Grid1D g = Grid1D::span(-1.0, 1.0, 16);
    Scheme1D s(g, Potential::make("abs"), cfg(FluxKind::lax_friedrichs, Order::second));
    CHECK(s.lipschitz() == 1.0);

    const std::vector<double> zero(16, 0.0);
    for (double j : s.fluxes(zero)) CHECK(j == 0.0);

    std::vector<double> spike(16, 0.0);
    const int k = 7;
    spike[k] = 1.0 / g.dx;
    const auto J = s.fluxes(spike);
    CHECK(J[k] == doctest::Approx(1.0 / (2 * g.dx)).epsilon(1e-15));
    CHECK(J[k + 1] == doctest::Approx(-1.0 / (2 * g.dx)).epsilon(1e-15));
    Field d;
    s.rhs(spike, d);
    CHECK(d[k] < 0.0);
    CHECK(d[k - 1] > 0.0);
    CHECK(d[k + 1] > 0.0);

    std::vector<double> two(16, 0.0);
    two[3] = two[12] = 2.0;
    const auto J2 = s.fluxes(two);
    for (int i = 0; i <= 16; ++i) CHECK(J2[std::size_t(i)] == doctest::Approx(-J2[std::size_t(16 - i)]).epsilon(1e-14).scale(1e-14));

    FluxConfig strict = cfg(FluxKind::lax_friedrichs, Order::second);
    strict.strict = true;
    strict.c_override = 0.1;
    Scheme1D bad(g, Potential::make("abs"), strict);
    CHECK_THROWS_AS(bad.fluxes(two), Error);
}

TEST_CASE("upwind flux") {
    const Grid1D g = Grid1D::span(-1.0, 1.0, 16);
    Scheme1D s(g, Potential::make("abs"), cfg(FluxKind::upwind, Order::second));
    std::vector<double> spike(16, 0.0);
    spike[9] = 3.0;
    for (double j : s.fluxes(spike)) CHECK(j == 0.0);
    Field d;
    s.rhs(spike, d);
    for (double x : d) CHECK(x == 0.0);

    Reconstruction1D r = reconstruct(std::vector<double>{1.0, 2.0, 3.0, 1.0}, Order::second);
    const std::vector<double> zero(5, 0.0), pos(5, 0.7);
    for (double j : flux_upwind(r, zero, zero)) CHECK(j == 0.0);
    r.minus.assign(5, 1e9);
    const auto J = flux_upwind(r, pos, pos);
    for (int i = 1; i < 4; ++i) CHECK(J[std::size_t(i)] == 0.7 * r.plus[std::size_t(i)]);
    CHECK(J[0] == 0.0);
    CHECK(J[4] == 0.0);
}

TEST_CASE("operator telescopes") {
    std::mt19937_64 rng(47);
    for (auto f : {FluxKind::lax_friedrichs, FluxKind::upwind})
        for (auto o : {Order::first, Order::second}) {
            Scheme1D s(Grid1D::span(-1.0, 1.0, 40), Potential::make("morse-like"), cfg(f, o));
            for (int inst = 0; inst < 10; ++inst) {
                const auto rho = random_density(rng, 40, 0);
                Field d;
                s.rhs(rho, d);
                double scale = 0.0;
                for (double x : d) scale = std::max(scale, std::abs(x));
                CHECK(std::abs(sum(d)) <= 1e-13 * scale * 40);
            }
            Field d;
            s.rhs(std::vector<double>(40, 0.0), d);
            for (double x : d) CHECK(x == 0.0);
        }
}

TEST_CASE("time step restriction") {
    const Grid1D g = Grid1D::span(-1.0, 1.0, 200);
    Scheme1D s(g, Potential::make("abs"), cfg(FluxKind::lax_friedrichs, Order::second));
    const std::vector<double> rho(200, 0.0);
    CHECK(s.max_dt(rho) == doctest::Approx(0.004).epsilon(1e-14));
    Scheme1D s2(g, Potential::make("abs", {{"scale", 2.0}}), cfg(FluxKind::lax_friedrichs, Order::second));
    CHECK(s2.max_dt(rho) == doctest::Approx(0.002).epsilon(1e-14));

    FluxConfig ad = cfg(FluxKind::lax_friedrichs, Order::second);
    ad.c_mode = CMode::adaptive;
    Scheme1D s3(g, Potential::make("abs"), ad);
    CHECK(s3.max_dt(rho) == doctest::Approx(0.4 * 0.01 / Scheme1D::eps_c).epsilon(1e-14));

    try {
        Scheme1D bad(g, Potential::make("log"), cfg(FluxKind::lax_friedrichs, Order::second));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::cfl);
        CHECK(std::string(e.what()).find("adaptive") != std::string::npos);
    }
    Scheme1D ok(g, Potential::make("log"), ad);
    FluxConfig hi = cfg(FluxKind::upwind, Order::second);
    hi.cfl = 0.5;
    CHECK_THROWS_AS(Scheme1D(g, Potential::make("abs"), hi), Error);
    CHECK_THROWS_AS(Scheme1D(g, Potential::make("quadform"), cfg(FluxKind::upwind, Order::first)), Error);
}

TEST_CASE("wall check") {
    const Grid1D g = Grid1D::span(-1.0, 1.0, 20);
    Scheme1D s(g, Potential::make("abs"), cfg(FluxKind::upwind, Order::second, true));
    std::vector<double> rho(20, 0.0);
    rho[10] = 1.0;
    s.check(rho, 0);
    rho[1] = 1e-6;
    try {
        s.check(rho, 3);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::boundary);
    }
    rho[1] = NAN;
    Scheme1D lax(g, Potential::make("abs"), cfg(FluxKind::upwind, Order::second, false));
    CHECK_THROWS_AS(lax.check(rho, 1), Error);
}

TEST_CASE("Euler steps conserve mass and positivity and respect the speed bound") {
    std::mt19937_64 rng(53);
    const std::vector<std::string> names{"abs", "morse-like", "attrep", "cubic", "quartic", "dlv"};
    for (const auto& name : names)
        for (auto f : {FluxKind::lax_friedrichs, FluxKind::upwind})
            for (auto o : {Order::first, Order::second}) {
                const Grid1D g = Grid1D::span(-2.0, 2.0, 64);
                Scheme1D s(g, Potential::make(name), cfg(f, o));
                Measure1D m(g, random_density(rng, 64, 16));
                normalize(m);
                Field rho = m.rho;
                const double m0 = sum(rho);
                for (int k = 0; k < 20; ++k) {
                    Field d;
                    s.rhs(rho, d);
                    CHECK(s.last_max_speed() <= s.lipschitz() + 1e-12);
                    const double dt = s.max_dt(rho);
                    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] += dt * d[i];
                    for (double x : rho) CHECK(x >= 0.0);
                }
                CHECK(std::abs(sum(rho) - m0) <= 1e-13 * m0);
            }
}

TEST_CASE("centre of mass") {
    std::mt19937_64 rng(59);
    const Grid1D g = Grid1D::span(-2.0, 2.0, 64);
    auto drift_rate = [&](FluxKind f, Order o, const std::vector<double>& rho) {
        Scheme1D s(g, Potential::make("morse-like"), cfg(f, o));
        const auto J = s.fluxes(rho);
        return g.dx * std::abs(sum(J));
    };
    for (int inst = 0; inst < 20; ++inst) {
        Measure1D m(g, random_density(rng, 64, 8));
        normalize(m);
        CHECK(drift_rate(FluxKind::lax_friedrichs, Order::first, m.rho) <= 1e-14);
        CHECK(drift_rate(FluxKind::lax_friedrichs, Order::second, m.rho) <= 1e-14);
        CHECK(drift_rate(FluxKind::upwind, Order::first, m.rho) <= 1e-14);
    }
    // second-order upwind: the positive and negative parts do not pair up across stations
    std::vector<double> rho(64, 0.0);
    rho[30] = 1.0;
    rho[31] = 3.0;
    rho[32] = 2.0;
    rho[40] = 1.0;
    CHECK(drift_rate(FluxKind::upwind, Order::second, rho) > 1e-3);
}
