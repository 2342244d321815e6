#include "aggro/potentials.hpp"

#include <cmath>
#include <limits>

#include "aggro/error.hpp"

namespace aggro {

namespace {

double param(const Potential::Params& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

void only_keys(const Potential::Params& p, std::initializer_list<const char*> keys, const std::string& name) {
    for (const auto& kv : p) {
        bool ok = false;
        for (const char* k : keys) ok = ok || kv.first == k;
        if (!ok) fail(Errc::invalid_argument, "potential '" + name + "' has no parameter '" + kv.first + "'");
    }
}

const double inf = std::numeric_limits<double>::infinity();

}  // namespace

std::vector<std::string> Potential::catalogue() {
    return {"abs", "morse-like", "attrep", "cubic", "quartic", "log", "dlv", "quadform"};
}

Potential Potential::make(const std::string& name, const Params& params) {
    Potential p;
    p.name_ = name;
    if (name == "abs") {
        only_keys(params, {"scale"}, name);
        p.kind_ = PotentialKind::abs;
        p.a_ = param(params, "scale", 1.0);
        if (p.a_ == 0.0 || !std::isfinite(p.a_)) fail(Errc::invalid_argument, "abs: scale must be finite and nonzero");
        p.covered_ = p.a_ > 0.0;
    } else if (name == "morse-like") {
        only_keys(params, {"a"}, name);
        p.kind_ = PotentialKind::morse;
        p.a_ = param(params, "a", 1.0);
        if (!(p.a_ > 0.0) || !std::isfinite(p.a_)) fail(Errc::invalid_argument, "morse-like: a must be positive");
    } else if (name == "attrep") {
        only_keys(params, {}, name);
        p.kind_ = PotentialKind::attrep;
        p.global_ = false;
        p.covered_ = false;
    } else if (name == "cubic") {
        only_keys(params, {}, name);
        p.kind_ = PotentialKind::cubic;
        p.global_ = false;
        p.pointy_ = false;
    } else if (name == "quartic") {
        only_keys(params, {}, name);
        p.kind_ = PotentialKind::quartic;
        p.global_ = false;
        p.pointy_ = false;
    } else if (name == "log") {
        only_keys(params, {"k"}, name);
        p.kind_ = PotentialKind::log;
        p.a_ = param(params, "k", 1.0);
        if (!(p.a_ > 0.0) || !std::isfinite(p.a_)) fail(Errc::invalid_argument, "log: k must be positive");
        p.global_ = false;
        p.covered_ = false;
    } else if (name == "dlv") {
        only_keys(params, {}, name);
        p.kind_ = PotentialKind::dlv;
        p.pointy_ = false;
    } else if (name == "quadform") {
        only_keys(params, {}, name);
        p.kind_ = PotentialKind::quadform;
    } else {
        fail(Errc::invalid_argument, "unknown potential '" + name + "'");
    }
    return p;
}

double Potential::w(double r) const {
    switch (kind_) {
        case PotentialKind::abs: return a_ * r;
        case PotentialKind::morse: return -std::expm1(-a_ * r);
        case PotentialKind::attrep: return 0.5 * r * r - r;
        case PotentialKind::cubic: return r * r * r / 3.0 - 0.5 * r * r;
        case PotentialKind::quartic: return 0.25 * r * r * r * r - 0.5 * r * r;
        case PotentialKind::log: return r == 0.0 ? 0.0 : 0.5 * r * r - a_ * std::log(r);
        case PotentialKind::dlv: return r <= 1.0 ? 2.0 * r * r : 4.0 * r - 2.0;
        case PotentialKind::quadform: return r;
    }
    return 0.0;
}

double Potential::dw(double r) const {
    switch (kind_) {
        case PotentialKind::abs: return a_;
        case PotentialKind::morse: return a_ * std::exp(-a_ * r);
        case PotentialKind::attrep: return r - 1.0;
        case PotentialKind::cubic: return r * r - r;
        case PotentialKind::quartic: return r * r * r - r;
        case PotentialKind::log: return r - a_ / r;
        case PotentialKind::dlv: return r <= 1.0 ? 4.0 * r : 4.0;
        case PotentialKind::quadform: return 1.0;
    }
    return 0.0;
}

double Potential::value(double x) const {
    if (kind_ == PotentialKind::quadform) fail(Errc::invalid_argument, "quadform is two-dimensional");
    return x == 0.0 ? 0.0 : w(std::abs(x));
}

double Potential::grad(double x) const {
    if (kind_ == PotentialKind::quadform) fail(Errc::invalid_argument, "quadform is two-dimensional");
    if (x == 0.0) return 0.0;
    const double g = dw(std::abs(x));
    return x > 0.0 ? g : -g;
}

double Potential::value(double x, double y) const {
    if (x == 0.0 && y == 0.0) return 0.0;
    if (kind_ == PotentialKind::quadform) return std::sqrt(x * x + x * y + y * y);
    return w(std::hypot(x, y));
}

std::array<double, 2> Potential::grad(double x, double y) const {
    if (x == 0.0 && y == 0.0) return {0.0, 0.0};
    if (kind_ == PotentialKind::quadform) {
        const double s = 2.0 * std::sqrt(x * x + x * y + y * y);
        return {(2.0 * x + y) / s, (x + 2.0 * y) / s};
    }
    const double r = std::hypot(x, y);
    const double f = dw(r) / r;
    return {f * x, f * y};
}

double Potential::lipschitz_on(double D) const {
    if (!(D > 0.0)) fail(Errc::invalid_argument, "lipschitz_on needs a positive diameter");
    switch (kind_) {
        case PotentialKind::abs: return std::abs(a_);
        case PotentialKind::morse: return a_;
        case PotentialKind::attrep: return std::max(1.0, D - 1.0);
        case PotentialKind::cubic: {
            if (D <= 0.5) return D - D * D;
            return std::max(0.25, D * D - D);
        }
        case PotentialKind::quartic: {
            const double rs = 1.0 / std::sqrt(3.0);
            if (D <= rs) return D - D * D * D;
            return std::max(rs - rs * rs * rs, D * D * D - D);
        }
        case PotentialKind::log: return inf;
        case PotentialKind::dlv: return D <= 1.0 ? 4.0 * D : 4.0;
        case PotentialKind::quadform: return std::sqrt(1.5);
    }
    return inf;
}

std::vector<double> kernel_table(const Potential& p, const Grid1D& g) {
    const int n = g.n;
    std::vector<double> t(std::size_t(2 * n + 1), 0.0);
    for (int k = 1; k <= n; ++k) {
        const double v = p.grad(k * g.dx);
        if (!std::isfinite(v)) fail(Errc::nonfinite, "kernel gradient is not finite at offset " + std::to_string(k));
        t[std::size_t(n + k)] = v;
        t[std::size_t(n - k)] = -v;
    }
    return t;
}

KernelTable2D kernel_table(const Potential& p, const Grid2D& g) {
    KernelTable2D t;
    t.kx = g.nx;
    t.ky = g.ny;
    const std::size_t size = std::size_t(2 * t.kx + 1) * std::size_t(2 * t.ky + 1);
    t.gx.assign(size, 0.0);
    t.gy.assign(size, 0.0);
    for (int k = 0; k <= t.kx; ++k) {
        for (int l = (k == 0 ? 1 : -t.ky); l <= t.ky; ++l) {
            const auto v = p.grad(k * g.dx, l * g.dy);
            if (!std::isfinite(v[0]) || !std::isfinite(v[1]))
                fail(Errc::nonfinite, "kernel gradient is not finite at offset " + std::to_string(k) + "," + std::to_string(l));
            t.gx[t.idx(k, l)] = v[0];
            t.gy[t.idx(k, l)] = v[1];
            t.gx[t.idx(-k, -l)] = -v[0];
            t.gy[t.idx(-k, -l)] = -v[1];
        }
    }
    return t;
}

}  // namespace aggro
