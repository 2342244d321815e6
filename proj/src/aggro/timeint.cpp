#include "aggro/timeint.hpp"

#include <algorithm>
#include <cmath>

#include "aggro/error.hpp"

namespace aggro {

void SpatialOperator::check(const Field& state, long step) const {
    for (std::size_t i = 0; i < state.size(); ++i)
        if (!std::isfinite(state[i]))
            fail(Errc::nonfinite, "non-finite state at step " + std::to_string(step) + ", entry " + std::to_string(i));
}

IntegratorKind integrator_from_string(const std::string& s) {
    if (s == "euler") return IntegratorKind::euler;
    if (s == "heun") return IntegratorKind::heun;
    if (s == "ssprk3") return IntegratorKind::ssprk3;
    fail(Errc::invalid_argument, "unknown integrator '" + s + "'");
}

std::string to_string(IntegratorKind k) {
    switch (k) {
        case IntegratorKind::euler: return "euler";
        case IntegratorKind::heun: return "heun";
        case IntegratorKind::ssprk3: return "ssprk3";
    }
    return "?";
}

namespace {

// out = u + dt * L(u)
void euler_stage(SpatialOperator& op, const Field& u, double dt, Field& work, Field& out) {
    op.rhs(u, work);
    out.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + dt * work[i];
}

}  // namespace

Field step(IntegratorKind kind, SpatialOperator& op, const Field& state, double dt) {
    if (!(dt >= 0.0) || !std::isfinite(dt)) fail(Errc::invalid_argument, "time step must be finite and nonnegative");
    const double limit = op.max_dt(state);
    if (dt > limit * (1.0 + 1e-12)) fail(Errc::cfl, "time step " + std::to_string(dt) + " exceeds the CFL limit " + std::to_string(limit));
    Field work, u1, u2;
    euler_stage(op, state, dt, work, u1);
    if (kind == IntegratorKind::euler) return u1;
    if (kind == IntegratorKind::heun) {
        euler_stage(op, u1, dt, work, u2);
        for (std::size_t i = 0; i < state.size(); ++i) u2[i] = 0.5 * state[i] + 0.5 * u2[i];
        return u2;
    }
    euler_stage(op, u1, dt, work, u2);
    for (std::size_t i = 0; i < state.size(); ++i) u2[i] = 0.75 * state[i] + 0.25 * u2[i];
    euler_stage(op, u2, dt, work, u1);
    for (std::size_t i = 0; i < state.size(); ++i) u1[i] = state[i] / 3.0 + (2.0 / 3.0) * u1[i];
    return u1;
}

std::vector<Snapshot> integrate(IntegratorKind kind, SpatialOperator& op, Field state, double t_end,
                                const std::vector<double>& snapshot_times, const StepObserver& observer) {
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) fail(Errc::invalid_argument, "t_end must be finite and nonnegative");
    for (std::size_t k = 0; k < snapshot_times.size(); ++k) {
        const double s = snapshot_times[k];
        if (!(s >= 0.0 && s <= t_end)) fail(Errc::invalid_argument, "snapshot time outside [0, t_end]");
        if (k > 0 && s < snapshot_times[k - 1]) fail(Errc::invalid_argument, "snapshot times must be sorted");
    }
    std::vector<double> targets(snapshot_times);
    targets.push_back(t_end);

    std::vector<Snapshot> out;
    double t = 0.0;
    long n = 0;
    op.check(state, n);
    std::size_t next = 0;
    for (; next < snapshot_times.size() && snapshot_times[next] <= t; ++next) out.push_back({t, state});
    while (t < t_end) {
        const double target = targets[next];
        double dt = op.max_dt(state);
        if (!(dt > 0.0) || !std::isfinite(dt)) fail(Errc::cfl, "no admissible time step at step " + std::to_string(n));
        bool land = false;
        if (t + dt >= target) {
            dt = target - t;
            land = true;
        }
        Field after = step(kind, op, state, dt);
        ++n;
        op.check(after, n);
        const double t_new = land ? target : t + dt;
        if (observer) observer(StepInfo{n, t_new, dt, state, after});
        state = std::move(after);
        t = t_new;
        for (; next < snapshot_times.size() && snapshot_times[next] <= t; ++next) out.push_back({snapshot_times[next], state});
    }
    if (snapshot_times.empty()) out.push_back({t_end, state});
    return out;
}

}  // namespace aggro
