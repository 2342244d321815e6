#pragma once

#include <functional>
#include <string>
#include <vector>

namespace aggro {

using Field = std::vector<double>;

// semi-discrete right-hand side dF/dt = L(F) together with its step restriction
class SpatialOperator {
public:
    virtual ~SpatialOperator() = default;
    virtual void rhs(const Field& state, Field& out) = 0;
    virtual double max_dt(const Field& state) = 0;
    // called on every accepted state; throws to abort a run
    virtual void check(const Field& state, long step) const;
};

enum class IntegratorKind { euler, heun, ssprk3 };

IntegratorKind integrator_from_string(const std::string& s);
std::string to_string(IntegratorKind k);

Field step(IntegratorKind kind, SpatialOperator& op, const Field& state, double dt);

struct Snapshot {
    double t;
    Field state;
};

struct StepInfo {
    long step;
    double t;
    double dt;
    const Field& before;
    const Field& after;
};

using StepObserver = std::function<void(const StepInfo&)>;

// snapshot_times must be sorted within [0, t_end]; steps are shortened to land on them exactly
std::vector<Snapshot> integrate(IntegratorKind kind, SpatialOperator& op, Field state, double t_end,
                                const std::vector<double>& snapshot_times, const StepObserver& observer = {});

}  // namespace aggro
