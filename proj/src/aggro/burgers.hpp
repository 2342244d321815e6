#pragma once

#include <string>
#include <vector>

#include "aggro/measures.hpp"
#include "aggro/timeint.hpp"

namespace aggro {

// cell averages with constant ghost states outside the grid
struct BurgersState {
    Grid1D grid;
    std::vector<double> u;
    double left = 0.0;
    double right = 1.0;
};

// f(u) = sign (mass u - u^2); mass 1 gives the flux dual to W = sign |x|
struct BurgersFlux {
    double sign = 1.0;
    double mass = 1.0;
    double f(double u) const { return sign * (mass * u - u * u); }
    double df(double u) const { return sign * (mass - 2.0 * u); }
};

// sign-aware minmod of the one-sided difference quotients, ghosts at both ends
std::vector<double> minmod_slopes(const std::vector<double>& u, double dx, double left, double right);
// zero-gradient ghosts
std::vector<double> minmod_slopes(const std::vector<double>& u, double dx);

class BurgersOperator : public SpatialOperator {
public:
    BurgersOperator(const Grid1D& grid, const BurgersFlux& flux, double left, double right, double cfl = 0.4,
                    double c_override = 0.0);

    // interface fluxes F_{i-1/2}, i = 0..n
    std::vector<double> fluxes(const std::vector<double>& u);
    void rhs(const Field& u, Field& out) override;
    double max_dt(const Field& u) override;

    double coefficient(const std::vector<double>& u) const;
    double last_c() const { return last_c_; }

private:
    Grid1D grid_;
    BurgersFlux flux_;
    double left_, right_;
    double cfl_;
    double c_override_;
    double last_c_ = 0.0;
};

// one forward Euler step; dt c / dx must not exceed 1/2
BurgersState burgers_step(const BurgersState& s, double dt, double sign, double c_override = 0.0);

// u on the staggered grid centred at the gridpoints of m: u_i = sum_{j<i} dx rho_j, i = 0..n
BurgersState primitive(const Measure1D& m);
Measure1D difference(const BurgersState& s);

void write_csv(const BurgersState& s, const std::string& path);

}  // namespace aggro
