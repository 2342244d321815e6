#pragma once

#include <memory>
#include <string>
#include <vector>

#include "aggro/convolution.hpp"
#include "aggro/measures.hpp"
#include "aggro/potentials.hpp"
#include "aggro/scheme1d.hpp"
#include "aggro/transport.hpp"

namespace aggro {

// atoms plus piecewise-constant densities on intervals
struct Mixed1D {
    struct Piece {
        double a, b;
        double density;
    };
    std::vector<Atom1D> atoms;
    std::vector<Piece> pieces;
    double mass() const;
};

Mixed1D mixed_atoms(const Measure1D& m);    // cell masses at midpoints
Mixed1D mixed_density(const Measure1D& m);  // constant density per cell
Mixed1D mixed_atoms(const std::vector<Atom1D>& atoms);
// residual atoms at midpoints plus density sigma_i on [x_{i-1/2}, x_{i+1/2}]
Mixed1D reconstructed_measure(const Measure1D& m, Order order);

// masses must agree to 1e-9 relative; the lighter side is scaled up
double d1_1d(const Mixed1D& mu, const Mixed1D& nu);
double d1_1d(const Measure1D& mu, const Measure1D& nu);
double d1_1d(const std::vector<Atom1D>& mu, const std::vector<Atom1D>& nu);

// returns the factor that scales the lighter mass onto the heavier one
double balance_masses(double ma, double mb);

// E = 1/2 h^2d sum_i sum_j W(x_i - x_j) rho_i rho_j
double interaction_energy(const Measure1D& m, const Potential& p);
double interaction_energy(const Measure2D& m, const Potential& p);

// repeated energy evaluation on a fixed grid, through FFT when fast
class EnergyEvaluator {
public:
    EnergyEvaluator(const Grid1D& g, const Potential& p, bool fast);
    EnergyEvaluator(const Grid2D& g, const Potential& p, bool fast);
    ~EnergyEvaluator();
    EnergyEvaluator(const EnergyEvaluator&) = delete;
    EnergyEvaluator& operator=(const EnergyEvaluator&) = delete;

    double operator()(const std::vector<double>& rho);

private:
    int dim_;
    int nx_, ny_;
    double h_;  // cell volume
    std::vector<double> table_;  // W at offsets, dense path
    std::unique_ptr<Convolver1D> c1_;
    std::unique_ptr<Convolver2D> c2_;
    std::vector<double> work_;
};

struct EnergyReport {
    std::vector<double> t;
    std::vector<double> E;

    void push(double time, double energy);
    double max_increment() const;
    void write_csv(const std::string& path) const;
};

struct Dissipation {
    double max_increment = 0.0;
    double K_hat = 0.0;
};

// K = max_n (E^{n+1} - E^n) / (dx dt), clamped at 0
Dissipation dissipation_check(const EnergyReport& report, double dx, double dt);
// same with dt taken per step from the report times
Dissipation dissipation_check(const EnergyReport& report, double dx);

}  // namespace aggro
