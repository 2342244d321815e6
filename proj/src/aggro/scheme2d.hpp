#pragma once

#include <memory>
#include <vector>

#include "aggro/convolution.hpp"
#include "aggro/measures.hpp"
#include "aggro/potentials.hpp"
#include "aggro/scheme1d.hpp"
#include "aggro/timeint.hpp"

namespace aggro {

// x-stations (x_i, y_{j+1/2}) form an (nx+1) x ny array, y-stations (x_{i+1/2}, y_j) an nx x (ny+1) array,
// gridpoints (x_i, y_j) an (nx+1) x (ny+1) array; all row-major in the first index
struct Reconstruction2D {
    int nx = 0, ny = 0;
    std::vector<double> sigma;      // gridpoints
    std::vector<double> rho_tilde;  // vertices
    std::vector<double> east, west;    // x-stations
    std::vector<double> north, south;  // y-stations

    std::size_t gp(int i, int j) const { return std::size_t(i) * std::size_t(ny + 1) + std::size_t(j); }
    std::size_t xs(int i, int j) const { return std::size_t(i) * std::size_t(ny) + std::size_t(j); }
    std::size_t ys(int i, int j) const { return std::size_t(i) * std::size_t(ny + 1) + std::size_t(j); }
};

Reconstruction2D reconstruct2d(const std::vector<double>& rho, int nx, int ny, Order order);
inline Reconstruction2D reconstruct2d(const Measure2D& m, Order order) {
    return reconstruct2d(m.rho, m.grid.nx, m.grid.ny, order);
}

struct Velocities2D {
    std::vector<double> east, west, north, south;
};

// dense reference: a(i,j) = dx dy sum_{(k,l) != (i,j)} K(i-k, j-l) v(k,l) on an sx-by-sy station array
std::vector<double> velocities2d_dense(const KernelTable2D& t, bool x_component, const std::vector<double>& v,
                                       int sx, int sy, double area);

class Scheme2D : public SpatialOperator {
public:
    Scheme2D(const Grid2D& grid, const Potential& potential, const FluxConfig& config);
    ~Scheme2D() override;

    const Grid2D& grid() const { return grid_; }
    const Potential& potential() const { return potential_; }
    const FluxConfig& config() const { return config_; }
    const KernelTable2D& table() const { return table_; }
    double lipschitz() const { return lip_; }

    Velocities2D velocities(const Reconstruction2D& rec);

    // x-fluxes at x-stations and y-fluxes at y-stations
    void fluxes(const std::vector<double>& rho, std::vector<double>& jx, std::vector<double>& jy);

    void rhs(const Field& rho, Field& out) override;
    double max_dt(const Field& rho) override;
    void check(const Field& rho, long step) const override;

    Measure2D spatial_operator(const Measure2D& m);

    double last_max_speed() const { return last_speed_; }
    double last_c() const { return last_c_; }

private:
    Grid2D grid_;
    Potential potential_;
    FluxConfig config_;
    KernelTable2D table_;
    double lip_ = 0.0;
    std::unique_ptr<Convolver2D> conv_x_, conv_y_;
    double last_speed_ = 0.0, last_c_ = 0.0;
};

}  // namespace aggro
