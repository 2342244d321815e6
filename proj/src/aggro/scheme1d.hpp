#pragma once

#include <memory>
#include <string>
#include <vector>

#include "aggro/convolution.hpp"
#include "aggro/measures.hpp"
#include "aggro/potentials.hpp"
#include "aggro/timeint.hpp"

namespace aggro {

enum class FluxKind { lax_friedrichs, upwind };
enum class Order { first, second };
enum class CMode { lipschitz, adaptive };

FluxKind flux_from_string(const std::string& s);
Order order_from_string(const std::string& s);
CMode cmode_from_string(const std::string& s);
std::string to_string(FluxKind f);
std::string to_string(Order o);

struct FluxConfig {
    FluxKind flux = FluxKind::lax_friedrichs;
    Order order = Order::second;
    CMode c_mode = CMode::lipschitz;
    double cfl = 0.4;
    bool fast = false;          // FFT convolution instead of the dense loop
    double c_override = 0.0;    // > 0 injects a fixed LxF coefficient
    bool strict = false;        // reject c < max|a|
    bool wall_check = true;     // abort when mass reaches the outer two cells
};

struct Reconstruction1D {
    std::vector<double> sigma;      // n+1 gridpoints
    std::vector<double> rho_tilde;  // n midpoints
    std::vector<double> plus;       // n+1 gridpoints, plus[n] = 0
    std::vector<double> minus;      // n+1 gridpoints, minus[0] = 0
};

Reconstruction1D reconstruct(const std::vector<double>& rho, Order order);
inline Reconstruction1D reconstruct(const Measure1D& m, Order order) { return reconstruct(m.rho, order); }

// a_i = dx sum_{j != i} table[i-j] v_j over gridpoints, dense reference loop
std::vector<double> velocities_dense(const std::vector<double>& table, const std::vector<double>& v, double dx);

std::vector<double> flux_lxf(const Reconstruction1D& rec, const std::vector<double>& a_plus,
                             const std::vector<double>& a_minus, double c);
std::vector<double> flux_upwind(const Reconstruction1D& rec, const std::vector<double>& a_plus,
                                const std::vector<double>& a_minus);

class Scheme1D : public SpatialOperator {
public:
    Scheme1D(const Grid1D& grid, const Potential& potential, const FluxConfig& config);
    ~Scheme1D() override;

    const Grid1D& grid() const { return grid_; }
    const Potential& potential() const { return potential_; }
    const FluxConfig& config() const { return config_; }
    const std::vector<double>& table() const { return table_; }
    // Lipschitz constant over the domain diameter
    double lipschitz() const { return lip_; }

    void velocities(const Reconstruction1D& rec, std::vector<double>& a_plus, std::vector<double>& a_minus);
    std::vector<double> fluxes(const std::vector<double>& rho);

    void rhs(const Field& rho, Field& out) override;
    double max_dt(const Field& rho) override;
    void check(const Field& rho, long step) const override;

    Measure1D spatial_operator(const Measure1D& m);

    double last_max_speed() const { return last_speed_; }
    double last_c() const { return last_c_; }

    static constexpr double eps_c = 1e-8;

private:
    double pick_c(const std::vector<double>& ap, const std::vector<double>& am) const;

    Grid1D grid_;
    Potential potential_;
    FluxConfig config_;
    std::vector<double> table_;
    double lip_ = 0.0;
    std::unique_ptr<Convolver1D> conv_;
    double last_speed_ = 0.0, last_c_ = 0.0;
};

}  // namespace aggro
