#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aggro/measures.hpp"
#include "aggro/potentials.hpp"
#include "aggro/scheme1d.hpp"
#include "aggro/timeint.hpp"

namespace aggro {

struct ReferenceSpec {
    std::string kind = "none";  // none, burgers_fine, self_fine, particle_oracle, closed_form, exact_steady
    int level = 13;             // log2 of the fine cell count for burgers_fine / self_fine
    std::string name;           // steady state for exact_steady
    bool project = true;        // atomic references: project onto the run grid
};

struct ExperimentConfig {
    int dimension = 1;
    std::array<double, 4> domain{-1.0, 1.0, -1.0, 1.0};  // ax, bx, ay, by
    int n_cells = 256;
    std::string potential = "abs";
    Potential::Params potential_params;
    std::string initial = "gaussian36";
    std::map<std::string, double> initial_params;
    bool normalize = true;
    FluxKind flux = FluxKind::lax_friedrichs;
    Order order = Order::second;
    IntegratorKind integrator = IntegratorKind::ssprk3;
    double cfl = 0.4;
    CMode c_mode = CMode::lipschitz;
    double c_value = 0.0;  // > 0 fixes the LxF coefficient
    bool fast = true;
    bool wall_check = true;
    double t_end = 0.0;
    std::vector<double> snapshot_times;
    bool mass_time_unit = false;  // t_end and snapshots are multiples of the raw initial mass M
    ReferenceSpec reference;
    bool energy = false;
    std::string output_dir = ".";
    std::string prefix = "run";

    double time_scale() const;
    double final_time() const { return t_end * time_scale(); }
    Grid1D grid1d(int n) const;
    Grid2D grid2d(int n) const;
    FluxConfig flux_config() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string dump_config(const ExperimentConfig& c);

std::vector<std::string> initial_catalogue();
bool initial_is_atomic(const ExperimentConfig& c);
// total mass of the unnormalised initial datum on the domain
double raw_mass(const ExperimentConfig& c);
std::vector<Atom1D> initial_atoms1d(const ExperimentConfig& c);
Measure1D initial_measure1d(const ExperimentConfig& c, int n);
Measure2D initial_measure2d(const ExperimentConfig& c, int n);

struct ParticleOptions {
    double step_fraction = 1e-5;
    double merge_distance = 1e-9;
};

std::vector<Atom1D> particle_oracle(const std::vector<Atom1D>& atoms, const Potential& p, double t_end,
                                    const ParticleOptions& opt = {});
std::vector<Atom2D> particle_oracle(const std::vector<Atom2D>& atoms, const Potential& p, double t_end,
                                    const ParticleOptions& opt = {});

// exact atomic solutions where one is known
std::vector<Atom1D> closed_form_atoms(const ExperimentConfig& c, double t);

struct ConvergenceRow {
    int n = 0;
    double d1 = 0.0;
    std::optional<double> ooc;
};

std::vector<ConvergenceRow> with_ooc(const std::vector<int>& n, const std::vector<double>& err);
// least-squares slope of log err against log dx
double fitted_order(const std::vector<ConvergenceRow>& rows);

// simulation at resolution n up to t (final_time when negative)
Measure1D simulate1d(const ExperimentConfig& c, int n, double t = -1.0);
Measure2D simulate2d(const ExperimentConfig& c, int n, double t = -1.0);

Measure1D burgers_reference(const ExperimentConfig& c, int level);

// d1 error of the run at resolution n against the configured reference
double reference_error(const ExperimentConfig& c, int n);

std::vector<ConvergenceRow> convergence_study(const ExperimentConfig& c, int levels);
void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::string& path);

std::vector<std::string> steady_catalogue();
Measure1D steady_state1d(const std::string& name, const Potential& p, const Grid1D& g, double mass, double com);
std::vector<Atom1D> steady_atoms1d(const std::string& name, double mass, double com);
Measure2D steady_state2d(const std::string& name, const Potential& p, const Grid2D& g, double mass,
                         std::array<double, 2> com);
double steady_state_distance(const ExperimentConfig& c);

struct RunSummary {
    double t_end = 0.0;
    long steps = 0;
    double dt = 0.0;  // regular step; the last one may be shorter
    double mass0 = 0.0, mass = 0.0;
    double mass_drift = 0.0;  // relative
    double com_drift = 0.0;
    double max_speed = 0.0;
    double lipschitz = 0.0;
    double min_density = 0.0;
    double K_hat = 0.0;
    double energy_max_increment = 0.0;
    std::vector<std::string> files;
};

RunSummary run_experiment(const ExperimentConfig& c);
std::string summary_json(const RunSummary& s);

struct EnergyRow {
    int n = 0;
    double K_hat = 0.0;
    double max_increment = 0.0;
    long steps = 0;
};

// energy-tracking runs at n_cells * 2^k, k < levels
std::vector<EnergyRow> energy_study(const ExperimentConfig& c, int levels);

}  // namespace aggro
