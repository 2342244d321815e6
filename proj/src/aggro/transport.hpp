#pragma once

#include <cstdint>
#include <vector>

#include "aggro/measures.hpp"

namespace aggro {

// Primal network simplex for uncapacitated min-cost flow with integer supplies and costs.
// Arcs may be appended between calls to run(); the current basis is reused.
class NetworkSimplex {
public:
    using Int = std::int64_t;

    NetworkSimplex(int nodes, std::vector<Int> supply, Int max_cost);

    int add_arc(int u, int v, Int cost);
    // returns false when the supplies cannot be routed
    bool run();

    int nodes() const { return n_; }
    int arcs() const { return int(source_.size()) - n_; }
    Int flow(int arc) const { return flow_[std::size_t(arc + n_)]; }
    int arc_source(int arc) const { return source_[std::size_t(arc + n_)]; }
    int arc_target(int arc) const { return target_[std::size_t(arc + n_)]; }
    Int arc_cost(int arc) const { return cost_[std::size_t(arc + n_)]; }
    // node potentials with cost(u,v) + pi(u) - pi(v) >= 0 at optimality
    Int potential(int u) const { return pi_[std::size_t(u)]; }
    long pivots() const { return pivots_; }

private:
    bool find_entering();
    int find_join(int a, int b) const;
    bool find_leaving();
    void change_flow(bool change);
    void update_tree();
    void update_potential();

    int n_, root_;
    Int art_cost_;
    std::vector<Int> supply_;
    std::vector<int> source_, target_;
    std::vector<Int> cost_, flow_;
    std::vector<signed char> state_;
    std::vector<int> parent_, pred_, thread_, rev_thread_, succ_num_, last_succ_;
    std::vector<signed char> pred_dir_;
    std::vector<Int> pi_;
    std::vector<int> dirty_revs_;
    bool initialized_ = false;
    int block_size_ = 0;
    int next_arc_ = 0;
    int in_arc_ = 0, join_ = 0, u_in_ = 0, v_in_ = 0, u_out_ = 0, v_out_ = 0;
    Int delta_ = 0;
    long pivots_ = 0;
};

struct TransportResult {
    double cost = 0.0;
    double dual_gap = 0.0;       // |primal - dual| of the certificate
    double max_violation = 0.0;  // worst dual infeasibility, in cost units
    int rounds = 0;              // column-generation rounds (grid solver)
    long arcs = 0;
};

// balanced Euclidean transport between two atom lists by successive shortest paths
TransportResult transport_ssp(const std::vector<Atom2D>& mu, const std::vector<Atom2D>& nu);

// exact d1 between two measures on the same lattice by sparse transshipment plus dual certification
TransportResult transport_grid(const Measure2D& mu, const Measure2D& nu, int radius = 4);

struct D1Options {
    double threshold = 1e-14;  // cell masses at or below this are dropped
    int cap = 20000;           // atom cap for the bipartite solver
    int radius = 4;            // stencil radius of the lattice solver
};

double d1_2d(const std::vector<Atom2D>& mu, const std::vector<Atom2D>& nu, const D1Options& opt = {});
double d1_2d(const Measure2D& mu, const Measure2D& nu, const D1Options& opt = {});

// integer masses with identical totals, rounded by cumulative sums
void quantize_pair(const std::vector<double>& a, const std::vector<double>& b, std::vector<std::int64_t>& qa,
                   std::vector<std::int64_t>& qb, double& unit);

}  // namespace aggro
