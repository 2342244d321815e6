#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace aggro {

struct Grid1D {
    double x0 = 0.0;
    double dx = 1.0;
    int n = 1;

    Grid1D() = default;
    Grid1D(double x0_, double dx_, int n_);
    static Grid1D span(double a, double b, int n);

    double point(int i) const { return x0 + i * dx; }
    double mid(int i) const { return x0 + (i + 0.5) * dx; }
    double x1() const { return x0 + n * dx; }
    double length() const { return n * dx; }
    // index of the half-open cell (x_i, x_{i+1}] holding p, or -1
    int locate(double p) const;
};

struct Grid2D {
    double x0 = 0.0, y0 = 0.0;
    double dx = 1.0, dy = 1.0;
    int nx = 1, ny = 1;

    Grid2D() = default;
    Grid2D(double x0_, double y0_, double dx_, double dy_, int nx_, int ny_);
    static Grid2D span(double ax, double bx, double ay, double by, int nx, int ny);

    Grid1D xaxis() const { return {x0, dx, nx}; }
    Grid1D yaxis() const { return {y0, dy, ny}; }
    std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }
    std::size_t idx(int i, int j) const { return std::size_t(i) * std::size_t(ny) + std::size_t(j); }
    double midx(int i) const { return x0 + (i + 0.5) * dx; }
    double midy(int j) const { return y0 + (j + 0.5) * dy; }
    double area() const { return dx * dy; }
    double diameter() const;
};

struct Measure1D {
    Grid1D grid;
    std::vector<double> rho;

    Measure1D() = default;
    Measure1D(const Grid1D& g) : grid(g), rho(std::size_t(g.n), 0.0) {}
    Measure1D(const Grid1D& g, std::vector<double> r);
    double mass() const;
};

struct Measure2D {
    Grid2D grid;
    std::vector<double> rho;  // rho[i*ny + j] holds the density at vertex (i+1/2, j+1/2)

    Measure2D() = default;
    Measure2D(const Grid2D& g) : grid(g), rho(g.size(), 0.0) {}
    Measure2D(const Grid2D& g, std::vector<double> r);
    double mass() const;
    double at(int i, int j) const { return rho[grid.idx(i, j)]; }
};

struct Atom1D {
    double x;
    double m;
};

struct Atom2D {
    double x, y;
    double m;
};

using Density1D = std::function<double(double)>;
using Density2D = std::function<double(double, double)>;

// breaks: extra points where f may be non-smooth; cells are split there
Measure1D project_density(const Density1D& f, const Grid1D& g, const std::vector<double>& breaks = {});
Measure2D project_density(const Density2D& f, const Grid2D& g);
Measure1D project_atoms(const std::vector<Atom1D>& atoms, const Grid1D& g);
Measure2D project_atoms(const std::vector<Atom2D>& atoms, const Grid2D& g);

void normalize(Measure1D& m);
void normalize(Measure2D& m);

struct Moments1D {
    double mass;
    double first_abs;
    double second;
    double com;
};

struct Moments2D {
    double mass;
    double first_abs;
    double second;
    std::array<double, 2> com;
};

Moments1D moments(const Measure1D& m);
Moments2D moments(const Measure2D& m);
double tail_first_moment(const Measure1D& m, double R);

// right-continuous step function: F(x) = masses[k] for x in [x[k], x[k+1])
struct StepCdf {
    std::vector<double> x;
    std::vector<double> F;
    double operator()(double t) const;
    double total() const { return F.empty() ? 0.0 : F.back(); }
};

StepCdf cdf(const Measure1D& m);

std::vector<Atom1D> atoms_of(const Measure1D& m);
std::vector<Atom2D> atoms_of(const Measure2D& m, double threshold = 0.0);

// sums masses of factor x factor blocks onto the coarse grid
Measure1D aggregate(const Measure1D& fine, int factor);
Measure2D aggregate(const Measure2D& fine, int factor);

void write_csv(const Measure1D& m, const std::string& path);
void write_csv(const Measure2D& m, const std::string& path);

}  // namespace aggro
