#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "aggro/measures.hpp"

namespace aggro {

enum class PotentialKind { abs, morse, attrep, cubic, quartic, log, dlv, quadform };

class Potential {
public:
    using Params = std::map<std::string, double>;

    static Potential make(const std::string& name, const Params& params = {});
    static std::vector<std::string> catalogue();

    const std::string& name() const { return name_; }
    PotentialKind kind() const { return kind_; }
    bool supports(int dim) const { return dim == 2 || kind_ != PotentialKind::quadform; }

    double value(double x) const;
    double grad(double x) const;
    double value(double x, double y) const;
    std::array<double, 2> grad(double x, double y) const;

    // sup |grad W| over 0 < |x| <= D (infinite for the logarithmic kernel)
    double lipschitz_on(double D) const;

    bool globally_lipschitz() const { return global_; }
    bool pointy() const { return pointy_; }
    bool covered_by_theory() const { return covered_; }

private:
    double w(double r) const;
    double dw(double r) const;

    std::string name_;
    PotentialKind kind_ = PotentialKind::abs;
    double a_ = 1.0;
    bool global_ = true, pointy_ = true, covered_ = true;
};

// gradient at signed offsets k*dx, k = -n..n, stored at index k+n; centre forced to 0
std::vector<double> kernel_table(const Potential& p, const Grid1D& g);

struct KernelTable2D {
    int kx = 0, ky = 0;  // offsets k in [-kx, kx], l in [-ky, ky]
    std::vector<double> gx, gy;
    std::size_t idx(int k, int l) const { return std::size_t(k + kx) * std::size_t(2 * ky + 1) + std::size_t(l + ky); }
};

KernelTable2D kernel_table(const Potential& p, const Grid2D& g);

}  // namespace aggro
