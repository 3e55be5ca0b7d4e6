#pragma once

#include <vector>

#include "vpmcf/grid.hpp"
#include "vpmcf/vec.hpp"

namespace vpmcf {

struct InterfaceSample {
    std::size_t cell; // lexicographic cell index
    Vec x;            // cell center
    Vec normal;       // approximate outward unit normal
    double weight;    // surface measure contribution
};

struct DiscreteInterface {
    std::vector<InterfaceSample> samples;
    double perimeter() const {
        double s = 0.0;
        for (const auto& q : samples) s += q.weight;
        return s;
    }
};

// Periodic separable Gaussian smoothing of a binary field; kernel std dev
// sigmaCells grid cells, discrete mass exactly 1, symmetric.
std::vector<double> mollify(const IndicatorField& chi, double sigmaCells = 2.0);

// Gradient of a smooth grid function by central differences (periodic).
Vec gridGradient(const std::vector<double>& u, const Grid& g, std::size_t idx);

// Interface samples via mollified-gradient reconstruction. The outward
// normal is -grad(u)/|grad(u)| (chi = 1 inside); weights are |grad u| h^d.
// Throws EmptyInterface when chi is constant.
DiscreteInterface discreteInterface(const IndicatorField& chi, double sigmaCells = 2.0);

} // namespace vpmcf
