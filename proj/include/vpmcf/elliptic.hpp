#pragma once

#include <memory>
#include <vector>

#include "vpmcf/shapes.hpp"
#include "vpmcf/vec.hpp"

namespace vpmcf {

// Interior Neumann-Laplace problem on a fixed time slice of a strong
// solution: Laplace(phi) = 0 in Omega*(t), d(phi)/d(nu) = g on Sigma*(t),
// mean(phi) = 0 over Omega*(t).
struct NeumannProblem {
    const StrongSolution* domain = nullptr;
    double time = 0.0;
    std::vector<double> data;  // g at the solver's boundary nodes
    int nodes = 256;           // boundary discretization parameter
    double epsSolve = 1e-8;
    double epsCompatRel = 1e-10; // relative to max|g|, scaled by total measure
};

// Remove the weighted mean: g - (sum w g / sum w). Output has exactly zero
// weighted mean (up to roundoff).
std::vector<double> compatibilityProject(const std::vector<double>& g,
                                         const std::vector<double>& weights);

class HarmonicPotential {
public:
    virtual ~HarmonicPotential() = default;

    virtual double value(const Vec& x) const = 0;
    virtual Vec gradient(const Vec& x) const = 0;
    virtual Mat hessian(const Vec& x) const = 0;

    // Boundary-limit derivatives at p on Sigma*(t); spectrally interpolated
    // between nodes in 2D. Throws NotOnBoundary.
    virtual Vec boundaryGradient(const Vec& p) const = 0;
    virtual Mat boundaryHessian(const Vec& p) const = 0;

    virtual double meanValue() const = 0; // residual of the zero-mean constraint

    struct Diagnostics {
        double residual = 0.0;   // max Neumann-condition residual at nodes
        double compat = 0.0;     // weighted mean of the input data
        int systemSize = 0;
    };
    const Diagnostics& diagnostics() const { return diag_; }

protected:
    Diagnostics diag_;
};

// Solve the problem. 2D: single-layer Nystrom discretization on the
// uniformly parametrized boundary curve with the zero-mean constraint as a
// bordered row. 3D: restricted to spheres, solved by a least-squares
// spherical-harmonic expansion of g.
std::unique_ptr<HarmonicPotential> solveNeumann(const NeumannProblem& problem);

} // namespace vpmcf
