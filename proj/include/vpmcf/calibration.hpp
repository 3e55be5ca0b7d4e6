#pragma once

#include <functional>
#include <memory>
#include <string>

#include "vpmcf/elliptic.hpp"
#include "vpmcf/grid.hpp"
#include "vpmcf/profiles.hpp"
#include "vpmcf/shapes.hpp"
#include "vpmcf/vec.hpp"

namespace vpmcf {

// Gradient-flow calibration (xi, B, theta, lambda*) for a strong solution.
// Evaluators are pure; B caches one Neumann solve per time slice.
struct Calibration {
    enum class Provenance { AnalyticSphere, Constructed };

    int dim = 2;
    Provenance provenance = Provenance::Constructed;
    CutoffProfile profile;
    std::shared_ptr<const StrongSolution> shape;

    std::function<Vec(const Vec&, double)> xi;
    std::function<double(const Vec&, double)> theta;
    std::function<Vec(const Vec&, double)> B;
    std::function<double(double)> lambdaStar;

    // Analytic space derivatives (divXi/gradXi always available; gradB only
    // on the analytic sphere path where B vanishes identically).
    std::function<double(const Vec&, double)> divXi;
    std::function<Mat(const Vec&, double)> gradXi;
    std::function<Mat(const Vec&, double)> gradB;

    // Recorded constants.
    double shortnessC = 0.0;  // |xi| <= max(1 - c dist^2, 0)
    double coercivityC = 0.0; // min(dist, c) <= |theta|
    double supportRadius = 0.0; // B and xi vanish outside this ball
};

// xi = zeta(s) grad s inside the tube (0 outside), theta = tau(s).
// Throws TubeTooWide if profile.delta exceeds the shape's tube radius.
std::pair<std::function<Vec(const Vec&, double)>, std::function<double(const Vec&, double)>>
buildXiTheta(std::shared_ptr<const StrongSolution> shape, const CutoffProfile& profile);

// lambda*(t): boundary-quadrature mean of div(xi) over Sigma*(t).
double buildLambdaStar(const StrongSolution& shape, const CutoffProfile& profile, double t,
                       int quadratureNodes = 512);

// Velocity extension for one time slice: gradient of the interior Neumann
// potential, continued across/outside Sigma*(t) by a truncated first-order
// normal Taylor extension of the boundary gradient.
class VelocityExtension {
public:
    VelocityExtension(std::shared_ptr<const StrongSolution> shape, CutoffProfile profile,
                      double t, int nodes, double epsSolve);
    Vec operator()(const Vec& x) const;
    const HarmonicPotential& potential() const { return *pot_; }

private:
    std::shared_ptr<const StrongSolution> shape_;
    CutoffProfile profile_;
    double t_;
    std::unique_ptr<HarmonicPotential> pot_;
    double blendInner_, blendOuter_; // interior handoff band (distances > 0)
};

// Analytic calibration of the static sphere: B = 0, lambda* = (d-1)/R.
Calibration sphereCalibration(double R, int d, const CutoffProfile& profile,
                              double horizon = 1.0);

// Calibration of a general catalog shape. Spheres take the analytic fast
// path; other 2D shapes get the constructed B via the Neumann solve.
Calibration buildCalibration(std::shared_ptr<const StrongSolution> shape,
                             CutoffProfile profile, int neumannNodes = 512,
                             double epsSolve = 1e-8, int quadratureNodes = 512);

// Gridded export: header {magic "VPCF", version u16, d u16, n u32}, then
// per-cell f64 tuples xi|B|theta in lexicographic cell order, then lambda*
// as a trailing f64.
void exportCalibrationFields(const Calibration& cal, const Grid& grid, double t,
                             const std::string& path);

} // namespace vpmcf
