#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "vpmcf/vec.hpp"

namespace vpmcf {

struct BoundaryData {
    Vec normal;            // outward unit normal nu*
    double meanCurvature;  // H* (sum of principal curvatures)
    double normalVelocity; // V*
};

struct BoundaryQuadrature {
    std::vector<Vec> points;
    std::vector<double> weights; // approximate surface measure dH^{d-1}
    double total() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

// Sample of a closed planar boundary curve at a uniform parameter node.
// Consumed by the 2D boundary-integral solver.
struct CurveSample {
    double theta;
    Vec point;
    Vec tangent; // unit, counterclockwise
    Vec normal;  // unit, outward
    double speed; // |dc/dtheta|
    double curvature;
    double velocity; // normal velocity V* at the node
};

// Time-indexed oracle for a strong solution Sigma*(t) = boundary of Omega*(t).
// Sign convention: s < 0 inside Omega*(t).
class StrongSolution {
public:
    virtual ~StrongSolution() = default;

    virtual int dim() const = 0;
    virtual double horizon() const = 0;     // T*
    virtual double outerRadius() const = 0; // R*: Omega*(t) inside B_{R*}(0)
    virtual double tubeRadius() const = 0;  // delta

    virtual double signedDistance(const Vec& x, double t) const = 0;
    virtual Vec distGradient(const Vec& x, double t) const = 0;
    virtual Mat distHessian(const Vec& x, double t) const = 0;

    // Nearest-point projection; requires |s(x,t)| < tubeRadius().
    virtual Vec project(const Vec& x, double t) const;

    // Boundary fields at a point p with s(p,t)=0 (to tolerance).
    virtual BoundaryData boundary(const Vec& p, double t) const = 0;

    virtual BoundaryQuadrature quadrature(double t, int nodes) const = 0;
    virtual double enclosedVolume(double t) const = 0;

    // Uniform-parameter samples of the boundary curve; 2D shapes with a
    // single boundary component only.
    virtual std::vector<CurveSample> curveSamples(double t, int nodes) const;

    // True if the shape is constant in time (static flows short-circuit
    // all time derivatives).
    virtual bool isStatic() const { return false; }

    double boundaryTolerance() const { return 1e-7 * std::max(1.0, outerRadius()); }
};

// Static sphere/ball of radius R: the basic calibrated example.
class Sphere final : public StrongSolution {
public:
    Sphere(int d, double R, Vec center = {0, 0, 0}, double horizon = 1.0,
           double tubeCap = 0.25);

    int dim() const override { return d_; }
    double horizon() const override { return T_; }
    double outerRadius() const override;
    double tubeRadius() const override { return delta_; }
    double radius() const { return R_; }
    Vec center() const { return c_; }

    double signedDistance(const Vec& x, double t) const override;
    Vec distGradient(const Vec& x, double t) const override;
    Mat distHessian(const Vec& x, double t) const override;
    BoundaryData boundary(const Vec& p, double t) const override;
    BoundaryQuadrature quadrature(double t, int nodes) const override;
    std::vector<CurveSample> curveSamples(double t, int nodes) const override;
    double enclosedVolume(double t) const override;
    bool isStatic() const override { return true; }

private:
    int d_;
    double R_;
    Vec c_;
    double T_;
    double delta_;
};

// Finite union of disjoint balls with common centers; the radii follow the
// volume-preserving ODE dr_i/dt = -(d-1)/r_i + lambda(t) with lambda the
// area-weighted mean curvature. Radii are integrated with RK4 on a dense
// time grid at construction.
class BallUnion final : public StrongSolution {
public:
    BallUnion(int d, std::vector<Vec> centers, std::vector<double> radii,
              double horizon, double tubeCap = 0.25, int odeSteps = 8192);

    int dim() const override { return d_; }
    double horizon() const override { return T_; }
    double outerRadius() const override;
    double tubeRadius() const override { return delta_; }

    double signedDistance(const Vec& x, double t) const override;
    Vec distGradient(const Vec& x, double t) const override;
    Mat distHessian(const Vec& x, double t) const override;
    BoundaryData boundary(const Vec& p, double t) const override;
    BoundaryQuadrature quadrature(double t, int nodes) const override;
    double enclosedVolume(double t) const override;

    std::vector<double> radiiAt(double t) const;
    double lambdaAt(double t) const;

private:
    int nearestBall(const Vec& x, double t) const;

    int d_;
    std::vector<Vec> centers_;
    double T_;
    double delta_;
    int odeSteps_;
    std::vector<std::vector<double>> radiiTable_; // [step][ball]
};

// Star-shaped planar curve r(theta, t) = rho(theta) + t*u(theta) with
//   rho(theta) = R (1 + sum_k a_k cos(k theta) + b_k sin(k theta)).
// The speed profile u is chosen so that at t=0 the normal velocity equals
// a prescribed boundary datum V0 (default: the volume-preserving datum
// V0 = -H + mean(H), which makes t=0 an exact slice of the flow). The
// family is defined for t in [-T*, T*]; verification happens at t=0.
class FourierCurve final : public StrongSolution {
public:
    FourierCurve(double R, std::vector<double> cosCoeffs, std::vector<double> sinCoeffs,
                 double horizon = 0.5, double tubeCap = 0.25,
                 std::function<double(double)> prescribedV0 = nullptr);

    int dim() const override { return 2; }
    double horizon() const override { return T_; }
    double outerRadius() const override { return Router_; }
    double tubeRadius() const override { return delta_; }

    double signedDistance(const Vec& x, double t) const override;
    Vec distGradient(const Vec& x, double t) const override;
    Mat distHessian(const Vec& x, double t) const override;
    Vec project(const Vec& x, double t) const override;
    BoundaryData boundary(const Vec& p, double t) const override;
    BoundaryQuadrature quadrature(double t, int nodes) const override;
    std::vector<CurveSample> curveSamples(double t, int nodes) const override;
    double enclosedVolume(double t) const override;

    double radiusAt(double theta, double t) const;
    CurveSample sampleAt(double theta, double t) const;

private:
    double rho(double theta) const;
    double drho(double theta) const;
    double ddrho(double theta) const;
    double u(double theta) const;                       // radial speed profile
    void rFamily(double theta, double t, double& r, double& rp, double& rpp) const;
    double projectParam(const Vec& x, double t) const;  // nearest-point parameter

    double R_;
    std::vector<double> a_, b_;
    double T_;
    double delta_;
    double Router_;
    double lambda0_; // mean curvature at t=0
    std::function<double(double)> v0_;
};

} // namespace vpmcf
