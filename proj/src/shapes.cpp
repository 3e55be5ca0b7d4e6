#include "vpmcf/shapes.hpp"

#include <algorithm>
#include <cmath>

#include "vpmcf/errors.hpp"

namespace vpmcf {

namespace {
constexpr double kPi = 3.14159265358979323846;

Mat identityD(int d) {
    Mat m = zeroMat();
    for (int i = 0; i < d; ++i) m[i][i] = 1.0;
    return m;
}
} // namespace

Vec StrongSolution::project(const Vec& x, double t) const {
    double s = signedDistance(x, t);
    if (std::abs(s) >= tubeRadius())
        throw OutsideTube("projection requested at distance " + std::to_string(s) +
                          " outside tube of radius " + std::to_string(tubeRadius()));
    return x - s * distGradient(x, t);
}

std::vector<CurveSample> StrongSolution::curveSamples(double, int) const {
    throw Error("Unsupported", "shape has no single planar boundary curve");
}

// ---------------------------------------------------------------------------
// Sphere

Sphere::Sphere(int d, double R, Vec center, double horizon, double tubeCap)
    : d_(d), R_(R), c_(center), T_(horizon) {
    if (R <= 0.0) throw Error("InvalidShape", "sphere radius must be positive");
    if (d != 2 && d != 3) throw Error("InvalidShape", "dimension must be 2 or 3");
    // Tube bound: 1/(2 max |H*|) with H* = (d-1)/R.
    delta_ = std::min(tubeCap, R / (2.0 * (d - 1)));
}

double Sphere::outerRadius() const { return norm(c_) + 2.0 * R_; }

double Sphere::signedDistance(const Vec& x, double) const { return norm(x - c_) - R_; }

Vec Sphere::distGradient(const Vec& x, double) const {
    Vec r = x - c_;
    double n = norm(r);
    if (n < 1e-300) return {1, 0, 0};
    return r / n;
}

Mat Sphere::distHessian(const Vec& x, double) const {
    Vec r = x - c_;
    double n = norm(r);
    Vec e = r / n;
    Mat m = identityD(d_) + (-1.0 * outer(e, e));
    return (1.0 / n) * m;
}

BoundaryData Sphere::boundary(const Vec& p, double t) const {
    if (std::abs(signedDistance(p, t)) > boundaryTolerance())
        throw NotOnBoundary("point is not on the sphere");
    return {distGradient(p, t), (d_ - 1) / R_, 0.0};
}

BoundaryQuadrature Sphere::quadrature(double, int nodes) const {
    BoundaryQuadrature q;
    if (d_ == 2) {
        double dth = 2.0 * kPi / nodes;
        for (int i = 0; i < nodes; ++i) {
            double th = i * dth;
            q.points.push_back(c_ + R_ * vec2(std::cos(th), std::sin(th)));
            q.weights.push_back(R_ * dth);
        }
    } else {
        // latitude-longitude product rule
        int nphi = nodes, nth = 2 * nodes;
        double dphi = kPi / nphi, dth = 2.0 * kPi / nth;
        for (int i = 0; i < nphi; ++i) {
            double phi = (i + 0.5) * dphi;
            for (int j = 0; j < nth; ++j) {
                double th = j * dth;
                Vec dir = vec3(std::sin(phi) * std::cos(th), std::sin(phi) * std::sin(th),
                               std::cos(phi));
                q.points.push_back(c_ + R_ * dir);
                q.weights.push_back(R_ * R_ * std::sin(phi) * dphi * dth);
            }
        }
    }
    return q;
}

std::vector<CurveSample> Sphere::curveSamples(double, int nodes) const {
    if (d_ != 2) throw Error("Unsupported", "curve samples only in d=2");
    std::vector<CurveSample> out(nodes);
    double dth = 2.0 * kPi / nodes;
    for (int i = 0; i < nodes; ++i) {
        double th = i * dth;
        Vec e = vec2(std::cos(th), std::sin(th));
        out[i] = {th, c_ + R_ * e, vec2(-e[1], e[0]), e, R_, 1.0 / R_, 0.0};
    }
    return out;
}

double Sphere::enclosedVolume(double) const {
    return d_ == 2 ? kPi * R_ * R_ : 4.0 / 3.0 * kPi * R_ * R_ * R_;
}

// ---------------------------------------------------------------------------
// BallUnion

BallUnion::BallUnion(int d, std::vector<Vec> centers, std::vector<double> radii,
                     double horizon, double tubeCap, int odeSteps)
    : d_(d), centers_(std::move(centers)), T_(horizon), odeSteps_(odeSteps) {
    if (d != 2 && d != 3) throw Error("InvalidShape", "dimension must be 2 or 3");
    const std::size_t m = centers_.size();
    if (m == 0 || radii.size() != m)
        throw Error("InvalidShape", "ball centers/radii mismatch");

    auto lambdaOf = [&](const std::vector<double>& r) {
        double num = 0.0, den = 0.0;
        for (double ri : r) {
            if (d_ == 2) { num += 1.0; den += ri; }
            else { num += 2.0 * ri; den += ri * ri; }
        }
        return num / den;
    };
    auto deriv = [&](const std::vector<double>& r) {
        double lam = lambdaOf(r);
        std::vector<double> dr(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) dr[i] = -(d_ - 1) / r[i] + lam;
        return dr;
    };

    radiiTable_.assign(odeSteps_ + 1, radii);
    double dt = T_ / odeSteps_;
    std::vector<double> r = radii;
    double rmin0 = *std::min_element(radii.begin(), radii.end());
    for (int s = 1; s <= odeSteps_; ++s) {
        auto k1 = deriv(r);
        std::vector<double> tmp(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) tmp[i] = r[i] + 0.5 * dt * k1[i];
        auto k2 = deriv(tmp);
        for (std::size_t i = 0; i < r.size(); ++i) tmp[i] = r[i] + 0.5 * dt * k2[i];
        auto k3 = deriv(tmp);
        for (std::size_t i = 0; i < r.size(); ++i) tmp[i] = r[i] + dt * k3[i];
        auto k4 = deriv(tmp);
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        for (double ri : r)
            if (!(ri > 1e-3 * rmin0))
                throw Error("InvalidShape", "a ball collapses before the requested horizon");
        radiiTable_[s] = r;
    }

    // Tube radius: half the smallest radius and half the smallest surface gap
    // over the whole trajectory.
    double bound = tubeCap;
    for (const auto& rs : radiiTable_) {
        for (std::size_t i = 0; i < m; ++i) {
            bound = std::min(bound, rs[i] / (2.0 * (d_ - 1)));
            for (std::size_t j = i + 1; j < m; ++j) {
                double gap = norm(centers_[i] - centers_[j]) - rs[i] - rs[j];
                if (gap <= 0.0)
                    throw Error("InvalidShape", "balls are not disjoint on [0, T*]");
                bound = std::min(bound, gap / 2.0);
            }
        }
    }
    delta_ = bound;
}

std::vector<double> BallUnion::radiiAt(double t) const {
    double u = std::clamp(t / T_, 0.0, 1.0) * odeSteps_;
    int s0 = std::min(static_cast<int>(u), odeSteps_ - 1);
    double f = u - s0;
    std::vector<double> r(centers_.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = (1.0 - f) * radiiTable_[s0][i] + f * radiiTable_[s0 + 1][i];
    return r;
}

double BallUnion::lambdaAt(double t) const {
    auto r = radiiAt(t);
    double num = 0.0, den = 0.0;
    for (double ri : r) {
        if (d_ == 2) { num += 1.0; den += ri; }
        else { num += 2.0 * ri; den += ri * ri; }
    }
    return num / den;
}

double BallUnion::outerRadius() const {
    double R = 0.0;
    for (std::size_t i = 0; i < centers_.size(); ++i)
        R = std::max(R, norm(centers_[i]) + 2.0 * radiiTable_[0][i]);
    return R;
}

int BallUnion::nearestBall(const Vec& x, double t) const {
    auto r = radiiAt(t);
    int best = 0;
    double bestDist = norm(x - centers_[0]) - r[0];
    for (std::size_t i = 1; i < centers_.size(); ++i) {
        double di = norm(x - centers_[i]) - r[i];
        if (di < bestDist) { bestDist = di; best = static_cast<int>(i); }
    }
    return best;
}

double BallUnion::signedDistance(const Vec& x, double t) const {
    auto r = radiiAt(t);
    double s = norm(x - centers_[0]) - r[0];
    for (std::size_t i = 1; i < centers_.size(); ++i)
        s = std::min(s, norm(x - centers_[i]) - r[i]);
    return s;
}

Vec BallUnion::distGradient(const Vec& x, double t) const {
    int i = nearestBall(x, t);
    Vec rel = x - centers_[i];
    double n = norm(rel);
    if (n < 1e-300) return {1, 0, 0};
    return rel / n;
}

Mat BallUnion::distHessian(const Vec& x, double t) const {
    int i = nearestBall(x, t);
    Vec rel = x - centers_[i];
    double n = norm(rel);
    Vec e = rel / n;
    Mat m = identityD(d_) + (-1.0 * outer(e, e));
    return (1.0 / n) * m;
}

BoundaryData BallUnion::boundary(const Vec& p, double t) const {
    if (std::abs(signedDistance(p, t)) > boundaryTolerance())
        throw NotOnBoundary("point is not on the ball union boundary");
    int i = nearestBall(p, t);
    auto r = radiiAt(t);
    double H = (d_ - 1) / r[i];
    return {distGradient(p, t), H, -H + lambdaAt(t)};
}

BoundaryQuadrature BallUnion::quadrature(double t, int nodes) const {
    auto r = radiiAt(t);
    BoundaryQuadrature q;
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        Sphere b(d_, r[i], centers_[i], T_);
        auto qi = b.quadrature(t, nodes);
        q.points.insert(q.points.end(), qi.points.begin(), qi.points.end());
        q.weights.insert(q.weights.end(), qi.weights.begin(), qi.weights.end());
    }
    return q;
}

double BallUnion::enclosedVolume(double t) const {
    auto r = radiiAt(t);
    double v = 0.0;
    for (double ri : r)
        v += d_ == 2 ? kPi * ri * ri : 4.0 / 3.0 * kPi * ri * ri * ri;
    return v;
}

// ---------------------------------------------------------------------------
// FourierCurve

FourierCurve::FourierCurve(double R, std::vector<double> cosCoeffs,
                           std::vector<double> sinCoeffs, double horizon, double tubeCap,
                           std::function<double(double)> prescribedV0)
    : R_(R), a_(std::move(cosCoeffs)), b_(std::move(sinCoeffs)), T_(horizon),
      v0_(std::move(prescribedV0)) {
    if (R <= 0.0) throw Error("InvalidShape", "base radius must be positive");
    b_.resize(std::max(a_.size(), b_.size()), 0.0);
    a_.resize(b_.size(), 0.0);

    // Mean curvature at t=0 (arc-length average) and curvature bound.
    const int m = 4096;
    double per = 0.0, hint = 0.0, maxH = 0.0, rmin = 1e300, rmax = 0.0;
    for (int i = 0; i < m; ++i) {
        double th = 2.0 * kPi * i / m;
        double r = rho(th), rp = drho(th), rpp = ddrho(th);
        if (r <= 0.0) throw Error("InvalidShape", "curve is not star-shaped");
        double sp = std::sqrt(r * r + rp * rp);
        double H = (r * r + 2.0 * rp * rp - r * rpp) / (sp * sp * sp);
        per += sp;
        hint += H * sp;
        maxH = std::max(maxH, std::abs(H));
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    lambda0_ = hint / per;
    delta_ = std::min(tubeCap, 1.0 / (2.0 * maxH));
    Router_ = 2.0 * rmax + 1.0;
    (void)rmin;
}

double FourierCurve::rho(double th) const {
    double s = 1.0;
    for (std::size_t k = 0; k < a_.size(); ++k)
        s += a_[k] * std::cos((k + 1) * th) + b_[k] * std::sin((k + 1) * th);
    return R_ * s;
}
double FourierCurve::drho(double th) const {
    double s = 0.0;
    for (std::size_t k = 0; k < a_.size(); ++k) {
        double kk = static_cast<double>(k + 1);
        s += kk * (-a_[k] * std::sin(kk * th) + b_[k] * std::cos(kk * th));
    }
    return R_ * s;
}
double FourierCurve::ddrho(double th) const {
    double s = 0.0;
    for (std::size_t k = 0; k < a_.size(); ++k) {
        double kk = static_cast<double>(k + 1);
        s += -kk * kk * (a_[k] * std::cos(kk * th) + b_[k] * std::sin(kk * th));
    }
    return R_ * s;
}

// Radial speed profile: u = V0 / (e_r . nu) evaluated on the t=0 curve.
double FourierCurve::u(double th) const {
    double r = rho(th), rp = drho(th), rpp = ddrho(th);
    double sp = std::sqrt(r * r + rp * rp);
    double H = (r * r + 2.0 * rp * rp - r * rpp) / (sp * sp * sp);
    double v = v0_ ? v0_(th) : (-H + lambda0_);
    return v * sp / r; // e_r . nu = r / |c'|
}

void FourierCurve::rFamily(double th, double t, double& r, double& rp, double& rpp) const {
    r = rho(th);
    rp = drho(th);
    rpp = ddrho(th);
    if (t != 0.0) {
        // theta-derivatives of u via 5-point stencils; the factor t keeps the
        // stencil error far below the geometric tolerances.
        const double h = 1e-4;
        double um2 = u(th - 2 * h), um1 = u(th - h), u0 = u(th), up1 = u(th + h),
               up2 = u(th + 2 * h);
        double du = (um2 - 8 * um1 + 8 * up1 - up2) / (12 * h);
        double ddu = (-um2 + 16 * um1 - 30 * u0 + 16 * up1 - up2) / (12 * h * h);
        r += t * u0;
        rp += t * du;
        rpp += t * ddu;
    }
}

CurveSample FourierCurve::sampleAt(double th, double t) const {
    double r, rp, rpp;
    rFamily(th, t, r, rp, rpp);
    double c = std::cos(th), s = std::sin(th);
    Vec er = vec2(c, s), et = vec2(-s, c);
    Vec pos = r * er;
    Vec cp = rp * er + r * et;
    double sp = norm(cp);
    Vec tg = cp / sp;
    Vec nu = vec2(tg[1], -tg[0]); // outward for counterclockwise curves
    double kappa = (r * r + 2.0 * rp * rp - r * rpp) / (sp * sp * sp);
    double vel = u(th) * r / sp; // u * (e_r . nu) at time t
    return {th, pos, tg, nu, sp, kappa, vel};
}

double FourierCurve::radiusAt(double th, double t) const {
    double r, rp, rpp;
    rFamily(th, t, r, rp, rpp);
    return r;
}

double FourierCurve::projectParam(const Vec& x, double t) const {
    // Newton on F(theta) = (x - c(theta)) . c'(theta), warm-started from the
    // polar angle (the curve is star-shaped, so for tube points the nearest
    // parameter is close to it). A global scan backs up the rare failures.
    auto newtonFrom = [&](double th0, double maxStep, bool* ok) {
        double th = th0;
        *ok = false;
        for (int it = 0; it < 60; ++it) {
            double r, rp, rpp;
            rFamily(th, t, r, rp, rpp);
            double c = std::cos(th), s = std::sin(th);
            Vec er = vec2(c, s), et = vec2(-s, c);
            Vec pos = r * er;
            Vec cp = rp * er + r * et;
            Vec cpp = (rpp - r) * er + 2.0 * rp * et;
            Vec dx = x - pos;
            double F = dot(dx, cp);
            double dF = -norm2(cp) + dot(dx, cpp);
            if (std::abs(dF) < 1e-300) break;
            double step = std::clamp(F / dF, -maxStep, maxStep);
            th -= step;
            if (std::abs(F) < 1e-13 * norm2(cp) && std::abs(step) < 1e-13) {
                *ok = true;
                break;
            }
        }
        return th;
    };

    bool ok = false;
    const double th = newtonFrom(std::atan2(x[1], x[0]), 0.2, &ok);
    if (ok) return th;

    const int m = 720;
    double bestTh = 0.0, bestD = 1e300;
    for (int i = 0; i < m; ++i) {
        double thi = 2.0 * kPi * i / m;
        double r, rp, rpp;
        rFamily(thi, t, r, rp, rpp);
        Vec pos = r * vec2(std::cos(thi), std::sin(thi));
        double dd = norm2(x - pos);
        if (dd < bestD) { bestD = dd; bestTh = thi; }
    }
    return newtonFrom(bestTh, 2.0 * kPi / m, &ok);
}

double FourierCurve::signedDistance(const Vec& x, double t) const {
    double th = projectParam(x, t);
    auto cs = sampleAt(th, t);
    double dist = norm(x - cs.point);
    double phi = std::atan2(x[1], x[0]);
    bool inside = norm(x) < radiusAt(phi, t);
    return inside ? -dist : dist;
}

Vec FourierCurve::distGradient(const Vec& x, double t) const {
    double th = projectParam(x, t);
    return sampleAt(th, t).normal;
}

Mat FourierCurve::distHessian(const Vec& x, double t) const {
    double th = projectParam(x, t);
    auto cs = sampleAt(th, t);
    double s = signedDistance(x, t);
    double f = cs.curvature / (1.0 + s * cs.curvature);
    return f * outer(cs.tangent, cs.tangent);
}

Vec FourierCurve::project(const Vec& x, double t) const {
    double s = signedDistance(x, t);
    if (std::abs(s) >= delta_)
        throw OutsideTube("point at distance " + std::to_string(s) + " is outside the tube");
    return sampleAt(projectParam(x, t), t).point;
}

BoundaryData FourierCurve::boundary(const Vec& p, double t) const {
    if (std::abs(signedDistance(p, t)) > boundaryTolerance())
        throw NotOnBoundary("point is not on the curve");
    auto cs = sampleAt(projectParam(p, t), t);
    return {cs.normal, cs.curvature, cs.velocity};
}

BoundaryQuadrature FourierCurve::quadrature(double t, int nodes) const {
    BoundaryQuadrature q;
    double dth = 2.0 * kPi / nodes;
    for (int i = 0; i < nodes; ++i) {
        auto cs = sampleAt(i * dth, t);
        q.points.push_back(cs.point);
        q.weights.push_back(cs.speed * dth);
    }
    return q;
}

std::vector<CurveSample> FourierCurve::curveSamples(double t, int nodes) const {
    std::vector<CurveSample> out(nodes);
    double dth = 2.0 * kPi / nodes;
    for (int i = 0; i < nodes; ++i) out[i] = sampleAt(i * dth, t);
    return out;
}

double FourierCurve::enclosedVolume(double t) const {
    const int m = 4096;
    double area = 0.0;
    for (int i = 0; i < m; ++i) {
        double r = radiusAt(2.0 * kPi * i / m, t);
        area += 0.5 * r * r;
    }
    return area * 2.0 * kPi / m;
}

} // namespace vpmcf
