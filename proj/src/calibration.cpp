#include "vpmcf/calibration.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <mutex>

#include "vpmcf/errors.hpp"

namespace vpmcf {

namespace {

double smoothstep5(double u) {
    u = std::clamp(u, 0.0, 1.0);
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

} // namespace

std::pair<std::function<Vec(const Vec&, double)>, std::function<double(const Vec&, double)>>
buildXiTheta(std::shared_ptr<const StrongSolution> shape, const CutoffProfile& profile) {
    if (profile.delta > shape->tubeRadius() + 1e-14)
        throw TubeTooWide("profile delta " + std::to_string(profile.delta) +
                          " exceeds shape tube radius " + std::to_string(shape->tubeRadius()));
    auto xi = [shape, profile](const Vec& x, double t) -> Vec {
        double s = shape->signedDistance(x, t);
        if (std::abs(s) >= profile.delta) return {0, 0, 0};
        return profile.zeta(s) * shape->distGradient(x, t);
    };
    auto theta = [shape, profile](const Vec& x, double t) -> double {
        return profile.tau(shape->signedDistance(x, t));
    };
    return {xi, theta};
}

double buildLambdaStar(const StrongSolution& shape, const CutoffProfile& profile, double t,
                       int quadratureNodes) {
    auto quad = shape.quadrature(t, quadratureNodes);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < quad.points.size(); ++i) {
        // div xi = zeta'(s) + zeta(s) tr(Hess s); on the boundary s = 0.
        double div = profile.dzeta(0.0) +
                     profile.zeta(0.0) * trace(shape.distHessian(quad.points[i], t));
        num += quad.weights[i] * div;
        den += quad.weights[i];
    }
    return num / den;
}

// ---------------------------------------------------------------------------
// VelocityExtension

VelocityExtension::VelocityExtension(std::shared_ptr<const StrongSolution> shape,
                                     CutoffProfile profile, double t, int nodes,
                                     double epsSolve)
    : shape_(std::move(shape)), profile_(profile), t_(t) {
    auto samples = shape_->curveSamples(t, nodes);
    std::vector<double> g(samples.size()), w(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        g[i] = samples[i].velocity;
        w[i] = samples[i].speed * 2.0 * 3.14159265358979323846 / nodes;
    }
    g = compatibilityProject(g, w);
    NeumannProblem prob;
    prob.domain = shape_.get();
    prob.time = t;
    prob.data = std::move(g);
    prob.nodes = nodes;
    prob.epsSolve = epsSolve;
    pot_ = solveNeumann(prob);

    // Hand off from the direct layer-potential evaluation to the boundary
    // Taylor extension before quadrature-node spacing degrades the direct
    // sums near the curve.
    double perimeter = 0.0;
    for (double wi : w) perimeter += wi;
    double spacing = perimeter / nodes;
    double delta = profile_.delta;
    blendInner_ = std::clamp(6.0 * spacing, 0.3 * delta, 0.6 * delta);
    blendOuter_ = std::min(delta, 1.6 * blendInner_);
}

Vec VelocityExtension::operator()(const Vec& x) const {
    double s = shape_->signedDistance(x, t_);
    double delta = profile_.delta;
    if (s >= delta) return {0, 0, 0};
    if (s <= -blendOuter_) return pot_->gradient(x);

    Vec nu = shape_->distGradient(x, t_);
    Vec p = x - s * nu;
    Vec taylor = pot_->boundaryGradient(p) + s * matvec(pot_->boundaryHessian(p), nu);
    // One-sided cutoff: full strength on and inside the curve, wound down
    // across the outer half of the tube.
    double cut = s <= 0.5 * delta ? 1.0 : profile_.eta(s);
    taylor = cut * taylor;
    if (s >= -blendInner_) return taylor;

    double u = (s + blendOuter_) / (blendOuter_ - blendInner_); // 0 at outer, 1 at inner
    double wBlend = smoothstep5(u);
    return (1.0 - wBlend) * pot_->gradient(x) + wBlend * taylor;
}

// ---------------------------------------------------------------------------
// Calibrations

namespace {

void attachXiDerivatives(Calibration& cal) {
    auto shape = cal.shape;
    auto profile = cal.profile;
    cal.divXi = [shape, profile](const Vec& x, double t) -> double {
        double s = shape->signedDistance(x, t);
        if (std::abs(s) >= profile.delta) return 0.0;
        return profile.dzeta(s) + profile.zeta(s) * trace(shape->distHessian(x, t));
    };
    cal.gradXi = [shape, profile](const Vec& x, double t) -> Mat {
        double s = shape->signedDistance(x, t);
        if (std::abs(s) >= profile.delta) return zeroMat();
        Vec grad = shape->distGradient(x, t);
        return profile.dzeta(s) * outer(grad, grad) +
               profile.zeta(s) * shape->distHessian(x, t);
    };
}

} // namespace

Calibration sphereCalibration(double R, int d, const CutoffProfile& profile, double horizon) {
    auto sphere = std::make_shared<Sphere>(d, R, Vec{0, 0, 0}, horizon,
                                           std::max(0.25, profile.delta));
    if (profile.delta > sphere->tubeRadius() + 1e-14)
        throw TubeTooWide("profile delta exceeds the sphere tube radius");
    Calibration cal;
    cal.dim = d;
    cal.provenance = Calibration::Provenance::AnalyticSphere;
    cal.profile = profile;
    cal.shape = sphere;
    std::tie(cal.xi, cal.theta) = buildXiTheta(sphere, profile);
    cal.B = [](const Vec&, double) -> Vec { return {0, 0, 0}; };
    cal.gradB = [](const Vec&, double) -> Mat { return zeroMat(); };
    cal.lambdaStar = [R, d](double) { return (d - 1) / R; };
    attachXiDerivatives(cal);
    cal.shortnessC = profile.shortnessConstant();
    cal.coercivityC = profile.coercivityConstant();
    cal.supportRadius = R + profile.delta;
    return cal;
}

Calibration buildCalibration(std::shared_ptr<const StrongSolution> shape,
                             CutoffProfile profile, int neumannNodes, double epsSolve,
                             int quadratureNodes) {
    if (auto sphere = std::dynamic_pointer_cast<const Sphere>(shape)) {
        if (norm(sphere->center()) == 0.0)
            return sphereCalibration(sphere->radius(), sphere->dim(), profile,
                                     sphere->horizon());
    }
    if (shape->dim() != 2)
        throw Error("Unsupported", "constructed calibrations require a 2D catalog shape");
    if (profile.delta > shape->tubeRadius() + 1e-14)
        throw TubeTooWide("profile delta exceeds the shape tube radius");

    Calibration cal;
    cal.dim = shape->dim();
    cal.provenance = Calibration::Provenance::Constructed;
    cal.profile = profile;
    cal.shape = shape;
    std::tie(cal.xi, cal.theta) = buildXiTheta(shape, profile);
    attachXiDerivatives(cal);

    // Slice cache for B: one Neumann solve per requested time.
    struct SliceCache {
        std::map<double, std::shared_ptr<VelocityExtension>> slices;
        std::mutex mtx;
    };
    auto cache = std::make_shared<SliceCache>();
    auto shapeCopy = shape;
    auto profCopy = profile;
    cal.B = [cache, shapeCopy, profCopy, neumannNodes, epsSolve](const Vec& x,
                                                                 double t) -> Vec {
        std::shared_ptr<VelocityExtension> slice;
        {
            std::lock_guard<std::mutex> lock(cache->mtx);
            auto it = cache->slices.find(t);
            if (it == cache->slices.end()) {
                slice = std::make_shared<VelocityExtension>(shapeCopy, profCopy, t,
                                                            neumannNodes, epsSolve);
                cache->slices.emplace(t, slice);
                if (cache->slices.size() > 16) cache->slices.erase(cache->slices.begin());
            } else {
                slice = it->second;
            }
        }
        return (*slice)(x);
    };

    auto lambdaCache = std::make_shared<std::map<double, double>>();
    cal.lambdaStar = [shapeCopy, profCopy, quadratureNodes, lambdaCache](double t) {
        auto it = lambdaCache->find(t);
        if (it != lambdaCache->end()) return it->second;
        double lam = buildLambdaStar(*shapeCopy, profCopy, t, quadratureNodes);
        (*lambdaCache)[t] = lam;
        return lam;
    };

    cal.shortnessC = profile.shortnessConstant();
    cal.coercivityC = profile.coercivityConstant();
    cal.supportRadius = shape->outerRadius() + profile.delta;
    return cal;
}

void exportCalibrationFields(const Calibration& cal, const Grid& grid, double t,
                             const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("IoError", "cannot open field file for writing: " + path);
    os.write("VPCF", 4);
    auto put16 = [&](std::uint16_t v) { os.write(reinterpret_cast<const char*>(&v), 2); };
    auto put32 = [&](std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); };
    auto putf = [&](double v) { os.write(reinterpret_cast<const char*>(&v), 8); };
    put16(1);
    put16(static_cast<std::uint16_t>(grid.d));
    put32(static_cast<std::uint32_t>(grid.n));
    const std::size_t m = grid.cells();
    for (std::size_t i = 0; i < m; ++i) {
        Vec x = grid.center(i);
        Vec xi = cal.xi(x, t);
        Vec B = cal.B(x, t);
        for (int a = 0; a < grid.d; ++a) putf(xi[a]);
        for (int a = 0; a < grid.d; ++a) putf(B[a]);
        putf(cal.theta(x, t));
    }
    putf(cal.lambdaStar(t));
}

} // namespace vpmcf
