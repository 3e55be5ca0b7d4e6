#include "vpmcf/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vpmcf/csvio.hpp"
#include "vpmcf/errors.hpp"

namespace vpmcf {
namespace {

// Van der Corput radical inverse; deterministic low-discrepancy driver for
// the tube sampling below.
double halton(std::uint64_t i, unsigned base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

Mat fdGradB(const Calibration& cal, const Vec& x, double t, double h) {
    // M[i][j] = d B_j / d x_i, fourth-order central differences.
    Mat M = zeroMat();
    for (int i = 0; i < cal.dim; ++i) {
        Vec e{0, 0, 0};
        e[i] = 1.0;
        const Vec bp2 = cal.B(x + 2.0 * h * e, t);
        const Vec bp1 = cal.B(x + h * e, t);
        const Vec bm1 = cal.B(x - h * e, t);
        const Vec bm2 = cal.B(x - 2.0 * h * e, t);
        for (int j = 0; j < cal.dim; ++j)
            M[i][j] = (-bp2[j] + 8.0 * bp1[j] - 8.0 * bm1[j] + bm2[j]) / (12.0 * h);
    }
    return M;
}

struct RowAccum {
    std::string id;
    int order;
    double sup = 0.0;
    double fitted = 0.0;
    std::vector<double> band;

    RowAccum(std::string ident, int ord, int bands)
        : id(std::move(ident)), order(ord), band(bands, 0.0) {}

    void add(double r, double dist, double floorDist, int bandIdx) {
        r = std::fabs(r);
        sup = std::max(sup, r);
        if (order == 0)
            fitted = sup;
        else
            fitted = std::max(fitted, r / std::pow(std::max(dist, floorDist), order));
        if (bandIdx >= 0 && bandIdx < (int)band.size())
            band[bandIdx] = std::max(band[bandIdx], r);
    }
};

} // namespace

const ConditionRow& ResidualReport::row(const std::string& id) const {
    for (const auto& r : rows)
        if (r.id == id) return r;
    throw ConfigError("unknown residual row: " + id);
}

ResidualReport verifyCalibration(const Calibration& cal, double t, const VerifySpec& spec) {
    const auto& shape = *cal.shape;
    const auto& prof = cal.profile;
    const double delta = prof.delta;
    const bool isStatic = shape.isStatic();
    const double horizon = shape.horizon();

    double dt = spec.dt > 0.0 ? spec.dt : 1e-3 * horizon;
    if (!isStatic && std::isfinite(horizon))
        dt = std::min(dt, 0.49 * std::max(horizon - std::fabs(t), 0.0));
    const double hfd = spec.hfd > 0.0 ? spec.hfd : 0.01 * delta;
    const double epsFloor = 2.0 * hfd;

    ResidualReport rep;
    rep.sampleCount = spec.samples;
    rep.seed = spec.seed;
    rep.dt = dt;
    rep.hfd = hfd;
    rep.epsFloor = epsFloor;
    rep.time = t;

    RowAccum rDivB("ii-div-B", 1, spec.bands);
    RowAccum rShort("iii-shortness", 0, spec.bands);
    RowAccum rBoundary("iii-boundary", 0, spec.bands);
    RowAccum rWeight("iv-weight-transport", 1, spec.bands);
    RowAccum rLength("iv-length-transport", 2, spec.bands);
    RowAccum rXiTrans("iv-xi-transport", 1, spec.bands);
    RowAccum rGee("v-gee", 1, spec.bands);
    RowAccum rSign("vi-sign", 0, spec.bands);
    RowAccum rCoerc("vi-coercivity", 0, spec.bands);

    // Parametrized boundary atlas at time t; normals recomputed from the
    // signed distance so off-curve samples stay inside the tube exactly.
    const int atlasNodes = std::max(spec.boundaryNodes, 1024);
    const BoundaryQuadrature atlas = shape.quadrature(t, atlasNodes);
    const int atlasSize = (int)atlas.points.size();

    const double lambda = cal.lambdaStar(t);
    const bool haveGradB = (bool)cal.gradB;

    for (int i = 0; i < spec.samples; ++i) {
        const std::uint64_t idx = (std::uint64_t)i + 1 + spec.seed;
        const double u1 = halton(idx, 2);
        const double u2 = halton(idx, 3);

        const int band = i % spec.bands;
        const double sign = ((i / spec.bands) % 2 == 0) ? 1.0 : -1.0;
        const double mag = 0.999 * delta * std::ldexp(1.0 + u2, -(band + 1));

        const Vec p = atlas.points[std::min((int)(u1 * atlasSize), atlasSize - 1)];
        const Vec nu = shape.distGradient(p, t);
        const Vec x = p + (sign * mag) * nu;

        const double s = shape.signedDistance(x, t);
        const double dist = std::fabs(s);
        const Vec grads = shape.distGradient(x, t);

        // (ii): div B = O(dist).
        const Mat MB = haveGradB ? cal.gradB(x, t) : fdGradB(cal, x, t, hfd);
        const double divB = MB[0][0] + MB[1][1] + MB[2][2];
        rDivB.add(divB, dist, epsFloor, band);

        // (iii): shortness |xi| <= max(1 - c dist^2, 0).
        const Vec xi = cal.xi(x, t);
        const double xinorm = norm(xi);
        const double bound = std::max(1.0 - cal.shortnessC * dist * dist, 0.0);
        rShort.add(std::max(0.0, xinorm - bound), dist, epsFloor, band);

        // (iv-a): weight transport d_t theta + B . grad theta.
        const Vec Bx = cal.B(x, t);
        const Vec gradTheta = prof.dtau(s) * grads;
        double dtTheta = 0.0;
        if (!isStatic)
            dtTheta = (cal.theta(x, t + dt) - cal.theta(x, t - dt)) / (2.0 * dt);
        rWeight.add(dtTheta + dot(Bx, gradTheta), dist, epsFloor, band);

        // (iv-b): length transport d_t |xi|^2 + B . grad |xi|^2.
        const Vec gradLen2 = (2.0 * prof.zeta(s) * prof.dzeta(s)) * grads;
        double dtLen2 = 0.0;
        if (!isStatic) {
            const double lp = norm(cal.xi(x, t + dt));
            const double lm = norm(cal.xi(x, t - dt));
            dtLen2 = (lp * lp - lm * lm) / (2.0 * dt);
        }
        rLength.add(dtLen2 + dot(Bx, gradLen2), dist, epsFloor, band);

        // (iv-c): xi transport up to a tangential multiple f xi.
        Vec dtXi{0, 0, 0};
        if (!isStatic)
            dtXi = (1.0 / (2.0 * dt)) * (cal.xi(x, t + dt) - cal.xi(x, t - dt));
        const Mat gradXi = cal.gradXi(x, t);
        const Vec raw = dtXi + matvec(gradXi, Bx) + matvec(MB, xi);

        // The tangential multiple is the transport coefficient of the front:
        // f = nu.grad(B) nu at the projected base point.
        const Vec pProj = shape.project(x, t);
        const Mat MBproj = haveGradB ? cal.gradB(pProj, t) : fdGradB(cal, pProj, t, hfd);
        const double fDirect = dot(grads, matvec(MBproj, grads));

        if (xinorm >= 0.5) {
            // Per-sample extraction is an exact algebraic identity: removing
            // the xi-projection of the residual leaves nothing along xi.
            const double fhat = dot(raw, xi) / (xinorm * xinorm);
            rep.fProjectionResidual =
                std::max(rep.fProjectionResidual, std::fabs(dot(raw - fhat * xi, xi)));
        } else {
            ++rep.excludedDegenerate;
        }
        rXiTrans.add(norm(raw - fDirect * xi), dist, epsFloor, band);

        // (v): generalized evolution equation residual.
        rGee.add(dot(Bx, xi) + cal.divXi(x, t) - lambda, dist, epsFloor, band);

        // (vi): sign and linear coercivity of the weight.
        const double theta = cal.theta(x, t);
        rSign.add(s * theta < 0.0 ? std::fabs(theta) : 0.0, dist, epsFloor, band);
        rCoerc.add(std::max(0.0, std::min(dist, cal.coercivityC) - std::fabs(theta)),
                   dist, epsFloor, band);

        if (!isStatic && i < 100) {
            const double half = dt / 2.0;
            const double dtThetaHalf =
                (cal.theta(x, t + half) - cal.theta(x, t - half)) / (2.0 * half);
            rep.richardsonTimeDeriv =
                std::max(rep.richardsonTimeDeriv, std::fabs(dtTheta - dtThetaHalf));
        }
    }

    // (iii): xi restricts to the outward normal on the interface.
    {
        const BoundaryQuadrature q = shape.quadrature(t, spec.boundaryNodes);
        for (const Vec& p : q.points) {
            const Vec nu = shape.distGradient(p, t);
            rBoundary.add(norm(cal.xi(p, t) - nu), 0.0, epsFloor, -1);

            // Interface extraction of the transport coefficient f: on the
            // interface xi = nu, so f = raw.nu, and it must agree with the
            // direct formula nu.grad(B) nu.
            const Vec xi = cal.xi(p, t);
            Vec dtXi{0, 0, 0};
            if (!isStatic)
                dtXi = (1.0 / (2.0 * dt)) * (cal.xi(p, t + dt) - cal.xi(p, t - dt));
            const Vec Bp = cal.B(p, t);
            const Mat MBp = haveGradB ? cal.gradB(p, t) : fdGradB(cal, p, t, hfd);
            const Vec raw = dtXi + matvec(cal.gradXi(p, t), Bp) + matvec(MBp, xi);
            const double fhat = dot(raw, xi) / std::max(norm2(xi), 1e-300);
            const double fDirect = dot(nu, matvec(MBp, nu));
            rep.fSup = std::max(rep.fSup, std::fabs(fhat));
            rep.fDirectSup = std::max(rep.fDirectSup, std::fabs(fDirect));
            rep.fMismatch = std::max(rep.fMismatch, std::fabs(fhat - fDirect));
        }
    }

    for (const RowAccum* a :
         {&rDivB, &rShort, &rBoundary, &rWeight, &rLength, &rXiTrans, &rGee, &rSign, &rCoerc}) {
        ConditionRow row;
        row.id = a->id;
        row.order = a->order;
        row.supResidual = a->sup;
        row.fittedConstant = a->fitted;
        row.pass = (a->order == 0) ? (a->sup <= spec.exactTol) : (a->fitted <= spec.Cmax);
        rep.rows.push_back(row);
        rep.bandMax[a->id] = a->band;
    }
    return rep;
}

void writeResidualCsv(const ResidualReport& report, const std::string& path) {
    CsvWriter csv(path, {"condition", "order", "sup_residual", "fitted_constant", "pass"});
    for (const auto& r : report.rows)
        csv.writeRow({r.id, std::to_string(r.order), fmtDouble(r.supResidual),
                      fmtDouble(r.fittedConstant), r.pass ? "1" : "0"});
    csv.writeRow({"f-sup", "0", fmtDouble(report.fSup), fmtDouble(report.fMismatch),
                  report.excludedDegenerate == 0 ? "1" : "0"});
}

} // namespace vpmcf
