// Acceptance gate: one pass/fail line per criterion, pinned tolerances.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vpmcf/calibration.hpp"
#include "vpmcf/elliptic.hpp"
#include "vpmcf/errors.hpp"
#include "vpmcf/entropy.hpp"
#include "vpmcf/grid.hpp"
#include "vpmcf/interface.hpp"
#include "vpmcf/profiles.hpp"
#include "vpmcf/shapes.hpp"
#include "vpmcf/verifier.hpp"
#include "vpmcf/weakflow.hpp"

namespace fs = std::filesystem;
using namespace vpmcf;

namespace {

int failures = 0;

void report(int id, const char* what, bool pass, const std::string& detail) {
    std::printf("criterion %d [%s] %s%s%s\n", id, pass ? "PASS" : "FAIL", what,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++failures;
}

IndicatorField disk(const Grid& g, double R, double cx = 0.0, double cy = 0.0) {
    const Vec c = domainCenter(g);
    return rasterize(
        g,
        [&](const Vec& x) {
            return std::hypot(x[0] - c[0] - cx, x[1] - c[1] - cy) < R;
        },
        0.0);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// --- criterion 1: sphere calibration certificate ---------------------------
void criterion1() {
    auto cal = sphereCalibration(1.0, 2, CutoffProfile{0.3});
    VerifySpec spec;
    spec.samples = 20000;
    spec.seed = 1;
    auto rep = verifyCalibration(cal, 0.0, spec);
    const double lamErr = std::fabs(cal.lambdaStar(0.0) - 1.0);
    // On the static sphere B = 0 and xi is time-independent, so the
    // divergence-of-B row and all three transport rows vanish identically;
    // the remaining rows carry the cutoff-profile terms, which are O(dist)
    // by construction, and pass through their fitted constants.
    double vanishing = 0.0;
    for (const char* id :
         {"ii-div-B", "iv-weight-transport", "iv-length-transport", "iv-xi-transport"})
        vanishing = std::max(vanishing, rep.row(id).supResidual);
    const bool pass = rep.allPass() && lamErr <= 1e-10 && vanishing <= 1e-6;
    report(1, "sphere calibration certificate (R=1, d=2, delta=0.3)", pass,
           "six conditions " + std::string(rep.allPass() ? "pass" : "FAIL") +
               ", |lambda*-1|=" + fmt(lamErr) +
               ", sup of identically-vanishing residuals=" + fmt(vanishing));
}

// --- criterion 2: constructed calibration on a Fourier curve ----------------
void criterion2() {
    auto cv = std::make_shared<FourierCurve>(1.0, std::vector<double>{0, 0, 0.05},
                                             std::vector<double>{});
    Calibration cal = buildCalibration(cv, CutoffProfile{0.5 * cv->tubeRadius()}, 384);
    VerifySpec spec;
    spec.samples = 24000;
    spec.bands = 6;
    spec.seed = 101;
    auto rep = verifyCalibration(cal, 0.0, spec);
    bool finite = rep.allPass();
    for (const auto& r : rep.rows) finite = finite && std::isfinite(r.fittedConstant);
    // Quadratic decay of the |xi|^2-transport residual under dyadic band
    // halving, read on the innermost band pair (outer bands saturate at the
    // cutoff-profile shape).
    const auto& len = rep.bandMax.at("iv-length-transport");
    const double ratio = len[5] / len[4]; // halving the distance
    const bool quad = ratio <= 1.5 * 0.25;
    report(2, "constructed calibration, r(t)=1+0.05cos(3t) curve", finite && quad,
           "all rows pass=" + std::string(finite ? "yes" : "no") +
               ", band ratio=" + fmt(ratio) + " (quadratic target 0.25 x1.5)");
}

// --- criterion 3: Neumann solver convergence --------------------------------
void criterion3() {
    Sphere dom(2, 1.0);
    auto interiorError = [&](int N, auto phiExact, auto g) {
        NeumannProblem prob;
        prob.domain = &dom;
        prob.nodes = N;
        const auto samples = dom.curveSamples(0.0, N);
        prob.data.resize(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) prob.data[i] = g(samples[i].point);
        auto pot = solveNeumann(prob);
        double err = 0.0, meanN = 0.0, meanE = 0.0;
        std::vector<Vec> probes;
        for (double frac : {0.2, 0.45, 0.7})
            for (const auto& cs : dom.curveSamples(0.0, 64)) probes.push_back(frac * cs.point);
        std::vector<double> nv(probes.size()), ev(probes.size());
        for (std::size_t i = 0; i < probes.size(); ++i) {
            nv[i] = pot->value(probes[i]);
            ev[i] = phiExact(probes[i]);
            meanN += nv[i];
            meanE += ev[i];
        }
        meanN /= probes.size();
        meanE /= probes.size();
        for (std::size_t i = 0; i < probes.size(); ++i)
            err = std::max(err, std::fabs((nv[i] - meanN) - (ev[i] - meanE)));
        return err;
    };
    std::vector<double> e1, e2;
    for (int N : {64, 128, 256}) {
        e1.push_back(interiorError(
            N, [](const Vec& p) { return p[0]; }, [](const Vec& p) { return p[0]; }));
        e2.push_back(interiorError(
            N, [](const Vec& p) { return 0.5 * (p[0] * p[0] - p[1] * p[1]); },
            [](const Vec& p) { return p[0] * p[0] - p[1] * p[1]; }));
    }
    // Second-order decay until the rounding floor, then stay at the floor.
    auto orderOK = [](const std::vector<double>& e) {
        bool ok = true;
        for (std::size_t i = 1; i < e.size(); ++i)
            ok = ok && e[i] <= std::max(e[i - 1] / 4.0, 1e-10);
        return ok && e.back() <= 1e-6;
    };
    const bool pass = orderOK(e1) && orderOK(e2);
    report(3, "Neumann solve: manufactured harmonics, order >= 2", pass,
           "errors cos=" + fmt(e1[0]) + "/" + fmt(e1[1]) + "/" + fmt(e1[2]) +
               " quad=" + fmt(e2[0]) + "/" + fmt(e2[1]) + "/" + fmt(e2[2]));
}

// --- criterion 4: coercivity identity suite ---------------------------------
void criterion4() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 100000; ++k) {
        Vec nu{U(rng), U(rng), U(rng)};
        const double nn = norm(nu);
        if (nn < 1e-6) continue;
        nu = nu * (1.0 / nn);
        Vec xi{U(rng), U(rng), U(rng)};
        if (norm(xi) > 1.0) xi = xi * (1.0 / norm(xi));
        const double lhs = 2.0 * (1.0 - dot(xi, nu));
        const double rhs = norm2(nu - xi) + (1.0 + norm(xi)) * (1.0 - norm(xi));
        worst = std::max(worst, std::fabs(lhs - rhs));
    }
    // Tilt/distance inequalities on simulated interfaces: exact and shifted.
    Grid g{2, 256, 1.0};
    auto cal = sphereCalibration(0.25, 2, CutoffProfile{0.1});
    const double eps = 4.0 * g.h() * 2.0 * M_PI * 0.25;
    auto vA = coercivityCheck(disk(g, 0.25), cal, 0.0, eps);
    auto vB = coercivityCheck(disk(g, 0.25, 0.03, 0.0), cal, 0.0, eps);
    const bool pass = worst <= 1e-12 && vA.identityPass && vA.tiltPass &&
                      vB.identityPass && vB.tiltPass;
    report(4, "coercivity identity (1e5 draws) + interface inequalities", pass,
           "max identity defect=" + fmt(worst) + ", grid identity defects=" +
               fmt(vA.identityMax) + "/" + fmt(vB.identityMax));
}

// --- criterion 5: weak-solution clauses -------------------------------------
WeakFlowTrace staticTrace() {
    Grid g{2, 256, 1.0};
    return runFlow(disk(g, 0.25), 2e-4, 200, true);
}

void criterion5(const WeakFlowTrace& trace) {
    const double R = 0.25, T = 200 * 2e-4;
    auto rep = checkWeakSolution(trace, 0.05);
    const double target = T / (R * R);
    const double relC = std::fabs(rep.clambdaSq - target) / target;
    const bool pass = rep.volumeExact && rep.ediPass && relC <= 0.2;
    report(5, "weak-solution clauses: exact volume, EDI 5%, C_lambda(T)^2", pass,
           "volume exact=" + std::string(rep.volumeExact ? "yes" : "no") +
               ", EDI slack=" + fmt(rep.ediSlack) + ", C_lambda^2=" + fmt(rep.clambdaSq) +
               " vs T/R^2=" + fmt(target));
}

// --- criterion 6: velocity-estimator oracle on the circle law ---------------
void criterion6() {
    Grid g{2, 256, 1.0};
    const double h = g.h(), r0 = 0.125;
    auto chi = disk(g, r0);
    double t = 0.0;
    struct Rec {
        double t, r, V, ht;
    };
    std::vector<Rec> recs;
    double lawErr = 0.0;
    while (true) {
        const double r = std::sqrt(chi.enclosedVolume() / M_PI);
        if (r < 8.0 * h) break;
        const double ht = std::clamp(0.04 * r * r, 2.2 * h * h, 80.0 * h * h);
        auto next = thresholdingStep(chi, ht, false);
        auto vel = estimateVelocity(chi, next, ht);
        double vw = 0.0, w = 0.0;
        for (const auto& s : vel) {
            vw += s.velocity * s.weight;
            w += s.weight;
        }
        t += ht;
        chi = std::move(next);
        const double rAfter = std::sqrt(chi.enclosedVolume() / M_PI);
        recs.push_back({t, rAfter, vw / w, ht});
        if (rAfter >= 8.0 * h) {
            const double law = r0 * r0 - 2.0 * t; // exact shrinking-circle law
            lawErr = std::max(lawErr, std::fabs(rAfter * rAfter - law) / law);
        }
    }
    // Sampled velocity against -1/r over displacement windows of >= 2 cells
    // (single steps move less than a cell and alias to 0 or 1 cells).
    double velErr = 0.0;
    std::size_t k0 = 0;
    double rPrev = r0;
    for (std::size_t k = 0; k < recs.size(); ++k) {
        if (std::fabs(recs[k].r - rPrev) < 2.0 * h) continue;
        double vSum = 0.0, tSum = 0.0;
        for (std::size_t j = k0; j <= k; ++j) {
            vSum += recs[j].V * recs[j].ht;
            tSum += recs[j].ht;
        }
        const double rMid = 0.5 * (rPrev + recs[k].r);
        velErr = std::max(velErr, std::fabs(vSum / tSum - (-1.0 / rMid)) * rMid);
        rPrev = recs[k].r;
        k0 = k + 1;
    }
    const bool pass = lawErr <= 0.05 && velErr <= 0.10;
    report(6, "plain thresholding circle: V=-1/r and r^2 = r0^2 - 2t", pass,
           "law error=" + fmt(lawErr) + " (<=5%), velocity error=" + fmt(velErr) +
               " (<=10%), steps=" + fmt(double(recs.size())));
}

// --- criterion 7: two-ball oracle --------------------------------------------
void criterion7() {
    Grid g{2, 256, 1.0};
    const double h = g.h();
    const double r1 = 0.15625, r2 = 0.09375, sep = 0.22;

    // ODE reference; the constructor rejects horizons past collapse, so back
    // off until it accepts.
    double horizon = 0.012;
    std::shared_ptr<BallUnion> ode;
    while (!ode && horizon > 0.004) {
        try {
            ode = std::make_shared<BallUnion>(
                2, std::vector<Vec>{vec2(-sep, 0.0), vec2(sep, 0.0)},
                std::vector<double>{r1, r2}, horizon);
        } catch (const Error&) {
            horizon -= 2e-4;
        }
    }

    const Vec c{0.5, 0.5, 0.0};
    auto chi = rasterize(
        g,
        [&](const Vec& x) {
            return std::hypot(x[0] - c[0] + sep, x[1] - c[1]) < r1 ||
                   std::hypot(x[0] - c[0] - sep, x[1] - c[1]) < r2;
        },
        0.0);
    double t = 0.0, err1 = 0.0, err2 = 0.0;
    while (true) {
        const auto rr = ode->radiiAt(std::min(t, horizon));
        if (rr[1] < 4.0 * h || t >= horizon) break;
        // measured radii from left/right half cell counts
        double a1 = 0.0, a2 = 0.0;
        for (std::size_t i = 0; i < g.cells(); ++i)
            if (chi.values[i]) (g.center(i)[0] < c[0] ? a1 : a2) += g.cellVolume();
        const double m1 = std::sqrt(a1 / M_PI), m2 = std::sqrt(a2 / M_PI);
        err1 = std::max(err1, std::fabs(m1 - rr[0]) / rr[0]);
        err2 = std::max(err2, std::fabs(m2 - rr[1]) / rr[1]);
        const double ht = std::clamp(0.08 * m2 * m2, 4.0 * h * h, 80.0 * h * h);
        chi = thresholdingStep(chi, ht, true);
        t += ht;
    }
    const bool pass = err1 <= 0.03 && err2 <= 0.03;
    report(7, "two-ball volume-preserving oracle (3% while radii >= 4h)", pass,
           "max rel errors r1=" + fmt(err1) + " r2=" + fmt(err2) +
               "; the collapsing ball amplifies curvature bias as (r0/r)^2, "
               "see the analysis note in the repository README");
}

// --- criterion 8: stability/uniqueness surrogate -----------------------------
void criterion8(const WeakFlowTrace& staticRun) {
    Grid g{2, 256, 1.0};
    const double R = 0.25;
    auto cal = sphereCalibration(R, 2, CutoffProfile{0.1});

    auto repA = monitorEntropy(staticRun, cal);
    bool passA = repA.envelopePass;
    double worstA = 0.0;
    for (const auto& row : repA.rows) worstA = std::max(worstA, row.EplusF);
    passA = passA && worstA <= 2.0 * repA.epsGrid;

    const Vec c = domainCenter(g);
    auto chi = rasterize(
        g,
        [&](const Vec& x) {
            const double th = std::atan2(x[1] - c[1], x[0] - c[0]);
            return std::hypot(x[0] - c[0], x[1] - c[1]) <
                   R * (1.0 + 0.02 * std::cos(3.0 * th));
        },
        0.0);
    auto trace = runFlow(chi, 2e-4, 100, true);
    auto repB = monitorEntropy(trace, cal);
    bool passB = repB.envelopePass && repB.K <= 50.0;
    double peak = 0.0;
    for (int k = 0; k <= 10; ++k) peak = std::max(peak, repB.rows[k].EplusF);
    for (std::size_t k = 10; k < repB.rows.size(); ++k)
        passB = passB && repB.rows[k].EplusF <= peak + 1e-3 * repB.rows.front().EplusF;

    report(8, "stability surrogate: grid-floor hold + Gronwall envelope", passA && passB,
           "exact start max(E+F)=" + fmt(worstA) + " vs 2*eps_grid=" +
               fmt(2.0 * repA.epsGrid) + "; perturbed start K=" + fmt(repB.K) +
               " K'=" + fmt(repB.Kprime) + " (Kmax=50)");
}

// --- criterion 9: determinism -------------------------------------------------
void criterion9() {
#ifndef VPMCF_TOOL_PATH
    report(9, "determinism of the command-line pipeline", false, "tool path not wired");
#else
    const fs::path base = fs::temp_directory_path() / "vpmcf-acceptance";
    fs::remove_all(base);
    fs::create_directories(base);
    const fs::path cfg = base / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "shape.kind = sphere\nshape.R = 0.25\nshape.dim = 2\n"
             "grid.n = 128\ngrid.L = 1\n"
             "flow.steps = 60\nflow.perturb_amplitude = 0.02\n"
             "verifier.samples = 2000\nseed = 7\n";
    }
    auto runAll = [&](const std::string& dir) {
        const std::string cmd = std::string(VPMCF_TOOL_PATH) + " --quiet --config " +
                                cfg.string() + " --out " + (base / dir).string() + " all";
        return std::system(cmd.c_str());
    };
    const int rcA = runAll("a"), rcB = runAll("b");
    bool same = rcA == rcB;
    std::string firstDiff;
    if (same) {
        std::vector<fs::path> names;
        for (const auto& e : fs::directory_iterator(base / "a"))
            names.push_back(e.path().filename());
        std::sort(names.begin(), names.end());
        for (const auto& name : names) {
            std::ifstream fa(base / "a" / name, std::ios::binary);
            std::ifstream fb(base / "b" / name, std::ios::binary);
            std::ostringstream sa, sb;
            sa << fa.rdbuf();
            sb << fb.rdbuf();
            if (sa.str() != sb.str()) {
                same = false;
                firstDiff = name.string();
                break;
            }
        }
    }
    report(9, "determinism: full pipeline rerun is byte-identical", same,
           same ? "all outputs identical across reruns"
                : ("first differing output: " + firstDiff));
#endif
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    const WeakFlowTrace trace = staticTrace();
    criterion5(trace);
    criterion6();
    criterion7();
    criterion8(trace);
    criterion9();
    std::printf("acceptance: %d of 9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
