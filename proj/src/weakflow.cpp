#include "vpmcf/weakflow.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "vpmcf/csvio.hpp"
#include "vpmcf/errors.hpp"

namespace vpmcf {
namespace {

void checkResolution(const Grid& g, double ht) {
    if (std::sqrt(2.0 * ht) < 2.0 * g.h())
        throw ResolutionError("Gaussian width sqrt(2*ht) below two cells: ht = " +
                              std::to_string(ht) + ", h = " + std::to_string(g.h()));
}

// Threshold a diffused field back to an indicator. Volume-preserving mode
// keeps the top `target` cells of u (ties by lexicographic index).
IndicatorField thresholdField(const Grid& g, const std::vector<double>& u,
                              std::size_t target, bool volumePreserving, double time,
                              ThresholdDiagnostics* diag) {
    IndicatorField out(g, time);
    ThresholdDiagnostics d;
    if (volumePreserving) {
        std::vector<std::size_t> idx(u.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (u[a] != u[b]) return u[a] > u[b];
            return a < b;
        });
        for (std::size_t k = 0; k < target; ++k) out.values[idx[k]] = 1;
        d.level = target < u.size() ? u[idx[target == 0 ? 0 : target - 1]] : 0.0;
        d.targetCells = target;
    } else {
        std::size_t count = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            out.values[i] = u[i] > 0.5 ? 1 : 0;
            count += out.values[i];
        }
        d.level = 0.5;
        d.targetCells = count;
    }
    d.levelMinusHalf = d.level - 0.5;
    if (diag) *diag = d;
    return out;
}

} // namespace

std::vector<double> diffuse(const IndicatorField& chi, double ht) {
    const Grid& g = chi.grid;
    const int n = g.n;
    const std::size_t cells = g.cells();
    const int nHalf = n / 2 + 1;
    const double twoPiOverL = 2.0 * M_PI / g.L;

    std::vector<double> in(cells);
    for (std::size_t i = 0; i < cells; ++i) in[i] = chi.values[i];

    const std::size_t spec = (g.d == 2) ? static_cast<std::size_t>(n) * nHalf
                                        : static_cast<std::size_t>(n) * n * nHalf;
    fftw_complex* out = fftw_alloc_complex(spec);

    auto freq = [n](int i) { return i <= n / 2 ? i : i - n; };

    if (g.d == 2) {
        fftw_plan fwd = fftw_plan_dft_r2c_2d(n, n, in.data(), out, FFTW_ESTIMATE);
        fftw_execute(fwd);
        fftw_destroy_plan(fwd);
        for (int iy = 0; iy < n; ++iy) {
            const double ky = twoPiOverL * freq(iy);
            for (int ix = 0; ix < nHalf; ++ix) {
                const double kx = twoPiOverL * ix;
                const double m = std::exp(-ht * (kx * kx + ky * ky)) / cells;
                const std::size_t k = static_cast<std::size_t>(iy) * nHalf + ix;
                out[k][0] *= m;
                out[k][1] *= m;
            }
        }
        fftw_plan bwd = fftw_plan_dft_c2r_2d(n, n, out, in.data(), FFTW_ESTIMATE);
        fftw_execute(bwd);
        fftw_destroy_plan(bwd);
    } else {
        fftw_plan fwd = fftw_plan_dft_r2c_3d(n, n, n, in.data(), out, FFTW_ESTIMATE);
        fftw_execute(fwd);
        fftw_destroy_plan(fwd);
        for (int iz = 0; iz < n; ++iz) {
            const double kz = twoPiOverL * freq(iz);
            for (int iy = 0; iy < n; ++iy) {
                const double ky = twoPiOverL * freq(iy);
                for (int ix = 0; ix < nHalf; ++ix) {
                    const double kx = twoPiOverL * ix;
                    const double m =
                        std::exp(-ht * (kx * kx + ky * ky + kz * kz)) / cells;
                    const std::size_t k =
                        (static_cast<std::size_t>(iz) * n + iy) * nHalf + ix;
                    out[k][0] *= m;
                    out[k][1] *= m;
                }
            }
        }
        fftw_plan bwd = fftw_plan_dft_c2r_3d(n, n, n, out, in.data(), FFTW_ESTIMATE);
        fftw_execute(bwd);
        fftw_destroy_plan(bwd);
    }
    fftw_free(out);
    return in;
}

IndicatorField thresholdingStep(const IndicatorField& chi, double ht,
                                bool volumePreserving, ThresholdDiagnostics* diag) {
    checkResolution(chi.grid, ht);
    if (chi.isConstant())
        throw EmptyInterface("thresholding step on a constant indicator field");
    const std::vector<double> u = diffuse(chi, ht);
    IndicatorField next = thresholdField(chi.grid, u, chi.count(), volumePreserving,
                                         chi.time + ht, diag);
    if (next.isConstant())
        throw EmptyInterface("thresholding step produced a constant field");
    return next;
}

namespace {

double erfinv(double y) {
    y = std::clamp(y, -0.999999, 0.999999);
    double x = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double step = (std::erf(x) - y) * std::sqrt(M_PI) / 2.0 * std::exp(x * x);
        x -= step;
        if (std::fabs(step) < 1e-14) break;
    }
    return x;
}

// Inside-positive distance to the 1/2-level of the sigma-mollified field,
// by inverting the error-function edge profile of the Gaussian mollifier.
double halfLevelDistance(double u, double sigmaLength) {
    return sigmaLength * std::sqrt(2.0) * erfinv(2.0 * u - 1.0);
}

std::vector<VelocitySample> velocityFromMollified(const DiscreteInterface& iface,
                                                  const Grid& g,
                                                  const std::vector<double>& u0,
                                                  const std::vector<double>& u1, double ht,
                                                  double sigmaCells) {
    const double s = sigmaCells * g.h();
    std::vector<VelocitySample> out;
    out.reserve(iface.samples.size());
    for (const auto& q : iface.samples) {
        const double d0 = halfLevelDistance(u0[q.cell], s);
        const double d1 = halfLevelDistance(u1[q.cell], s);
        out.push_back({q.cell, q.x, q.normal, q.weight, (d1 - d0) / ht});
    }
    return out;
}

} // namespace

std::vector<VelocitySample> estimateVelocity(const IndicatorField& before,
                                             const IndicatorField& after, double ht) {
    if (before.isConstant() || after.isConstant())
        throw EmptyInterface("velocity estimate requires non-constant fields");
    const double sigma = 2.0;
    const DiscreteInterface iface = discreteInterface(before, sigma);
    const std::vector<double> u0 = mollify(before, sigma);
    const std::vector<double> u1 = mollify(after, sigma);
    return velocityFromMollified(iface, before.grid, u0, u1, ht, sigma);
}

namespace {

struct TestField {
    std::function<Vec(const Vec&)> value;
    std::function<double(const Vec&)> div;
    std::function<Mat(const Vec&)> grad; // grad[i][j] = d_i B_j
};

std::vector<TestField> lambdaDictionary(const Grid& g) {
    const double c = 2.0 * M_PI / g.L;
    std::vector<TestField> fields;
    // Axis-aligned single-frequency fields: e_a * sin(k c x_a + phase).
    auto axisField = [&](int a, double k, double phase) {
        fields.push_back(
            {[a, k, c, phase](const Vec& x) {
                 Vec v{0, 0, 0};
                 v[a] = std::sin(k * c * x[a] + phase);
                 return v;
             },
             [a, k, c, phase](const Vec& x) { return k * c * std::cos(k * c * x[a] + phase); },
             [a, k, c, phase](const Vec& x) {
                 Mat m = zeroMat();
                 m[a][a] = k * c * std::cos(k * c * x[a] + phase);
                 return m;
             }});
    };
    for (int a = 0; a < g.d; ++a) axisField(a, 1.0, 0.0);
    for (int a = 0; a < g.d; ++a) axisField(a, 2.0, 0.0);
    for (int a = 0; a < g.d; ++a) axisField(a, 1.0, 1.0);
    if (g.d == 2) {
        // Mixed-mode fields to break axis symmetry.
        fields.push_back({[c](const Vec& x) {
                              return Vec{std::sin(c * x[0]) * std::cos(c * x[1]),
                                         std::cos(c * x[0]) * std::sin(c * x[1]), 0.0};
                          },
                          [c](const Vec& x) {
                              return 2.0 * c * std::cos(c * x[0]) * std::cos(c * x[1]);
                          },
                          [c](const Vec& x) {
                              Mat m = zeroMat();
                              m[0][0] = c * std::cos(c * x[0]) * std::cos(c * x[1]);
                              m[1][0] = -c * std::sin(c * x[0]) * std::sin(c * x[1]);
                              m[0][1] = -c * std::sin(c * x[0]) * std::sin(c * x[1]);
                              m[1][1] = c * std::cos(c * x[0]) * std::cos(c * x[1]);
                              return m;
                          }});
        fields.push_back({[c](const Vec& x) {
                              return Vec{std::sin(c * x[0] + 0.5) * std::cos(2.0 * c * x[1]),
                                         0.0, 0.0};
                          },
                          [c](const Vec& x) {
                              return c * std::cos(c * x[0] + 0.5) * std::cos(2.0 * c * x[1]);
                          },
                          [c](const Vec& x) {
                              Mat m = zeroMat();
                              m[0][0] = c * std::cos(c * x[0] + 0.5) * std::cos(2.0 * c * x[1]);
                              m[1][0] =
                                  -2.0 * c * std::sin(c * x[0] + 0.5) * std::sin(2.0 * c * x[1]);
                              return m;
                          }});
    }
    return fields;
}

} // namespace

LambdaEstimate estimateLambda(const IndicatorField& chi,
                              const std::vector<VelocitySample>& velocity) {
    if (velocity.empty()) throw EmptyInterface("lambda estimate on empty interface");
    const Grid& g = chi.grid;
    const std::vector<TestField> dict = lambdaDictionary(g);

    // Per test field B: residual(lambda) = a + c - lambda b with
    //   a = sum (div B - nu . grad(B) nu) w,  c = sum V (nu . B) w,
    //   b = sum (nu . B) w.
    double num = 0.0, den = 0.0;
    std::vector<double> acs, bs;
    for (const auto& f : dict) {
        double a = 0.0, b = 0.0, cterm = 0.0;
        for (const auto& s : velocity) {
            const Vec Bx = f.value(s.x);
            const Mat Gx = f.grad(s.x);
            const double nuB = dot(s.normal, Bx);
            a += (f.div(s.x) - dot(s.normal, matvec(Gx, s.normal))) * s.weight;
            b += nuB * s.weight;
            cterm += s.velocity * nuB * s.weight;
        }
        acs.push_back(a + cterm);
        bs.push_back(b);
        num += (a + cterm) * b;
        den += b * b;
    }

    double per = 0.0;
    for (const auto& s : velocity) per += s.weight;
    if (den <= 1e-20 * per * per)
        throw SingularFit("lambda test-field dictionary is degenerate on this interface");

    LambdaEstimate est;
    est.leastSquares = num / den;
    double rss = 0.0;
    for (std::size_t k = 0; k < bs.size(); ++k) {
        const double r = acs[k] - est.leastSquares * bs[k];
        rss += r * r;
    }
    est.fitResidual = std::sqrt(rss / bs.size()) / std::max(per, 1e-300);

    // Curvature-average alternative: lambda-hat = (sum H w) / (sum w) with
    // H = div(-grad u / |grad u|) of the sigma-mollified indicator.
    const std::vector<double> u = mollify(chi);
    const std::size_t cells = g.cells();
    std::vector<double> nx(cells), ny(cells), nz(cells, 0.0);
    const double tiny = 1e-12;
    for (std::size_t i = 0; i < cells; ++i) {
        Vec gr = gridGradient(u, g, i);
        const double m = std::max(norm(gr), tiny);
        nx[i] = -gr[0] / m;
        ny[i] = -gr[1] / m;
        if (g.d == 3) nz[i] = -gr[2] / m;
    }
    double hw = 0.0, wsum = 0.0;
    for (const auto& s : velocity) {
        const double H = gridGradient(nx, g, s.cell)[0] + gridGradient(ny, g, s.cell)[1] +
                         (g.d == 3 ? gridGradient(nz, g, s.cell)[2] : 0.0);
        hw += H * s.weight;
        wsum += s.weight;
    }
    est.curvature = hw / wsum;
    return est;
}

WeakFlowTrace runFlow(const IndicatorField& chi0, double ht, int nSteps,
                      bool volumePreserving) {
    checkResolution(chi0.grid, ht);
    if (chi0.isConstant()) throw EmptyInterface("flow started from a constant field");

    WeakFlowTrace trace;
    trace.grid = chi0.grid;
    trace.ht = ht;
    trace.volumePreserving = volumePreserving;
    trace.fields.push_back(chi0);

    double clambdaSq = 0.0;
    std::vector<double> uPrev = diffuse(chi0, ht);
    for (int n = 0; n <= nSteps; ++n) {
        const IndicatorField& cur = trace.fields.back();
        FlowStep step;
        step.n = n;
        step.time = chi0.time + n * ht;
        step.cells = cur.count();
        step.volume = cur.enclosedVolume();
        step.clambdaSqRunning = clambdaSq;

        const DiscreteInterface iface = discreteInterface(cur);
        step.energy = iface.perimeter();

        if (n == nSteps) {
            // terminal record: no transition; carry the last estimates
            if (!trace.steps.empty()) {
                step.level = trace.steps.back().level;
                step.lambda = trace.steps.back().lambda;
                step.lambdaCurv = trace.steps.back().lambdaCurv;
            }
            trace.steps.push_back(step);
            break;
        }

        ThresholdDiagnostics diag;
        IndicatorField next = thresholdField(cur.grid, uPrev, step.cells,
                                             volumePreserving, cur.time + ht, &diag);
        if (next.isConstant())
            throw EmptyInterface("flow collapsed to a constant field at step " +
                                 std::to_string(n + 1));
        step.level = diag.level;

        std::vector<double> uNext = diffuse(next, ht);
        const double sigma = 2.0;
        const std::vector<VelocitySample> vel = velocityFromMollified(
            iface, cur.grid, mollify(cur, sigma), mollify(next, sigma), ht, sigma);
        for (const auto& s : vel) step.dissipation += s.velocity * s.velocity * s.weight;

        const LambdaEstimate lam = estimateLambda(cur, vel);
        step.lambda = lam.leastSquares;
        step.lambdaCurv = lam.curvature;
        clambdaSq += ht * step.lambda * step.lambda;

        trace.steps.push_back(step);
        trace.fields.push_back(std::move(next));
        uPrev = std::move(uNext);
    }
    return trace;
}

WeakClauseReport checkWeakSolution(const WeakFlowTrace& trace, double tolEdiRel) {
    if (trace.steps.size() < 2)
        throw ConfigError("weak-solution check needs a trace of length >= 2");
    WeakClauseReport rep;
    rep.energy0 = trace.steps.front().energy;
    rep.energyN = trace.steps.back().energy;

    rep.volumeExact = true;
    const std::size_t v0 = trace.steps.front().cells;
    for (const auto& s : trace.steps)
        if (trace.volumePreserving && s.cells != v0) rep.volumeExact = false;

    double diss = 0.0, clam = 0.0;
    for (std::size_t k = 0; k + 1 < trace.steps.size(); ++k) {
        diss += trace.ht * trace.steps[k].dissipation;
        clam += trace.ht * trace.steps[k].lambda * trace.steps[k].lambda;
    }
    rep.dissipationSum = diss;
    rep.clambdaSq = clam;
    rep.ediSlack = rep.energy0 + tolEdiRel * rep.energy0 - (rep.energyN + diss);
    rep.ediPass = rep.ediSlack >= 0.0;
    return rep;
}

void writeTraceCsv(const WeakFlowTrace& trace, const std::string& path) {
    CsvWriter csv(path, {"n", "t", "cells", "volume", "energy", "level", "lambda",
                         "lambda_curv", "dissipation", "clambda_sq_running"});
    for (const auto& s : trace.steps)
        csv.writeRow({std::to_string(s.n), fmtDouble(s.time), std::to_string(s.cells),
                      fmtDouble(s.volume), fmtDouble(s.energy), fmtDouble(s.level),
                      fmtDouble(s.lambda), fmtDouble(s.lambdaCurv),
                      fmtDouble(s.dissipation), fmtDouble(s.clambdaSqRunning)});
}

} // namespace vpmcf
