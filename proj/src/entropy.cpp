#include "vpmcf/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "vpmcf/csvio.hpp"
#include "vpmcf/errors.hpp"
#include "vpmcf/interface.hpp"

namespace vpmcf {

EntropyValue relativeEntropy(const IndicatorField& chi, const Calibration& cal, double t) {
    const Grid& g = chi.grid;
    const Vec off = domainCenter(g);
    const DiscreteInterface iface = discreteInterface(chi);

    EntropyValue e;
    double bulkSum = 0.0;
    const std::size_t cells = g.cells();
    for (std::size_t i = 0; i < cells; ++i)
        if (chi.values[i]) bulkSum += cal.divXi(g.center(i) - off, t);
    e.bulk = iface.perimeter() - bulkSum * g.cellVolume();

    for (const auto& s : iface.samples)
        e.surface += (1.0 - dot(s.normal, cal.xi(s.x - off, t))) * s.weight;
    return e;
}

VolumeErrorValue volumeError(const IndicatorField& chi, const Calibration& cal, double t) {
    const Grid& g = chi.grid;
    const Vec off = domainCenter(g);
    VolumeErrorValue f;
    const std::size_t cells = g.cells();
    for (std::size_t i = 0; i < cells; ++i) {
        const Vec xs = g.center(i) - off;
        const int ref = cal.shape->signedDistance(xs, t) < 0.0 ? 1 : 0;
        const int diff = static_cast<int>(chi.values[i]) - ref;
        if (diff == 0) continue;
        const double theta = cal.theta(xs, t);
        f.signedForm += diff * theta;
        f.absoluteForm += std::abs(diff) * std::fabs(theta);
    }
    f.signedForm *= g.cellVolume();
    f.absoluteForm *= g.cellVolume();
    return f;
}

DissipationValue dissipationFunctionals(const IndicatorField& chi,
                                        const std::vector<VelocitySample>& velocity,
                                        const Calibration& cal, double t, double dtTime) {
    if (velocity.empty()) throw EmptyInterface("dissipation functionals on empty interface");
    const Grid& g = chi.grid;
    const Vec off = domainCenter(g);
    const bool isStatic = cal.shape->isStatic();
    const double lambda = cal.lambdaStar(t);
    if (!isStatic && dtTime <= 0.0) dtTime = 1e-3 * cal.shape->horizon();

    DissipationValue d;
    for (const auto& s : velocity) {
        const Vec xs = s.x - off;
        Vec dtXi{0, 0, 0};
        if (!isStatic)
            dtXi = (1.0 / (2.0 * dtTime)) * (cal.xi(xs, t + dtTime) - cal.xi(xs, t - dtTime));
        const double V = s.velocity;
        d.D += (-V * V - V * (cal.divXi(xs, t) - lambda) - dot(dtXi, s.normal)) * s.weight;
        d.Dtilde += cal.theta(xs, t) * V * s.weight;
    }
    if (!isStatic) {
        double bulk = 0.0;
        const std::size_t cells = g.cells();
        for (std::size_t i = 0; i < cells; ++i) {
            const Vec xs = g.center(i) - off;
            const int ref = cal.shape->signedDistance(xs, t) < 0.0 ? 1 : 0;
            const int diff = static_cast<int>(chi.values[i]) - ref;
            if (diff == 0) continue;
            bulk += diff * (cal.theta(xs, t + dtTime) - cal.theta(xs, t - dtTime)) /
                    (2.0 * dtTime);
        }
        d.Dtilde += bulk * g.cellVolume();
    }
    return d;
}

CoercivityVerdict coercivityCheck(const IndicatorField& chi, const Calibration& cal,
                                  double t, double epsGrid) {
    const Grid& g = chi.grid;
    const Vec off = domainCenter(g);
    const DiscreteInterface iface = discreteInterface(chi);

    CoercivityVerdict v;
    for (const auto& s : iface.samples) {
        const Vec xs = s.x - off;
        const Vec xi = cal.xi(xs, t);
        const double xin = norm(xi);
        const double lhs = 2.0 * (1.0 - dot(xi, s.normal));
        const double rhs = norm2(s.normal - xi) + (1.0 + xin) * (1.0 - xin);
        v.identityMax = std::max(v.identityMax, std::fabs(lhs - rhs));
        v.tiltSum += 0.5 * norm2(s.normal - xi) * s.weight;
        v.entropySurface += (1.0 - dot(s.normal, xi)) * s.weight;
        const double theta = cal.theta(xs, t);
        v.thetaSqSum += theta * theta * s.weight;
    }
    v.cCoerc = v.thetaSqSum / std::max(v.entropySurface, 1e-300);
    v.identityPass = v.identityMax <= 1e-12;
    v.tiltPass = v.tiltSum <= v.entropySurface + 1e-9 * std::max(1.0, epsGrid);
    return v;
}

bool EntropyReport::allPass() const {
    if (!envelopePass) return false;
    for (const auto& r : rows)
        if (!r.pass) return false;
    return true;
}

EntropyReport monitorEntropy(const WeakFlowTrace& trace, const Calibration& cal,
                             const EnvelopeSpec& spec) {
    if (trace.steps.size() < 2)
        throw ConfigError("entropy monitor needs a trace of length >= 2");
    const Grid& g = trace.grid;
    const double t0 = trace.fields.front().time;

    EntropyReport rep;
    rep.epsGrid = 4.0 * g.h() * cal.shape->quadrature(t0, 1024).total();

    const std::size_t N = trace.steps.size();
    for (std::size_t n = 0; n < N; ++n) {
        const IndicatorField& chi = trace.fields[n];
        const double t = chi.time;
        EntropyRow row;
        row.t = t;
        row.E = relativeEntropy(chi, cal, t).bulk;
        row.F = volumeError(chi, cal, t).signedForm;
        row.EplusF = row.E + row.F;
        row.lambda = trace.steps[n].lambda;
        if (n + 1 < N) {
            const std::vector<VelocitySample> vel =
                estimateVelocity(chi, trace.fields[n + 1], trace.ht);
            const DissipationValue dv = dissipationFunctionals(chi, vel, cal, t);
            row.D = dv.D;
            row.Dtilde = dv.Dtilde;
        }
        rep.rows.push_back(row);
    }

    const double e0 = rep.rows.front().EplusF;
    rep.absoluteMode = e0 <= 1e-14;
    const double slack =
        spec.slack > 0.0 ? spec.slack : 1e-3 * std::max(rep.rows.front().E, rep.epsGrid);

    if (rep.absoluteMode) {
        rep.K = 0.0;
        rep.Kprime = 0.0;
        bool all = true;
        for (auto& r : rep.rows) {
            r.envelopeBound = rep.epsGrid;
            r.pass = r.EplusF <= rep.epsGrid;
            all = all && r.pass;
        }
        rep.envelopePass = all;
        rep.clambdaT = std::sqrt(trace.steps.back().clambdaSqRunning);
        return rep;
    }

    // Continuous envelope: smallest K >= 0 with
    // (E+F)(t) <= exp(K sqrt(t) (1 + C_lambda(t))) (E+F)(0).
    for (std::size_t n = 1; n < N; ++n) {
        const double t = rep.rows[n].t - t0;
        if (t <= 0.0) continue;
        const double clam = std::sqrt(trace.steps[n].clambdaSqRunning);
        const double ratio = rep.rows[n].EplusF / e0;
        if (ratio > 1.0)
            rep.K = std::max(rep.K, std::log(ratio) / (std::sqrt(t) * (1.0 + clam)));
    }
    // Discrete form: (E+F)_{n+1} <= (1 + K' ht (1+|lambda_n|)) (E+F)_n + slack.
    for (std::size_t n = 0; n + 1 < N; ++n) {
        const double en = rep.rows[n].EplusF;
        if (en <= 1e-14) continue;
        const double growth = rep.rows[n + 1].EplusF - en - slack;
        if (growth > 0.0)
            rep.Kprime = std::max(
                rep.Kprime, growth / (trace.ht * (1.0 + std::fabs(rep.rows[n].lambda)) * en));
    }
    for (std::size_t n = 0; n < N; ++n) {
        const double t = rep.rows[n].t - t0;
        const double clam = std::sqrt(trace.steps[n].clambdaSqRunning);
        rep.rows[n].envelopeBound = e0 * std::exp(spec.Kmax * std::sqrt(t) * (1.0 + clam));
        rep.rows[n].pass = rep.rows[n].EplusF <= rep.rows[n].envelopeBound;
    }
    rep.clambdaT = std::sqrt(trace.steps.back().clambdaSqRunning);
    rep.envelopePass = std::isfinite(rep.K) && rep.K <= spec.Kmax;
    for (const auto& r : rep.rows) rep.envelopePass = rep.envelopePass && r.pass;
    return rep;
}

void writeEntropyCsv(const EntropyReport& report, const std::string& path) {
    CsvWriter csv(path,
                  {"t", "E", "F", "EplusF", "D", "Dtilde", "lambda", "envelope_bound", "pass"});
    for (const auto& r : report.rows)
        csv.writeRow({fmtDouble(r.t), fmtDouble(r.E), fmtDouble(r.F), fmtDouble(r.EplusF),
                      fmtDouble(r.D), fmtDouble(r.Dtilde), fmtDouble(r.lambda),
                      fmtDouble(r.envelopeBound), r.pass ? "1" : "0"});
}

} // namespace vpmcf
