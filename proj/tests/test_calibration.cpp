#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "vpmcf/calibration.hpp"
#include "vpmcf/errors.hpp"
#include "vpmcf/shapes.hpp"
#include "vpmcf/verifier.hpp"

using namespace vpmcf;

TEST_CASE("sphere calibration: analytic field values") {
    CutoffProfile pr{0.3};
    Calibration cal = sphereCalibration(1.0, 2, pr);

    // On the interface: xi = outward normal, theta = 0.
    Vec xi = cal.xi({1, 0, 0}, 0.0);
    CHECK(xi[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(xi[1]) <= 1e-14);
    CHECK(std::fabs(cal.theta({1, 0, 0}, 0.0)) <= 1e-14);

    // Deep inside (dist 1 > delta): xi = 0, theta saturates to -1.
    CHECK(norm(cal.xi({0, 0, 0}, 0.0)) == 0.0);
    CHECK(cal.theta({0, 0, 0}, 0.0) == doctest::Approx(-1.0));

    // Off-interface magnitudes follow the chosen profiles.
    const double z = pr.delta / 4.0;
    Vec xiOut = cal.xi({1 + z, 0, 0}, 0.0);
    CHECK(norm(xiOut) == doctest::Approx(pr.zeta(z)).epsilon(1e-12));
    CHECK(norm(xiOut) <= 1.0 - cal.shortnessC * z * z + 1e-12);
    CHECK(cal.theta({1 + z, 0, 0}, 0.0) == doctest::Approx(pr.tau(z)).epsilon(1e-12));

    // Saturation branch: dist 0.3 beyond delta = 0.2 gives theta = -1.
    CutoffProfile pr2{0.2};
    Calibration cal2 = sphereCalibration(1.0, 2, pr2);
    CHECK(cal2.theta({0.7, 0, 0}, 0.0) == doctest::Approx(-1.0));
    CHECK(norm(cal2.xi({0.7, 0, 0}, 0.0)) == 0.0);

    // B vanishes identically and lambda* = (d-1)/R.
    CHECK(norm(cal.B({1.1, 0.2, 0}, 0.0)) == 0.0);
    CHECK(cal.lambdaStar(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    Calibration cal3 = sphereCalibration(2.0, 3, pr);
    CHECK(cal3.lambdaStar(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    Calibration cal4 = sphereCalibration(0.25, 2, CutoffProfile{0.1});
    CHECK(cal4.lambdaStar(0.0) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("lambda* on a Fourier curve matches the parametric curvature mean") {
    auto cv = std::make_shared<FourierCurve>(1.0, std::vector<double>{0, 0, 0.05},
                                             std::vector<double>{});
    CutoffProfile pr{0.5 * cv->tubeRadius()};
    const double lam = buildLambdaStar(*cv, pr, 0.0, 2048);
    // Independent oracle: arc-length-weighted mean curvature from the
    // uniform-parameter samples.
    double num = 0.0, den = 0.0;
    for (const auto& s : cv->curveSamples(0.0, 8192)) {
        num += s.curvature * s.speed;
        den += s.speed;
    }
    CHECK(lam == doctest::Approx(num / den).epsilon(1e-4));
}

TEST_CASE("velocity extension: boundary datum cos theta gives B = e1 in the disk") {
    auto disk = std::make_shared<Sphere>(2, 1.0);
    CutoffProfile pr{disk->tubeRadius()};
    // Prescribe V* = cos(theta) via an artificial Fourier family so that the
    // Neumann solve sees datum g = cos(theta); for the disk itself we can call
    // the extension machinery directly through a constructed calibration of a
    // curve with that velocity.
    auto cvDatum = std::make_shared<FourierCurve>(
        1.0, std::vector<double>{}, std::vector<double>{}, 0.25, 0.25,
        [](double th) { return std::cos(th); });
    VelocityExtension ext(cvDatum, pr, 0.0, 256, 1e-8);
    // Inside the disk: B = grad(x1) = e1.
    for (const Vec& x : {Vec{0, 0, 0}, Vec{0.4, 0.3, 0}, Vec{-0.5, 0.1, 0}}) {
        Vec b = ext(x);
        CHECK(b[0] == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(std::fabs(b[1]) <= 1e-6);
    }
    // Exterior continuation: B ~ e1 + O(delta^2) entry-wise just outside.
    const double z = pr.delta / 4.0;
    Vec bo = ext({1 + z, 0, 0});
    CHECK(std::fabs(bo[0] - 1.0) <= 0.1 * pr.delta);
    CHECK(std::fabs(bo[1]) <= 0.1 * pr.delta);
}

TEST_CASE("sphere verification: all conditions pass with vanishing residuals") {
    Calibration cal = sphereCalibration(1.0, 2, CutoffProfile{0.3});
    VerifySpec spec;
    spec.samples = 4000;
    spec.seed = 17;
    ResidualReport rep = verifyCalibration(cal, 0.0, spec);
    CHECK(rep.allPass());
    for (const auto& row : rep.rows) CHECK(row.pass);
    // Static analytic calibration with B = 0: every residual that is not a
    // pure profile term vanishes identically.
    CHECK(rep.row("ii-div-B").supResidual <= 1e-12);
    CHECK(rep.row("iv-weight-transport").supResidual <= 1e-12);
    CHECK(rep.row("iv-length-transport").supResidual <= 1e-12);
    CHECK(rep.row("iv-xi-transport").supResidual <= 1e-12);
    // The evolution-equation residual is a cutoff-profile term of size
    // O(dist/delta^2): its fitted constant stays near the profile bound.
    CHECK(rep.row("v-gee").fittedConstant <= 10.0 / (0.3 * 0.3));
}

TEST_CASE("corrupted calibrations are rejected") {
    Calibration cal = sphereCalibration(1.0, 2, CutoffProfile{0.3});
    VerifySpec spec;
    spec.samples = 2000;
    spec.seed = 5;

    SUBCASE("xi inflated by 1%: shortness fails") {
        Calibration bad = cal;
        auto xi0 = cal.xi;
        bad.xi = [xi0](const Vec& x, double t) { return 1.01 * xi0(x, t); };
        ResidualReport rep = verifyCalibration(bad, 0.0, spec);
        CHECK(!rep.row("iii-shortness").pass);
        CHECK(!rep.allPass());
    }

    SUBCASE("B with constant divergence: vanishing-divergence fails") {
        spec.Cmax = 10.0; // honest sphere fits 0; the corruption fits ~33
        Calibration bad = cal;
        bad.B = [](const Vec& x, double) { return 0.1 * x; };
        bad.gradB = [](const Vec&, double) {
            Mat m = zeroMat();
            m[0][0] = m[1][1] = 0.1;
            return m;
        };
        ResidualReport rep = verifyCalibration(bad, 0.0, spec);
        CHECK(!rep.allPass());
        // Residual of div B = 0.1*d at the interface: the fitted constant
        // sup|r|/max(dist,floor) blows past any reasonable cap.
        CHECK(rep.row("ii-div-B").supResidual == doctest::Approx(0.2).epsilon(1e-6));
        CHECK(!rep.row("ii-div-B").pass);
    }
}

TEST_CASE("constructed Fourier calibration passes; f matches its direct formula") {
    auto cv = std::make_shared<FourierCurve>(1.0, std::vector<double>{0, 0, 0.05},
                                             std::vector<double>{});
    Calibration cal = buildCalibration(cv, CutoffProfile{0.5 * cv->tubeRadius()}, 384);
    VerifySpec spec;
    spec.samples = 1500;
    spec.seed = 23;
    ResidualReport rep = verifyCalibration(cal, 0.0, spec);
    CHECK(rep.allPass());
    for (const auto& row : rep.rows) {
        CHECK(row.pass);
        CHECK(std::isfinite(row.fittedConstant));
    }
    // Transport coefficient: extracted f vs direct grad(s).(gradB o P) grad(s).
    CHECK(rep.fMismatch <= 1e-3);
    // Projection identity |r4c.xi - f|xi|^2| is algebraically zero where used.
    CHECK(rep.fProjectionResidual <= 1e-10);
}

TEST_CASE("order detection: dyadic band maxima scale with the claimed order") {
    auto cv = std::make_shared<FourierCurve>(1.0, std::vector<double>{0, 0, 0.05},
                                             std::vector<double>{});
    Calibration cal = buildCalibration(cv, CutoffProfile{0.5 * cv->tubeRadius()}, 384);
    VerifySpec spec;
    spec.samples = 24000;
    spec.bands = 6;
    spec.seed = 101;
    ResidualReport rep = verifyCalibration(cal, 0.0, spec);
    // The scaling is asymptotic: outer bands are dominated by the cutoff
    // profile's saturation, so the dyadic decay is read off the inner bands.
    // Second-order row: halving the band distance quarters the max, within 1.5x.
    const auto& len = rep.bandMax.at("iv-length-transport");
    REQUIRE(len.size() >= 6);
    CHECK(len[5] <= 1.5 * len[4] / 4.0);
    // First-order row: halving the band distance halves the max, within 1.5x.
    const auto& gee = rep.bandMax.at("v-gee");
    REQUIRE(gee.size() >= 6);
    CHECK(gee[4] <= 1.5 * gee[3] / 2.0);
    CHECK(gee[5] <= 1.5 * gee[4] / 2.0);
}

TEST_CASE("verification is deterministic for a fixed seed") {
    Calibration cal = sphereCalibration(1.0, 2, CutoffProfile{0.3});
    VerifySpec spec;
    spec.samples = 1000;
    spec.seed = 99;
    ResidualReport a = verifyCalibration(cal, 0.0, spec);
    ResidualReport b = verifyCalibration(cal, 0.0, spec);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].supResidual == b.rows[i].supResidual);
        CHECK(a.rows[i].fittedConstant == b.rows[i].fittedConstant);
    }
    CHECK(a.fSup == b.fSup);
}

TEST_CASE("tube cap is enforced") {
    auto disk = std::make_shared<Sphere>(2, 1.0);
    CHECK_THROWS_AS(buildXiTheta(disk, CutoffProfile{2.0 * disk->tubeRadius()}),
                    TubeTooWide);
}
