#pragma once

#include <cmath>

namespace vpmcf {

// Cutoff/truncation profiles used by the calibration fields.
//
//   zeta: C^2 bump with zeta(0)=1, zeta'(0)=0, support [-delta, delta],
//         and zeta(z) <= 1 - (z/delta)^2, so the shortness constant is
//         c_zeta = 1/delta^2.
//   tau:  odd, non-decreasing, tau(z)=z for |z|<=delta/2, |tau|<=1 and
//         tau(z)=sign(z) for |z|>=delta. Quintic Hermite blend in between.
//   eta:  C^2 cutoff for the one-sided extension: 1 on [0, delta/2],
//         0 beyond delta (applied to |z|).
struct CutoffProfile {
    double delta = 0.1;

    double zeta(double z) const {
        double u = z / delta;
        double w = 1.0 - u * u;
        return w > 0.0 ? w * w * w : 0.0;
    }
    double dzeta(double z) const {
        double u = z / delta;
        double w = 1.0 - u * u;
        return w > 0.0 ? -6.0 * u / delta * w * w : 0.0;
    }
    double ddzeta(double z) const {
        double u = z / delta;
        double w = 1.0 - u * u;
        if (w <= 0.0) return 0.0;
        return (-6.0 * w * w + 24.0 * u * u * w) / (delta * delta);
    }

    double tau(double z) const {
        double a = std::abs(z);
        double sgn = (z >= 0.0) ? 1.0 : -1.0;
        if (a <= 0.5 * delta) return z;
        if (a >= delta) return sgn;
        return sgn * hermite5(a);
    }
    double dtau(double z) const {
        double a = std::abs(z);
        if (a <= 0.5 * delta) return 1.0;
        if (a >= delta) return 0.0;
        return dhermite5(a);
    }

    double eta(double z) const {
        double a = std::abs(z);
        if (a <= 0.5 * delta) return 1.0;
        if (a >= delta) return 0.0;
        return 1.0 - smoothstep5((a - 0.5 * delta) / (0.5 * delta));
    }
    double deta(double z) const {
        double a = std::abs(z);
        if (a <= 0.5 * delta || a >= delta) return 0.0;
        double sgn = (z >= 0.0) ? 1.0 : -1.0;
        return -sgn * dsmoothstep5((a - 0.5 * delta) / (0.5 * delta)) / (0.5 * delta);
    }

    // Recorded constants (feed the shortness and coercivity conditions).
    double shortnessConstant() const { return 1.0 / (delta * delta); }
    double coercivityConstant() const { return 0.5 * delta; }

private:
    // C^2 quintic s-curve on [0,1].
    static double smoothstep5(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
    static double dsmoothstep5(double u) { return u * u * (30.0 + u * (-60.0 + 30.0 * u)); }

    // Quintic Hermite on [delta/2, delta] matching (value, slope, curvature)
    // = (delta/2, 1, 0) at the left end and (1, 0, 0) at the right end.
    double hermite5(double a) const {
        double w = 0.5 * delta;
        double u = (a - w) / w; // in [0,1]
        double p0 = w, m0 = w, p1 = 1.0, m1 = 0.0;
        // Basis with zero second derivatives at both ends.
        double h00 = 1.0 - smoothstep5(u);
        double h01 = smoothstep5(u);
        double h10 = u - 6.0 * std::pow(u, 3) + 8.0 * std::pow(u, 4) - 3.0 * std::pow(u, 5);
        double h11 = -std::pow(u, 3) * (4.0 - 7.0 * u + 3.0 * u * u);
        return h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1;
    }
    double dhermite5(double a) const {
        double w = 0.5 * delta;
        double u = (a - w) / w;
        double p0 = w, m0 = w, p1 = 1.0;
        double dh00 = -dsmoothstep5(u);
        double dh01 = dsmoothstep5(u);
        double dh10 = 1.0 - 18.0 * u * u + 32.0 * std::pow(u, 3) - 15.0 * std::pow(u, 4);
        return (dh00 * p0 + dh10 * m0 + dh01 * p1) / w;
    }
};

} // namespace vpmcf
