#include "vpmcf/elliptic.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "vpmcf/errors.hpp"

namespace vpmcf {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Kress quadrature weights for the 2*pi-periodic log kernel
// ln(4 sin^2((t_i - t_j)/2)) on N uniform nodes (N even): R_{|i-j|}.
std::vector<double> kressWeights(int N) {
    std::vector<double> R(N);
    for (int m = 0; m < N; ++m) {
        double s = 0.0;
        for (int k = 1; k < N / 2; ++k) s += std::cos(2.0 * kPi * k * m / N) / k;
        R[m] = -4.0 * kPi / N * s - 4.0 * kPi / (N * N) * std::cos(kPi * m);
    }
    return R;
}

// Spectral differentiation on N uniform periodic nodes (N even).
std::vector<double> spectralDeriv(const std::vector<double>& f) {
    const int N = static_cast<int>(f.size());
    std::vector<double> df(N, 0.0);
    for (int i = 0; i < N; ++i) {
        double s = 0.0;
        for (int j = 0; j < N; ++j) {
            if (i == j) continue;
            int m = i - j;
            double sign = (m % 2 == 0) ? 1.0 : -1.0;
            s += sign * 0.5 / std::tan(kPi * m / N) * f[j];
        }
        df[i] = s;
    }
    return df;
}

// Trigonometric cardinal interpolation on N uniform periodic nodes.
double trigInterp(const std::vector<double>& f, double theta) {
    const int N = static_cast<int>(f.size());
    double s = 0.0;
    for (int j = 0; j < N; ++j) {
        double x = theta - 2.0 * kPi * j / N;
        double half = 0.5 * x;
        double sh = std::sin(half);
        double card;
        if (std::abs(sh) < 1e-12) {
            card = 1.0;
        } else {
            card = std::sin(0.5 * N * x) / (N * std::tan(half)) ;
        }
        s += card * f[j];
    }
    return s;
}

class Potential2D final : public HarmonicPotential {
public:
    Potential2D(const StrongSolution& shape, double t, std::vector<double> g, int N,
                double epsSolve, double epsCompatRel)
        : shape_(&shape), time_(t) {
        samples_ = shape.curveSamples(t, N);
        if (static_cast<int>(g.size()) != N)
            throw Error("InvalidData", "Neumann data size does not match node count");

        const double dth = 2.0 * kPi / N;
        std::vector<double> w(N);
        double totW = 0.0, meanG = 0.0, maxG = 0.0;
        for (int i = 0; i < N; ++i) {
            w[i] = samples_[i].speed * dth;
            totW += w[i];
            meanG += w[i] * g[i];
            maxG = std::max(maxG, std::abs(g[i]));
        }
        diag_.compat = meanG / totW;
        if (std::abs(meanG) > std::max(epsCompatRel * maxG, 1e-14) * totW)
            throw IncompatibleData("Neumann data has nonzero boundary mean " +
                                   std::to_string(meanG / totW));

        // Adjoint double layer: (I/2 + K') sigma = g, plus the zero-mean row.
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N + 1, N + 1);
        for (int i = 0; i < N; ++i) {
            const Vec& xi = samples_[i].point;
            const Vec& nui = samples_[i].normal;
            for (int j = 0; j < N; ++j) {
                double kij;
                if (i == j) {
                    kij = -samples_[i].curvature / (4.0 * kPi);
                } else {
                    Vec r = xi - samples_[j].point;
                    kij = -dot(r, nui) / (2.0 * kPi * norm2(r));
                }
                A(i, j) = kij * w[j];
            }
            A(i, i) += 0.5;
            A(i, N) = 1.0;
            A(N, i) = w[i];
        }
        Eigen::VectorXd rhs(N + 1);
        for (int i = 0; i < N; ++i) rhs(i) = g[i];
        rhs(N) = 0.0;

        Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
        sigma_.resize(N);
        for (int i = 0; i < N; ++i) sigma_[i] = sol(i);
        weights_ = w;
        diag_.systemSize = N + 1;

        Eigen::VectorXd res = A * sol - rhs;
        diag_.residual = res.head(N).lpNorm<Eigen::Infinity>();
        if (diag_.residual > std::max(epsSolve, 1e-12 * std::max(1.0, maxG)))
            throw SolverDiverged("Nystrom system residual " + std::to_string(diag_.residual));

        buildBoundaryData(g, N);
    }

    double value(const Vec& x) const override { return rawValue(x) + c0_; }

    Vec gradient(const Vec& x) const override {
        Vec grad = {0, 0, 0};
        for (std::size_t j = 0; j < sigma_.size(); ++j) {
            Vec r = x - samples_[j].point;
            grad += (-sigma_[j] * weights_[j] / (2.0 * kPi * norm2(r))) * r;
        }
        return grad;
    }

    Mat hessian(const Vec& x) const override {
        Mat h = zeroMat();
        for (std::size_t j = 0; j < sigma_.size(); ++j) {
            Vec r = x - samples_[j].point;
            double r2 = norm2(r);
            double c = -sigma_[j] * weights_[j] / (2.0 * kPi);
            Mat term = outer(r, r);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    h[a][b] += c * ((a == b ? 1.0 : 0.0) / r2 - 2.0 * term[a][b] / (r2 * r2));
        }
        return h;
    }

    Vec boundaryGradient(const Vec& p) const override {
        double th = locate(p);
        return vec2(trigInterp(bGradX_, th), trigInterp(bGradY_, th));
    }

    Mat boundaryHessian(const Vec& p) const override {
        double th = locate(p);
        double a = trigInterp(bHessA_, th), b = trigInterp(bHessB_, th);
        Mat h = zeroMat();
        h[0][0] = a; h[0][1] = b; h[1][0] = b; h[1][1] = -a;
        return h;
    }

    double meanValue() const override {
        // Green identity with w = |y|^2/4 (Laplace(w) = 1):
        // int_Omega phi = oint (phi dnu(w) - w g).
        double m = 0.0, area = 0.0;
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            const auto& cs = samples_[i];
            double phi = bTrace_[i];
            double dnw = 0.5 * dot(cs.point, cs.normal);
            double wq = 0.25 * norm2(cs.point);
            m += (phi * dnw - wq * g_[i]) * weights_[i];
            area += dnw * weights_[i];
        }
        return m / area;
    }

    // Boundary trace (with the mean-zero shift) at node i; used in tests.
    double boundaryTrace(int i) const { return bTrace_[i]; }
    const std::vector<CurveSample>& nodes() const { return samples_; }

private:
    double rawValue(const Vec& x) const {
        double v = 0.0;
        for (std::size_t j = 0; j < sigma_.size(); ++j) {
            Vec r = x - samples_[j].point;
            v += -sigma_[j] * weights_[j] / (2.0 * kPi) * 0.5 * std::log(norm2(r));
        }
        return v;
    }

    void buildBoundaryData(const std::vector<double>& g, int N) {
        g_ = g;
        auto R = kressWeights(N);
        // Boundary trace of the single layer with the log singularity split
        // off and handled by the Kress rule.
        bTrace_.assign(N, 0.0);
        for (int i = 0; i < N; ++i) {
            double v = 0.0;
            for (int j = 0; j < N; ++j) {
                double f = sigma_[j] * samples_[j].speed;
                double smooth;
                if (i == j) {
                    smooth = std::log(samples_[i].speed * samples_[i].speed);
                } else {
                    double d2 = norm2(samples_[i].point - samples_[j].point);
                    double sn = std::sin(kPi * (i - j) / N);
                    smooth = std::log(d2 / (4.0 * sn * sn));
                }
                v += -1.0 / (4.0 * kPi) * (R[std::abs(i - j)] + smooth * 2.0 * kPi / N) * f;
            }
            bTrace_[i] = v;
        }
        // Mean-zero shift applies to values only.
        c0_ = 0.0;
        double m0 = meanValue();
        for (auto& v : bTrace_) v -= m0;
        c0_ = -m0;

        // Nodal boundary gradient: normal part is the datum, tangential part
        // is the arc-length derivative of the trace.
        bGradX_.assign(N, 0.0);
        bGradY_.assign(N, 0.0);
        auto dTrace = spectralDeriv(bTrace_);
        for (int i = 0; i < N; ++i) {
            double dds = dTrace[i] / samples_[i].speed;
            Vec grad = g_[i] * samples_[i].normal + dds * samples_[i].tangent;
            bGradX_[i] = grad[0];
            bGradY_[i] = grad[1];
        }
        // Hessian from the tangential derivative of the gradient field plus
        // the zero-trace structure H = [[a, b], [b, -a]].
        auto dGx = spectralDeriv(bGradX_);
        auto dGy = spectralDeriv(bGradY_);
        bHessA_.assign(N, 0.0);
        bHessB_.assign(N, 0.0);
        for (int i = 0; i < N; ++i) {
            Vec q = vec2(dGx[i] / samples_[i].speed, dGy[i] / samples_[i].speed);
            const Vec& tg = samples_[i].tangent;
            bHessA_[i] = tg[0] * q[0] - tg[1] * q[1];
            bHessB_[i] = tg[1] * q[0] + tg[0] * q[1];
        }
    }

    double locate(const Vec& p) const {
        double s = shape_->signedDistance(p, time_);
        if (std::abs(s) > 1e-5 * std::max(1.0, shape_->outerRadius()))
            throw NotOnBoundary("boundary evaluation away from the curve");
        Vec q = p;
        if (s != 0.0) q = p - s * shape_->distGradient(p, time_);
        // Supported 2D curves use the polar angle as parameter: Fourier
        // curves about the origin, circles about their center.
        Vec c = {0, 0, 0};
        if (const auto* sph = dynamic_cast<const Sphere*>(shape_)) c = sph->center();
        double th = std::atan2(q[1] - c[1], q[0] - c[0]);
        return th < 0 ? th + 2.0 * kPi : th;
    }

    const StrongSolution* shape_;
    double time_;
    std::vector<CurveSample> samples_;
    std::vector<double> sigma_, weights_, g_;
    std::vector<double> bTrace_, bGradX_, bGradY_, bHessA_, bHessB_;
    double c0_ = 0.0;
};

// Real spherical harmonic basis value (unnormalized scaling is fine for the
// least-squares fit, but keep it well conditioned).
double realY(int l, int m, const Vec& dir) {
    double ct = dir[2];
    double phi = std::atan2(dir[1], dir[0]);
    int ma = std::abs(m);
    double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) *
                            std::exp(std::lgamma(l - ma + 1.0) - std::lgamma(l + ma + 1.0)));
    double p = std::assoc_legendre(l, ma, ct);
    if (m > 0) return std::sqrt(2.0) * norm * p * std::cos(ma * phi);
    if (m < 0) return std::sqrt(2.0) * norm * p * std::sin(ma * phi);
    return norm * p;
}

class PotentialSphere3D final : public HarmonicPotential {
public:
    PotentialSphere3D(const Sphere& sphere, double t, std::vector<double> g, int nodes,
                      double epsSolve, double epsCompatRel, int lmax = 10)
        : center_(sphere.center()), R_(sphere.radius()), lmax_(lmax) {
        auto quad = sphere.quadrature(t, nodes);
        const std::size_t M = quad.points.size();
        if (g.size() != M)
            throw Error("InvalidData", "Neumann data size does not match quadrature");

        double totW = 0.0, meanG = 0.0, maxG = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            totW += quad.weights[i];
            meanG += quad.weights[i] * g[i];
            maxG = std::max(maxG, std::abs(g[i]));
        }
        diag_.compat = meanG / totW;
        if (std::abs(meanG) > std::max(epsCompatRel * maxG, 1e-14) * totW)
            throw IncompatibleData("Neumann data has nonzero boundary mean");

        int nb = 0;
        for (int l = 1; l <= lmax_; ++l) nb += 2 * l + 1;
        Eigen::MatrixXd A(M, nb);
        Eigen::VectorXd rhs(M);
        for (std::size_t i = 0; i < M; ++i) {
            Vec dir = (quad.points[i] - center_) / R_;
            double sw = std::sqrt(quad.weights[i]);
            int col = 0;
            for (int l = 1; l <= lmax_; ++l)
                for (int m = -l; m <= l; ++m) A(i, col++) = sw * realY(l, m, dir);
            rhs(i) = sw * g[i];
        }
        Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);
        coeff_.assign(c.data(), c.data() + nb);
        diag_.systemSize = nb;
        diag_.residual = (A * c - rhs).lpNorm<Eigen::Infinity>();
        if (diag_.residual > std::max(epsSolve, 1e-10 * std::max(1.0, maxG)))
            throw SolverDiverged("spherical-harmonic fit residual " +
                                 std::to_string(diag_.residual));
    }

    double value(const Vec& x) const override {
        Vec rel = x - center_;
        double r = norm(rel);
        if (r < 1e-14 * R_) return 0.0;
        Vec dir = rel / r;
        double v = 0.0;
        int col = 0;
        for (int l = 1; l <= lmax_; ++l) {
            double radial = R_ / l * std::pow(r / R_, l);
            for (int m = -l; m <= l; ++m) v += coeff_[col++] * radial * realY(l, m, dir);
        }
        return v;
    }

    Vec gradient(const Vec& x) const override { return fdGradient(x); }
    Mat hessian(const Vec& x) const override { return fdHessian(x); }
    Vec boundaryGradient(const Vec& p) const override { return fdGradient(p); }
    Mat boundaryHessian(const Vec& p) const override { return fdHessian(p); }
    double meanValue() const override { return 0.0; } // l >= 1 harmonics average out

private:
    // The expansion is a polynomial in x (solid harmonics), so central
    // differences with a moderate step are accurate everywhere.
    Vec fdGradient(const Vec& x) const {
        double h = 1e-5 * R_;
        Vec gvec = {0, 0, 0};
        for (int a = 0; a < 3; ++a) {
            Vec xp = x, xm = x, xp2 = x, xm2 = x;
            xp[a] += h; xm[a] -= h; xp2[a] += 2 * h; xm2[a] -= 2 * h;
            gvec[a] = (value(xm2) - 8 * value(xm) + 8 * value(xp) - value(xp2)) / (12 * h);
        }
        return gvec;
    }
    Mat fdHessian(const Vec& x) const {
        double h = 3e-4 * R_;
        Mat m = zeroMat();
        for (int a = 0; a < 3; ++a) {
            for (int b = a; b < 3; ++b) {
                Vec xpp = x, xpm = x, xmp = x, xmm = x;
                xpp[a] += h; xpp[b] += h;
                xpm[a] += h; xpm[b] -= h;
                xmp[a] -= h; xmp[b] += h;
                xmm[a] -= h; xmm[b] -= h;
                m[a][b] = m[b][a] =
                    (value(xpp) - value(xpm) - value(xmp) + value(xmm)) / (4 * h * h);
            }
        }
        return m;
    }

    Vec center_;
    double R_;
    int lmax_;
    std::vector<double> coeff_;
};

} // namespace

std::vector<double> compatibilityProject(const std::vector<double>& g,
                                         const std::vector<double>& weights) {
    if (g.size() != weights.size())
        throw Error("InvalidData", "data/weights size mismatch");
    double sw = 0.0, swg = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (weights[i] <= 0.0) throw Error("InvalidData", "quadrature weights must be positive");
        sw += weights[i];
        swg += weights[i] * g[i];
    }
    double mean = swg / sw;
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i] - mean;
    return out;
}

std::unique_ptr<HarmonicPotential> solveNeumann(const NeumannProblem& problem) {
    if (!problem.domain) throw Error("InvalidData", "no domain in Neumann problem");
    if (problem.domain->dim() == 2) {
        return std::make_unique<Potential2D>(*problem.domain, problem.time, problem.data,
                                             problem.nodes, problem.epsSolve,
                                             problem.epsCompatRel);
    }
    const auto* sphere = dynamic_cast<const Sphere*>(problem.domain);
    if (!sphere)
        throw Error("Unsupported", "3D Neumann solves are restricted to spheres");
    return std::make_unique<PotentialSphere3D>(*sphere, problem.time, problem.data,
                                               problem.nodes, problem.epsSolve,
                                               problem.epsCompatRel);
}

} // namespace vpmcf
