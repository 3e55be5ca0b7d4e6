#include "vpmcf/interface.hpp"

#include <cmath>

#include "vpmcf/errors.hpp"

namespace vpmcf {

namespace {

std::vector<double> gaussKernel(double sigmaCells) {
    int r = static_cast<int>(std::ceil(4.0 * sigmaCells));
    std::vector<double> k(2 * r + 1);
    double sum = 0.0;
    for (int j = -r; j <= r; ++j) {
        k[j + r] = std::exp(-0.5 * j * j / (sigmaCells * sigmaCells));
        sum += k[j + r];
    }
    for (auto& v : k) v /= sum;
    return k;
}

// Convolve along one axis (periodic): axis 0 = x, 1 = y, 2 = z.
void convolveAxis(std::vector<double>& u, const Grid& g, const std::vector<double>& k, int axis) {
    const int n = g.n;
    const int r = (static_cast<int>(k.size()) - 1) / 2;
    std::vector<double> line(n);
    const std::size_t stride = axis == 0 ? 1 : (axis == 1 ? static_cast<std::size_t>(n)
                                                          : static_cast<std::size_t>(n) * n);
    const std::size_t lines = u.size() / n;
    for (std::size_t l = 0; l < lines; ++l) {
        // Base index of this line: enumerate all cells with axis-coordinate 0.
        std::size_t base;
        if (axis == 0) base = l * n;
        else if (axis == 1) {
            std::size_t plane = l / n, col = l % n;
            base = plane * static_cast<std::size_t>(n) * n + col;
        } else {
            base = l;
        }
        for (int i = 0; i < n; ++i) line[i] = u[base + i * stride];
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = -r; j <= r; ++j) {
                int ii = i + j;
                ii %= n;
                if (ii < 0) ii += n;
                s += k[j + r] * line[ii];
            }
            u[base + i * stride] = s;
        }
    }
}

} // namespace

std::vector<double> mollify(const IndicatorField& chi, double sigmaCells) {
    const Grid& g = chi.grid;
    std::vector<double> u(chi.values.begin(), chi.values.end());
    auto k = gaussKernel(sigmaCells);
    for (int axis = 0; axis < g.d; ++axis) convolveAxis(u, g, k, axis);
    return u;
}

Vec gridGradient(const std::vector<double>& u, const Grid& g, std::size_t idx) {
    const int n = g.n;
    const double inv2h = 1.0 / (2.0 * g.h());
    int ix = static_cast<int>(idx % n);
    int iy = static_cast<int>((idx / n) % n);
    int iz = g.d == 3 ? static_cast<int>(idx / (static_cast<std::size_t>(n) * n)) : 0;
    Vec grad = {0, 0, 0};
    grad[0] = (u[g.index(g.wrap(ix + 1), iy, iz)] - u[g.index(g.wrap(ix - 1), iy, iz)]) * inv2h;
    grad[1] = (u[g.index(ix, g.wrap(iy + 1), iz)] - u[g.index(ix, g.wrap(iy - 1), iz)]) * inv2h;
    if (g.d == 3)
        grad[2] = (u[g.index(ix, iy, g.wrap(iz + 1))] - u[g.index(ix, iy, g.wrap(iz - 1))]) * inv2h;
    return grad;
}

DiscreteInterface discreteInterface(const IndicatorField& chi, double sigmaCells) {
    if (chi.isConstant())
        throw EmptyInterface("indicator field is constant, no interface to extract");
    const Grid& g = chi.grid;
    auto u = mollify(chi, sigmaCells);
    const double floor = 1e-6 / g.h();
    const double vol = g.cellVolume();
    DiscreteInterface di;
    const std::size_t m = g.cells();
    for (std::size_t i = 0; i < m; ++i) {
        Vec grad = gridGradient(u, g, i);
        double mag = norm(grad);
        if (mag <= floor) continue;
        // chi = 1 inside: the outward normal is -grad/|grad|.
        di.samples.push_back({i, g.center(i), (-1.0 / mag) * grad, mag * vol});
    }
    if (di.samples.empty())
        throw EmptyInterface("no interface cells above the gradient floor");
    return di;
}

} // namespace vpmcf
