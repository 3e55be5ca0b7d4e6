#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vpmcf/vec.hpp"

namespace vpmcf {

// Uniform periodic grid on [0,L)^d with n cells per axis, cell centers at
// (i+1/2)h. Lexicographic cell index: ix fastest, then iy, then iz.
struct Grid {
    int d = 2;
    int n = 0;
    double L = 1.0;

    double h() const { return L / n; }
    std::size_t cells() const {
        std::size_t c = 1;
        for (int k = 0; k < d; ++k) c *= static_cast<std::size_t>(n);
        return c;
    }
    std::size_t index(int ix, int iy, int iz = 0) const {
        return (static_cast<std::size_t>(iz) * n + iy) * n + ix;
    }
    int wrap(int i) const {
        i %= n;
        return i < 0 ? i + n : i;
    }
    Vec center(std::size_t idx) const {
        int ix = static_cast<int>(idx % n);
        int iy = static_cast<int>((idx / n) % n);
        int iz = d == 3 ? static_cast<int>(idx / (static_cast<std::size_t>(n) * n)) : 0;
        double hh = h();
        return {(ix + 0.5) * hh, (iy + 0.5) * hh, d == 3 ? (iz + 0.5) * hh : 0.0};
    }
    double cellVolume() const {
        double v = 1.0;
        for (int k = 0; k < d; ++k) v *= h();
        return v;
    }
    bool operator==(const Grid&) const = default;
};

// Binary occupancy field chi in {0,1} on a periodic grid.
struct IndicatorField {
    Grid grid;
    std::vector<std::uint8_t> values;
    double time = 0.0;

    explicit IndicatorField(const Grid& g = {}, double t = 0.0)
        : grid(g), values(g.n > 0 ? g.cells() : 0, 0), time(t) {}

    std::size_t count() const;
    double enclosedVolume() const { return grid.cellVolume() * static_cast<double>(count()); }
    bool isConstant() const;
};

// Shapes are centered at the origin; grids live on [0,L)^d. Bridging the two
// places the shape at the box center.
inline Vec domainCenter(const Grid& g) {
    return {g.L / 2, g.L / 2, g.d == 3 ? g.L / 2 : 0.0};
}

// Fill chi from a sign predicate: cell is 1 where inside(center) is true.
template <typename Pred>
IndicatorField rasterize(const Grid& g, Pred inside, double t = 0.0) {
    IndicatorField f(g, t);
    const std::size_t m = g.cells();
    for (std::size_t i = 0; i < m; ++i) f.values[i] = inside(g.center(i)) ? 1 : 0;
    return f;
}

// Snapshot files: 16-byte header {magic "VPMF", version u16, d u16, n u32,
// step u32} followed by the packed bitmask in lexicographic cell order.
void writeSnapshot(const std::string& path, const IndicatorField& f, std::uint32_t step);
IndicatorField readSnapshot(const std::string& path, std::uint32_t* step = nullptr, double L = 1.0);

} // namespace vpmcf
