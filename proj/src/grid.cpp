#include "vpmcf/grid.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "vpmcf/errors.hpp"

namespace vpmcf {

std::size_t IndicatorField::count() const {
    std::size_t c = 0;
    for (auto v : values) c += v;
    return c;
}

bool IndicatorField::isConstant() const {
    if (values.empty()) return true;
    return std::all_of(values.begin(), values.end(),
                       [&](std::uint8_t v) { return v == values.front(); });
}

namespace {
template <typename T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}
} // namespace

void writeSnapshot(const std::string& path, const IndicatorField& f, std::uint32_t step) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("IoError", "cannot open snapshot file for writing: " + path);
    os.write("VPMF", 4);
    put<std::uint16_t>(os, 1);
    put<std::uint16_t>(os, static_cast<std::uint16_t>(f.grid.d));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.n));
    put<std::uint32_t>(os, step);
    const std::size_t m = f.values.size();
    std::vector<std::uint8_t> packed((m + 7) / 8, 0);
    for (std::size_t i = 0; i < m; ++i)
        if (f.values[i]) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    os.write(reinterpret_cast<const char*>(packed.data()),
             static_cast<std::streamsize>(packed.size()));
}

IndicatorField readSnapshot(const std::string& path, std::uint32_t* step, double L) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("IoError", "cannot open snapshot file: " + path);
    char magic[4];
    is.read(magic, 4);
    if (std::memcmp(magic, "VPMF", 4) != 0)
        throw Error("FormatError", "bad snapshot magic in " + path);
    auto version = get<std::uint16_t>(is);
    if (version != 1) throw Error("FormatError", "unsupported snapshot version");
    Grid g;
    g.d = get<std::uint16_t>(is);
    g.n = static_cast<int>(get<std::uint32_t>(is));
    g.L = L;
    auto st = get<std::uint32_t>(is);
    if (step) *step = st;
    IndicatorField f(g);
    const std::size_t m = f.values.size();
    std::vector<std::uint8_t> packed((m + 7) / 8, 0);
    is.read(reinterpret_cast<char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
    for (std::size_t i = 0; i < m; ++i)
        f.values[i] = (packed[i / 8] >> (i % 8)) & 1u;
    return f;
}

} // namespace vpmcf
