#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "vpmcf/errors.hpp"

namespace vpmcf {

// Shortest round-trippable decimal form (17 significant digits).
inline std::string fmtDouble(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary) {
        if (!out_) throw ConfigError("cannot open output file: " + path);
        writeRow(header);
    }

    void writeRow(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

} // namespace vpmcf
