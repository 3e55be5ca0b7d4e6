#pragma once

#include <stdexcept>
#include <string>

namespace vpmcf {

// Module errors carry a short machine-readable code next to the human message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct OutsideTube : Error {
    explicit OutsideTube(const std::string& w) : Error("OutsideTube", w) {}
};
struct NotOnBoundary : Error {
    explicit NotOnBoundary(const std::string& w) : Error("NotOnBoundary", w) {}
};
struct EmptyInterface : Error {
    explicit EmptyInterface(const std::string& w) : Error("EmptyInterface", w) {}
};
struct IncompatibleData : Error {
    explicit IncompatibleData(const std::string& w) : Error("IncompatibleData", w) {}
};
struct SolverDiverged : Error {
    explicit SolverDiverged(const std::string& w) : Error("SolverDiverged", w) {}
};
struct TubeTooWide : Error {
    explicit TubeTooWide(const std::string& w) : Error("TubeTooWide", w) {}
};
struct ResolutionError : Error {
    explicit ResolutionError(const std::string& w) : Error("ResolutionError", w) {}
};
struct SingularFit : Error {
    explicit SingularFit(const std::string& w) : Error("SingularFit", w) {}
};
struct SampleOutsideDomain : Error {
    explicit SampleOutsideDomain(const std::string& w) : Error("SampleOutsideDomain", w) {}
};
struct DegenerateXi : Error {
    explicit DegenerateXi(const std::string& w) : Error("DegenerateXi", w) {}
};
struct ZeroInitialEntropy : Error {
    explicit ZeroInitialEntropy(const std::string& w) : Error("ZeroInitialEntropy", w) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error("ConfigError", w) {}
};

} // namespace vpmcf
