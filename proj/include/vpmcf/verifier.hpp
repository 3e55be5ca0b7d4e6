#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vpmcf/calibration.hpp"

namespace vpmcf {

struct ConditionRow {
    std::string id;        // e.g. "ii-div-B"
    int order = 1;         // claimed decay order in dist (0 = exact/inequality)
    double supResidual = 0.0;
    double fittedConstant = 0.0; // sup |r| / max(dist, floor)^order
    bool pass = false;
};

struct ResidualReport {
    std::vector<ConditionRow> rows;

    // Transport coefficient f extracted from the xi-transport residual.
    double fSup = 0.0;            // sup |f| over admissible samples
    double fDirectSup = 0.0;      // sup of grad(s) . (grad B o P) grad(s) in the tube
    double fMismatch = 0.0;       // sup |f_extracted - f_direct|
    double fProjectionResidual = 0.0; // |(r4c . xi)| after removing f xi (identity check)
    int excludedDegenerate = 0;   // samples with |xi| < 1/2 skipped for f

    // Dyadic distance-band maxima of |r| for order diagnostics,
    // band k covers dist in delta * (2^-(k+1), 2^-k].
    std::map<std::string, std::vector<double>> bandMax;

    // Sampling metadata.
    int sampleCount = 0;
    std::uint64_t seed = 0;
    double dt = 0.0;
    double hfd = 0.0;
    double epsFloor = 0.0;
    double time = 0.0;
    double richardsonTimeDeriv = 0.0; // max discrepancy of dt vs dt/2 stencils

    bool allPass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }
    const ConditionRow& row(const std::string& id) const;
};

struct VerifySpec {
    int samples = 10000;
    int bands = 4;
    double dt = 0.0;    // 0 -> 1e-3 * horizon
    double hfd = 0.0;   // 0 -> 0.01 * delta
    double Cmax = 1e4;  // pass cap for fitted constants
    double exactTol = 1e-9; // pass cap for order-0 (identity/inequality) rows
    std::uint64_t seed = 0;
    int boundaryNodes = 512; // quadrature nodes for the xi = nu* check
};

// Sampled certification of the calibration conditions (ii)-(vi) at time t.
// Deterministic for a fixed spec.
ResidualReport verifyCalibration(const Calibration& cal, double t, const VerifySpec& spec);

void writeResidualCsv(const ResidualReport& report, const std::string& path);

} // namespace vpmcf
