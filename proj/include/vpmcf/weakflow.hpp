#pragma once

#include <string>
#include <vector>

#include "vpmcf/grid.hpp"
#include "vpmcf/interface.hpp"

namespace vpmcf {

// Heat semigroup applied to the indicator: Fourier multiplier exp(-ht |k|^2)
// on the periodic box (Gaussian kernel of width sqrt(2 ht)).
std::vector<double> diffuse(const IndicatorField& chi, double ht);

struct ThresholdDiagnostics {
    double level = 0.5;          // selected threshold
    double levelMinusHalf = 0.0; // volume-preservation correction
    std::size_t targetCells = 0;
};

// One thresholding step. Volume-preserving mode picks the level so the new
// set has exactly the old cell count (ties broken by lexicographic index);
// plain mode thresholds at 1/2.
IndicatorField thresholdingStep(const IndicatorField& chi, double ht,
                                bool volumePreserving = true,
                                ThresholdDiagnostics* diag = nullptr);

struct VelocitySample {
    std::size_t cell = 0;
    Vec x{0, 0, 0};
    Vec normal{0, 0, 0}; // outward
    double weight = 0.0;
    double velocity = 0.0; // outward normal velocity
};

// Normal velocity between consecutive fields, sampled on the discrete
// interface of `before`: V = (d1 - d0)/ht with d the local inside-positive
// distance to the half level of the mollified field, recovered by inverting
// the Gaussian edge profile.
std::vector<VelocitySample> estimateVelocity(const IndicatorField& before,
                                             const IndicatorField& after, double ht);

struct LambdaEstimate {
    double leastSquares = 0.0; // fit over the divergence test-field dictionary
    double curvature = 0.0;    // interface average of div(-grad u/|grad u|)
    double fitResidual = 0.0;  // rms dictionary residual at the fitted value
};

LambdaEstimate estimateLambda(const IndicatorField& chi,
                              const std::vector<VelocitySample>& velocity);

struct FlowStep {
    int n = 0;
    double time = 0.0;
    double volume = 0.0;      // cell count * h^d
    std::size_t cells = 0;
    double energy = 0.0;      // discrete perimeter
    double level = 0.5;
    double lambda = 0.0;      // least-squares estimate over step n -> n+1
    double lambdaCurv = 0.0;
    double dissipation = 0.0;     // sum V^2 w over step n -> n+1
    double clambdaSqRunning = 0.0; // ht * sum_{m<n} lambda_m^2
};

struct WeakFlowTrace {
    Grid grid;
    double ht = 0.0;
    bool volumePreserving = true;
    std::vector<FlowStep> steps;         // entries 0..N
    std::vector<IndicatorField> fields;  // chi^0 .. chi^N
};

WeakFlowTrace runFlow(const IndicatorField& chi0, double ht, int nSteps,
                      bool volumePreserving = true);

struct WeakClauseReport {
    bool volumeExact = false;
    bool ediPass = false;
    double ediSlack = 0.0;    // E0 + tol - (EN + sum dissipation); >= 0 iff pass
    double clambdaSq = 0.0;   // ht * sum lambda_n^2 over the run
    double energy0 = 0.0;
    double energyN = 0.0;
    double dissipationSum = 0.0; // ht * sum_n sum V^2 w
    bool pass() const { return volumeExact && ediPass; }
};

// Clause checks for the distributional-solution definition: exact volume,
// energy dissipation surrogate E^N + sum_n ht sum V^2 w <= E^0 + tol, and the
// recorded square-integrated Lagrange multiplier.
WeakClauseReport checkWeakSolution(const WeakFlowTrace& trace, double tolEdiRel = 0.05);

void writeTraceCsv(const WeakFlowTrace& trace, const std::string& path);

} // namespace vpmcf
