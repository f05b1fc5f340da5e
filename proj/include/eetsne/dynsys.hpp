#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "eetsne/types.hpp"

namespace eetsne {

struct DynState {
    Points z;
    int t = 0;
};

// Coefficients for one update step: mixing weights alpha (n x n, zero
// diagonal) and per-point perturbations eps (n rows of dimension s).
struct StepCoefficients {
    Matrix alpha;
    Points eps;
};

using CoefficientOracle = std::function<StepCoefficients(const DynState&)>;

// A coefficient source together with the envelope it promises to respect:
// off-diagonal alpha in [delta, 1], off-diagonal row sums <= 1, and
// |eps_i| <= eps.  dynsys_step re-validates every draw and throws
// RegimeViolation when the oracle steps outside the envelope.
struct CoefficientRegime {
    double delta = 0.0;
    double eps = 0.0;
    CoefficientOracle oracle;
};

// Built-in regime: alpha_{i,j,t} uniform in [delta, 1/n] and eps_i(t)
// uniform on the closed radius-eps ball, freshly drawn each step; the whole
// stream is a deterministic function of `seed`.
CoefficientRegime random_regime(int n, int s, double delta, double eps, std::uint64_t seed);

// z_i(t+1) = z_i(t) + sum_{j != i} alpha_ij (z_j(t) - z_i(t)) + eps_i(t).
DynState dynsys_step(const DynState& state, const CoefficientRegime& regime);

struct HullCheckResult {
    bool pass = true;
    double excess = 0.0;                    // worst support-function overshoot
    std::vector<double> witness_direction;  // direction achieving `excess`
};

// Convex-hull stability: conv(after) must lie inside conv(before) + B(0, eps).
// Verified through support functions on `directions` random unit vectors
// plus the +-axis directions, with tolerance 1e-10.
HullCheckResult hull_stability_check(const Points& before, const Points& after, double eps,
                                     int directions = 64, std::uint64_t seed = 0x5bd1e995u);

enum class ContractionOutcome { NotApplicable, Contracted, Violation };

struct ContractionResult {
    ContractionOutcome outcome = ContractionOutcome::NotApplicable;
    double diam_before = 0.0;
    double diam_after = 0.0;
    double threshold = 0.0;  // 10 eps / (n delta)
    double factor = 0.0;     // 1 - n delta / 20
};

// Applies whenever diam(before) >= threshold; then diam(after) must be
// <= factor * diam(before).
ContractionResult contraction_check(const Points& before, const Points& after, double delta,
                                    double eps);

struct DynTrajectory {
    std::vector<DynState> states;   // t = 0..steps
    std::vector<double> diameters;  // one per state
    int hull_failures = 0;
    int contraction_violations = 0;
};

// Steps the system and runs both stability checks after every update.
DynTrajectory run_dynsys(const DynState& z0, const CoefficientRegime& regime, int steps);

}  // namespace eetsne
