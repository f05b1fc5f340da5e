#include "eetsne/dynsys.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "eetsne/rng.hpp"

namespace eetsne {

namespace {

// fp slack on envelope checks: honest oracles that draw exactly at the
// boundary (norm-eps perturbations, row sums of 1/n terms) may overshoot by
// a rounding error.
constexpr double kEnvelopeSlack = 1e-12;

void validate_regime(const CoefficientRegime& regime) {
    if (!regime.oracle) {
        throw InvalidSpec("coefficient regime has no oracle");
    }
    if (!(regime.delta > 0.0) || !std::isfinite(regime.delta)) {
        throw InvalidSpec("regime delta must be positive and finite");
    }
    if (regime.eps < 0.0 || !std::isfinite(regime.eps)) {
        throw InvalidSpec("regime eps must be >= 0 and finite");
    }
}

double norm2(const double* v, int s) {
    double acc = 0.0;
    for (int k = 0; k < s; ++k) acc += v[k] * v[k];
    return std::sqrt(acc);
}

}  // namespace

CoefficientRegime random_regime(int n, int s, double delta, double eps, std::uint64_t seed) {
    if (n < 2 || s < 1) {
        throw InvalidSpec("random_regime needs n >= 2 and s >= 1");
    }
    if (!(delta > 0.0) || delta > 1.0 / n) {
        throw InvalidSpec("random_regime needs 0 < delta <= 1/n so row sums stay below 1");
    }
    if (eps < 0.0 || !std::isfinite(eps)) {
        throw InvalidSpec("random_regime needs eps >= 0");
    }
    auto rng = std::make_shared<Rng>(seed);
    CoefficientRegime regime;
    regime.delta = delta;
    regime.eps = eps;
    regime.oracle = [n, s, delta, eps, rng](const DynState&) {
        StepCoefficients c{Matrix(n, n), Points(n, s)};
        const double hi = 1.0 / n;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                c.alpha(i, j) = delta + (hi - delta) * rng->uniform();
            }
        }
        if (eps > 0.0) {
            for (int i = 0; i < n; ++i) {
                // Direction from a normalized gaussian, radius eps * u^(1/s):
                // uniform on the ball.
                double norm = 0.0;
                double* row = c.eps[i];
                for (int k = 0; k < s; ++k) {
                    row[k] = rng->gaussian();
                    norm += row[k] * row[k];
                }
                norm = std::sqrt(norm);
                const double radius = eps * std::pow(rng->uniform(), 1.0 / s);
                if (norm == 0.0) {
                    row[0] = radius;
                } else {
                    for (int k = 0; k < s; ++k) row[k] = row[k] / norm * radius;
                }
            }
        }
        return c;
    };
    return regime;
}

DynState dynsys_step(const DynState& state, const CoefficientRegime& regime) {
    validate_points(state.z, 2);
    validate_regime(regime);
    const int n = state.z.n;
    const int s = state.z.dim;

    const StepCoefficients c = regime.oracle(state);
    if (c.alpha.rows() != n || c.alpha.cols() != n) {
        throw RegimeViolation(-1, -1, state.t, "oracle produced alpha of shape " +
                                                   std::to_string(c.alpha.rows()) + "x" +
                                                   std::to_string(c.alpha.cols()) + ", expected " +
                                                   std::to_string(n) + "x" + std::to_string(n));
    }
    if (c.eps.n != n || c.eps.dim != s) {
        throw RegimeViolation(-1, -1, state.t, "oracle produced eps of shape " +
                                                   std::to_string(c.eps.n) + "x" +
                                                   std::to_string(c.eps.dim) + ", expected " +
                                                   std::to_string(n) + "x" + std::to_string(s));
    }
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j) {
            const double a = c.alpha(i, j);
            if (i == j) {
                if (a != 0.0) {
                    throw RegimeViolation(i, i, state.t,
                                          "diagonal coefficient must be zero, got " +
                                              std::to_string(a) + " at step " +
                                              std::to_string(state.t));
                }
                continue;
            }
            if (!std::isfinite(a) || a < regime.delta || a > 1.0) {
                throw RegimeViolation(i, j, state.t,
                                      "coefficient alpha(" + std::to_string(i) + "," +
                                          std::to_string(j) + ") = " + std::to_string(a) +
                                          " outside [delta, 1] at step " +
                                          std::to_string(state.t));
            }
            row_sum += a;
        }
        if (row_sum > 1.0 + kEnvelopeSlack) {
            throw RegimeViolation(i, -1, state.t, "row " + std::to_string(i) +
                                                      " coefficients sum to " +
                                                      std::to_string(row_sum) + " > 1 at step " +
                                                      std::to_string(state.t));
        }
        const double eps_norm = norm2(c.eps[i], s);
        if (!std::isfinite(eps_norm) || eps_norm > regime.eps * (1.0 + kEnvelopeSlack)) {
            throw RegimeViolation(i, -1, state.t,
                                  "perturbation |eps_" + std::to_string(i) + "| = " +
                                      std::to_string(eps_norm) + " exceeds eps = " +
                                      std::to_string(regime.eps) + " at step " +
                                      std::to_string(state.t));
        }
    }

    DynState next;
    next.t = state.t + 1;
    next.z = Points(n, s);
    for (int i = 0; i < n; ++i) {
        const double* zi = state.z[i];
        double* out = next.z[i];
        for (int k = 0; k < s; ++k) out[k] = zi[k];
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double a = c.alpha(i, j);
            const double* zj = state.z[j];
            for (int k = 0; k < s; ++k) out[k] += a * (zj[k] - zi[k]);
        }
        const double* e = c.eps[i];
        for (int k = 0; k < s; ++k) out[k] += e[k];
    }
    return next;
}

HullCheckResult hull_stability_check(const Points& before, const Points& after, double eps,
                                     int directions, std::uint64_t seed) {
    validate_points(before, 2);
    validate_points(after, 2);
    if (before.n != after.n || before.dim != after.dim) {
        throw InvalidDataset("hull check needs states of identical shape");
    }
    if (eps < 0.0 || !std::isfinite(eps)) {
        throw InvalidSpec("hull check needs eps >= 0");
    }
    const int s = before.dim;
    constexpr double kTol = 1e-10;

    Rng rng(seed);
    std::vector<double> dir(s);
    HullCheckResult result;
    result.witness_direction.assign(s, 0.0);

    auto support = [s](const Points& pts, const std::vector<double>& u) {
        double best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < pts.n; ++i) {
            double dot = 0.0;
            for (int k = 0; k < s; ++k) dot += pts[i][k] * u[k];
            if (dot > best) best = dot;
        }
        return best;
    };
    bool first = true;
    auto check_direction = [&](const std::vector<double>& u) {
        // conv(after) subset conv(before) + B(0, eps) iff every support
        // value of `after` is within support(before) + eps.
        const double overshoot = support(after, u) - support(before, u) - eps;
        if (first || overshoot > result.excess) {
            result.excess = overshoot;
            result.witness_direction = u;
            first = false;
        }
        if (overshoot > kTol) result.pass = false;
    };

    for (int k = 0; k < s; ++k) {
        std::fill(dir.begin(), dir.end(), 0.0);
        dir[k] = 1.0;
        check_direction(dir);
        dir[k] = -1.0;
        check_direction(dir);
    }
    for (int m = 0; m < directions; ++m) {
        double norm = 0.0;
        for (int k = 0; k < s; ++k) {
            dir[k] = rng.gaussian();
            norm += dir[k] * dir[k];
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        for (int k = 0; k < s; ++k) dir[k] /= norm;
        check_direction(dir);
    }
    return result;
}

ContractionResult contraction_check(const Points& before, const Points& after, double delta,
                                    double eps) {
    validate_points(before, 2);
    validate_points(after, 2);
    if (before.n != after.n || before.dim != after.dim) {
        throw InvalidDataset("contraction check needs states of identical shape");
    }
    if (!(delta > 0.0)) {
        throw InvalidSpec("contraction check needs delta > 0");
    }
    const int n = before.n;
    ContractionResult r;
    r.diam_before = diameter(before);
    r.diam_after = diameter(after);
    r.threshold = 10.0 * eps / (n * delta);
    r.factor = 1.0 - n * delta / 20.0;
    if (r.diam_before < r.threshold) {
        r.outcome = ContractionOutcome::NotApplicable;
    } else if (r.diam_after <= r.factor * r.diam_before) {
        r.outcome = ContractionOutcome::Contracted;
    } else {
        r.outcome = ContractionOutcome::Violation;
    }
    return r;
}

DynTrajectory run_dynsys(const DynState& z0, const CoefficientRegime& regime, int steps) {
    validate_points(z0.z, 2);
    validate_regime(regime);
    if (steps < 0) {
        throw InvalidSpec("step count must be >= 0");
    }
    DynTrajectory traj;
    traj.states.reserve(static_cast<std::size_t>(steps) + 1);
    traj.states.push_back(z0);
    traj.diameters.push_back(diameter(z0.z));
    for (int t = 0; t < steps; ++t) {
        const DynState& cur = traj.states.back();
        DynState next = dynsys_step(cur, regime);
        if (!hull_stability_check(cur.z, next.z, regime.eps).pass) {
            ++traj.hull_failures;
        }
        if (contraction_check(cur.z, next.z, regime.delta, regime.eps).outcome ==
            ContractionOutcome::Violation) {
            ++traj.contraction_violations;
        }
        traj.diameters.push_back(diameter(next.z));
        traj.states.push_back(std::move(next));
    }
    return traj;
}

}  // namespace eetsne
