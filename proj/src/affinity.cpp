#include "eetsne/affinity.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace eetsne {

namespace {

constexpr double kSigmaLo = 1e-12;
constexpr double kSigmaHi = 1e12;
constexpr int kMaxBisect = 200;
// Contract is |2^H - target| <= 1e-5; stop tighter so that independent
// recomputations of the entropy (different summation order) still land
// inside the contract.
constexpr double kStopTol = 1e-6;

// Evaluates one candidate bandwidth.  Exponents are shifted by the row
// minimum distance so the largest term is exp(0); with that shift the
// normalizer is >= 1 and nothing here can overflow.  Returns the row
// perplexity exp(H_nats) and leaves the unnormalized weights in `e`.
double row_perplexity(const std::vector<double>& d2, int self, double sigma,
                      double d2min, std::vector<double>& e) {
    const int n = static_cast<int>(d2.size());
    const double beta = 1.0 / (2.0 * sigma * sigma);
    double sum = 0.0;
    double weighted = 0.0;  // sum of e_j * (d2_j - d2min)
    for (int j = 0; j < n; ++j) {
        if (j == self) {
            e[j] = 0.0;
            continue;
        }
        const double shifted = d2[j] - d2min;
        const double ej = std::exp(-shifted * beta);
        e[j] = ej;
        sum += ej;
        weighted += ej * shifted;
    }
    // H in nats: log(sum) + beta * E[d2 - d2min]; perplexity 2^(H/log 2) = e^H.
    const double entropy = std::log(sum) + beta * weighted / sum;
    return std::exp(entropy);
}

}  // namespace

ConditionalAffinities conditional_affinities(const Points& data, double perplexity) {
    validate_points(data, 2);
    const int n = data.n;
    if (!(perplexity > 1.0) || !(perplexity <= static_cast<double>(n - 1))) {
        throw PerplexityOutOfRange("perplexity must lie in (1, n-1], got " +
                                   std::to_string(perplexity) + " with n=" + std::to_string(n));
    }

    ConditionalAffinities out;
    out.rows = Matrix(n, n);
    out.sigmas.assign(n, 0.0);
    out.perplexity = perplexity;

    std::vector<double> d2(n), e(n);
    for (int i = 0; i < n; ++i) {
        double d2min = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            d2[j] = (j == i) ? 0.0 : squared_distance(data, i, j);
            if (j != i && d2[j] < d2min) d2min = d2[j];
        }

        double lo = kSigmaLo;
        double hi = kSigmaHi;
        double sigma = 0.0;
        double achieved = std::numeric_limits<double>::quiet_NaN();
        bool calibrated = false;
        for (int iter = 0; iter < kMaxBisect; ++iter) {
            const double mid = 0.5 * (lo + hi);
            achieved = row_perplexity(d2, i, mid, d2min, e);
            if (std::abs(achieved - perplexity) <= kStopTol) {
                sigma = mid;
                calibrated = true;
                break;
            }
            // Row entropy is nondecreasing in sigma, so plain bisection works.
            if (achieved < perplexity) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if (!calibrated) {
            throw DegenerateRow(i, "row " + std::to_string(i) + ": perplexity " +
                                       std::to_string(perplexity) +
                                       " unreachable within bisection budget (last " +
                                       std::to_string(achieved) + ")");
        }

        double sum = 0.0;
        for (int j = 0; j < n; ++j) sum += e[j];
        double* row = out.rows.row(i);
        for (int j = 0; j < n; ++j) row[j] = (j == i) ? 0.0 : e[j] / sum;
        out.sigmas[i] = sigma;
    }
    return out;
}

AffinityMatrix symmetrize(const ConditionalAffinities& cond) {
    const int n = cond.n();
    Matrix p(n, n);
    const double scale = 1.0 / (2.0 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double v = (cond.rows(i, j) + cond.rows(j, i)) * scale;
            p(i, j) = v;
            p(j, i) = v;
        }
    }
    return AffinityMatrix{std::move(p), Normalization::TsneSumOne};
}

AffinityMatrix load_affinities(Matrix source, Normalization norm) {
    const int n = source.rows();
    if (n != source.cols()) {
        throw InvalidAffinityMatrix("affinity matrix must be square, got " + std::to_string(n) +
                                    "x" + std::to_string(source.cols()));
    }
    if (n < 2) {
        throw InvalidAffinityMatrix("affinity matrix needs n >= 2");
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j) {
            const double v = source(i, j);
            if (!std::isfinite(v)) {
                throw InvalidAffinityMatrix("non-finite entry at (" + std::to_string(i) + "," +
                                            std::to_string(j) + ")");
            }
            if (v < 0.0) {
                throw InvalidAffinityMatrix("negative entry at (" + std::to_string(i) + "," +
                                            std::to_string(j) + ")");
            }
            if (i == j && v != 0.0) {
                throw InvalidAffinityMatrix("diagonal must be zero, entry (" + std::to_string(i) +
                                            "," + std::to_string(i) + ") is " + std::to_string(v));
            }
            if (std::abs(v - source(j, i)) > 1e-12) {
                throw InvalidAffinityMatrix("asymmetry beyond 1e-12 at (" + std::to_string(i) +
                                            "," + std::to_string(j) + ")");
            }
            row_sum += v;
        }
        if (norm == Normalization::SpectralRowBounded && row_sum > 1.0 + 1e-12) {
            throw InvalidAffinityMatrix("row " + std::to_string(i) + " sums to " +
                                        std::to_string(row_sum) + " > 1");
        }
        total += row_sum;
    }
    if (norm == Normalization::TsneSumOne && std::abs(total - 1.0) > 1e-9) {
        throw InvalidAffinityMatrix("entries sum to " + std::to_string(total) +
                                    ", expected 1 within 1e-9");
    }
    return AffinityMatrix{std::move(source), norm};
}

double row_entropy_bits(const Matrix& rows, int i) {
    double h = 0.0;
    for (int j = 0; j < rows.cols(); ++j) {
        const double p = rows(i, j);
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

}  // namespace eetsne
