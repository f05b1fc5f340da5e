#pragma once

#include "eetsne/types.hpp"

namespace eetsne {

// Calibrates one Gaussian bandwidth sigma_i per point so that the row
// p_{j|i} = exp(-|x_i-x_j|^2 / (2 sigma_i^2)) / sum_k exp(...) reaches the
// requested perplexity 2^H (H in bits) within 1e-5.  Bisection on
// sigma in [1e-12, 1e12], at most 200 halvings; rows with duplicate points
// or an unreachable target raise DegenerateRow.
//
// Valid targets lie in (1, n-1]: a row over n-1 neighbors cannot exceed
// perplexity n-1, and perplexity 1 is only reached in the sigma -> 0 limit.
ConditionalAffinities conditional_affinities(const Points& data, double perplexity);

// Joint affinities p_ij = (p_{j|i} + p_{i|j}) / (2n): symmetric, zero
// diagonal, entries sum to 1 over ordered pairs.
AffinityMatrix symmetrize(const ConditionalAffinities& cond);

// Adopts an externally supplied matrix after validating symmetry (tolerance
// 1e-12), nonnegativity, zero diagonal, and the declared normalization:
// TsneSumOne requires |sum - 1| <= 1e-9, SpectralRowBounded requires every
// row sum <= 1 + 1e-12.
AffinityMatrix load_affinities(Matrix source, Normalization norm);

// Shannon entropy in bits of one calibrated row (zero terms skipped).
// Exposed for diagnostics and tests.
double row_entropy_bits(const Matrix& rows, int i);

}  // namespace eetsne
