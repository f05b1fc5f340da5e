#pragma once

#include <cstdint>
#include <vector>

#include "eetsne/tsne.hpp"
#include "eetsne/types.hpp"

namespace eetsne {

// Row-stochastic transition matrix of the small-embedding limit:
//   A_ii = 1 - sum_{k != i} p_ik,   A_ij = p_ji (i != j).
// For symmetric p with row sums <= 1 this is doubly stochastic.
struct TransitionMatrix {
    Matrix a;

    int n() const { return a.rows(); }
};

// Requires every row sum of p to stay within 1 (+1e-12 fp slack); beyond
// that the diagonal would go negative and the map leaves the stochastic
// regime (ScaleError).  Diagonal dust in [-1e-12, 0) is clamped to 0.
TransitionMatrix build_transition_matrix(const AffinityMatrix& p);

// Scales every affinity by alpha*h, the exaggerated weight that appears in
// the limit dynamics.  Throws ScaleError if a scaled row sum exceeds 1.
AffinityMatrix rescale_for_limit(const AffinityMatrix& p, double alpha_h);

// Iterates y(t+1) = A y(t).  Snapshot semantics match run_early_exaggeration.
RunResult spectral_iterate(const TransitionMatrix& a, const Points& y0, int steps,
                           int capture_every, const SnapshotSink& sink = {});

// Runs the gradient engine (at alpha, h) and the spectral engine (at
// alpha*h) from the same random [-0.01, 0.01]^2 start and returns the
// max-over-points Euclidean deviation at every step t = 0..steps.
std::vector<double> compare_trajectories(const AffinityMatrix& p, double alpha, double h,
                                         int steps, std::uint64_t seed);

}  // namespace eetsne
