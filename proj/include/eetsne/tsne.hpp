#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "eetsne/types.hpp"

namespace eetsne {

// Student-t kernel numerators qz_ij = 1 / (1 + |y_i - y_j|^2) and their sum
// Z over ordered pairs; the normalized kernel is q_ij = qz_ij / z.
struct QMatrix {
    Matrix qz;
    double z = 0.0;

    int n() const { return qz.rows(); }
};

QMatrix compute_q(const Points& y);

// KL divergence sum_{i != j} p_ij log(p_ij / q_ij); zero p terms skipped.
// Requires TsneSumOne normalization (KL against an unnormalized p is not
// a divergence).
double kl_cost(const AffinityMatrix& p, const QMatrix& q);

// Quarter-gradient of the exaggerated objective at y:
//   g_i = sum_{j != i} alpha p_ij (q_ij Z) (y_i - y_j)
//       - sum_{j != i} (q_ij)^2 Z (y_i - y_j)
// The classical prefactor 4 is absorbed into the step size, so a descent
// step is y <- y - h * g.
Points gradient(const AffinityMatrix& p, const Points& y, double alpha);

// The attraction and repulsion halves of `gradient`, exposed separately so
// the relative scale of the two forces can be inspected.
void gradient_parts(const AffinityMatrix& p, const Points& y, double alpha, Points& attraction,
                    Points& repulsion);

struct ExaggerationConfig {
    double alpha = 12.0;
    double h = 1.0;
    int iterations = 250;
    // Snapshot cadence: capture step 0, every capture_every-th step, and the
    // final step.  <= 0 captures only the endpoints.
    int capture_every = 10;
};

// One descent step.  Throws NonFiniteUpdate if any updated coordinate is
// non-finite or the bounding-box diagonal exceeds 1e6.
Points ee_step(const Points& y, const AffinityMatrix& p, const ExaggerationConfig& cfg);

struct Snapshot {
    int step = 0;
    Points y;
};

// Called for every captured snapshot, in step order.
using SnapshotSink = std::function<void(int step, const Points& y)>;

struct RunResult {
    Points y;                         // final embedding
    std::vector<Snapshot> snapshots;  // captured states, step 0 first
    bool init_in_default_box = true;  // y0 inside [-0.01, 0.01]^s
};

// Runs cfg.iterations exaggerated steps from y0.  On NonFiniteUpdate the
// offending iteration index is recorded in the exception; snapshots already
// handed to the sink remain valid.
RunResult run_early_exaggeration(const Points& y0, const AffinityMatrix& p,
                                 const ExaggerationConfig& cfg, const SnapshotSink& sink = {});

struct PostPhaseConfig {
    double h = 1.0;
    int iterations = 0;
};

// Early-exaggeration phase followed by a plain (alpha = 1) phase; step
// numbering and snapshot cadence continue across the boundary.
RunResult run_full_tsne(const Points& y0, const AffinityMatrix& p, const ExaggerationConfig& ee,
                        const PostPhaseConfig& post, const SnapshotSink& sink = {});

// Uniform random start in [-0.01, 0.01]^s, coordinates drawn row-major.
Points random_embedding(int n, int s, std::uint64_t seed);

}  // namespace eetsne
