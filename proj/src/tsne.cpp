#include "eetsne/tsne.hpp"

#include <cmath>
#include <string>

#include "eetsne/rng.hpp"

namespace eetsne {

namespace {

void require_compatible(const AffinityMatrix& p, const Points& y) {
    validate_points(y, 2);
    if (p.n() != y.n) {
        throw InvalidDataset("affinity matrix is " + std::to_string(p.n()) + "x" +
                             std::to_string(p.n()) + " but embedding has " + std::to_string(y.n) +
                             " points");
    }
}

void fill_q(const Points& y, Matrix& qz, double& z) {
    const int n = y.n;
    if (qz.rows() != n) qz = Matrix(n, n);
    double half = 0.0;
    for (int i = 0; i < n; ++i) {
        qz(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double v = 1.0 / (1.0 + squared_distance(y, i, j));
            qz(i, j) = v;
            qz(j, i) = v;
            half += v;
        }
    }
    z = 2.0 * half;
}

// Accumulates both force sums in one pass over the pair matrix.
void accumulate_forces(const AffinityMatrix& p, const Points& y, const Matrix& qz, double z,
                       double alpha, Points& attraction, Points& repulsion) {
    const int n = y.n;
    const int s = y.dim;
    if (attraction.n != n || attraction.dim != s) attraction = Points(n, s);
    if (repulsion.n != n || repulsion.dim != s) repulsion = Points(n, s);
    std::fill(attraction.xs.begin(), attraction.xs.end(), 0.0);
    std::fill(repulsion.xs.begin(), repulsion.xs.end(), 0.0);
    const double inv_z = 1.0 / z;
    for (int i = 0; i < n; ++i) {
        const double* yi = y[i];
        double* att = attraction[i];
        double* rep = repulsion[i];
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double w = qz(i, j);
            const double aw = alpha * p.p(i, j) * w;   // alpha p_ij q_ij Z
            const double rw = w * w * inv_z;           // q_ij^2 Z
            const double* yj = y[j];
            for (int k = 0; k < s; ++k) {
                const double diff = yi[k] - yj[k];
                att[k] += aw * diff;
                rep[k] += rw * diff;
            }
        }
    }
}

// Divergence rail; `iteration` is the 1-based index of the step just taken.
void rail_check(const Points& y, int iteration) {
    double lo[16], hi[16];
    const int s = y.dim;
    for (int k = 0; k < s && k < 16; ++k) {
        lo[k] = y.xs[k];
        hi[k] = y.xs[k];
    }
    for (int i = 0; i < y.n; ++i) {
        const double* yi = y[i];
        for (int k = 0; k < s; ++k) {
            const double v = yi[k];
            if (!std::isfinite(v)) {
                throw NonFiniteUpdate(iteration, "non-finite coordinate after iteration " +
                                                     std::to_string(iteration));
            }
            if (k < 16) {
                if (v < lo[k]) lo[k] = v;
                if (v > hi[k]) hi[k] = v;
            }
        }
    }
    double diag2 = 0.0;
    for (int k = 0; k < s && k < 16; ++k) {
        const double span = hi[k] - lo[k];
        diag2 += span * span;
    }
    if (diag2 > 1e12) {  // bounding-box diagonal beyond 1e6
        throw NonFiniteUpdate(iteration, "embedding bounding box exploded after iteration " +
                                             std::to_string(iteration) + " (diagonal " +
                                             std::to_string(std::sqrt(diag2)) + ")");
    }
}

struct Workspace {
    Matrix qz;
    double z = 0.0;
    Points attraction, repulsion;
};

void step_in_place(Points& y, const AffinityMatrix& p, double alpha, double h, int iteration,
                   Workspace& ws) {
    fill_q(y, ws.qz, ws.z);
    accumulate_forces(p, y, ws.qz, ws.z, alpha, ws.attraction, ws.repulsion);
    for (std::size_t k = 0; k < y.xs.size(); ++k) {
        y.xs[k] -= h * (ws.attraction.xs[k] - ws.repulsion.xs[k]);
    }
    rail_check(y, iteration);
}

void validate_config(double alpha, double h, int iterations) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw InvalidSpec("exaggeration alpha must be positive and finite");
    }
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InvalidSpec("step size h must be positive and finite");
    }
    if (iterations < 0) {
        throw InvalidSpec("iteration count must be >= 0");
    }
}

bool in_default_box(const Points& y) {
    for (double v : y.xs) {
        if (std::abs(v) > 0.01) return false;
    }
    return true;
}

// Runs `iterations` steps at fixed (alpha, h), numbering them base+1 ...
// base+iterations.  Captures according to `capture_every` but never emits
// the same step twice; the caller is responsible for capturing step `base`.
void run_phase(Points& y, const AffinityMatrix& p, double alpha, double h, int iterations,
               int base, int capture_every, bool capture_final, RunResult& out,
               const SnapshotSink& sink, Workspace& ws) {
    for (int t = 1; t <= iterations; ++t) {
        const int step = base + t;
        step_in_place(y, p, alpha, h, step, ws);
        const bool on_cadence = capture_every > 0 && step % capture_every == 0;
        const bool is_final = capture_final && t == iterations;
        if (on_cadence || is_final) {
            out.snapshots.push_back(Snapshot{step, y});
            if (sink) sink(step, y);
        }
    }
}

}  // namespace

QMatrix compute_q(const Points& y) {
    validate_points(y, 2);
    QMatrix q;
    fill_q(y, q.qz, q.z);
    return q;
}

double kl_cost(const AffinityMatrix& p, const QMatrix& q) {
    if (p.norm != Normalization::TsneSumOne) {
        throw InvalidAffinityMatrix("kl_cost needs sum-one normalized affinities");
    }
    if (p.n() != q.n()) {
        throw InvalidAffinityMatrix("affinity and kernel matrices disagree on n");
    }
    const int n = p.n();
    const double log_z = std::log(q.z);
    double cost = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double pij = p.p(i, j);
            if (pij <= 0.0) continue;
            // log q_ij = log qz_ij - log z
            cost += pij * (std::log(pij) - std::log(q.qz(i, j)) + log_z);
        }
    }
    return cost;
}

void gradient_parts(const AffinityMatrix& p, const Points& y, double alpha, Points& attraction,
                    Points& repulsion) {
    require_compatible(p, y);
    validate_config(alpha, 1.0, 0);
    Matrix qz;
    double z = 0.0;
    fill_q(y, qz, z);
    accumulate_forces(p, y, qz, z, alpha, attraction, repulsion);
}

Points gradient(const AffinityMatrix& p, const Points& y, double alpha) {
    Points att, rep;
    gradient_parts(p, y, alpha, att, rep);
    Points g(y.n, y.dim);
    for (std::size_t k = 0; k < g.xs.size(); ++k) g.xs[k] = att.xs[k] - rep.xs[k];
    return g;
}

Points ee_step(const Points& y, const AffinityMatrix& p, const ExaggerationConfig& cfg) {
    require_compatible(p, y);
    validate_config(cfg.alpha, cfg.h, 0);
    Points next = y;
    Workspace ws;
    step_in_place(next, p, cfg.alpha, cfg.h, 1, ws);
    return next;
}

RunResult run_early_exaggeration(const Points& y0, const AffinityMatrix& p,
                                 const ExaggerationConfig& cfg, const SnapshotSink& sink) {
    require_compatible(p, y0);
    validate_config(cfg.alpha, cfg.h, cfg.iterations);
    RunResult out;
    out.init_in_default_box = in_default_box(y0);
    out.snapshots.push_back(Snapshot{0, y0});
    if (sink) sink(0, y0);
    Points y = y0;
    Workspace ws;
    run_phase(y, p, cfg.alpha, cfg.h, cfg.iterations, 0, cfg.capture_every, true, out, sink, ws);
    out.y = std::move(y);
    return out;
}

RunResult run_full_tsne(const Points& y0, const AffinityMatrix& p, const ExaggerationConfig& ee,
                        const PostPhaseConfig& post, const SnapshotSink& sink) {
    require_compatible(p, y0);
    validate_config(ee.alpha, ee.h, ee.iterations);
    validate_config(1.0, post.h, post.iterations);
    RunResult out;
    out.init_in_default_box = in_default_box(y0);
    out.snapshots.push_back(Snapshot{0, y0});
    if (sink) sink(0, y0);
    Points y = y0;
    Workspace ws;
    const bool has_post = post.iterations > 0;
    run_phase(y, p, ee.alpha, ee.h, ee.iterations, 0, ee.capture_every, !has_post, out, sink, ws);
    if (has_post) {
        run_phase(y, p, 1.0, post.h, post.iterations, ee.iterations, ee.capture_every, true, out,
                  sink, ws);
    }
    out.y = std::move(y);
    return out;
}

Points random_embedding(int n, int s, std::uint64_t seed) {
    if (n < 2 || s < 1) {
        throw InvalidSpec("random_embedding needs n >= 2 and s >= 1");
    }
    Rng rng(seed);
    Points y(n, s);
    for (std::size_t k = 0; k < y.xs.size(); ++k) y.xs[k] = rng.uniform(-0.01, 0.01);
    return y;
}

}  // namespace eetsne
