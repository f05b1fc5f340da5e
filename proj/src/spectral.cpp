#include "eetsne/spectral.hpp"

#include <cmath>
#include <string>

namespace eetsne {

TransitionMatrix build_transition_matrix(const AffinityMatrix& p) {
    const int n = p.n();
    if (n < 2) {
        throw InvalidAffinityMatrix("transition matrix needs n >= 2");
    }
    Matrix a(n, n);
    for (int i = 0; i < n; ++i) {
        double off = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            a(i, j) = p.p(j, i);
            off += p.p(i, j);
        }
        double diag = 1.0 - off;
        if (diag < 0.0) {
            if (diag < -1e-12) {
                throw ScaleError("row " + std::to_string(i) + " of p sums to " +
                                 std::to_string(off) + " > 1; transition matrix would leave the "
                                 "stochastic regime");
            }
            diag = 0.0;  // fp dust from a row sum within 1e-12 of 1
        }
        a(i, i) = diag;
    }
    return TransitionMatrix{std::move(a)};
}

AffinityMatrix rescale_for_limit(const AffinityMatrix& p, double alpha_h) {
    if (!(alpha_h > 0.0) || !std::isfinite(alpha_h)) {
        throw ScaleError("alpha*h must be positive and finite");
    }
    const int n = p.n();
    Matrix scaled(n, n);
    double worst = 0.0;
    int worst_row = 0;
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j) {
            const double v = alpha_h * p.p(i, j);
            scaled(i, j) = v;
            row_sum += v;
        }
        if (row_sum > worst) {
            worst = row_sum;
            worst_row = i;
        }
    }
    if (worst > 1.0 + 1e-12) {
        throw ScaleError("alpha*h = " + std::to_string(alpha_h) + " pushes row " +
                         std::to_string(worst_row) + " to sum " + std::to_string(worst) +
                         " > 1; the spectral limit no longer applies");
    }
    return AffinityMatrix{std::move(scaled), Normalization::SpectralRowBounded};
}

RunResult spectral_iterate(const TransitionMatrix& a, const Points& y0, int steps,
                           int capture_every, const SnapshotSink& sink) {
    validate_points(y0, 2);
    if (a.n() != y0.n) {
        throw InvalidDataset("transition matrix is " + std::to_string(a.n()) + "x" +
                             std::to_string(a.n()) + " but state has " + std::to_string(y0.n) +
                             " points");
    }
    if (steps < 0) {
        throw InvalidSpec("step count must be >= 0");
    }
    const int n = y0.n;
    const int s = y0.dim;
    RunResult out;
    out.init_in_default_box = true;
    for (double v : y0.xs) {
        if (std::abs(v) > 0.01) {
            out.init_in_default_box = false;
            break;
        }
    }
    out.snapshots.push_back(Snapshot{0, y0});
    if (sink) sink(0, y0);
    Points y = y0;
    Points next(n, s);
    for (int t = 1; t <= steps; ++t) {
        for (int i = 0; i < n; ++i) {
            double* out_row = next[i];
            for (int k = 0; k < s; ++k) out_row[k] = 0.0;
            const double* arow = a.a.row(i);
            for (int j = 0; j < n; ++j) {
                const double w = arow[j];
                if (w == 0.0) continue;
                const double* yj = y[j];
                for (int k = 0; k < s; ++k) out_row[k] += w * yj[k];
            }
        }
        std::swap(y.xs, next.xs);
        const bool on_cadence = capture_every > 0 && t % capture_every == 0;
        if (on_cadence || t == steps) {
            out.snapshots.push_back(Snapshot{t, y});
            if (sink) sink(t, y);
        }
    }
    out.y = std::move(y);
    return out;
}

std::vector<double> compare_trajectories(const AffinityMatrix& p, double alpha, double h,
                                         int steps, std::uint64_t seed) {
    if (steps < 0) {
        throw InvalidSpec("step count must be >= 0");
    }
    const Points y0 = random_embedding(p.n(), 2, seed);

    ExaggerationConfig cfg;
    cfg.alpha = alpha;
    cfg.h = h;
    cfg.iterations = steps;
    cfg.capture_every = 1;
    const RunResult grad = run_early_exaggeration(y0, p, cfg);

    const AffinityMatrix limit = rescale_for_limit(p, alpha * h);
    const TransitionMatrix a = build_transition_matrix(limit);
    const RunResult spec = spectral_iterate(a, y0, steps, 1);

    std::vector<double> deviation(static_cast<std::size_t>(steps) + 1, 0.0);
    for (int t = 0; t <= steps; ++t) {
        const Points& yg = grad.snapshots[t].y;
        const Points& ys = spec.snapshots[t].y;
        double worst = 0.0;
        for (int i = 0; i < yg.n; ++i) {
            double d2 = 0.0;
            for (int k = 0; k < yg.dim; ++k) {
                const double diff = yg[i][k] - ys[i][k];
                d2 += diff * diff;
            }
            if (d2 > worst) worst = d2;
        }
        deviation[t] = std::sqrt(worst);
    }
    return deviation;
}

}  // namespace eetsne
