#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "eetsne/affinity.hpp"
#include "eetsne/errors.hpp"
#include "eetsne/generators.hpp"
#include "eetsne/rng.hpp"
#include "eetsne/tsne.hpp"
#include "test_util.hpp"

using namespace eetsne;

namespace {

// Frozen 4-point fixture: p is a rational matrix (weights /18) and y a small
// hand-picked embedding.
AffinityMatrix frozen_p4() {
    Matrix m(4, 4, 0.0);
    const double vals[4][4] = {
        {0.0, 0.11111111111111113, 0.055555555555555566, 0.088888888888888906},
        {0.11111111111111113, 0.0, 0.077777777777777793, 0.066666666666666666},
        {0.055555555555555566, 0.077777777777777793, 0.0, 0.10000000000000001},
        {0.088888888888888906, 0.066666666666666666, 0.10000000000000001, 0.0},
    };
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) m(i, j) = vals[i][j];
    }
    return load_affinities(m, Normalization::TsneSumOne);
}

Points frozen_y4() {
    Points y(4, 2);
    const double vals[4][2] = {{0.01, -0.02}, {-0.015, 0.005}, {0.02, 0.01}, {-0.005, -0.015}};
    for (int i = 0; i < 4; ++i) {
        y[i][0] = vals[i][0];
        y[i][1] = vals[i][1];
    }
    return y;
}

// The objective whose quarter-gradient the library computes:
//   E(y) = alpha sum_{i != j} p_ij log(1 + |y_i - y_j|^2) + log Z(y).
double objective(const AffinityMatrix& p, const Points& y, double alpha) {
    const int n = y.n;
    double attraction = 0.0;
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d2 = squared_distance(y, i, j);
            attraction += p.p(i, j) * std::log1p(d2);
            z += 1.0 / (1.0 + d2);
        }
    }
    return alpha * attraction + std::log(z);
}

Points fd_gradient(const AffinityMatrix& p, const Points& y, double alpha) {
    const double step = 1e-6;
    Points g(y.n, y.dim);
    Points probe = y;
    for (int i = 0; i < y.n; ++i) {
        for (int k = 0; k < y.dim; ++k) {
            const double saved = probe[i][k];
            probe[i][k] = saved + step;
            const double up = objective(p, probe, alpha);
            probe[i][k] = saved - step;
            const double down = objective(p, probe, alpha);
            probe[i][k] = saved;
            g[i][k] = (up - down) / (2.0 * step) / 4.0;  // prefactor 4 is absorbed
        }
    }
    return g;
}

AffinityMatrix random_affinities(int n, std::uint64_t seed, double perplexity) {
    Rng rng(seed);
    Points data(n, 3);
    for (double& v : data.xs) v = rng.gaussian();
    return symmetrize(conditional_affinities(data, perplexity));
}

double purity(const Points& y, const std::vector<int>& labels, int k) {
    std::vector<double> cx(k, 0.0), cy(k, 0.0);
    std::vector<int> count(k, 0);
    for (int i = 0; i < y.n; ++i) {
        const int c = labels[i] - 1;
        cx[c] += y[i][0];
        cy[c] += y[i][1];
        ++count[c];
    }
    for (int c = 0; c < k; ++c) {
        cx[c] /= count[c];
        cy[c] /= count[c];
    }
    int hits = 0;
    for (int i = 0; i < y.n; ++i) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            const double dx = y[i][0] - cx[c];
            const double dy = y[i][1] - cy[c];
            const double d = dx * dx + dy * dy;
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        if (best == labels[i] - 1) ++hits;
    }
    return static_cast<double>(hits) / y.n;
}

}  // namespace

TEST_CASE("student-t kernel matches the frozen fixture") {
    const QMatrix q = compute_q(frozen_y4());
    CHECK(testutil::close_rel(q.z, 11.989011986016761, 1e-12));
    for (int i = 0; i < 4; ++i) {
        CHECK(q.qz(i, i) == 0.0);
        for (int j = 0; j < 4; ++j) {
            CHECK(q.qz(i, j) == q.qz(j, i));
            if (i != j) {
                CHECK(q.qz(i, j) > 0.0);
                CHECK(q.qz(i, j) <= 1.0);
            }
        }
    }
    // Spot value: d^2(0,1) = 0.00125.
    CHECK(testutil::close_rel(q.qz(0, 1), 1.0 / 1.00125, 1e-15));
}

TEST_CASE("KL cost matches the frozen fixture and is nonnegative") {
    const AffinityMatrix p = frozen_p4();
    const QMatrix q = compute_q(frozen_y4());
    CHECK(testutil::close_rel(kl_cost(p, q), 0.026358627405906242, 1e-12));

    // Random sum-one affinities keep the cost nonnegative.
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const AffinityMatrix rp = random_affinities(7, seed, 3.0);
        const Points y = random_embedding(7, 2, seed + 100);
        CHECK(kl_cost(rp, compute_q(y)) >= -1e-14);
    }
}

TEST_CASE("KL cost insists on sum-one normalization") {
    Matrix m(2, 2, 0.0);
    m(0, 1) = m(1, 0) = 0.25;
    const AffinityMatrix p = load_affinities(m, Normalization::SpectralRowBounded);
    const QMatrix q = compute_q(random_embedding(2, 2, 1));
    CHECK_THROWS_AS(kl_cost(p, q), InvalidAffinityMatrix);
}

TEST_CASE("gradient agrees with central finite differences") {
    Rng rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 5 + trial;
        const AffinityMatrix p = random_affinities(n, 1000 + trial, 3.0);
        Points y(n, 2);
        for (double& v : y.xs) v = rng.uniform(-1.0, 1.0);
        const double alpha = 1.0 + 7.3 * trial;

        const Points g = gradient(p, y, alpha);
        const Points fd = fd_gradient(p, y, alpha);
        double scale = 1e-8;
        for (double v : fd.xs) scale = std::max(scale, std::abs(v));
        CAPTURE(trial);
        CHECK(testutil::max_abs_diff(g, fd) <= 1e-5 * scale);
    }
}

TEST_CASE("one exaggerated step matches the update formula recomputed from scratch") {
    const int n = 5;
    const AffinityMatrix p = random_affinities(n, 9, 2.5);
    const Points y = random_embedding(n, 2, 77);
    ExaggerationConfig cfg;
    cfg.alpha = 7.3;
    cfg.h = 0.4;
    const Points next = ee_step(y, p, cfg);

    // Straight from the recursion: y_i' = y_i - h [ sum_j alpha p q Z delta
    // - sum_j (q Z)^2 / Z delta ].
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j != i) z += 1.0 / (1.0 + squared_distance(y, i, j));
        }
    }
    Points expected = y;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double qzij = 1.0 / (1.0 + squared_distance(y, i, j));
            for (int k = 0; k < 2; ++k) {
                const double delta = y[i][k] - y[j][k];
                expected[i][k] -= cfg.h * cfg.alpha * p.p(i, j) * qzij * delta;
                expected[i][k] += cfg.h * qzij * qzij / z * delta;
            }
        }
    }
    CHECK(testutil::max_abs_diff(next, expected) <= 1e-12);
}

TEST_CASE("force scales in a small box follow the kernel bounds") {
    // Inside [-0.02, 0.02]^2 every kernel value is within [0.99, 1], so
    // repulsion per point is at most ~diam/n and attraction at most
    // ~alpha row-mass diam.
    const int n = 6;
    const AffinityMatrix p = random_affinities(n, 5, 3.0);
    Rng rng(8);
    Points y(n, 2);
    for (double& v : y.xs) v = rng.uniform(-0.02, 0.02);
    const double diam = diameter(y);
    const double alpha = 11.0;

    Points att, rep;
    gradient_parts(p, y, alpha, att, rep);
    for (int i = 0; i < n; ++i) {
        double arow = 0.0;
        for (int j = 0; j < n; ++j) arow += p.p(i, j);
        const double att_norm = std::hypot(att[i][0], att[i][1]);
        const double rep_norm = std::hypot(rep[i][0], rep[i][1]);
        CAPTURE(i);
        CHECK(att_norm <= 1.01 * alpha * arow * diam);
        CHECK(rep_norm <= 1.02 * diam / n);
    }
}

TEST_CASE("snapshot cadence captures step zero, the stride, and the final step") {
    const AffinityMatrix p = random_affinities(6, 3, 3.0);
    const Points y0 = random_embedding(6, 2, 4);
    ExaggerationConfig cfg;
    cfg.alpha = 4.0;
    cfg.h = 0.5;
    cfg.iterations = 10;

    cfg.capture_every = 3;
    std::vector<int> seen;
    const RunResult r1 = run_early_exaggeration(y0, p, cfg, [&](int step, const Points&) {
        seen.push_back(step);
    });
    CHECK(seen == std::vector<int>{0, 3, 6, 9, 10});
    REQUIRE(r1.snapshots.size() == 5);
    CHECK(r1.snapshots.back().step == 10);
    CHECK(r1.snapshots.back().y.xs == r1.y.xs);

    cfg.capture_every = 5;
    const RunResult r2 = run_early_exaggeration(y0, p, cfg);
    std::vector<int> steps2;
    for (const auto& s : r2.snapshots) steps2.push_back(s.step);
    CHECK(steps2 == std::vector<int>{0, 5, 10});

    cfg.capture_every = 0;
    const RunResult r3 = run_early_exaggeration(y0, p, cfg);
    std::vector<int> steps3;
    for (const auto& s : r3.snapshots) steps3.push_back(s.step);
    CHECK(steps3 == std::vector<int>{0, 10});
}

TEST_CASE("runs are deterministic and flag off-box initializations") {
    const AffinityMatrix p = random_affinities(8, 21, 3.0);
    const Points y0 = random_embedding(8, 2, 5);
    ExaggerationConfig cfg;
    cfg.alpha = 6.0;
    cfg.h = 1.0;
    cfg.iterations = 25;
    cfg.capture_every = 7;

    const RunResult a = run_early_exaggeration(y0, p, cfg);
    const RunResult b = run_early_exaggeration(y0, p, cfg);
    CHECK(a.y.xs == b.y.xs);  // bit-identical
    CHECK(a.init_in_default_box);

    Points outside = y0;
    outside[0][0] = 0.02;
    const RunResult c = run_early_exaggeration(outside, p, cfg);
    CHECK_FALSE(c.init_in_default_box);
}

TEST_CASE("the divergence rail reports the failing iteration") {
    const AffinityMatrix p = random_affinities(6, 13, 3.0);
    const Points y0 = random_embedding(6, 2, 6);
    ExaggerationConfig cfg;
    cfg.alpha = 1e12;  // absurd exaggeration blows the bounding box
    cfg.h = 1.0;
    cfg.iterations = 50;
    try {
        run_early_exaggeration(y0, p, cfg);
        FAIL("expected NonFiniteUpdate");
    } catch (const NonFiniteUpdate& e) {
        CHECK(e.iteration >= 1);
        CHECK(e.iteration <= 50);
    }
}

TEST_CASE("the full pipeline stitches the plain phase onto the exaggerated one") {
    const AffinityMatrix p = random_affinities(7, 31, 3.0);
    const Points y0 = random_embedding(7, 2, 7);
    ExaggerationConfig ee;
    ee.alpha = 5.0;
    ee.h = 0.8;
    ee.iterations = 6;
    ee.capture_every = 1;
    PostPhaseConfig post;
    post.h = 0.3;
    post.iterations = 4;

    const RunResult full = run_full_tsne(y0, p, ee, post);
    REQUIRE(full.snapshots.size() == 11);  // steps 0..10
    CHECK(full.snapshots.back().step == 10);

    // Manual replay: exaggerated leg, then alpha = 1 at the post step size.
    const RunResult leg1 = run_early_exaggeration(y0, p, ee);
    ExaggerationConfig plain;
    plain.alpha = 1.0;
    plain.h = post.h;
    plain.iterations = post.iterations;
    plain.capture_every = 1;
    const RunResult leg2 = run_early_exaggeration(leg1.y, p, plain);
    CHECK(full.y.xs == leg2.y.xs);  // bit-identical stitch
}

TEST_CASE("early exaggeration then relaxation keeps cluster purity at least at init level") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::GaussianMixture;
    spec.n = 90;
    spec.k = 3;
    spec.d = 6;
    spec.cluster_std = 1.0;
    spec.separation = 20.0;
    spec.seed = 11;
    const GeneratedData data = generate(spec);
    const AffinityMatrix p = symmetrize(conditional_affinities(data.data, 10.0));
    const Points y0 = random_embedding(90, 2, 3);

    ExaggerationConfig ee;
    ee.alpha = 30.0;
    ee.h = 1.0;
    ee.iterations = 150;
    ee.capture_every = 0;
    PostPhaseConfig post;
    post.h = 1.0;
    post.iterations = 50;
    const RunResult run = run_full_tsne(y0, p, ee, post);

    const double before = purity(y0, data.labels, 3);
    const double after = purity(run.y, data.labels, 3);
    CHECK(after >= before);
    CHECK(after > 0.9);  // three 20-sigma-separated blobs resolve cleanly
}

TEST_CASE("core entry points validate their inputs") {
    const AffinityMatrix p = random_affinities(5, 1, 2.5);

    Points bad(5, 2);
    bad[2][1] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(compute_q(bad), InvalidDataset);
    CHECK_THROWS_AS(gradient(p, bad, 2.0), InvalidDataset);

    const Points y6 = random_embedding(6, 2, 2);
    CHECK_THROWS_AS(gradient(p, y6, 2.0), InvalidDataset);  // n mismatch

    const Points y5 = random_embedding(5, 2, 2);
    ExaggerationConfig cfg;
    cfg.alpha = -1.0;
    CHECK_THROWS_AS(ee_step(y5, p, cfg), InvalidSpec);
    cfg.alpha = 2.0;
    cfg.h = 0.0;
    CHECK_THROWS_AS(ee_step(y5, p, cfg), InvalidSpec);
    cfg.h = 1.0;
    cfg.iterations = -3;
    CHECK_THROWS_AS(run_early_exaggeration(y5, p, cfg), InvalidSpec);
}
