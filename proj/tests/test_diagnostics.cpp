#include <doctest.h>

#include <cmath>
#include <vector>

#include "eetsne/affinity.hpp"
#include "eetsne/diagnostics.hpp"
#include "eetsne/errors.hpp"
#include "eetsne/generators.hpp"
#include "eetsne/tsne.hpp"
#include "test_util.hpp"

using namespace eetsne;

namespace {

// n = 4, clusters {1,2} and {3,4}: within-cluster weights 0.05 and 0.003,
// asymmetric-ish cross weights (kept symmetric as a matrix).
AffinityMatrix hand_p4() {
    Matrix m(4, 4, 0.0);
    m(0, 1) = m(1, 0) = 0.05;
    m(2, 3) = m(3, 2) = 0.003;
    m(0, 2) = m(2, 0) = 0.01;
    m(0, 3) = m(3, 0) = 0.005;
    m(1, 2) = m(2, 1) = 0.002;
    m(1, 3) = m(3, 1) = 0.004;
    return AffinityMatrix{std::move(m), Normalization::TsneSumOne};
}

const ClusterAssignment kTwoPairs = ClusterAssignment::from_labels({1, 1, 2, 2});

}  // namespace

TEST_CASE("arbitrary labels are remapped to 1..k in ascending order") {
    const ClusterAssignment ca = ClusterAssignment::from_labels({7, 7, 3, 7, 3});
    CHECK(ca.k == 2);
    CHECK(ca.labels == std::vector<int>{2, 2, 1, 2, 1});
    CHECK(ca.sizes == std::vector<int>{2, 3});
    CHECK_THROWS_AS(ClusterAssignment::from_labels({}), InvalidClusterAssignment);
}

TEST_CASE("assignment validation rejects inconsistent partitions") {
    ClusterAssignment ca = ClusterAssignment::from_labels({1, 1, 2});
    CHECK_NOTHROW(validate_assignment(ca, 3));
    CHECK_THROWS_AS(validate_assignment(ca, 4), InvalidClusterAssignment);  // wrong n

    ClusterAssignment bad = ca;
    bad.labels[0] = 3;  // outside 1..k
    CHECK_THROWS_AS(validate_assignment(bad, 3), InvalidClusterAssignment);

    bad = ca;
    bad.k = 3;
    bad.sizes = {2, 1, 0};  // declared cluster with no members
    CHECK_THROWS_AS(validate_assignment(bad, 3), InvalidClusterAssignment);

    bad = ca;
    bad.sizes = {1, 2};  // recorded sizes disagree with labels
    CHECK_THROWS_AS(validate_assignment(bad, 3), InvalidClusterAssignment);
}

TEST_CASE("well-separation margins come out as p_ij times its floor denominator") {
    const AffinityMatrix p = hand_p4();
    // scale = 10 n |cluster| = 80 for both pairs.
    const Assumption1Result r = check_assumption1(p, kTwoPairs);
    REQUIRE(r.min_margin.size() == 2);
    CHECK(testutil::close(r.min_margin[0], 0.05 * 80, 1e-12));
    CHECK(testutil::close(r.min_margin[1], 0.003 * 80, 1e-12));
    CHECK(r.worst_pair[0] == std::pair<int, int>{0, 1});
    CHECK(r.worst_pair[1] == std::pair<int, int>{2, 3});
    CHECK_FALSE(r.pass);  // 0.24 < 1 on the weak pair

    // Doubling every affinity doubles each margin bit-for-bit.
    AffinityMatrix doubled = p;
    double* raw = doubled.p.data();
    for (int idx = 0; idx < 16; ++idx) raw[idx] *= 2.0;
    const Assumption1Result r2 = check_assumption1(doubled, kTwoPairs);
    CHECK(r2.min_margin[0] == 2.0 * r.min_margin[0]);
    CHECK(r2.min_margin[1] == 2.0 * r.min_margin[1]);
}

TEST_CASE("singleton clusters have infinite margin and no worst pair") {
    Matrix m(3, 3, 0.0);
    m(0, 1) = m(1, 0) = 0.2;
    const AffinityMatrix p{std::move(m), Normalization::TsneSumOne};
    const ClusterAssignment ca = ClusterAssignment::from_labels({1, 1, 2});
    const Assumption1Result r = check_assumption1(p, ca);
    CHECK(std::isinf(r.min_margin[1]));
    CHECK(r.worst_pair[1] == std::pair<int, int>{-1, -1});
    CHECK(r.pass);  // 0.2 * 60 = 12 >= 1 and the singleton is vacuous
}

TEST_CASE("exaggerated within-cluster mass is classified against [1/100, 9/10]") {
    const AffinityMatrix p = hand_p4();

    Assumption2Result r = check_assumption2(p, kTwoPairs, 2.0, 1.0);
    REQUIRE(r.mass.size() == 4);
    CHECK(testutil::close(r.mass[0], 0.1, 1e-15));
    CHECK(testutil::close(r.mass[2], 0.006, 1e-15));
    CHECK(r.verdict[0] == Assumption2Verdict::InRange);
    CHECK(r.verdict[2] == Assumption2Verdict::BelowRange);
    CHECK_FALSE(r.pass);

    r = check_assumption2(p, kTwoPairs, 10.0, 1.0);  // v in {0.5, 0.03}
    CHECK(r.pass);
    CHECK(testutil::close(r.min_mass, 0.03, 1e-15));
    CHECK(testutil::close(r.max_mass, 0.5, 1e-15));

    r = check_assumption2(p, kTwoPairs, 40.0, 0.5);  // v_0 = 1.0 overshoots
    CHECK(r.verdict[0] == Assumption2Verdict::AboveRange);
    CHECK(r.verdict[2] == Assumption2Verdict::InRange);
    CHECK_FALSE(r.pass);

    CHECK_THROWS_AS(check_assumption2(p, kTwoPairs, 0.0, 1.0), InvalidSpec);
    CHECK_THROWS_AS(check_assumption2(p, kTwoPairs, 1.0, -1.0), InvalidSpec);
}

TEST_CASE("the guideline pins the largest within-cluster mass to exactly 9/10") {
    const AffinityMatrix p = hand_p4();
    const GuidelineResult g = guideline_alpha_h(p, kTwoPairs);
    CHECK(testutil::close(g.alpha_h, 0.9 / 0.05, 1e-12));
    CHECK(g.argmax == 0);
    REQUIRE(g.row_mass.size() == 4);
    CHECK(testutil::close(g.row_mass[2], 0.003, 1e-15));

    // Feeding the guideline back in saturates assumption 2 at the cap.
    const Assumption2Result r = check_assumption2(p, kTwoPairs, g.alpha_h, 1.0);
    CHECK(testutil::close(r.max_mass, 0.9, 1e-12));
    CHECK(r.pass);

    Matrix zeros(3, 3, 0.0);
    const AffinityMatrix empty{std::move(zeros), Normalization::TsneSumOne};
    const ClusterAssignment ca3 = ClusterAssignment::from_labels({1, 1, 2});
    CHECK_THROWS_AS(guideline_alpha_h(empty, ca3), InvalidAffinityMatrix);
}

TEST_CASE("the post-contraction bound is c h (alpha worst-cross-mass + 1/n) per cluster") {
    const AffinityMatrix p = hand_p4();
    // Cross mass per point: {0.015, 0.006, 0.012, 0.009} -> cluster maxima
    // 0.015 and 0.012.
    const std::vector<double> b = theorem_bound(p, kTwoPairs, 2.0, 0.5, 10.0);
    REQUIRE(b.size() == 2);
    CHECK(testutil::close(b[0], 10.0 * 0.5 * (2.0 * 0.015 + 0.25), 1e-12));
    CHECK(testutil::close(b[1], 10.0 * 0.5 * (2.0 * 0.012 + 0.25), 1e-12));
    CHECK_THROWS_AS(theorem_bound(p, kTwoPairs, 2.0, 0.5, 0.0), InvalidSpec);
}

TEST_CASE("cluster diameters are the per-cluster max pairwise distances") {
    Points y(5, 2);
    const double coords[5][2] = {{0.0, 0.0}, {3.0, 4.0}, {10.0, 0.0}, {10.0, 1.0}, {10.0, 3.0}};
    for (int i = 0; i < 5; ++i) {
        y[i][0] = coords[i][0];
        y[i][1] = coords[i][1];
    }
    const ClusterAssignment ca = ClusterAssignment::from_labels({1, 1, 2, 2, 2});
    const std::vector<double> d = cluster_diameters(y, ca);
    REQUIRE(d.size() == 2);
    CHECK(d[0] == 5.0);
    CHECK(d[1] == 3.0);
}

TEST_CASE("a geometric decay series yields its exact slope, arrival step, and peak") {
    // d_t = 16 * 0.8^t for t = 0..25 against bound 0.1: arrival at t = 23,
    // monotone decay afterwards, fit window t <= 20 (first capture at or
    // below 1.5x bound is t = 21).
    const ClusterAssignment ca = ClusterAssignment::from_labels({1, 1});
    DiameterTracker tracker(ca, {0.1});
    std::vector<double> ds(26);
    for (int t = 0; t <= 25; ++t) {
        ds[t] = 16.0 * std::pow(0.8, t);
        tracker.push_row(t, {ds[t]});
    }
    const DiameterSeries s = tracker.series(10.0);
    REQUIRE(s.steps.size() == 26);
    CHECK(s.by_cluster(4, 0) == ds[4]);
    CHECK(s.first_below[0] == 23);
    CHECK(s.stays_below[0] == 1);
    CHECK(testutil::close(s.rate[0], std::log(0.8), 1e-12));
    CHECK(testutil::close(s.peak_after_arrival[0], ds[23], 1e-15));
    CHECK(testutil::close(s.sufficient_c[0], 10.0 * ds[23] / 0.1, 1e-12));
}

TEST_CASE("diameter series flags re-expansion and never-arriving clusters") {
    const ClusterAssignment ca = ClusterAssignment::from_labels({1, 1});
    DiameterTracker bounce(ca, {0.1});
    const double seq[4] = {1.0, 0.05, 0.2, 0.05};
    for (int t = 0; t < 4; ++t) bounce.push_row(10 * t, {seq[t]});
    const DiameterSeries sb = bounce.series(10.0);
    CHECK(sb.first_below[0] == 10);  // step label, not capture index
    CHECK(sb.stays_below[0] == 0);
    CHECK(testutil::close(sb.peak_after_arrival[0], 0.2, 1e-15));

    DiameterTracker never(ca, {0.001});
    for (int t = 0; t < 4; ++t) never.push_row(t, {seq[t]});
    const DiameterSeries sn = never.series(10.0);
    CHECK(sn.first_below[0] == -1);
    CHECK(sn.stays_below[0] == 0);
    CHECK(std::isnan(sn.peak_after_arrival[0]));
    CHECK(std::isnan(sn.sufficient_c[0]));

    DiameterTracker flat(ca, {1.0});  // everything below 1.5x bound: no fit
    flat.push_row(0, {0.5});
    flat.push_row(1, {0.4});
    CHECK(std::isnan(flat.series().rate.empty() ? 0.0 : flat.series(1.0).rate[0]));

    CHECK_THROWS_AS(DiameterTracker(ca, {0.1, 0.2}), InvalidSpec);
    DiameterTracker t2(ca, {0.1});
    CHECK_THROWS_AS(t2.push_row(0, {1.0, 2.0}), InvalidSpec);
}

TEST_CASE("the tracker sink captures exactly what the snapshot list would") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::GaussianMixture;
    spec.n = 40;
    spec.k = 2;
    spec.d = 5;
    spec.separation = 15.0;
    spec.seed = 3;
    const GeneratedData data = generate(spec);
    const ClusterAssignment ca = ClusterAssignment::from_labels(data.labels);
    const AffinityMatrix p = symmetrize(conditional_affinities(data.data, 8.0));

    ExaggerationConfig cfg;
    cfg.alpha = 20.0;
    cfg.h = 1.0;
    cfg.iterations = 30;
    cfg.capture_every = 5;
    DiameterTracker tracker(ca);
    const RunResult run =
        run_early_exaggeration(random_embedding(40, 2, 1), p, cfg, tracker.sink());

    const DiameterSeries from_sink = tracker.series();
    const DiameterSeries from_list = track_diameters(run.snapshots, ca);
    REQUIRE(from_sink.steps == from_list.steps);
    for (std::size_t r = 0; r < from_sink.steps.size(); ++r) {
        for (int c = 0; c < 2; ++c) {
            CHECK(from_sink.by_cluster(static_cast<int>(r), c) ==
                  from_list.by_cluster(static_cast<int>(r), c));
        }
    }
}

TEST_CASE("the combined report agrees with the individual diagnostics") {
    const AffinityMatrix p = hand_p4();
    const DiagnosticsReport rep = diagnostics_report(p, kTwoPairs, 10.0, 0.9, 10.0);
    CHECK(rep.n == 4);
    CHECK(rep.k == 2);
    CHECK(testutil::close(rep.kappa, 1.0 - 10.0 * 0.9 / 4.0, 1e-15));

    const Assumption2Result a2 = check_assumption2(p, kTwoPairs, 10.0, 0.9);
    CHECK(rep.a2.max_mass == a2.max_mass);
    CHECK(rep.guideline.alpha_h == guideline_alpha_h(p, kTwoPairs).alpha_h);
    CHECK(rep.bounds == theorem_bound(p, kTwoPairs, 10.0, 0.9, 10.0));

    // delta_c = (9/100)(alpha h / n)/|c| and factor 1 - |c| delta_c / 20.
    const double ah_over_n = 10.0 * 0.9 / 4.0;
    for (int c = 0; c < 2; ++c) {
        const double delta = 0.09 * ah_over_n / 2.0;
        CHECK(testutil::close(rep.lemma_delta[c], delta, 1e-15));
        CHECK(testutil::close(rep.lemma_factor[c], 1.0 - 2.0 * delta / 20.0, 1e-15));
    }
}

TEST_CASE("a calibrated wide-bandwidth mixture satisfies the separation floor") {
    // Four well-separated 25-d Gaussians; generous perplexity spreads each
    // conditional across its whole cluster, lifting every within-cluster
    // affinity above the 1/(10 n |cluster|) floor.
    GeneratorSpec spec;
    spec.kind = GeneratorKind::GaussianMixture;
    spec.n = 400;
    spec.k = 4;
    spec.d = 25;
    spec.cluster_std = 1.0;
    spec.separation = 20.0;
    spec.seed = 7;
    const GeneratedData data = generate(spec);
    const ClusterAssignment ca = ClusterAssignment::from_labels(data.labels);
    const AffinityMatrix p = symmetrize(conditional_affinities(data.data, 90.0));

    const Assumption1Result a1 = check_assumption1(p, ca);
    CHECK(a1.pass);
    for (int c = 0; c < 4; ++c) {
        CAPTURE(c);
        CHECK(a1.min_margin[c] >= 1.0);
    }

    // The guideline then lands assumption 2 inside its window.
    const GuidelineResult g = guideline_alpha_h(p, ca);
    const Assumption2Result a2 = check_assumption2(p, ca, g.alpha_h, 1.0);
    CHECK(a2.pass);
}
