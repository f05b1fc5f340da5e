#pragma once

#include <utility>
#include <vector>

#include "eetsne/tsne.hpp"
#include "eetsne/types.hpp"

namespace eetsne {

// Partition of the n points into k nonempty clusters, labels in 1..k.
struct ClusterAssignment {
    std::vector<int> labels;
    int k = 0;
    std::vector<int> sizes;

    // Remaps arbitrary integer labels to 1..k (ascending label order).
    static ClusterAssignment from_labels(const std::vector<int>& raw);
};

// Throws InvalidClusterAssignment unless `ca` is a consistent partition of
// n points.
void validate_assignment(const ClusterAssignment& ca, int n);

// Well-separation margins: for every within-cluster pair,
// p_ij * 10 n |cluster| must be >= 1.  min_margin is the per-cluster
// minimum of that product; worst_pair the pair attaining it.
struct Assumption1Result {
    std::vector<double> min_margin;               // per cluster; +inf for singletons
    std::vector<std::pair<int, int>> worst_pair;  // (-1,-1) for singletons
    bool pass = false;
};

Assumption1Result check_assumption1(const AffinityMatrix& p, const ClusterAssignment& ca);

enum class Assumption2Verdict { BelowRange, InRange, AboveRange };

// Exaggerated within-cluster mass per point:
// v_i = alpha h sum_{j in cluster(i), j != i} p_ij, required in [1/100, 9/10].
struct Assumption2Result {
    std::vector<double> mass;  // v_i per point
    std::vector<Assumption2Verdict> verdict;
    double min_mass = 0.0;
    double max_mass = 0.0;
    bool pass = false;
};

Assumption2Result check_assumption2(const AffinityMatrix& p, const ClusterAssignment& ca,
                                    double alpha, double h);

// Step-size guideline alpha h = (9/10) * (max_i sum_{j ~ i} p_ij)^{-1}:
// the largest exaggeration that keeps every v_i at or below 9/10.
struct GuidelineResult {
    double alpha_h = 0.0;
    std::vector<double> row_mass;  // within-cluster mass per point
    int argmax = -1;               // point attaining the max
};

GuidelineResult guideline_alpha_h(const AffinityMatrix& p, const ClusterAssignment& ca);

// Per-cluster post-contraction diameter bound
//   c h (alpha max_{i in cluster} sum_{j in other clusters} p_ij + 1/n).
std::vector<double> theorem_bound(const AffinityMatrix& p, const ClusterAssignment& ca,
                                  double alpha, double h, double c = 10.0);

// Per-cluster diameters of a snapshotted trajectory plus the derived
// contraction statistics.
struct DiameterSeries {
    std::vector<int> steps;
    Matrix by_cluster;  // rows = captures, cols = k

    // Populated only when bounds were supplied (one per cluster):
    std::vector<double> bound;
    std::vector<int> first_below;    // first captured step index with diam <= bound; -1 if never
    std::vector<char> stays_below;   // 1 if no later capture exceeds the bound
    std::vector<double> rate;        // LS slope of log diam over captures with diam > 1.5*bound;
                                     // NaN when fewer than two such captures
    std::vector<double> peak_after_arrival;  // sup diam from first_below onward; NaN if never
    std::vector<double> sufficient_c;        // smallest c covering those diameters
                                             // (= c_used * peak / bound); NaN if never below
};

// Streaming collector: feed it captures (e.g. as a SnapshotSink), then call
// series().
class DiameterTracker {
  public:
    DiameterTracker(ClusterAssignment ca, std::vector<double> bounds = {});

    void capture(int step, const Points& y);
    SnapshotSink sink();  // binds capture() for run_* calls

    // For callers that already computed the per-cluster diameters.
    void push_row(int step, std::vector<double> diams);

    // c_used is the constant the bounds were built with; it only feeds the
    // sufficient_c readout.
    DiameterSeries series(double c_used = 0.0) const;

  private:
    ClusterAssignment ca_;
    std::vector<double> bounds_;
    std::vector<int> steps_;
    std::vector<std::vector<double>> rows_;
};

DiameterSeries track_diameters(const std::vector<Snapshot>& snapshots,
                               const ClusterAssignment& ca,
                               const std::vector<double>& bounds = {}, double c_used = 0.0);

// Per-cluster diameter of one embedding.
std::vector<double> cluster_diameters(const Points& y, const ClusterAssignment& ca);

// Everything the report writer needs in one place.
struct DiagnosticsReport {
    int n = 0;
    int k = 0;
    double alpha = 0.0;
    double h = 0.0;
    double c = 0.0;
    Assumption1Result a1;
    Assumption2Result a2;
    GuidelineResult guideline;
    std::vector<double> bounds;
    double kappa = 0.0;                // single-cluster contraction rate 1 - alpha h / n
    std::vector<double> lemma_delta;   // (9/100)(alpha h / n) / |cluster|
    std::vector<double> lemma_factor;  // 1 - |cluster| delta_c / 20
};

DiagnosticsReport diagnostics_report(const AffinityMatrix& p, const ClusterAssignment& ca,
                                     double alpha, double h, double c = 10.0);

}  // namespace eetsne
