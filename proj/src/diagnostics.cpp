#include "eetsne/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace eetsne {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_partition_of(const AffinityMatrix& p, const ClusterAssignment& ca) {
    validate_assignment(ca, p.n());
}

}  // namespace

ClusterAssignment ClusterAssignment::from_labels(const std::vector<int>& raw) {
    if (raw.empty()) {
        throw InvalidClusterAssignment("label vector is empty");
    }
    std::map<int, int> remap;  // original label -> 1..k, ascending
    for (int v : raw) remap[v] = 0;
    int next = 1;
    for (auto& [orig, idx] : remap) idx = next++;

    ClusterAssignment ca;
    ca.k = static_cast<int>(remap.size());
    ca.labels.reserve(raw.size());
    ca.sizes.assign(ca.k, 0);
    for (int v : raw) {
        const int label = remap[v];
        ca.labels.push_back(label);
        ++ca.sizes[label - 1];
    }
    return ca;
}

void validate_assignment(const ClusterAssignment& ca, int n) {
    if (ca.labels.size() != static_cast<std::size_t>(n)) {
        throw InvalidClusterAssignment("assignment covers " + std::to_string(ca.labels.size()) +
                                       " points, expected " + std::to_string(n));
    }
    if (ca.k < 1 || ca.sizes.size() != static_cast<std::size_t>(ca.k)) {
        throw InvalidClusterAssignment("assignment has inconsistent cluster count");
    }
    std::vector<int> counts(ca.k, 0);
    for (int label : ca.labels) {
        if (label < 1 || label > ca.k) {
            throw InvalidClusterAssignment("label " + std::to_string(label) +
                                           " outside 1.." + std::to_string(ca.k));
        }
        ++counts[label - 1];
    }
    for (int cidx = 0; cidx < ca.k; ++cidx) {
        if (counts[cidx] == 0) {
            throw InvalidClusterAssignment("cluster " + std::to_string(cidx + 1) + " is empty");
        }
        if (counts[cidx] != ca.sizes[cidx]) {
            throw InvalidClusterAssignment("recorded size of cluster " + std::to_string(cidx + 1) +
                                           " does not match labels");
        }
    }
}

Assumption1Result check_assumption1(const AffinityMatrix& p, const ClusterAssignment& ca) {
    require_partition_of(p, ca);
    const int n = p.n();
    Assumption1Result r;
    r.min_margin.assign(ca.k, kInf);
    r.worst_pair.assign(ca.k, {-1, -1});
    for (int i = 0; i < n; ++i) {
        const int cidx = ca.labels[i] - 1;
        // Margin is p_ij scaled by its required floor 1/(10 n |cluster|).
        const double scale = 10.0 * n * ca.sizes[cidx];
        for (int j = i + 1; j < n; ++j) {
            if (ca.labels[j] != ca.labels[i]) continue;
            const double margin = p.p(i, j) * scale;
            if (margin < r.min_margin[cidx]) {
                r.min_margin[cidx] = margin;
                r.worst_pair[cidx] = {i, j};
            }
        }
    }
    r.pass = true;
    for (double m : r.min_margin) {
        if (!(m >= 1.0)) r.pass = false;
    }
    return r;
}

Assumption2Result check_assumption2(const AffinityMatrix& p, const ClusterAssignment& ca,
                                    double alpha, double h) {
    require_partition_of(p, ca);
    if (!(alpha > 0.0) || !(h > 0.0)) {
        throw InvalidSpec("assumption 2 needs alpha > 0 and h > 0");
    }
    const int n = p.n();
    Assumption2Result r;
    r.mass.assign(n, 0.0);
    r.verdict.assign(n, Assumption2Verdict::InRange);
    r.min_mass = kInf;
    r.max_mass = -kInf;
    r.pass = true;
    for (int i = 0; i < n; ++i) {
        double within = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j != i && ca.labels[j] == ca.labels[i]) within += p.p(i, j);
        }
        const double v = alpha * h * within;
        r.mass[i] = v;
        if (v < 0.01) {
            r.verdict[i] = Assumption2Verdict::BelowRange;
            r.pass = false;
        } else if (v > 0.9) {
            r.verdict[i] = Assumption2Verdict::AboveRange;
            r.pass = false;
        }
        r.min_mass = std::min(r.min_mass, v);
        r.max_mass = std::max(r.max_mass, v);
    }
    return r;
}

GuidelineResult guideline_alpha_h(const AffinityMatrix& p, const ClusterAssignment& ca) {
    require_partition_of(p, ca);
    const int n = p.n();
    GuidelineResult r;
    r.row_mass.assign(n, 0.0);
    double worst = -kInf;
    for (int i = 0; i < n; ++i) {
        double within = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j != i && ca.labels[j] == ca.labels[i]) within += p.p(i, j);
        }
        r.row_mass[i] = within;
        if (within > worst) {
            worst = within;
            r.argmax = i;
        }
    }
    if (!(worst > 0.0)) {
        throw InvalidAffinityMatrix(
            "guideline undefined: no point carries within-cluster affinity mass");
    }
    r.alpha_h = 0.9 / worst;
    return r;
}

std::vector<double> theorem_bound(const AffinityMatrix& p, const ClusterAssignment& ca,
                                  double alpha, double h, double c) {
    require_partition_of(p, ca);
    if (!(alpha > 0.0) || !(h > 0.0) || !(c > 0.0)) {
        throw InvalidSpec("theorem bound needs alpha, h, c > 0");
    }
    const int n = p.n();
    std::vector<double> worst_other(ca.k, 0.0);
    for (int i = 0; i < n; ++i) {
        double other = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j != i && ca.labels[j] != ca.labels[i]) other += p.p(i, j);
        }
        const int cidx = ca.labels[i] - 1;
        worst_other[cidx] = std::max(worst_other[cidx], other);
    }
    std::vector<double> bounds(ca.k, 0.0);
    for (int cidx = 0; cidx < ca.k; ++cidx) {
        bounds[cidx] = c * h * (alpha * worst_other[cidx] + 1.0 / n);
    }
    return bounds;
}

std::vector<double> cluster_diameters(const Points& y, const ClusterAssignment& ca) {
    validate_assignment(ca, y.n);
    std::vector<double> best2(ca.k, 0.0);
    for (int i = 0; i < y.n; ++i) {
        for (int j = i + 1; j < y.n; ++j) {
            if (ca.labels[j] != ca.labels[i]) continue;
            const double d2 = squared_distance(y, i, j);
            const int cidx = ca.labels[i] - 1;
            if (d2 > best2[cidx]) best2[cidx] = d2;
        }
    }
    std::vector<double> out(ca.k, 0.0);
    for (int cidx = 0; cidx < ca.k; ++cidx) out[cidx] = std::sqrt(best2[cidx]);
    return out;
}

DiameterTracker::DiameterTracker(ClusterAssignment ca, std::vector<double> bounds)
    : ca_(std::move(ca)), bounds_(std::move(bounds)) {
    if (!bounds_.empty() && bounds_.size() != static_cast<std::size_t>(ca_.k)) {
        throw InvalidSpec("need one diameter bound per cluster");
    }
}

void DiameterTracker::capture(int step, const Points& y) {
    steps_.push_back(step);
    rows_.push_back(cluster_diameters(y, ca_));
}

SnapshotSink DiameterTracker::sink() {
    return [this](int step, const Points& y) { capture(step, y); };
}

void DiameterTracker::push_row(int step, std::vector<double> diams) {
    if (diams.size() != static_cast<std::size_t>(ca_.k)) {
        throw InvalidSpec("diameter row has " + std::to_string(diams.size()) +
                          " entries, expected " + std::to_string(ca_.k));
    }
    steps_.push_back(step);
    rows_.push_back(std::move(diams));
}

DiameterSeries DiameterTracker::series(double c_used) const {
    DiameterSeries s;
    s.steps = steps_;
    const int captures = static_cast<int>(steps_.size());
    s.by_cluster = Matrix(captures, ca_.k);
    for (int r = 0; r < captures; ++r) {
        for (int cidx = 0; cidx < ca_.k; ++cidx) s.by_cluster(r, cidx) = rows_[r][cidx];
    }
    if (bounds_.empty()) return s;

    s.bound = bounds_;
    s.first_below.assign(ca_.k, -1);
    s.stays_below.assign(ca_.k, 0);
    s.rate.assign(ca_.k, kNan);
    s.peak_after_arrival.assign(ca_.k, kNan);
    s.sufficient_c.assign(ca_.k, kNan);
    for (int cidx = 0; cidx < ca_.k; ++cidx) {
        const double bound = bounds_[cidx];
        int arrival = -1;
        for (int r = 0; r < captures; ++r) {
            if (s.by_cluster(r, cidx) <= bound) {
                arrival = r;
                break;
            }
        }
        if (arrival >= 0) {
            s.first_below[cidx] = steps_[arrival];
            bool stays = true;
            double peak = 0.0;
            for (int r = arrival; r < captures; ++r) {
                const double d = s.by_cluster(r, cidx);
                peak = std::max(peak, d);
                if (d > bound) stays = false;
            }
            s.stays_below[cidx] = stays ? 1 : 0;
            s.peak_after_arrival[cidx] = peak;
            if (c_used > 0.0 && bound > 0.0) {
                s.sufficient_c[cidx] = c_used * peak / bound;
            }
        }

        // Contraction-rate fit on the leg strictly above 1.5x the bound.
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        int m = 0;
        for (int r = 0; r < captures; ++r) {
            const double d = s.by_cluster(r, cidx);
            if (d <= 1.5 * bound || d <= 0.0) continue;
            const double x = steps_[r];
            const double yv = std::log(d);
            sx += x;
            sy += yv;
            sxx += x * x;
            sxy += x * yv;
            ++m;
        }
        if (m >= 2) {
            const double denom = m * sxx - sx * sx;
            if (denom != 0.0) s.rate[cidx] = (m * sxy - sx * sy) / denom;
        }
    }
    return s;
}

DiameterSeries track_diameters(const std::vector<Snapshot>& snapshots, const ClusterAssignment& ca,
                               const std::vector<double>& bounds, double c_used) {
    DiameterTracker tracker(ca, bounds);
    for (const Snapshot& snap : snapshots) tracker.capture(snap.step, snap.y);
    return tracker.series(c_used);
}

DiagnosticsReport diagnostics_report(const AffinityMatrix& p, const ClusterAssignment& ca,
                                     double alpha, double h, double c) {
    DiagnosticsReport rep;
    rep.n = p.n();
    rep.k = ca.k;
    rep.alpha = alpha;
    rep.h = h;
    rep.c = c;
    rep.a1 = check_assumption1(p, ca);
    rep.a2 = check_assumption2(p, ca, alpha, h);
    rep.guideline = guideline_alpha_h(p, ca);
    rep.bounds = theorem_bound(p, ca, alpha, h, c);
    const double ah_over_n = alpha * h / rep.n;
    rep.kappa = 1.0 - ah_over_n;
    rep.lemma_delta.assign(ca.k, 0.0);
    rep.lemma_factor.assign(ca.k, 0.0);
    for (int cidx = 0; cidx < ca.k; ++cidx) {
        // delta for the size-|c| within-cluster subsystem; in the contraction
        // factor "n" is that subsystem's size.
        rep.lemma_delta[cidx] = 0.09 * ah_over_n / ca.sizes[cidx];
        rep.lemma_factor[cidx] = 1.0 - ca.sizes[cidx] * rep.lemma_delta[cidx] / 20.0;
    }
    return rep;
}

}  // namespace eetsne
