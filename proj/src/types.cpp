#include "eetsne/types.hpp"

#include <cmath>
#include <string>

namespace eetsne {

void validate_points(const Points& pts, int min_n) {
    if (pts.n < min_n) {
        throw InvalidDataset("need at least " + std::to_string(min_n) + " points, got " +
                             std::to_string(pts.n));
    }
    if (pts.dim < 1) {
        throw InvalidDataset("point dimension must be >= 1, got " + std::to_string(pts.dim));
    }
    if (pts.xs.size() != static_cast<std::size_t>(pts.n) * pts.dim) {
        throw InvalidDataset("coordinate buffer size does not match n*dim");
    }
    for (std::size_t k = 0; k < pts.xs.size(); ++k) {
        if (!std::isfinite(pts.xs[k])) {
            throw InvalidDataset("non-finite coordinate at flat index " + std::to_string(k));
        }
    }
}

double squared_distance(const Points& pts, int i, int j) {
    const double* a = pts[i];
    const double* b = pts[j];
    double d2 = 0.0;
    for (int k = 0; k < pts.dim; ++k) {
        const double diff = a[k] - b[k];
        d2 += diff * diff;
    }
    return d2;
}

double diameter(const Points& pts) {
    double best = 0.0;
    for (int i = 0; i < pts.n; ++i) {
        for (int j = i + 1; j < pts.n; ++j) {
            const double d2 = squared_distance(pts, i, j);
            if (d2 > best) best = d2;
        }
    }
    return std::sqrt(best);
}

}  // namespace eetsne
