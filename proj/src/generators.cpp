#include "eetsne/generators.hpp"

#include <cmath>
#include <string>

#include "eetsne/rng.hpp"

namespace eetsne {

namespace {

constexpr double kPi = 3.14159265358979323846;

GeneratedData gen_line3d(const GeneratorSpec& spec) {
    GeneratedData out;
    out.data = Points(spec.n, 3);
    out.labels.resize(spec.n);
    const double dir[3] = {2.0, 1.0, 0.5};
    for (int i = 0; i < spec.n; ++i) {
        const double t = static_cast<double>(i) / (spec.n - 1);
        double* row = out.data[i];
        for (int kdim = 0; kdim < 3; ++kdim) row[kdim] = t * dir[kdim];
        out.labels[i] = i;
    }
    return out;
}

GeneratedData gen_swiss_roll(const GeneratorSpec& spec) {
    GeneratedData out;
    out.data = Points(spec.n, 3);
    out.labels.resize(spec.n);
    Rng rng(spec.seed);
    const double u_lo = 1.5 * kPi;
    const double u_hi = u_lo + 2.0 * kPi * spec.turns;
    for (int i = 0; i < spec.n; ++i) {
        const double u = u_lo + (u_hi - u_lo) * static_cast<double>(i) / (spec.n - 1);
        const double v = rng.uniform(0.0, 10.0);
        double* row = out.data[i];
        row[0] = u * std::cos(u);
        row[1] = v;
        row[2] = u * std::sin(u);
        if (spec.noise > 0.0) {
            for (int kdim = 0; kdim < 3; ++kdim) row[kdim] += spec.noise * rng.gaussian();
        }
        out.labels[i] = i;
    }
    return out;
}

GeneratedData gen_gaussian_mixture(const GeneratorSpec& spec) {
    if (spec.k < 1) {
        throw InvalidSpec("gaussian_mixture needs k >= 1");
    }
    if (spec.n < spec.k) {
        throw InvalidSpec("gaussian_mixture needs n >= k so every cluster is nonempty");
    }
    if (spec.d < spec.k) {
        throw InvalidSpec("gaussian_mixture places centers on axis directions and needs d >= k");
    }
    if (!(spec.cluster_std > 0.0)) {
        throw InvalidSpec("gaussian_mixture needs cluster_std > 0");
    }
    if (spec.separation < 0.0) {
        throw InvalidSpec("gaussian_mixture needs separation >= 0");
    }
    GeneratedData out;
    out.data = Points(spec.n, spec.d);
    out.labels.resize(spec.n);
    Rng rng(spec.seed);
    // Centers (separation / sqrt 2) e_c are pairwise exactly `separation`
    // apart.
    const double center_coord = spec.separation / std::sqrt(2.0);
    const int base = spec.n / spec.k;
    const int extra = spec.n % spec.k;
    int i = 0;
    for (int cluster = 0; cluster < spec.k; ++cluster) {
        const int size = base + (cluster < extra ? 1 : 0);
        for (int m = 0; m < size; ++m, ++i) {
            double* row = out.data[i];
            for (int kdim = 0; kdim < spec.d; ++kdim) {
                row[kdim] = spec.cluster_std * rng.gaussian();
            }
            row[cluster] += center_coord;
            out.labels[i] = cluster + 1;
        }
    }
    return out;
}

GeneratedData gen_circle(const GeneratorSpec& spec) {
    GeneratedData out;
    out.data = Points(spec.n, 2);
    for (int i = 0; i < spec.n; ++i) {
        const double theta = 2.0 * kPi * i / spec.n;
        out.data[i][0] = std::cos(theta);
        out.data[i][1] = std::sin(theta);
    }
    return out;
}

}  // namespace

GeneratedData generate(const GeneratorSpec& spec) {
    if (spec.n < 2) {
        throw InvalidSpec("generator needs n >= 2");
    }
    switch (spec.kind) {
        case GeneratorKind::Line3d:
            return gen_line3d(spec);
        case GeneratorKind::SwissRoll:
            if (!(spec.turns > 0.0)) throw InvalidSpec("swiss_roll needs turns > 0");
            if (spec.noise < 0.0) throw InvalidSpec("swiss_roll needs noise >= 0");
            return gen_swiss_roll(spec);
        case GeneratorKind::GaussianMixture:
            return gen_gaussian_mixture(spec);
        case GeneratorKind::Circle:
            return gen_circle(spec);
    }
    throw InvalidSpec("unknown generator kind");
}

GeneratorKind parse_generator_kind(const std::string& name) {
    if (name == "line3d") return GeneratorKind::Line3d;
    if (name == "swiss_roll") return GeneratorKind::SwissRoll;
    if (name == "gaussian_mixture") return GeneratorKind::GaussianMixture;
    if (name == "circle") return GeneratorKind::Circle;
    throw ParseError("unknown generator kind '" + name +
                     "' (expected line3d, swiss_roll, gaussian_mixture, or circle)");
}

std::string generator_kind_name(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::Line3d:
            return "line3d";
        case GeneratorKind::SwissRoll:
            return "swiss_roll";
        case GeneratorKind::GaussianMixture:
            return "gaussian_mixture";
        case GeneratorKind::Circle:
            return "circle";
    }
    return "unknown";
}

}  // namespace eetsne
