#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eetsne/types.hpp"

namespace eetsne {

enum class GeneratorKind { Line3d, SwissRoll, GaussianMixture, Circle };

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::GaussianMixture;
    int n = 0;
    std::uint64_t seed = 0;

    // gaussian_mixture: k isotropic Gaussians in R^d, centers on scaled axis
    // directions with pairwise center distance `separation`.
    int k = 4;
    int d = 25;
    double cluster_std = 1.0;
    double separation = 20.0;

    // swiss_roll: (u cos u, v, u sin u) with u on a grid over
    // [1.5 pi, 1.5 pi + 2 pi turns], v uniform in [0, 10], plus isotropic
    // gaussian noise of the given standard deviation.
    double turns = 1.5;
    double noise = 0.0;
};

struct GeneratedData {
    Points data;
    // gaussian_mixture: cluster label 1..k per point.  line3d / swiss_roll:
    // the point index, standing in for the (strictly increasing) manifold
    // parameter so ordering survives the CSV integer-label convention.
    // circle: empty.
    std::vector<int> labels;
};

GeneratedData generate(const GeneratorSpec& spec);

GeneratorKind parse_generator_kind(const std::string& name);
std::string generator_kind_name(GeneratorKind kind);

}  // namespace eetsne
