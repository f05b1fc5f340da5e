#pragma once

#include <cstddef>
#include <vector>

#include "eetsne/errors.hpp"

namespace eetsne {

// Dense row-major matrix of doubles.  Everything in this project is small
// enough (n up to a few thousand) that dense storage is the right trade.
class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

    double* row(int i) { return data_.data() + static_cast<std::size_t>(i) * cols_; }
    const double* row(int i) const { return data_.data() + static_cast<std::size_t>(i) * cols_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool operator==(const Matrix&) const = default;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

// n points in R^dim, row-major.  Doubles as a dataset (dim = ambient d),
// an embedding (dim = s), and a dynamical-system state vector.
struct Points {
    int n = 0;
    int dim = 0;
    std::vector<double> xs;  // n*dim values

    Points() = default;
    Points(int n_, int dim_) : n(n_), dim(dim_), xs(static_cast<std::size_t>(n_) * dim_, 0.0) {}

    double* operator[](int i) { return xs.data() + static_cast<std::size_t>(i) * dim; }
    const double* operator[](int i) const { return xs.data() + static_cast<std::size_t>(i) * dim; }

    bool operator==(const Points&) const = default;
};

// Throws InvalidDataset unless pts holds at least `min_n` points of
// dimension >= 1 with every coordinate finite.
void validate_points(const Points& pts, int min_n = 2);

// Squared Euclidean distance between rows i and j.
double squared_distance(const Points& pts, int i, int j);

// Max pairwise Euclidean distance (0 for n < 2).
double diameter(const Points& pts);

// Tags how an affinity matrix is normalized.  Gradient/KL code requires
// TsneSumOne (entries sum to 1 over ordered pairs); the spectral-limit code
// accepts either but its preconditions are stated on row sums.
enum class Normalization {
    TsneSumOne,
    SpectralRowBounded,
};

// Symmetric nonnegative affinities with zero diagonal.
struct AffinityMatrix {
    Matrix p;
    Normalization norm = Normalization::TsneSumOne;

    int n() const { return p.rows(); }
};

// Per-row conditional affinities p_{j|i} together with the calibrated
// bandwidths.  rows(i,i) == 0 and every row sums to 1.
struct ConditionalAffinities {
    Matrix rows;
    std::vector<double> sigmas;
    double perplexity = 0.0;

    int n() const { return rows.rows(); }
};

}  // namespace eetsne
