#pragma once

#include <stdexcept>
#include <string>

namespace eetsne {

// Base class for all named failure modes.  Callers that only care about
// "bad input vs. blown-up run" can catch the two subfamilies below.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Rejected before any computation: malformed or out-of-contract inputs.
struct ValidationError : Error {
    using Error::Error;
};

// Raised mid-computation: the run itself went wrong.
struct ComputeError : Error {
    using Error::Error;
};

struct InvalidDataset : ValidationError {
    using ValidationError::ValidationError;
};

struct PerplexityOutOfRange : ValidationError {
    using ValidationError::ValidationError;
};

struct InvalidAffinityMatrix : ValidationError {
    using ValidationError::ValidationError;
};

struct InvalidClusterAssignment : ValidationError {
    using ValidationError::ValidationError;
};

struct InvalidSpec : ValidationError {
    using ValidationError::ValidationError;
};

struct ParseError : ValidationError {
    using ValidationError::ValidationError;
};

struct UnsupportedDimension : ValidationError {
    using ValidationError::ValidationError;
};

// Bisection could not calibrate a row (duplicate points, degenerate spread).
struct DegenerateRow : ComputeError {
    int row;
    DegenerateRow(int row_, const std::string& msg) : ComputeError(msg), row(row_) {}
};

// The rescaled matrix would leave the row-stochastic regime.
struct ScaleError : ValidationError {
    using ValidationError::ValidationError;
};

// Coefficient oracle stepped outside its declared (delta, eps) envelope.
struct RegimeViolation : ComputeError {
    int i, j, t;
    RegimeViolation(int i_, int j_, int t_, const std::string& msg)
        : ComputeError(msg), i(i_), j(j_), t(t_) {}
};

// Divergence rail: non-finite coordinates or an exploded bounding box.
struct NonFiniteUpdate : ComputeError {
    int iteration;
    NonFiniteUpdate(int iteration_, const std::string& msg)
        : ComputeError(msg), iteration(iteration_) {}
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace eetsne
