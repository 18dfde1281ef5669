// error.hpp - exception hierarchy shared by all dlyap modules.
#pragma once

#include <stdexcept>
#include <string>

namespace dlyap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed arguments or input documents.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A directed cycle of length at least two was found where a DAG is required.
class CyclicGraph : public Error {
public:
    using Error::Error;
};

/// The undirected skeleton is not connected.
class DisconnectedGraph : public Error {
public:
    using Error::Error;
};

/// Operand shapes do not agree.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// The parameter matrix is not Schur stable.
class Unstable : public Error {
public:
    using Error::Error;
};

/// The vectorized Lyapunov system is numerically singular.
class SingularSystem : public Error {
public:
    using Error::Error;
};

/// A restricted trek coefficient was requested at |t| >= 1.
class PoleAtUnit : public Error {
public:
    using Error::Error;
};

/// The matrix assembled from a constant self-loop and edge weights is unstable.
class UnstableEffective : public Error {
public:
    using Error::Error;
};

/// A closed-form denominator vanished (non-generic input).
class DegenerateDenominator : public Error {
public:
    using Error::Error;
};

/// Structural preconditions of an identification algorithm do not hold.
class HypothesisViolated : public Error {
public:
    using Error::Error;
};

/// A per-vertex linear block of an identification algorithm is singular.
class SingularBlock : public Error {
public:
    SingularBlock(int vertex, double condition_number, int rank, int size);
    int vertex() const noexcept { return vertex_; }
    double condition_number() const noexcept { return condition_number_; }
    int rank() const noexcept { return rank_; }
    int size() const noexcept { return size_; }

private:
    int vertex_;
    double condition_number_;
    int rank_;
    int size_;
};

/// A numeric rank exceeded a bound that holds on every model point.
class ModelInconsistency : public Error {
public:
    using Error::Error;
};

} // namespace dlyap
