#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace tullock {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Malformed or inconsistent problem data (bad dimensions, invalid parameters).
class SpecError : public std::runtime_error {
public:
    explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

/// Constraint set is empty, unbounded, or lacks a strictly feasible point.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative routine failed to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Input outside the mathematical domain of the routine.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace tullock
