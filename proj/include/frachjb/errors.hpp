#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace frachjb {

/// Argument outside the mathematical domain of an operator (order ranges, poles).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Evaluation requested at a point where the quantity is genuinely unbounded,
/// e.g. a (t - t0)^(-q) term at t = t0.
class SingularPoint : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Array lengths or dimensions that do not agree with the grid or the plant.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite values produced during a sweep. Carries the offending node.
class SolverAbort : public std::runtime_error {
public:
    SolverAbort(const std::string& what, std::size_t node)
        : std::runtime_error(what + " (node " + std::to_string(node) + ")"), node_(node) {}

    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

}  // namespace frachjb
