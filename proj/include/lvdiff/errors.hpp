#pragma once

#include <stdexcept>
#include <string>

namespace lvdiff {

/// Input violates an operation's precondition (grid mismatch, wrong sign class, ...).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative solver failed to meet its tolerance, or a state check tripped.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what, double residual = 0.0)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Bad user configuration: unreadable file, failed growth-rate hypothesis, ...
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lvdiff
