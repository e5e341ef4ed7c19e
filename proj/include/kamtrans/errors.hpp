#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kamtrans {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid argument or out-of-domain input (non-finite values, bad ranges).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// A map required to be strictly increasing is not; carries the first
/// offending node index (the node i where value[i+1] - value[i] <= 0).
class InvertibilityError : public Error {
public:
    InvertibilityError(const std::string& msg, std::size_t node)
        : Error(msg + " (first offending node " + std::to_string(node) + ")"),
          node_(node) {}
    std::size_t node() const { return node_; }

private:
    std::size_t node_;
};

/// Log-density is -inf (density vanishes) at an interior node.
class SingularDensityError : public Error {
public:
    explicit SingularDensityError(const std::string& msg) : Error(msg) {}
};

/// Map Jacobian below tolerance at some evaluation point.
class DegenerateJacobianError : public Error {
public:
    explicit DegenerateJacobianError(const std::string& msg) : Error(msg) {}
};

/// Elliptic operator assembly failed (singular coefficient values).
class AssemblyError : public Error {
public:
    explicit AssemblyError(const std::string& msg) : Error(msg) {}
};

/// Both the tridiagonal and the dense fallback solves failed; carries an
/// estimated condition indicator (max/min pivot magnitude of the LU).
class SingularOperatorError : public Error {
public:
    SingularOperatorError(const std::string& msg, double cond_indicator)
        : Error(msg + " (condition indicator " + std::to_string(cond_indicator) + ")"),
          cond_(cond_indicator) {}
    double condition_indicator() const { return cond_; }

private:
    double cond_;
};

/// KAM step could not produce an increasing map even after damping.
class StepFailureError : public Error {
public:
    explicit StepFailureError(const std::string& msg) : Error(msg) {}
};

/// Flattening a transport map produced a non-increasing composite.
class FlattenError : public Error {
public:
    explicit FlattenError(const std::string& msg) : Error(msg) {}
};

/// Experiment configuration is invalid or unresolvable.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// A method precondition (e.g. monotone target score for the fixed-point
/// iteration) is violated.
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

}  // namespace kamtrans
