#pragma once

#include <stdexcept>
#include <string>

namespace nflow {

/// Invalid argument to a library call: bad step index, dimension mismatch,
/// non-positive prox index, time outside the horizon.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Cauchy data (x0, v0) that does not lie on the graph of the subdifferential.
class InadmissibleDataError : public ArgumentError {
public:
    InadmissibleDataError(const std::string& what, double residual)
        : ArgumentError(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A certificate constant could not be formed, e.g. (phi+psi)(x0) lies below
/// the supplied lower bound on inf(phi+psi).
class InconsistentBoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nflow
