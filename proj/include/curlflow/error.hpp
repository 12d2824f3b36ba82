#pragma once

#include <stdexcept>
#include <string>

namespace curlflow {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Field extents that disagree with their grid, or with each other.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Index or query position outside the supported range.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Velocity data that is not discretely divergence-free enough to integrate
/// a potential from, or a traversal that fails to close.
class IntegrabilityError : public Error {
public:
    IntegrabilityError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual, int iterations)
        : Error(what), residual_(residual), iterations_(iterations) {}
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace curlflow
