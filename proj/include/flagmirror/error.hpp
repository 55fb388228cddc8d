#pragma once

#include <stdexcept>
#include <string>

namespace flagmirror {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: unsupported type, node out of range, malformed word.
class DomainError : public Error {
public:
    using Error::Error;
};

// A point fell off the big cell U-B+ (or off a chart) during a decomposition.
class OffChartError : public Error {
public:
    OffChartError(const std::string& what, int node, double magnitude)
        : Error(what), node_(node), magnitude_(magnitude) {}
    int node() const noexcept { return node_; }
    double magnitude() const noexcept { return magnitude_; }

private:
    int node_;
    double magnitude_;
};

// Iterative solver gave up. Carries the last residual it saw.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace flagmirror
