/**
 * @file errors.hpp
 * @brief Exception types raised by the simulator and the verification lab.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace muskat {

struct OverflowRisk : std::runtime_error {
    double lambda;
    int cutoff;
    OverflowRisk(double l, int n)
        : std::runtime_error("weight overflow: lambda*N = " + std::to_string(l * n) + " exceeds 700"),
          lambda(l), cutoff(n) {}
};

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    double value;
    DomainError(const std::string& what, double v) : std::runtime_error(what), value(v) {}
};

struct SolverError : std::runtime_error {
    double factor;
    SolverError(const std::string& what, double f = 0.0) : std::runtime_error(what), factor(f) {}
};

struct PinchOffError : std::runtime_error {
    double margin;
    PinchOffError(const std::string& what, double m) : std::runtime_error(what), margin(m) {}
};

struct BlowupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InequalityViolation : std::runtime_error {
    std::string bundle_path;
    InequalityViolation(const std::string& what, std::string path)
        : std::runtime_error(what), bundle_path(std::move(path)) {}
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace muskat
