#pragma once

#include <stdexcept>
#include <string>

namespace remest {

/// Conditional moments were requested on an interval carrying (numerically)
/// no probability mass. Callers that can treat the region as empty should
/// use the try_* variants instead of catching this.
class ZeroMassInterval : public std::runtime_error {
public:
    ZeroMassInterval(double lower, double upper)
        : std::runtime_error("interval (" + std::to_string(lower) + ", " +
                             std::to_string(upper) + "] carries no probability mass"),
          lower(lower),
          upper(upper) {}
    double lower;
    double upper;
};

/// A policy evaluation required a symmetry the supplied regions do not have.
class AsymmetricPolicy : public std::runtime_error {
public:
    explicit AsymmetricPolicy(const std::string& what) : std::runtime_error(what) {}
};

/// Root bracketing failed to enclose a sign change.
class NoBracket : public std::runtime_error {
public:
    explicit NoBracket(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solve exhausted its iteration budget.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, double residual1, double residual2)
        : std::runtime_error(what), residual1(residual1), residual2(residual2) {}
    double residual1;
    double residual2;
};

/// A simulation was started against a table solved for different parameters.
class ConfigMismatch : public std::runtime_error {
public:
    explicit ConfigMismatch(const std::string& what) : std::runtime_error(what) {}
};

/// Region geometry violates a construction precondition.
class GeometryViolation : public std::runtime_error {
public:
    explicit GeometryViolation(const std::string& what) : std::runtime_error(what) {}
};

} // namespace remest
