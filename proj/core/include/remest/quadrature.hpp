#pragma once

#include <functional>

namespace remest {

/// Recursive adaptive Simpson integration over the finite interval [a, b]
/// to the given absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol);

/// Integrates f over (a, b) where either endpoint may be infinite.
/// Semi-infinite ranges use the exponential substitution x = a - ln(1 - t),
/// which suits the exponentially decaying tails handled here.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol);

} // namespace remest
