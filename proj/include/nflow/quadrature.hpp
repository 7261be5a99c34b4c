#pragma once

#include <functional>
#include <vector>

namespace nflow::quad {

using Fn = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (7/15) integral of a function smooth on [a, b].
double integrate(const Fn& f, double a, double b, double rel_tol = 1e-13);

/// Integral over [a, b] of a function smooth between the given breakpoints.
/// Breakpoints outside (a, b) are ignored; order does not matter.
double integrate_piecewise(const Fn& f, double a, double b, std::vector<double> breakpoints,
                           double rel_tol = 1e-13);

/// Integral of |f| over [a, b], for f smooth between breakpoints.
///
/// Sign changes of f inside each smooth piece are located on a uniform scan of
/// `scan` cells and refined by bisection, so each integrated sub-piece is
/// smooth and of one sign.
double integrate_abs(const Fn& f, double a, double b, std::vector<double> breakpoints,
                     int scan = 256, double rel_tol = 1e-13);

/// Sorted, de-duplicated breakpoints strictly inside (a, b), framed by a and b.
std::vector<double> partition(double a, double b, std::vector<double> breakpoints);

} // namespace nflow::quad
