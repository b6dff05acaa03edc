#pragma once

#include <functional>

namespace vgtree {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0; ///< estimated absolute error
    double l1 = 0.0;    ///< integral of |f|
};

/// Double-exponential (tanh-sinh) quadrature on a finite [a, b].
/// Integrable endpoint singularities are fine; interior kinks must be split
/// out by the caller. Throws NumericalError when the estimate misses
/// abs_tolerance.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tolerance);

/// Same on [a, +inf) via the exp-sinh rule.
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a, double abs_tolerance);

} // namespace vgtree
