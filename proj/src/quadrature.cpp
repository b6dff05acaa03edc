#include "vgtree/quadrature.hpp"

#include "vgtree/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace vgtree {
namespace {

constexpr double kRelativeTarget = 1e-12;

void check(const QuadratureResult& r, double abs_tolerance, const char* where) {
    if (!std::isfinite(r.value) || r.error > abs_tolerance) {
        std::ostringstream msg;
        msg << where << ": quadrature did not reach tolerance " << abs_tolerance << " (estimate " << r.error << ")";
        throw NumericalError(msg.str());
    }
}

} // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tolerance) {
    QuadratureResult r;
    if (a == b) return r;
    // thread_local: the integrator caches abscissae and is not thread-safe to share.
    thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
    try {
        r.value = integrator.integrate(f, a, b, kRelativeTarget, &r.error, &r.l1);
    } catch (const std::exception& e) {
        throw NumericalError(std::string("integrate: ") + e.what());
    }
    check(r, abs_tolerance, "integrate");
    return r;
}

QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a, double abs_tolerance) {
    QuadratureResult r;
    thread_local boost::math::quadrature::exp_sinh<double> integrator(15);
    try {
        r.value = integrator.integrate([&](double x) { return f(a + x); }, 0.0,
                                       std::numeric_limits<double>::infinity(), kRelativeTarget, &r.error, &r.l1);
    } catch (const std::exception& e) {
        throw NumericalError(std::string("integrate_to_infinity: ") + e.what());
    }
    check(r, abs_tolerance, "integrate_to_infinity");
    return r;
}

} // namespace vgtree
