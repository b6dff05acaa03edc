#include "vgtree/vg_model.hpp"

#include "vgtree/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace vgtree {
namespace {

void require_horizon(double t, const char* where) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw DomainError(std::string(where) + ": horizon t must be finite and > 0");
    }
}

// 1 - theta*kappa - sigma^2*kappa/2, as the argument of log1p.
double omega_log1p_arg(const VgParams& p) {
    return -p.theta * p.kappa - 0.5 * p.sigma * p.sigma * p.kappa;
}

} // namespace

void VgParams::validate() const {
    if (!std::isfinite(theta) || !std::isfinite(sigma) || !std::isfinite(kappa) || !std::isfinite(r)) {
        throw DomainError("VG parameters must be finite");
    }
    if (!(sigma > 0.0)) throw DomainError("VG parameter sigma must be > 0");
    if (!(kappa > 0.0)) throw DomainError("VG parameter kappa must be > 0");
    if (r < 0.0) throw DomainError("risk-free rate r must be >= 0");
    if (!(1.0 + omega_log1p_arg(*this) > 0.0)) {
        throw DomainError("martingale correction undefined: 1 - theta*kappa - sigma^2*kappa/2 <= 0");
    }
}

Cumulants cumulants(const VgParams& p, double t) {
    p.validate();
    require_horizon(t, "cumulants");
    const double th = p.theta;
    const double s2 = p.sigma * p.sigma;
    const double k = p.kappa;
    Cumulants c;
    c.t = t;
    c.c1 = t * th;
    c.c2 = t * (s2 + th * th * k);
    c.c3 = t * (2.0 * th * th * th * k * k + 3.0 * s2 * th * k);
    c.c4 = t * (3.0 * s2 * s2 * k + 12.0 * s2 * th * th * k * k + 6.0 * th * th * th * th * k * k * k);
    return c;
}

double martingale_correction(const VgParams& p) {
    if (!(p.kappa > 0.0) || !std::isfinite(p.kappa)) {
        throw DomainError("martingale correction: kappa must be > 0");
    }
    const double arg = omega_log1p_arg(p);
    if (!(1.0 + arg > 0.0)) {
        throw DomainError("martingale correction undefined: 1 - theta*kappa - sigma^2*kappa/2 <= 0");
    }
    // log1p keeps the kappa -> 0 limit (-theta - sigma^2/2) accurate.
    return std::log1p(arg) / p.kappa;
}

double levy_density(const VgParams& p, double x) {
    p.validate();
    if (x == 0.0 || !std::isfinite(x)) {
        throw DomainError("levy_density: the Levy measure is singular at x = 0");
    }
    const double s2 = p.sigma * p.sigma;
    const double ax = std::abs(x);
    const double rate = std::sqrt(2.0 / p.kappa + p.theta * p.theta / s2) / p.sigma;
    return std::exp(p.theta * x / s2 - rate * ax) / (p.kappa * ax);
}

std::complex<double> levy_symbol(const VgParams& p, std::complex<double> u) {
    p.validate();
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> base =
        1.0 - i * p.theta * p.kappa * u + 0.5 * p.sigma * p.sigma * p.kappa * u * u;
    if (base.imag() == 0.0 && base.real() <= 0.0) {
        throw NumericalError("levy_symbol: argument on the branch cut of log");
    }
    return -std::log(base) / p.kappa;
}

std::complex<double> characteristic_function(const VgParams& p, std::complex<double> u, double t) {
    p.validate();
    require_horizon(t, "characteristic_function");
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> base =
        1.0 - i * p.theta * p.kappa * u + 0.5 * p.sigma * p.sigma * p.kappa * u * u;
    if (base.imag() == 0.0 && base.real() <= 0.0) {
        throw NumericalError("characteristic_function: argument on the branch cut");
    }
    return std::exp(-(t / p.kappa) * std::log(base));
}

double pdf(const VgParams& p, double t, double x) {
    p.validate();
    require_horizon(t, "pdf");
    if (!std::isfinite(x)) return 0.0;

    const double s2 = p.sigma * p.sigma;
    const double shape = t / p.kappa;
    const double order = shape - 0.5;
    const double b2 = 2.0 * s2 / p.kappa + p.theta * p.theta;

    // log of 2 / (kappa^shape sqrt(2 pi) sigma Gamma(shape))
    const double log_norm = std::log(2.0) - shape * std::log(p.kappa) - 0.5 * std::log(2.0 * std::numbers::pi) -
                            std::log(p.sigma) - std::lgamma(shape);

    if (x == 0.0) {
        if (order <= 0.0) return std::numeric_limits<double>::infinity();
        // K_v(z) ~ Gamma(v)/2 (2/z)^v as z -> 0.
        const double log_f0 = log_norm + std::lgamma(order) - std::log(2.0) + order * std::log(2.0 * s2 / b2);
        return std::exp(log_f0);
    }

    const double z = std::abs(x) * std::sqrt(b2) / s2;
    const double log_f = log_norm + p.theta * x / s2 + (0.5 * shape - 0.25) * (2.0 * std::log(std::abs(x)) - std::log(b2)) +
                         log_bessel_k(order, z);
    return std::exp(log_f);
}

std::vector<DensityPoint> density_curve(const VgParams& params, double t, std::span<const double> xs) {
    std::vector<DensityPoint> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back({x, pdf(params, t, x)});
    return out;
}

CentralMoments central_moments_from_cumulants(const Cumulants& c) {
    // Recursion up to n = 4 with mu_0 = 1, mu_1 = 0.
    const double k[5] = {0.0, c.c1, c.c2, c.c3, c.c4};
    double mu[5] = {1.0, 0.0, 0.0, 0.0, 0.0};
    for (int n = 2; n <= 4; ++n) {
        double acc = 0.0;
        double binom = 1.0; // C(n-1, k-1), starting at k = 1
        for (int j = 1; j <= n; ++j) {
            if (j > 1) binom = binom * (n - j + 1) / (j - 1);
            if (j == 1) continue; // c1 * mu_{n-1} drops out for central moments
            acc += binom * k[j] * mu[n - j];
        }
        mu[n] = acc;
    }
    return {mu[2], mu[3], mu[4]};
}

SkewKurt skew_kurt(const Cumulants& c) {
    if (!(c.c2 > 0.0)) throw DomainError("skew_kurt: c2 must be > 0");
    return {c.c3 / std::pow(c.c2, 1.5), c.c4 / (c.c2 * c.c2)};
}

} // namespace vgtree
