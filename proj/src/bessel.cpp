// Modified Bessel function of the second kind for real order.
//
// K_mu and K_{mu+1} are computed for the fractional part |mu| <= 1/2 by
// Temme's series (x < 2) or Steed's continued fraction CF2 (x >= 2), then
// carried to the requested order by the forward recurrence
//     K_{v+1}(x) = (2v/x) K_v(x) + K_{v-1}(x),
// which is stable for K. Values are carried as (mantissa, log-scale) pairs
// with exp(x) factored out, so neither large orders nor large arguments
// overflow before the caller picks an output mode.

#include "vgtree/errors.hpp"
#include "vgtree/vg_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace vgtree {
namespace {

constexpr double kEps = 1e-17;
constexpr int kMaxIter = 10000;

// Taylor coefficients of 1/Gamma(z) = sum_k a[k] z^(k+1).
constexpr std::array<double, 26> kInvGammaCoeffs = {
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
};

struct TemmeGammas {
    double gam1;   // (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
    double gam2;   // (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
    double gampl;  // 1/Gamma(1+mu)
    double gammi;  // 1/Gamma(1-mu)
};

// 1/Gamma(1+mu) = sum_k a[k] mu^k; split into even and odd parts so gam1
// has no cancellation near mu = 0.
TemmeGammas temme_gammas(double mu) {
    const double mu2 = mu * mu;
    double even = 0.0;
    double odd = 0.0;
    const int n = static_cast<int>(kInvGammaCoeffs.size());
    for (int k = (n - 1) / 2 * 2; k >= 0; k -= 2) even = even * mu2 + kInvGammaCoeffs[k];
    for (int k = (n - 2) / 2 * 2 + 1; k >= 1; k -= 2) odd = odd * mu2 + kInvGammaCoeffs[k];
    TemmeGammas g{};
    g.gam1 = -odd;
    g.gam2 = even;
    g.gampl = even + mu * odd;
    g.gammi = even - mu * odd;
    return g;
}

// exp(x) * K_mu(x) and exp(x) * K_{mu+1}(x) for |mu| <= 1/2.
struct ScaledPair {
    double k_mu;
    double k_mu1;
};

ScaledPair temme_series(double mu, double x) {
    const double x2 = 0.5 * x;
    const double pimu = std::numbers::pi * mu;
    const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    const TemmeGammas g = temme_gammas(mu);
    double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / g.gampl;
    double q = 0.5 / (e * g.gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    int i = 1;
    for (; i <= kMaxIter; ++i) {
        ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu * mu);
        c *= d / i;
        p /= (i - mu);
        q /= (i + mu);
        const double del = c * ff;
        sum += del;
        const double del1 = c * (p - i * ff);
        sum1 += del1;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxIter) throw NumericalError("bessel_k: Temme series did not converge");
    const double scale = std::exp(x);
    return {sum * scale, sum1 * (2.0 / x) * scale};
}

ScaledPair steed_cf2(double mu, double x) {
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25 - mu * mu;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    int i = 2;
    for (; i <= kMaxIter; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps) break;
    }
    if (i > kMaxIter) throw NumericalError("bessel_k: continued fraction did not converge");
    h = a1 * h;
    const double k_mu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
    const double k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
    return {k_mu, k_mu1};
}

// log K_nu(x) = log(mantissa) + log_scale - x.
struct ScaledLog {
    double mantissa;
    double log_scale;
};

ScaledLog bessel_k_core(double nu, double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("bessel_k: argument must be finite and > 0, got " + std::to_string(x));
    }
    if (!std::isfinite(nu)) throw DomainError("bessel_k: order must be finite");
    nu = std::abs(nu);
    // Hankel expansion: the first correction (4 nu^2 - 1) / (8x) is below double precision.
    if (x > 1e17 * std::max(1.0, nu * nu)) return {std::sqrt(0.5 * std::numbers::pi) / std::sqrt(x), 0.0};
    const int nl = static_cast<int>(nu + 0.5);
    const double mu = nu - nl;
    ScaledPair pair = x < 2.0 ? temme_series(mu, x) : steed_cf2(mu, x);

    double k_lo = pair.k_mu;
    double k_hi = pair.k_mu1;
    double log_scale = 0.0;
    const double two_over_x = 2.0 / x;
    for (int i = 1; i <= nl; ++i) {
        // Rescale before the step: for tiny x one step can gain 300 decades.
        const double growth = (mu + i) * two_over_x + 1.0;
        if (k_hi > 1e250 / growth) {
            k_lo /= k_hi;
            log_scale += std::log(k_hi);
            k_hi = 1.0;
        }
        const double next = (mu + i) * two_over_x * k_hi + k_lo;
        k_lo = k_hi;
        k_hi = next;
    }
    return {k_lo, log_scale};
}

} // namespace

double log_bessel_k(double nu, double x) {
    const ScaledLog v = bessel_k_core(nu, x);
    return std::log(v.mantissa) + v.log_scale - x;
}

double bessel_k_scaled(double nu, double x) {
    const ScaledLog v = bessel_k_core(nu, x);
    if (v.log_scale == 0.0) return v.mantissa;
    const double log_value = std::log(v.mantissa) + v.log_scale;
    if (log_value > std::log(std::numeric_limits<double>::max())) {
        throw NumericalError("bessel_k_scaled: result overflows double");
    }
    return std::exp(log_value);
}

double bessel_k(double nu, double x) {
    const ScaledLog v = bessel_k_core(nu, x);
    if (v.log_scale == 0.0 && x < 700.0) return v.mantissa * std::exp(-x);
    // exp() saturates to +inf / 0 outside double range.
    return std::exp(std::log(v.mantissa) + v.log_scale - x);
}

} // namespace vgtree
