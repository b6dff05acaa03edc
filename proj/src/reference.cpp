#include "vgtree/reference.hpp"

#include "vgtree/errors.hpp"
#include "vgtree/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace vgtree {

void QuadratureConfig::validate() const {
    if (!(half_width_sd >= 6.0)) throw DomainError("quadrature: truncation half-width must be >= 6 stdev");
    if (!(tolerance > 0.0)) throw DomainError("quadrature: tolerance must be > 0");
}

double quadrature_european_price(const OptionSpec& spec, const VgParams& params, const QuadratureConfig& q) {
    spec.validate();
    params.validate();
    q.validate();
    if (spec.style != ExerciseStyle::European) {
        throw UnsupportedError("quadrature supports European only");
    }

    const double t = spec.maturity;
    const Cumulants c = cumulants(params, t);
    const double drift = (params.r + martingale_correction(params)) * t;
    const double sd = std::sqrt(c.c2);
    const double kink = std::log(spec.strike / spec.spot) - drift;
    // Inner window: tanh-sinh between the kink, the cusp at 0 and the window
    // edges. The tails beyond it go to exp-sinh, since VG tails decay at a
    // rate independent of t while sd shrinks like sqrt(t).
    const double lo = std::min(c.c1 - q.half_width_sd * sd, kink - sd);
    const double hi = std::max(c.c1 + q.half_width_sd * sd, kink + sd);

    std::vector<double> cuts = {lo, hi, kink};
    if (q.split_at_zero && lo < 0.0 && hi > 0.0) cuts.push_back(0.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto integrand = [&](double x) {
        const double f = pdf(params, t, x);
        return f == 0.0 ? 0.0 : spec.payoff(spec.spot * std::exp(drift + x)) * f;
    };

    const double per_segment = q.tolerance / static_cast<double>(cuts.size() + 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        total += integrate(integrand, cuts[i], cuts[i + 1], per_segment).value;
    }
    total += integrate_to_infinity(integrand, hi, per_segment).value;
    total += integrate_to_infinity([&](double x) { return integrand(-x); }, -lo, per_segment).value;
    return std::exp(-params.r * t) * total;
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double black_scholes_price(const OptionSpec& spec, double sigma_bs, double r) {
    spec.validate();
    if (spec.style != ExerciseStyle::European) throw UnsupportedError("Black-Scholes closed form is European only");
    if (!(sigma_bs > 0.0) || !std::isfinite(sigma_bs)) throw DomainError("Black-Scholes: sigma must be > 0");
    if (!std::isfinite(r)) throw DomainError("Black-Scholes: rate must be finite");

    const double vol = sigma_bs * std::sqrt(spec.maturity);
    const double d1 = (std::log(spec.spot / spec.strike) + (r + 0.5 * sigma_bs * sigma_bs) * spec.maturity) / vol;
    const double d2 = d1 - vol;
    const double df = std::exp(-r * spec.maturity);
    if (spec.type == OptionType::Call) return spec.spot * normal_cdf(d1) - spec.strike * df * normal_cdf(d2);
    return spec.strike * df * normal_cdf(-d2) - spec.spot * normal_cdf(-d1);
}

} // namespace vgtree
