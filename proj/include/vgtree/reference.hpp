#pragma once

// Independent oracles: European prices by direct quadrature against the VG
// density, and the Black-Scholes closed form.

#include "vgtree/option.hpp"
#include "vgtree/vg_model.hpp"

namespace vgtree {

struct QuadratureConfig {
    double half_width_sd = 12.0; ///< inner window half-width around the mean, in standard deviations; tails are integrated to infinity
    double tolerance = 1e-8;     ///< absolute error target
    bool split_at_zero = true;   ///< split the domain at the density's cusp / singularity

    void validate() const;
};

/// exp(-rT) * integral of payoff(S0 exp((r + omega) T + x)) f_{X_T}(x) dx.
/// Throws UnsupportedError for American style.
double quadrature_european_price(const OptionSpec& spec, const VgParams& params, const QuadratureConfig& q = {});

double normal_cdf(double x) noexcept;

/// Black-Scholes price of a European option. Throws UnsupportedError for American style.
double black_scholes_price(const OptionSpec& spec, double sigma_bs, double r);

} // namespace vgtree
