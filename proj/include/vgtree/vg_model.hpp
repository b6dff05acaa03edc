#pragma once

// Closed-form mathematics of the Variance-Gamma process X_t = theta*G_t + sigma*W(G_t),
// G_t a Gamma subordinator with unit mean rate and variance rate kappa.

#include <complex>
#include <span>
#include <vector>

namespace vgtree {

struct VgParams {
    double theta = 0.0; ///< drift of the subordinated Brownian motion
    double sigma = 0.0; ///< volatility of the subordinated Brownian motion, > 0
    double kappa = 0.0; ///< variance rate of the Gamma subordinator, > 0
    double r = 0.0;     ///< risk-free rate, >= 0

    /// Throws DomainError unless sigma > 0, kappa > 0, r >= 0 and the
    /// martingale correction exists (1 - theta*kappa - sigma^2*kappa/2 > 0).
    void validate() const;
};

/// First four cumulants of X_t over horizon t (no drift added).
struct Cumulants {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
    double t = 0.0;
};

struct CentralMoments {
    double mu2 = 0.0;
    double mu3 = 0.0;
    double mu4 = 0.0;
};

struct SkewKurt {
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

struct DensityPoint {
    double x = 0.0;
    double f = 0.0;
};

Cumulants cumulants(const VgParams& params, double t);

/// omega = log(1 - theta*kappa - sigma^2*kappa/2) / kappa, so that
/// S0*exp((r + omega) t + X_t) discounts to a martingale.
/// Only needs kappa > 0 and a positive log argument (sigma = 0 is allowed).
double martingale_correction(const VgParams& params);

/// Density of the Levy measure at jump size x != 0.
double levy_density(const VgParams& params, double x);

/// eta(u) = -log(1 - i theta kappa u + sigma^2 kappa u^2 / 2) / kappa, principal branch.
std::complex<double> levy_symbol(const VgParams& params, std::complex<double> u);

/// E[exp(i u X_t)] = (1 - i theta kappa u + sigma^2 kappa u^2 / 2)^(-t/kappa).
/// Throws NumericalError if the base lies on the branch cut (non-positive reals).
std::complex<double> characteristic_function(const VgParams& params, std::complex<double> u, double t);

/// Modified Bessel function of the second kind. Returns +inf (or 0) when the
/// true value is outside double range; use log_bessel_k or bessel_k_scaled there.
double bessel_k(double nu, double x);

/// exp(x) * K_nu(x). Throws NumericalError on overflow.
double bessel_k_scaled(double nu, double x);

/// log K_nu(x); finite for every nu and x > 0.
double log_bessel_k(double nu, double x);

/// Density of X_t at x. Returns +inf at x = 0 when t/kappa <= 1/2.
double pdf(const VgParams& params, double t, double x);

std::vector<DensityPoint> density_curve(const VgParams& params, double t, std::span<const double> xs);

/// mu_n = sum_{k=1}^{n} C(n-1, k-1) c_k mu_{n-k}, with mu_0 = 1, mu_1 = 0.
CentralMoments central_moments_from_cumulants(const Cumulants& c);

/// skewness c3/c2^{3/2}, excess kurtosis c4/c2^2.
SkewKurt skew_kurt(const Cumulants& c);

} // namespace vgtree
