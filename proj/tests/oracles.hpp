#pragma once

// Independent reference computations for the tests. Nothing here calls the
// routine it is used to check.

#include "vgtree/lattice.hpp"
#include "vgtree/vg_model.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt.
inline double bessel_k_integral(double nu, double x) {
    boost::math::quadrature::exp_sinh<double> rule;
    auto f = [&](double t) {
        const double e = -x * std::cosh(t) + std::abs(nu) * t;
        return e < -745.0 ? 0.0 : 0.5 * (std::exp(e) + std::exp(-x * std::cosh(t) - std::abs(nu) * t));
    };
    return rule.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
}

// int_a^b f by tanh-sinh straight from Boost.
template <typename F>
double integrate(F f, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> rule;
    return rule.integrate(f, a, b, 1e-13);
}

// int_a^inf f.
template <typename F>
double integrate_tail(F f, double a) {
    boost::math::quadrature::exp_sinh<double> rule;
    return rule.integrate([&](double x) { return f(a + x); }, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
}

// Cumulants 2..4 from central moments of a discrete law on points xs.
struct DiscreteCumulants {
    double mean = 0.0;
    double k2 = 0.0;
    double k3 = 0.0;
    double k4 = 0.0;
};

inline DiscreteCumulants discrete_cumulants(const std::vector<double>& xs, const std::vector<double>& ps) {
    DiscreteCumulants c;
    for (std::size_t i = 0; i < xs.size(); ++i) c.mean += ps[i] * xs[i];
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - c.mean;
        m2 += ps[i] * d * d;
        m3 += ps[i] * d * d * d;
        m4 += ps[i] * d * d * d * d;
    }
    c.k2 = m2;
    c.k3 = m3;
    c.k4 = m4 - 3.0 * m2 * m2;
    return c;
}

// Law of the log-price after n steps, by explicit convolution of the
// five-branch step. Index i holds the node with net jump 4n - 2i.
inline std::vector<double> tree_distribution(const vgtree::ProbVector& p, int n) {
    std::vector<double> dist{1.0};
    for (int s = 0; s < n; ++s) {
        std::vector<double> next(dist.size() + 4, 0.0);
        for (std::size_t i = 0; i < dist.size(); ++i) {
            // Branch b moves by jump 4 - 2b, i.e. down b index positions.
            for (int b = 0; b < vgtree::kBranches; ++b) next[i + b] += dist[i] * p[b];
        }
        dist.swap(next);
    }
    return dist;
}

// X_t = theta G + sigma sqrt(G) Z with G ~ Gamma(shape t/kappa, scale kappa).
inline std::vector<double> simulate_vg(double theta, double sigma, double kappa, double t, std::size_t n,
                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> gamma(t / kappa, kappa);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& x : out) {
        const double g = gamma(rng);
        x = theta * g + sigma * std::sqrt(g) * normal(rng);
    }
    return out;
}

// n-th moment integrand of the Levy measure; 0 where the density underflows.
inline auto levy_moment_integrand(const vgtree::VgParams& p, int n) {
    return [p, n](double x) {
        const double d = vgtree::levy_density(p, x);
        return d == 0.0 ? 0.0 : std::pow(x, n) * d;
    };
}

// Sampling box for property suites around Table-1 magnitudes.
struct RandomCase {
    vgtree::VgParams params;
    double dt;
};

inline RandomCase draw_case(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> theta(-0.3, 0.3), sigma(0.1, 0.5), kappa(0.05, 0.8), logdt(-9.2, 0.0);
    for (;;) {
        RandomCase c{{theta(rng), sigma(rng), kappa(rng), 0.05}, 0.0};
        c.dt = std::exp(logdt(rng));
        if (1.0 - c.params.theta * c.params.kappa - 0.5 * c.params.sigma * c.params.sigma * c.params.kappa > 0.0) {
            return c;
        }
    }
}

// The five closed-form weights are nonnegative iff s^2 <= 1 + kbar / 3.
inline bool tree_admissible(const vgtree::Cumulants& c) {
    const double s2 = c.c3 * c.c3 / (c.c2 * c.c2 * c.c2);
    const double kbar = c.c4 / (c.c2 * c.c2);
    return s2 <= 1.0 + kbar / 3.0;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), std::numeric_limits<double>::min());
}

} // namespace oracle
