#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "vgtree/errors.hpp"
#include "vgtree/vg_model.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>

using namespace vgtree;
using doctest::Approx;

namespace {
const VgParams kTable1{-0.1, 0.2, 0.2, 0.06};
}

TEST_CASE("cumulants at Table 1 parameters") {
    const Cumulants c = cumulants(kTable1, 1.0);
    CHECK(c.c1 == Approx(-0.1).epsilon(1e-14));
    CHECK(c.c2 == Approx(0.042).epsilon(1e-14));
    CHECK(c.c3 == Approx(-0.00248).epsilon(1e-13));
    CHECK(c.c4 == Approx(0.0011568).epsilon(1e-13));
}

TEST_CASE("cumulants: symmetric case and linearity in t") {
    const Cumulants c = cumulants({0.0, 0.2, 0.2, 0.0}, 1.0);
    CHECK(c.c1 == 0.0);
    CHECK(c.c3 == 0.0);
    CHECK(c.c2 == Approx(0.04));
    CHECK(c.c4 == Approx(0.00096));
    const Cumulants a = cumulants(kTable1, 1.0);
    const Cumulants b = cumulants(kTable1, 2.0);
    CHECK(b.c1 == 2.0 * a.c1);
    CHECK(b.c2 == 2.0 * a.c2);
    CHECK(b.c3 == 2.0 * a.c3);
    CHECK(b.c4 == 2.0 * a.c4);
}

TEST_CASE("cumulants agree with numeric derivatives of the log characteristic function") {
    // c_n = i^-n d^n/du^n [t eta(u)] at 0; central differences of -i log phi on the imaginary axis
    // turn into real derivatives of the cumulant generating function K(v) = log E[e^{vX}].
    const double t = 1.0;
    auto K = [&](double v) { return std::log(characteristic_function(kTable1, {0.0, -v}, t).real()); };
    const double h = 1e-2;
    const double d1 = (K(h) - K(-h)) / (2 * h);
    const double d2 = (K(h) - 2 * K(0) + K(-h)) / (h * h);
    const Cumulants c = cumulants(kTable1, t);
    CHECK(d1 == Approx(c.c1).epsilon(1e-3));
    CHECK(d2 == Approx(c.c2).epsilon(1e-3));
}

TEST_CASE("martingale correction") {
    CHECK(martingale_correction(kTable1) == Approx(5.0 * std::log(1.016)).epsilon(1e-14));
    CHECK(martingale_correction(kTable1) == Approx(0.0793667).epsilon(1e-6));
    CHECK(martingale_correction({0.0, 0.0, 0.2, 0.0}) == 0.0);
    CHECK(martingale_correction({-1e-9, 0.2, 1e-9, 0.0}) == Approx(-0.02).epsilon(1e-6));
    CHECK_THROWS_AS(martingale_correction({1.0, 3.0, 1.0, 0.0}), DomainError);
    // phi(-i) e^{omega t} = 1
    const auto phi = characteristic_function(kTable1, {0.0, -1.0}, 1.0);
    CHECK(phi.real() == Approx(std::pow(1.016, -5.0)).epsilon(1e-13));
    CHECK(phi.real() == Approx(0.923700).epsilon(1e-6));
    CHECK(phi.real() * std::exp(martingale_correction(kTable1)) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Levy density") {
    const VgParams sym{0.0, 0.2, 0.2, 0.0};
    for (double x : {1e-4, 0.01, 0.3, 2.0}) CHECK(levy_density(sym, x) == Approx(levy_density(sym, -x)));
    CHECK_THROWS_AS(levy_density(kTable1, 0.0), DomainError);
    CHECK(levy_density(kTable1, 0.5) > 0.0);
}

TEST_CASE("Levy measure moments equal the unit-time cumulants") {
    const Cumulants c = cumulants(kTable1, 1.0);
    const double want[] = {c.c1, c.c2, c.c3, c.c4};
    for (int n = 1; n <= 4; ++n) {
        // x^n nu(x) ~ x^{n-1} near 0: integrable for n >= 1.
        const auto f = oracle::levy_moment_integrand(kTable1, n);
        const double pos = oracle::integrate(f, 0.0, 1.0) + oracle::integrate_tail(f, 1.0);
        const double neg = oracle::integrate(f, -1.0, 0.0) + oracle::integrate_tail([&](double x) { return f(-x); }, 1.0);
        CHECK(oracle::rel_err(pos + neg, want[n - 1]) < 1e-6);
    }
}

TEST_CASE("characteristic function") {
    CHECK(std::abs(characteristic_function(kTable1, 0.0, 1.0) - 1.0) < 1e-15);
    const VgParams sym{0.0, 0.2, 0.2, 0.0};
    for (double u : {0.1, 1.0, 5.0, 40.0}) {
        const auto v = characteristic_function(sym, u, 1.0);
        CHECK(v.imag() == 0.0);
        CHECK(v.real() > 0.0);
    }
    for (int k = 0; k < 100; ++k) {
        const double u = -50.0 + k;
        const auto want = std::exp(2.5 * levy_symbol(kTable1, u));
        CHECK(std::abs(characteristic_function(kTable1, u, 2.5) - want) < 1e-12);
    }
    // base 1 - i theta kappa u + sigma^2 kappa u^2 / 2 is real and non-positive at u = -i v with large v
    CHECK_THROWS_AS(characteristic_function(kTable1, {0.0, -20.0}, 1.0), NumericalError);
}

TEST_CASE("Bessel K: analytic identity, integral oracle and Boost cross-check") {
    for (double x : {1e-3, 0.1, 1.0, 1.99, 2.0, 7.5, 30.0, 300.0}) {
        const double want = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x);
        CHECK(oracle::rel_err(bessel_k(0.5, x), want) < 1e-10);
    }
    CHECK(bessel_k(0.5, 1.0) == Approx(0.4610685).epsilon(1e-7));
    CHECK(bessel_k(0.0, 1.0) == Approx(0.4210244).epsilon(1e-7));
    CHECK(bessel_k(2.5, 3.0) == bessel_k(-2.5, 3.0));
    for (double nu : {0.0, 0.2, 0.5, 1.3, 4.5, 12.25}) {
        for (double x : {0.05, 0.7, 1.9, 2.1, 9.0, 40.0}) {
            CHECK(oracle::rel_err(bessel_k(nu, x), oracle::bessel_k_integral(nu, x)) < 1e-9);
            CHECK(oracle::rel_err(bessel_k(nu, x), boost::math::cyl_bessel_k(nu, x)) < 1e-11);
        }
    }
    CHECK_THROWS_AS(bessel_k(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(bessel_k(1.0, -1.0), DomainError);
}

TEST_CASE("Bessel K: scaled and log modes outside double range") {
    CHECK(bessel_k(1.0, 1000.0) == 0.0);
    CHECK(std::isfinite(log_bessel_k(1.0, 1000.0)));
    CHECK(bessel_k_scaled(0.5, 1000.0) == Approx(std::sqrt(std::numbers::pi / 2000.0)).epsilon(1e-12));
    CHECK(std::isinf(bessel_k(400.0, 1e-3)));
    CHECK_THROWS_AS(bessel_k_scaled(400.0, 1e-3), NumericalError);
    // Near DBL_MAX the continued fraction would overflow; the Hankel limit takes over.
    CHECK(log_bessel_k(4.5, 1.7e308) == Approx(-1.7e308).epsilon(1e-15));
    CHECK(log_bessel_k(2.0, 2e17) == Approx(-2e17 + 0.5 * std::log(std::numbers::pi / 4e17)).epsilon(1e-15));
    // log K_nu(z) ~ lgamma(nu) - log 2 + nu log(2/z) as z -> 0.
    const double z = 1e-200;
    CHECK(log_bessel_k(4.5, z) == Approx(std::lgamma(4.5) - std::log(2.0) + 4.5 * std::log(2.0 / z)).epsilon(1e-12));
}

TEST_CASE("pdf: normalisation, symmetry and moments") {
    struct Case {
        VgParams p;
        double t;
    };
    // t/kappa above and below 1/2: the second case has an integrable singularity at 0.
    const Case cases[] = {{kTable1, 1.0}, {kTable1, 0.05}, {{0.0, 0.2, 0.2, 0.0}, 1.0}, {{0.3, 0.4, 0.5, 0.0}, 0.5}};
    for (const auto& cs : cases) {
        const Cumulants c = cumulants(cs.p, cs.t);
        const double w = 40.0 * std::sqrt(c.c2);
        auto moment = [&](int n) {
            auto f = [&](double x) { return std::pow(x - c.c1, n) * pdf(cs.p, cs.t, x); };
            return oracle::integrate(f, c.c1 - w, 0.0) + oracle::integrate(f, 0.0, c.c1 + w);
        };
        CHECK(std::abs(moment(0) - 1.0) < 1e-6);
        const CentralMoments m = central_moments_from_cumulants(c);
        CHECK(oracle::rel_err(moment(2), m.mu2) < 1e-5);
        if (cs.p.theta != 0.0) CHECK(oracle::rel_err(moment(3), m.mu3) < 1e-5);
        CHECK(oracle::rel_err(moment(4), m.mu4) < 1e-5);
    }
    const VgParams sym{0.0, 0.2, 0.2, 0.0};
    for (double x : {1e-6, 0.05, 0.5, 1.5}) CHECK(pdf(sym, 1.0, x) == Approx(pdf(sym, 1.0, -x)).epsilon(1e-13));
    CHECK(std::isinf(pdf(kTable1, 0.05, 0.0)));
    CHECK(pdf(kTable1, 1.0, 0.0) == Approx(pdf(kTable1, 1.0, 1e-12)).epsilon(1e-9));
    const double xs[] = {-0.2, 0.0, 0.2};
    const auto curve = density_curve(kTable1, 1.0, xs);
    REQUIRE(curve.size() == 3);
    CHECK(curve[2].f == pdf(kTable1, 1.0, 0.2));
}

TEST_CASE("central moments and skew/kurtosis") {
    const Cumulants c{0.0, 0.042, -0.00248, 0.0011568, 1.0};
    const CentralMoments m = central_moments_from_cumulants(c);
    CHECK(m.mu2 == Approx(0.042));
    CHECK(m.mu3 == Approx(-0.00248));
    CHECK(m.mu4 == Approx(0.0064488).epsilon(1e-12));
    const CentralMoments g = central_moments_from_cumulants({0.0, 1.0, 0.0, 0.0, 1.0});
    CHECK(g.mu2 == 1.0);
    CHECK(g.mu3 == 0.0);
    CHECK(g.mu4 == 3.0);
    const CentralMoments z = central_moments_from_cumulants({});
    CHECK((z.mu2 == 0.0 && z.mu3 == 0.0 && z.mu4 == 0.0));

    const SkewKurt sk = skew_kurt(cumulants(kTable1, 1.0));
    CHECK(sk.skewness == Approx(-0.28812).epsilon(1e-4));
    CHECK(sk.excess_kurtosis == Approx(0.65578).epsilon(1e-4));
    CHECK(skew_kurt(cumulants({0.0, 0.2, 0.2, 0.0}, 1.0)).skewness == 0.0);
    const SkewKurt sk4 = skew_kurt(cumulants(kTable1, 4.0));
    CHECK(sk4.skewness == Approx(sk.skewness / 2));
    CHECK(sk4.excess_kurtosis == Approx(sk.excess_kurtosis / 4));
    CHECK_THROWS_AS(skew_kurt({0.0, 0.0, 0.0, 0.0, 1.0}), DomainError);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(cumulants({0.0, -0.2, 0.2, 0.0}, 1.0), DomainError);
    CHECK_THROWS_AS(cumulants({0.0, 0.2, 0.0, 0.0}, 1.0), DomainError);
    CHECK_THROWS_AS(cumulants(kTable1, 0.0), DomainError);
    CHECK_THROWS_AS((VgParams{0.0, 0.2, 0.2, -0.01}.validate()), DomainError);
    CHECK_THROWS_AS((VgParams{NAN, 0.2, 0.2, 0.0}.validate()), DomainError);
}
