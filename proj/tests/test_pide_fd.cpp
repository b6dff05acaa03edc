#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vgtree/errors.hpp"
#include "vgtree/lattice.hpp"
#include "vgtree/pide_fd.hpp"
#include "vgtree/reference.hpp"

#include <cmath>
#include <random>

using namespace vgtree;
using doctest::Approx;

namespace {
const VgParams kTable1{-0.1, 0.2, 0.2, 0.06};
const OptionSpec kAtmPut{40.0, 40.0, 1.0, OptionType::Put, ExerciseStyle::European};
} // namespace

TEST_CASE("coefficients sum to one and reproduce the local moments") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> theta(-0.3, 0.3), sigma(0.1, 0.5), kappa(0.05, 0.8), scale(0.3, 5.0);
    for (int k = 0; k < 100; ++k) {
        const VgParams p{theta(rng), sigma(rng), kappa(rng), 0.04};
        const double dt = 1.0 / (100 + 50 * k);
        const double h = scale(rng) * lattice_step(p, dt);
        const FdCoefficients c = fd_coefficients(p, dt, h);
        CHECK(std::abs(c.sum() - 1.0) <= 1e-12);
        const UnitCumulants ct = unit_cumulants(p);
        const double drift = p.r + martingale_correction(p) + ct.ct1;
        const LocalMoments m = local_moments(c, h);
        CHECK(m.m1 == Approx(drift * dt).epsilon(1e-12));
        CHECK(m.m2 == Approx(ct.ct2 * dt).epsilon(1e-12));
        CHECK(m.m3 == Approx(drift * dt * h * h + ct.ct3 * dt).epsilon(1e-12));
        CHECK(m.m4 == Approx((ct.ct2 * h * h + ct.ct4) * dt).epsilon(1e-12));
    }
}

TEST_CASE("coefficient examples") {
    const double dt = 1.0 / 2000.0;
    const double h = lattice_step(kTable1, dt);
    CHECK(h == Approx(0.0959268).epsilon(1e-6));
    const FdCoefficients c = fd_coefficients(kTable1, dt, h);
    CHECK(c.p_0 == Approx(1.0 - 0.042 * dt / (h * h) + 0.0011568 * dt / (4 * h * h * h * h)).epsilon(1e-12));
    CHECK(c.p_0 == Approx(0.999426).epsilon(1e-6));
    const double c2 = cumulants(kTable1, dt).c2;
    const double kbar = skew_kurt(cumulants(kTable1, dt)).excess_kurtosis;
    const double k[] = {kbar};
    CHECK(p3_curve(k, c2, dt)[0].p3_pde == Approx(c.p_0).epsilon(1e-12));
    CHECK(c.r_factor == Approx(1.0 / (1.0 + 0.06 * dt)));

    // drift r + omega + ct1 = 0 with theta = 0: symmetric stencil.
    VgParams sym{0.0, 0.2, 0.2, 0.0};
    sym.r = -martingale_correction(sym);
    const FdCoefficients s = fd_coefficients(sym, dt, 0.05);
    CHECK(s.p_plus_h == Approx(s.p_minus_h).epsilon(1e-14));
    CHECK(s.p_plus_2h == Approx(s.p_minus_2h).epsilon(1e-14));
    CHECK(std::abs(local_moments(s, 0.05).m3) < 1e-18);
}

TEST_CASE("p3 curve") {
    const double grid[] = {1e-9, 1.0, 1e9};
    const auto pts = p3_curve(grid, 0.01, 0.001);
    CHECK(pts[0].p3_mm == Approx(0.5).epsilon(1e-9));
    CHECK(pts[1].p3_mm == Approx(0.625).epsilon(1e-15));
    CHECK(pts[2].p3_mm == Approx(1.0).epsilon(1e-8));
    for (const auto& p : pts) {
        // With h = 2 alpha the PDE weight depends on kbar only.
        const double k = p.kbar;
        CHECK(p.p3_pde == Approx(1.0 - 3.0 / (3.0 + k) + 9.0 * k / (4.0 * (3.0 + k) * (3.0 + k))).epsilon(1e-12));
    }
    const double bad[] = {0.0};
    CHECK_THROWS_AS(p3_curve(bad, 0.01, 0.001), DomainError);
}

TEST_CASE("positivity report") {
    const double dt = 1.0 / 2000.0;
    const double h = lattice_step(kTable1, dt);
    const PositivityReport rep = positivity_report(kTable1, dt, h);
    CHECK_FALSE(rep.all_nonnegative);
    REQUIRE_FALSE(rep.negative.empty());
    CHECK(rep.negative[0].name == "p_minus_h");
    CHECK_FALSE(rep.negative_h.empty());
    double covered = 0.0;
    for (const auto& iv : rep.nonnegative_h) covered += iv.hi - iv.lo;
    for (const auto& iv : rep.negative_h) covered += iv.hi - iv.lo;
    CHECK(covered == Approx(rep.scan_hi - rep.scan_lo).epsilon(1e-12));

    // Driftless symmetric Gaussian limit at h^2 = ct2 dt: p0 = 0, the rest nonnegative.
    VgParams g{0.0, 0.2, 1e-12, 0.0};
    g.r = -martingale_correction(g);
    const double hg = std::sqrt(0.04 * dt);
    const FdCoefficients cg = fd_coefficients(g, dt, hg);
    CHECK(std::abs(cg.p_0) < 1e-8);
    const PositivityReport rg = positivity_report(g, dt, hg * (1 + 1e-9));
    CHECK(rg.all_nonnegative);

    // Large h: the drift sign decides which neighbour goes negative.
    const FdCoefficients big = fd_coefficients(kTable1, dt, 10.0);
    CHECK(big.p_0 == Approx(1.0).epsilon(1e-5));
    const double drift = kTable1.r + martingale_correction(kTable1) + kTable1.theta;
    CHECK((drift > 0 ? big.p_minus_h < 0 : big.p_plus_h < 0));
}

TEST_CASE("FD prices against the quadrature oracle") {
    const double quad = quadrature_european_price(kAtmPut, kTable1);
    double prev = INFINITY;
    for (int m : {1000, 2000, 4000}) {
        const FdResult r = price_fd_detailed(kAtmPut, kTable1, default_grid(kAtmPut, kTable1, m));
        const double err = std::abs(r.price - quad);
        CHECK(err < 0.05);
        CHECK(err <= prev);
        prev = err;
    }
}

TEST_CASE("FD: zero payoff stays zero; American put dominates European") {
    // Strike so low the put is worthless everywhere on the grid.
    const OptionSpec tiny{40.0, 1e-6, 1.0, OptionType::Put, ExerciseStyle::European};
    CHECK(price_fd(tiny, kTable1, default_grid(tiny, kTable1, 200)) == 0.0);
    OptionSpec am = kAtmPut;
    am.style = ExerciseStyle::American;
    const GridConfig g = default_grid(kAtmPut, kTable1, 1000);
    CHECK(price_fd(am, kTable1, g) >= price_fd(kAtmPut, kTable1, g));
}

TEST_CASE("FD: instability and grid errors") {
    // dt far above the explicit-scheme limit for a small h.
    GridConfig g = default_grid(kAtmPut, kTable1, 5, 0.01);
    CHECK_THROWS_AS(price_fd(kAtmPut, kTable1, g), InstabilityError);
    GridConfig off = default_grid(kAtmPut, kTable1, 100);
    off.x_min += 10.0;
    off.x_max += 10.0;
    CHECK_THROWS_AS(price_fd(kAtmPut, kTable1, off), DomainError);
    CHECK_THROWS_AS(fd_coefficients(kTable1, 0.0, 0.1), DomainError);
    GridConfig narrow = default_grid(kAtmPut, kTable1, 1000, std::nullopt, 2.0);
    const FdResult r = price_fd_detailed(kAtmPut, kTable1, narrow);
    REQUIRE_FALSE(r.warnings.empty());
    CHECK(r.warnings[0].rfind("grid-too-narrow", 0) == 0);
}
