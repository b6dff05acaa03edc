#pragma once

// Explicit finite differences for the fourth-order PDE obtained by Taylor
// expanding the jump integral of the VG pricing PIDE:
//
//   V_t + (r + omega + ct1) V_x + ct2/2 V_xx + ct3/6 V_xxx + ct4/24 V_xxxx = r V
//
// with ct_n the cumulants per unit time. One backward step reads
//
//   (1 + r dt) V^n_i = sum_{k=-2..2} p_{k h} V^{n+1}_{i+k}
//
// and the five weights read as a Markov chain on the grid. They always sum
// to one but are not always nonnegative.

#include "vgtree/option.hpp"
#include "vgtree/vg_model.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vgtree {

struct UnitCumulants {
    double ct1 = 0.0;
    double ct2 = 0.0;
    double ct3 = 0.0;
    double ct4 = 0.0;
};

UnitCumulants unit_cumulants(const VgParams& params);

struct FdCoefficients {
    double p_plus_2h = 0.0;
    double p_plus_h = 0.0;
    double p_0 = 0.0;
    double p_minus_h = 0.0;
    double p_minus_2h = 0.0;
    double r_factor = 1.0; ///< 1 / (1 + r dt)

    double sum() const noexcept { return p_plus_2h + p_plus_h + p_0 + p_minus_h + p_minus_2h; }
    bool all_nonnegative() const noexcept {
        return p_plus_2h >= 0.0 && p_plus_h >= 0.0 && p_0 >= 0.0 && p_minus_h >= 0.0 && p_minus_2h >= 0.0;
    }
};

FdCoefficients fd_coefficients(const VgParams& params, double dt, double h);

/// Raw moments E[dX^k], k = 1..4, of the five-point increment {+-2h, +-h, 0}.
struct LocalMoments {
    double m1 = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
};

LocalMoments local_moments(const FdCoefficients& coeffs, double h);

struct GridConfig {
    double x_min = 0.0;
    double x_max = 0.0;
    int n_space = 0; ///< number of cells; nodes are x_min + i h, i = 0..n_space
    int n_time = 0;

    double h() const { return (x_max - x_min) / n_space; }
    double dt(double maturity) const { return maturity / n_time; }
    void validate() const;
};

/// Step size tied to the lattice: h = 2 alpha(dt).
double lattice_step(const VgParams& params, double dt);

/// Grid centred at log S0 + (r + omega + ct1) T / 2 with half-width
/// half_width_sd * sqrt(ct2 T). h defaults to lattice_step(params, T / n_time).
GridConfig default_grid(const OptionSpec& spec, const VgParams& params, int n_time,
                        std::optional<double> h = std::nullopt, double half_width_sd = 10.0);

struct FdResult {
    double price = 0.0;
    GridConfig grid;
    FdCoefficients coefficients;
    double boundary_mismatch = 0.0; ///< largest per-step gap between edge nodes and the boundary asymptote
    std::vector<std::string> warnings;
};

/// Throws InstabilityError if |V| outgrows ten times the payoff bound.
FdResult price_fd_detailed(const OptionSpec& spec, const VgParams& params, const GridConfig& grid);

double price_fd(const OptionSpec& spec, const VgParams& params, const GridConfig& grid);

struct P3Point {
    double kbar = 0.0;
    double p3_mm = 0.0;
    double p3_pde = 0.0;
};

/// Centre weight of the moment-matched tree vs. the FD scheme with h = 2 alpha,
/// for a step of variance c2 over dt.
std::vector<P3Point> p3_curve(std::span<const double> kbar_grid, double c2, double dt);

struct NegativeWeight {
    std::string name;
    double value = 0.0;
};

struct HInterval {
    double lo = 0.0;
    double hi = 0.0;
};

struct PositivityReport {
    double dt = 0.0;
    double h = 0.0;
    std::vector<NegativeWeight> negative; ///< offending weights at (dt, h)
    bool all_nonnegative = true;
    double scan_lo = 0.0;
    double scan_hi = 0.0;
    std::vector<HInterval> nonnegative_h; ///< sub-intervals of the scan where every weight is >= 0
    std::vector<HInterval> negative_h;    ///< complement within the scan
};

/// Scans h over [scan_lo, scan_hi] (default [alpha/2, 4 alpha] with alpha = alpha(dt)).
PositivityReport positivity_report(const VgParams& params, double dt, double h,
                                   std::optional<double> scan_lo = std::nullopt,
                                   std::optional<double> scan_hi = std::nullopt, int scan_points = 2001);

} // namespace vgtree
