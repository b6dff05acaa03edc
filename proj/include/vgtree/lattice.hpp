#pragma once

// Recombining pentanomial tree for the exponential VG model.
//
// One step moves the log-price by b*dt + j*alpha with j in {4, 2, 0, -2, -4},
// b = r + omega + theta. The five probabilities match the first four cumulants
// of the VG increment over dt; alpha comes from the excess kurtosis of that
// increment. After n steps the tree holds 4n + 1 distinct nodes.

#include "vgtree/option.hpp"
#include "vgtree/vg_model.hpp"

#include <array>
#include <vector>

namespace vgtree {

inline constexpr int kBranches = 5;
inline constexpr std::array<int, kBranches> kBranchJumps = {4, 2, 0, -2, -4};

struct LatticeConfig {
    int n_steps = 0;
    double t0 = 0.0; ///< valuation time; the option expires at spec.maturity

    double dt(const OptionSpec& spec) const { return (spec.maturity - t0) / n_steps; }
};

struct StepParams {
    double alpha = 0.0;  ///< half-spacing of the log-price lattice
    double b_step = 0.0; ///< drift per step, (r + omega + theta) * dt
    double u = 1.0;
    double d = 1.0;
};

/// p[0] belongs to the largest up-move (j = 4), p[4] to the largest down-move.
struct ProbVector {
    std::array<double, kBranches> p{};

    double sum() const noexcept { return p[0] + p[1] + p[2] + p[3] + p[4]; }
    double operator[](std::size_t i) const noexcept { return p[i]; }
};

/// alpha = sqrt(c2) * sqrt((3 + kbar) / 12), kbar = c4 / c2^2, with the
/// cumulants taken at horizon dt.
double step_scale(const Cumulants& c_step);

/// Solves sum p = 1, sum p j = 0, alpha^k sum p j^k = mu_k (k = 2, 3, 4) and
/// cross-checks it against the closed form. Throws NegativeProbabilityError
/// if any weight is below -1e-12, NumericalError if the two routes disagree.
ProbVector transition_probabilities(const Cumulants& c_step);

/// Closed form in terms of skewness s and excess kurtosis kbar.
ProbVector transition_probabilities_closed_form(double skewness, double excess_kurtosis);

/// u = exp(b dt / 4 + alpha), d = exp(b dt / 4 - alpha).
StepParams up_down_factors(double drift_per_unit, double dt, double alpha);

/// Node prices at step n, highest first: S0 u^(4n-i) d^i, i = 0..4n.
/// Throws NumericalError if any price is not representable.
std::vector<double> node_prices(double spot, const StepParams& step, int n);

/// The 4N + 1 terminal prices, strictly decreasing.
std::vector<double> terminal_prices(const OptionSpec& spec, const StepParams& step, int n_steps);

struct LatticeResult {
    double price = 0.0;
    double omega = 0.0;
    double dt = 0.0;
    StepParams step;
    ProbVector probabilities;
};

LatticeResult price_lattice_detailed(const OptionSpec& spec, const VgParams& params, const LatticeConfig& cfg);

double price_lattice(const OptionSpec& spec, const VgParams& params, const LatticeConfig& cfg);

/// Cox-Ross-Rubinstein binomial tree under Black-Scholes dynamics.
double binomial_bs_price(const OptionSpec& spec, double sigma_bs, double r, int n_steps);

} // namespace vgtree
