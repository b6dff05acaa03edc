#include "vgtree/lattice.hpp"

#include "vgtree/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace vgtree {
namespace {

constexpr double kNegativeTolerance = 1e-12;
constexpr double kRouteAgreement = 1e-10;
const double kMaxLogPrice = std::log(std::numeric_limits<double>::max()) - 1.0;

void require_positive_variance(const Cumulants& c) {
    if (!(c.c2 > 0.0) || !std::isfinite(c.c2)) throw DomainError("step cumulants: c2 must be > 0");
    if (!(c.c4 >= 0.0) || !std::isfinite(c.c4)) throw DomainError("step cumulants: c4 must be >= 0");
}

void check_nonnegative(const ProbVector& p, double s, double kbar) {
    for (double v : p.p) {
        if (v < -kNegativeTolerance || !std::isfinite(v)) {
            std::ostringstream msg;
            msg << "negative transition probability " << v << " at skewness " << s << ", excess kurtosis " << kbar;
            throw NegativeProbabilityError(msg.str(), s, kbar);
        }
    }
}

ProbVector solve_moment_system(const Cumulants& c, double alpha) {
    const CentralMoments mu = central_moments_from_cumulants(c);
    Eigen::Matrix<double, kBranches, kBranches> a;
    Eigen::Matrix<double, kBranches, 1> rhs;
    for (int k = 0; k < kBranches; ++k) {
        for (int l = 0; l < kBranches; ++l) a(k, l) = std::pow(static_cast<double>(kBranchJumps[l]), k);
    }
    rhs << 1.0, 0.0, mu.mu2 / std::pow(alpha, 2), mu.mu3 / std::pow(alpha, 3), mu.mu4 / std::pow(alpha, 4);
    const Eigen::Matrix<double, kBranches, 1> sol = a.partialPivLu().solve(rhs);
    ProbVector p;
    for (int l = 0; l < kBranches; ++l) p.p[l] = sol(l);
    return p;
}

} // namespace

double step_scale(const Cumulants& c) {
    require_positive_variance(c);
    const double kbar = c.c4 / (c.c2 * c.c2);
    return std::sqrt(c.c2) * std::sqrt((3.0 + kbar) / 12.0);
}

ProbVector transition_probabilities_closed_form(double s, double kbar) {
    const double a = 3.0 + kbar;
    const double root = s * std::sqrt(9.0 + 3.0 * kbar);
    const double a2 = a * a;
    ProbVector p;
    p.p = {
        (a + root) / (4.0 * a2),
        (a - root) / (2.0 * a2),
        (3.0 + 2.0 * kbar) / (2.0 * a),
        (a + root) / (2.0 * a2),
        (a - root) / (4.0 * a2),
    };
    return p;
}

ProbVector transition_probabilities(const Cumulants& c) {
    const double alpha = step_scale(c);
    const SkewKurt sk = skew_kurt(c);
    const ProbVector solved = solve_moment_system(c, alpha);
    const ProbVector closed = transition_probabilities_closed_form(sk.skewness, sk.excess_kurtosis);
    for (int l = 0; l < kBranches; ++l) {
        if (std::abs(solved.p[l] - closed.p[l]) > kRouteAgreement) {
            std::ostringstream msg;
            msg << "moment system and closed-form probabilities disagree at branch " << l << ": " << solved.p[l]
                << " vs " << closed.p[l];
            throw NumericalError(msg.str());
        }
    }
    check_nonnegative(solved, sk.skewness, sk.excess_kurtosis);
    return solved;
}

StepParams up_down_factors(double drift_per_unit, double dt, double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("up_down_factors: alpha must be >= 0");
    if (!(dt > 0.0)) throw DomainError("up_down_factors: dt must be > 0");
    StepParams s;
    s.alpha = alpha;
    s.b_step = drift_per_unit * dt;
    const double per_branch = s.b_step / (kBranches - 1);
    s.u = std::exp(per_branch + alpha);
    s.d = std::exp(per_branch - alpha);
    return s;
}

std::vector<double> node_prices(double spot, const StepParams& step, int n) {
    if (n < 0) throw DomainError("node_prices: step index must be >= 0");
    const double log_s0 = std::log(spot);
    const int count = 4 * n + 1;
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double log_price = log_s0 + n * step.b_step + (4 * n - 2 * i) * step.alpha;
        if (log_price > kMaxLogPrice) {
            throw NumericalError("lattice node price overflows double (reduce N or alpha)");
        }
        out[static_cast<std::size_t>(i)] = std::exp(log_price);
    }
    return out;
}

std::vector<double> terminal_prices(const OptionSpec& spec, const StepParams& step, int n_steps) {
    if (n_steps < 1) throw DomainError("terminal_prices: N must be >= 1");
    if (!(spec.spot > 0.0)) throw DomainError("terminal_prices: spot must be > 0");
    return node_prices(spec.spot, step, n_steps);
}

LatticeResult price_lattice_detailed(const OptionSpec& spec, const VgParams& params, const LatticeConfig& cfg) {
    spec.validate();
    params.validate();
    if (cfg.n_steps < 1) throw DomainError("lattice: N must be >= 1");
    if (!(spec.maturity > cfg.t0)) throw DomainError("lattice: maturity must exceed t0");

    LatticeResult res;
    res.dt = cfg.dt(spec);
    res.omega = martingale_correction(params);
    const Cumulants c_step = cumulants(params, res.dt);
    res.probabilities = transition_probabilities(c_step);
    const double alpha = step_scale(c_step);
    res.step = up_down_factors(params.r + res.omega + params.theta, res.dt, alpha);

    const int n = cfg.n_steps;
    const double log_s0 = std::log(spec.spot);
    auto log_price = [&](int level, int i) { return log_s0 + level * res.step.b_step + (4 * level - 2 * i) * alpha; };

    std::vector<double> values(static_cast<std::size_t>(4 * n + 1));
    for (int i = 0; i <= 4 * n; ++i) {
        const double lp = log_price(n, i);
        if (spec.type == OptionType::Call && lp > kMaxLogPrice) {
            throw NumericalError("lattice call payoff overflows double (reduce N or alpha)");
        }
        values[static_cast<std::size_t>(i)] = spec.payoff(std::exp(lp));
    }

    const double disc = std::exp(-params.r * res.dt);
    const auto& p = res.probabilities.p;
    const bool american = spec.style == ExerciseStyle::American;
    for (int level = n - 1; level >= 0; --level) {
        const int count = 4 * level + 1;
        // Ascending i reads only indices >= i, which are still level+1 values.
        for (int i = 0; i < count; ++i) {
            const std::size_t k = static_cast<std::size_t>(i);
            double cont = p[0] * values[k] + p[1] * values[k + 1] + p[2] * values[k + 2] + p[3] * values[k + 3] +
                          p[4] * values[k + 4];
            cont *= disc;
            if (american) {
                const double exercise = spec.payoff(std::exp(log_price(level, i)));
                if (exercise > cont) cont = exercise;
            }
            values[k] = cont;
        }
    }
    res.price = values[0];
    return res;
}

double price_lattice(const OptionSpec& spec, const VgParams& params, const LatticeConfig& cfg) {
    return price_lattice_detailed(spec, params, cfg).price;
}

double binomial_bs_price(const OptionSpec& spec, double sigma_bs, double r, int n_steps) {
    spec.validate();
    if (!(sigma_bs > 0.0) || !std::isfinite(sigma_bs)) throw DomainError("binomial: sigma must be > 0");
    if (n_steps < 1) throw DomainError("binomial: N must be >= 1");
    if (!std::isfinite(r)) throw DomainError("binomial: rate must be finite");

    const double dt = spec.maturity / n_steps;
    const double up = std::exp(sigma_bs * std::sqrt(dt));
    const double down = 1.0 / up;
    const double q = (std::exp(r * dt) - down) / (up - down);
    if (!(q > 0.0 && q < 1.0)) throw DomainError("binomial: risk-neutral probability outside (0, 1)");
    const double disc = std::exp(-r * dt);
    const double log_s0 = std::log(spec.spot);
    const double log_up = std::log(up);
    auto price_at = [&](int level, int i) { return std::exp(log_s0 + (level - 2 * i) * log_up); };

    std::vector<double> values(static_cast<std::size_t>(n_steps + 1));
    for (int i = 0; i <= n_steps; ++i) values[static_cast<std::size_t>(i)] = spec.payoff(price_at(n_steps, i));
    const bool american = spec.style == ExerciseStyle::American;
    for (int level = n_steps - 1; level >= 0; --level) {
        for (int i = 0; i <= level; ++i) {
            const std::size_t k = static_cast<std::size_t>(i);
            double cont = disc * (q * values[k] + (1.0 - q) * values[k + 1]);
            if (american) cont = std::max(cont, spec.payoff(price_at(level, i)));
            values[k] = cont;
        }
    }
    return values[0];
}

} // namespace vgtree
