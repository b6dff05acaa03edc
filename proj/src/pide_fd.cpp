#include "vgtree/pide_fd.hpp"

#include "vgtree/errors.hpp"
#include "vgtree/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vgtree {
namespace {

constexpr double kBoundaryWarn = 1e-6;
constexpr double kGrowthLimit = 10.0;

// Far-field values at time-to-expiry tau.
double boundary_value(const OptionSpec& spec, double r, double x, double tau) {
    const double s = std::exp(x);
    const double pv_strike = spec.strike * std::exp(-r * tau);
    if (spec.type == OptionType::Put) {
        double v = pv_strike - s;
        if (spec.style == ExerciseStyle::American) v = std::max(v, spec.strike - s);
        return std::max(v, 0.0);
    }
    // No dividends: the American call is never exercised early.
    return std::max(s - pv_strike, 0.0);
}

} // namespace

UnitCumulants unit_cumulants(const VgParams& params) {
    const Cumulants c = cumulants(params, 1.0);
    return {c.c1, c.c2, c.c3, c.c4};
}

FdCoefficients fd_coefficients(const VgParams& params, double dt, double h) {
    params.validate();
    if (!(dt > 0.0) || !(h > 0.0)) throw DomainError("fd_coefficients: dt and h must be > 0");
    const UnitCumulants ct = unit_cumulants(params);
    const double drift = params.r + martingale_correction(params) + ct.ct1;
    const double h2 = h * h;
    const double h3 = h2 * h;
    const double h4 = h2 * h2;

    FdCoefficients c;
    c.p_plus_h = drift * dt / (2.0 * h) + ct.ct2 * dt / (2.0 * h2) - ct.ct3 * dt / (6.0 * h3) - ct.ct4 * dt / (6.0 * h4);
    c.p_minus_h = -drift * dt / (2.0 * h) + ct.ct2 * dt / (2.0 * h2) + ct.ct3 * dt / (6.0 * h3) - ct.ct4 * dt / (6.0 * h4);
    c.p_plus_2h = ct.ct3 * dt / (12.0 * h3) + ct.ct4 * dt / (24.0 * h4);
    c.p_minus_2h = -ct.ct3 * dt / (12.0 * h3) + ct.ct4 * dt / (24.0 * h4);
    c.p_0 = 1.0 - ct.ct2 * dt / h2 + ct.ct4 * dt / (4.0 * h4);
    c.r_factor = 1.0 / (1.0 + params.r * dt);
    return c;
}

LocalMoments local_moments(const FdCoefficients& c, double h) {
    const double w[5] = {c.p_plus_2h, c.p_plus_h, c.p_0, c.p_minus_h, c.p_minus_2h};
    const double step[5] = {2.0 * h, h, 0.0, -h, -2.0 * h};
    LocalMoments m;
    for (int k = 0; k < 5; ++k) {
        const double s = step[k];
        m.m1 += w[k] * s;
        m.m2 += w[k] * s * s;
        m.m3 += w[k] * s * s * s;
        m.m4 += w[k] * s * s * s * s;
    }
    return m;
}

void GridConfig::validate() const {
    if (!(x_max > x_min)) throw DomainError("grid: x_max must exceed x_min");
    if (n_space < 4) throw DomainError("grid: need at least 4 spatial cells");
    if (n_time < 1) throw DomainError("grid: need at least one time step");
}

double lattice_step(const VgParams& params, double dt) { return 2.0 * step_scale(cumulants(params, dt)); }

GridConfig default_grid(const OptionSpec& spec, const VgParams& params, int n_time, std::optional<double> h,
                        double half_width_sd) {
    spec.validate();
    params.validate();
    if (n_time < 1) throw DomainError("grid: need at least one time step");
    if (!(half_width_sd > 0.0)) throw DomainError("grid: half-width must be > 0");
    const double dt = spec.maturity / n_time;
    const double step = h.value_or(lattice_step(params, dt));
    if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("grid: h must be > 0");

    const UnitCumulants ct = unit_cumulants(params);
    const double drift = params.r + martingale_correction(params) + ct.ct1;
    const double centre = std::log(spec.spot) + 0.5 * drift * spec.maturity;
    const double half_width = half_width_sd * std::sqrt(ct.ct2 * spec.maturity);

    GridConfig g;
    g.n_space = std::max(4, static_cast<int>(std::ceil(2.0 * half_width / step)));
    g.x_min = centre - 0.5 * g.n_space * step;
    g.x_max = g.x_min + g.n_space * step;
    g.n_time = n_time;
    return g;
}

FdResult price_fd_detailed(const OptionSpec& spec, const VgParams& params, const GridConfig& grid) {
    spec.validate();
    params.validate();
    grid.validate();

    const double log_s0 = std::log(spec.spot);
    if (log_s0 < grid.x_min || log_s0 > grid.x_max) throw DomainError("fd: log S0 lies outside the grid");

    FdResult res;
    res.grid = grid;
    const double h = grid.h();
    const double dt = grid.dt(spec.maturity);
    res.coefficients = fd_coefficients(params, dt, h);
    const FdCoefficients& c = res.coefficients;

    // Two ghost layers on each side for the +-2h stencil; node i sits at index i + 2.
    const int nodes = grid.n_space + 1;
    const int total = nodes + 4;
    auto x_at = [&](int idx) { return grid.x_min + (idx - 2) * h; };

    std::vector<double> v(static_cast<std::size_t>(total));
    std::vector<double> next(v.size());
    std::vector<double> intrinsic(v.size());
    double bound = spec.strike;
    for (int idx = 0; idx < total; ++idx) {
        intrinsic[idx] = spec.payoff(std::exp(x_at(idx)));
        v[idx] = intrinsic[idx];
        bound = std::max(bound, intrinsic[idx]);
    }
    const double limit = kGrowthLimit * bound;
    const bool american = spec.style == ExerciseStyle::American;

    for (int m = 1; m <= grid.n_time; ++m) {
        const double tau = m * dt;
        for (int idx = 2; idx < total - 2; ++idx) {
            double val = c.r_factor * (c.p_plus_2h * v[idx + 2] + c.p_plus_h * v[idx + 1] + c.p_0 * v[idx] +
                                       c.p_minus_h * v[idx - 1] + c.p_minus_2h * v[idx - 2]);
            if (american && intrinsic[idx] > val) val = intrinsic[idx];
            next[idx] = val;
        }
        for (int idx : {0, 1, total - 2, total - 1}) next[idx] = boundary_value(spec, params.r, x_at(idx), tau);
        for (int idx : {2, total - 3}) {
            const double gap = std::abs(next[idx] - boundary_value(spec, params.r, x_at(idx), tau));
            res.boundary_mismatch = std::max(res.boundary_mismatch, gap);
        }
        double peak = 0.0;
        for (double x : next) {
            if (!std::isfinite(x)) throw InstabilityError("fd: non-finite option value (explicit scheme unstable)");
            peak = std::max(peak, std::abs(x));
        }
        if (peak > limit) {
            std::ostringstream msg;
            msg << "fd: explicit scheme unstable at step " << m << " (max |V| = " << peak << ", dt = " << dt
                << ", h = " << h << ")";
            throw InstabilityError(msg.str());
        }
        v.swap(next);
    }

    if (res.boundary_mismatch > kBoundaryWarn) {
        std::ostringstream msg;
        msg << "grid-too-narrow: edge nodes drift " << res.boundary_mismatch << " from the boundary asymptote";
        res.warnings.push_back(msg.str());
    }

    const double pos = (log_s0 - grid.x_min) / h;
    const int i0 = std::min(static_cast<int>(std::floor(pos)), grid.n_space - 1);
    const double w = pos - i0;
    res.price = (1.0 - w) * v[i0 + 2] + w * v[i0 + 3];
    return res;
}

double price_fd(const OptionSpec& spec, const VgParams& params, const GridConfig& grid) {
    return price_fd_detailed(spec, params, grid).price;
}

std::vector<P3Point> p3_curve(std::span<const double> kbar_grid, double c2, double dt) {
    if (!(c2 > 0.0) || !(dt > 0.0)) throw DomainError("p3_curve: c2 and dt must be > 0");
    std::vector<P3Point> out;
    out.reserve(kbar_grid.size());
    for (double kbar : kbar_grid) {
        if (!(kbar > 0.0)) throw DomainError("p3_curve: excess kurtosis must be > 0");
        const double alpha = std::sqrt(c2) * std::sqrt((3.0 + kbar) / 12.0);
        const double h = 2.0 * alpha;
        // ct2 dt = c2 and ct4 dt = kbar c2^2 for the step of length dt.
        const double c4 = kbar * c2 * c2;
        P3Point p;
        p.kbar = kbar;
        p.p3_mm = (3.0 + 2.0 * kbar) / (2.0 * (3.0 + kbar));
        p.p3_pde = 1.0 - c2 / (h * h) + c4 / (4.0 * h * h * h * h);
        out.push_back(p);
    }
    return out;
}

PositivityReport positivity_report(const VgParams& params, double dt, double h, std::optional<double> scan_lo,
                                   std::optional<double> scan_hi, int scan_points) {
    if (scan_points < 2) throw DomainError("positivity_report: need at least two scan points");
    PositivityReport rep;
    rep.dt = dt;
    rep.h = h;
    const FdCoefficients c = fd_coefficients(params, dt, h);
    const std::pair<const char*, double> named[] = {
        {"p_plus_2h", c.p_plus_2h}, {"p_plus_h", c.p_plus_h},     {"p_0", c.p_0},
        {"p_minus_h", c.p_minus_h}, {"p_minus_2h", c.p_minus_2h},
    };
    for (const auto& [name, value] : named) {
        if (value < 0.0) rep.negative.push_back({name, value});
    }
    rep.all_nonnegative = rep.negative.empty();

    const double alpha = 0.5 * lattice_step(params, dt);
    rep.scan_lo = scan_lo.value_or(0.5 * alpha);
    rep.scan_hi = scan_hi.value_or(4.0 * alpha);
    if (!(rep.scan_hi > rep.scan_lo) || !(rep.scan_lo > 0.0)) throw DomainError("positivity_report: bad scan range");

    const double step = (rep.scan_hi - rep.scan_lo) / (scan_points - 1);
    std::optional<bool> state;
    double start = rep.scan_lo;
    for (int i = 0; i < scan_points; ++i) {
        const double hh = rep.scan_lo + i * step;
        const bool ok = fd_coefficients(params, dt, hh).all_nonnegative();
        if (!state) {
            state = ok;
            start = hh;
        } else if (ok != *state) {
            const double edge = hh - 0.5 * step;
            (*state ? rep.nonnegative_h : rep.negative_h).push_back({start, edge});
            state = ok;
            start = edge;
        }
    }
    (*state ? rep.nonnegative_h : rep.negative_h).push_back({start, rep.scan_hi});
    return rep;
}

} // namespace vgtree
