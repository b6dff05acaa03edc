#include "vgtree/estimation.hpp"

#include "vgtree/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vgtree {
namespace {

constexpr int kMaxPolishIterations = 500;
constexpr double kPolishTolerance = 1e-15;

// Forward map (theta, sigma, kappa) -> (variance, skewness, kurtosis) at t = 1.
// Kept free of VgParams::validate: the martingale condition is irrelevant
// for a historical fit.
struct ModelMoments {
    double variance;
    double skewness;
    double kurtosis;
};

ModelMoments model_moments(double theta, double sigma, double kappa) {
    const double s2 = sigma * sigma;
    const double th2 = theta * theta;
    const double c2 = s2 + th2 * kappa;
    const double c3 = 2.0 * th2 * theta * kappa * kappa + 3.0 * s2 * theta * kappa;
    const double c4 = 3.0 * s2 * s2 * kappa + 12.0 * s2 * th2 * kappa * kappa + 6.0 * th2 * th2 * kappa * kappa * kappa;
    return {c2, c3 / std::pow(c2, 1.5), 3.0 + c4 / (c2 * c2)};
}

} // namespace

ReturnSeries log_returns_from_prices(std::span<const double> prices, std::string period_label) {
    ReturnSeries out;
    out.period_label = std::move(period_label);
    if (prices.size() < 2) return out;
    out.values.reserve(prices.size() - 1);
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!(prices[i] > 0.0) || !std::isfinite(prices[i])) {
            throw DomainError("prices must be finite and > 0 to form log-returns");
        }
        if (i > 0) out.values.push_back(std::log(prices[i] / prices[i - 1]));
    }
    return out;
}

SampleMoments sample_moments(const ReturnSeries& series) {
    const auto& x = series.values;
    if (x.size() < 2) throw DomainError("series too short: need at least 2 observations");
    for (double v : x) {
        if (!std::isfinite(v)) throw DomainError("series contains non-finite values");
    }
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) throw DomainError("series has zero variance");

    SampleMoments m;
    m.count = x.size();
    m.mean = mean;
    m.variance = m2 * n / (n - 1.0);
    m.skewness = m3 / std::pow(m2, 1.5);
    m.kurtosis = m4 / (m2 * m2);
    return m;
}

MomentResidual moment_residual(const VgEstimate& est, const SampleMoments& m) {
    const ModelMoments mm = model_moments(est.theta, est.sigma, est.kappa);
    MomentResidual r;
    r.model_variance = mm.variance;
    r.model_skewness = mm.skewness;
    r.model_kurtosis = mm.kurtosis;
    r.variance_error = mm.variance - m.variance;
    r.skewness_error = mm.skewness - m.skewness;
    r.kurtosis_error = mm.kurtosis - m.kurtosis;
    return r;
}

VgFit fit_vg_moments(const SampleMoments& m) {
    if (!(m.variance > 0.0)) throw DomainError("fit: variance must be > 0");
    if (!std::isfinite(m.skewness) || !std::isfinite(m.kurtosis)) throw DomainError("fit: moments must be finite");
    const double excess = m.kurtosis - 3.0;
    if (!(excess > 0.0)) {
        throw NotVgFittableError("kurtosis <= 3: no positive excess kurtosis for a VG fit; use the Normal fit");
    }

    VgFit fit;
    VgEstimate& st = fit.small_theta;
    st.sigma = std::sqrt(m.variance);
    st.kappa = excess / 3.0;
    st.theta = m.skewness * st.sigma / (3.0 * st.kappa);
    st.drift = m.mean - st.theta;
    fit.small_theta_residual = moment_residual(st, m);

    // Exact map with eps = theta^2 kappa / sigma^2:
    //   v = sigma^2 (1 + eps)
    //   s = theta kappa (3 + 2 eps) / (sigma (1 + eps)^{3/2})
    //   k = 3 kappa (1 + 4 eps + 2 eps^2) / (1 + eps)^2
    // Iterating from eps = 0 reproduces the closed form at step one.
    double eps = 0.0;
    VgEstimate cur = st;
    bool converged = false;
    int it = 0;
    for (; it < kMaxPolishIterations; ++it) {
        const double sigma = std::sqrt(m.variance / (1.0 + eps));
        const double kappa = excess * (1.0 + eps) * (1.0 + eps) / (3.0 * (1.0 + 4.0 * eps + 2.0 * eps * eps));
        const double theta = m.skewness * sigma * std::pow(1.0 + eps, 1.5) / (kappa * (3.0 + 2.0 * eps));
        const double next = theta * theta * kappa / (sigma * sigma);
        if (!std::isfinite(next) || !(kappa > 0.0)) break;
        cur = {theta, sigma, kappa, m.mean - theta};
        const double change = std::abs(next - eps);
        eps = next;
        if (change <= kPolishTolerance * std::max(1.0, eps)) {
            converged = true;
            ++it;
            break;
        }
    }

    fit.iterations = it;
    fit.refined = converged;
    const VgEstimate& best = converged ? cur : st;
    fit.theta = best.theta;
    fit.sigma = best.sigma;
    fit.kappa = best.kappa;
    fit.drift = best.drift;
    fit.residual = moment_residual(best, m);
    return fit;
}

double NormalFit::density(double x) const {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

NormalFit fit_normal(const SampleMoments& m) {
    if (!(m.variance > 0.0)) throw DomainError("fit_normal: zero variance");
    return {m.mean, std::sqrt(m.variance)};
}

DensityOverlay density_overlay_table(const ReturnSeries& series, int bins) {
    if (bins < 1) throw DomainError("density table: bins must be >= 1");
    if (series.values.size() < kMinFitLength) {
        throw DomainError("series too short: need at least " + std::to_string(kMinFitLength) + " observations");
    }
    DensityOverlay out;
    out.moments = sample_moments(series);
    out.normal = fit_normal(out.moments);
    try {
        VgFit fit = fit_vg_moments(out.moments);
        fit.params().validate();
        out.vg = fit;
    } catch (const DomainError& e) {
        out.vg_fallback_reason = e.what();
    }

    const auto [lo_it, hi_it] = std::minmax_element(series.values.begin(), series.values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    out.bin_width = (hi - lo) / bins;
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    for (double v : series.values) {
        auto b = static_cast<std::size_t>((v - lo) / out.bin_width);
        counts[std::min(b, counts.size() - 1)] += 1;
    }
    const double n = static_cast<double>(series.values.size());
    out.rows.reserve(counts.size());
    for (std::size_t b = 0; b < counts.size(); ++b) {
        OverlayRow row;
        row.bin_center = lo + (static_cast<double>(b) + 0.5) * out.bin_width;
        row.hist_density = static_cast<double>(counts[b]) / (n * out.bin_width);
        row.normal_density = out.normal.density(row.bin_center);
        if (out.vg) row.vg_density = pdf(out.vg->params(), 1.0, row.bin_center - out.vg->drift);
        out.rows.push_back(row);
    }
    return out;
}

} // namespace vgtree
