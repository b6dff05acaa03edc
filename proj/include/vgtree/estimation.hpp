#pragma once

// Method-of-moments fitting of VG and Normal laws to a log-return series.
// All fitted parameters are per observation period.

#include "vgtree/vg_model.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vgtree {

inline constexpr std::size_t kMinFitLength = 30;

struct ReturnSeries {
    std::vector<double> values;
    std::string period_label = "period";
};

/// log(p[i+1] / p[i]). Throws DomainError on non-positive or non-finite prices.
ReturnSeries log_returns_from_prices(std::span<const double> prices, std::string period_label = "period");

struct SampleMoments {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0; ///< unbiased
    double skewness = 0.0;
    double kurtosis = 0.0; ///< non-excess, m4 / m2^2
};

SampleMoments sample_moments(const ReturnSeries& series);

struct MomentResidual {
    double model_variance = 0.0;
    double model_skewness = 0.0;
    double model_kurtosis = 0.0;
    double variance_error = 0.0; ///< model - sample
    double skewness_error = 0.0;
    double kurtosis_error = 0.0;
};

struct VgEstimate {
    double theta = 0.0;
    double sigma = 0.0;
    double kappa = 0.0;
    double drift = 0.0; ///< location shift: sample mean - theta
};

struct VgFit {
    double theta = 0.0;
    double sigma = 0.0;
    double kappa = 0.0;
    double drift = 0.0;
    MomentResidual residual; ///< full cumulant map at the returned estimate

    VgEstimate small_theta;              ///< closed-form first pass
    MomentResidual small_theta_residual; ///< its deviation from the sample
    bool refined = false;                ///< exact-map polish converged
    int iterations = 0;

    VgParams params() const { return {theta, sigma, kappa, 0.0}; }
};

/// sigma^2 = v, kappa = kurt/3 - 1, theta = s sigma / (3 kappa), then a
/// fixed-point polish on the exact cumulant map. Throws NotVgFittableError
/// if kurt <= 3.
VgFit fit_vg_moments(const SampleMoments& m);

MomentResidual moment_residual(const VgEstimate& est, const SampleMoments& m);

struct NormalFit {
    double mu = 0.0;
    double sigma = 0.0;

    double density(double x) const;
};

NormalFit fit_normal(const SampleMoments& m);

struct OverlayRow {
    double bin_center = 0.0;
    double hist_density = 0.0;
    std::optional<double> vg_density;
    double normal_density = 0.0;
};

struct DensityOverlay {
    SampleMoments moments;
    std::optional<VgFit> vg;   ///< empty when the series is not VG-fittable
    std::string vg_fallback_reason;
    NormalFit normal;
    double bin_width = 0.0;
    std::vector<OverlayRow> rows;
};

/// Throws DomainError if the series is shorter than kMinFitLength or has zero variance.
DensityOverlay density_overlay_table(const ReturnSeries& series, int bins);

} // namespace vgtree
