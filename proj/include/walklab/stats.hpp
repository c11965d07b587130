#pragma once

// Estimators and tests shared by all experiments. Every function here is a
// deterministic function of its input samples.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "walklab/types.hpp"

namespace walklab::stats {

/// Half-width multiplier of every confidence interval: estimate +/- 4 stderr.
inline constexpr double kCiStderrs = 4.0;
/// Significance level of acceptance KS tests.
inline constexpr double kKsLevel = 0.001;

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;

    double lo() const noexcept { return value - kCiStderrs * std_error; }
    double hi() const noexcept { return value + kCiStderrs * std_error; }
};

struct MomentEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
    int order = 1;
};

/// Sample mean of x^k with plug-in standard error sd(x^k)/sqrt(N).
/// Throws std::invalid_argument for fewer than 2 samples.
MomentEstimate moment_estimate(std::span<const double> samples, int k);

Estimate mean_estimate(std::span<const double> samples);
/// Unbiased sample variance; stderr from the fourth central moment.
Estimate variance_estimate(std::span<const double> samples);
/// cov(x, y) with an influence-function standard error.
Estimate covariance_estimate(std::span<const double> x, std::span<const double> y);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // root mean square of the log residuals
    std::vector<std::pair<double, double>> points;  // (log n, log statistic)
};

/// Least-squares line through (log n, log statistic). Needs >= 3 pairs with
/// positive n and statistic; throws std::invalid_argument otherwise.
ScalingFit scaling_fit(std::span<const std::pair<double, double>> pairs);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n_a = 0;
    std::size_t n_b = 0;

    bool rejected(double level = kKsLevel) const noexcept { return p_value < level; }
};

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

/// Two-sample KS statistic with the asymptotic p-value
/// Q((sqrt(Ne) + 0.12 + 0.11/sqrt(Ne)) D), Ne = n_a n_b / (n_a + n_b).
/// Needs >= 100 samples per side.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct CharFnEstimate {
    double re = 0.0;
    double im = 0.0;
    double std_error_re = 0.0;
    double std_error_im = 0.0;
    std::size_t count = 0;
};

/// Mean of exp(i theta x) with componentwise standard errors. Needs >= 100 samples.
CharFnEstimate empirical_char_fn(std::span<const double> samples, double theta);

struct DependenceReport {
    int order = 2;                  // n in E[V_1 B_1^n]
    Estimate joint;                 // E[V B^n]
    Estimate v_mean;                // E[V]
    Estimate b_moment;              // E[B^n]
    double product = 0.0;           // E[V] * E[B^n] from the same samples
    Estimate difference;            // E[V B^n] - E[V] E[B^n]
    double gaussian_moment = 0.0;   // exact E[B^n] = (n-1)!!
    double reference_joint = 0.0;   // C(n) E[B^n]
    double reference_product = 0.0; // C(0) E[B^n]
    double reference_difference = 0.0;
    double threshold = kCiStderrs;
    bool reject_independence = false;  // CI of the difference excludes 0
    std::size_t count = 0;
};

inline constexpr std::size_t kDependenceMinSamples = 10000;

/// Moment form of the dependence between V_1 and B_1. n must be 2 or 4 and
/// the table must hold C(0) and C(n). Throws std::invalid_argument for fewer
/// than kDependenceMinSamples samples.
DependenceReport dependence_test(std::span<const LimitSample> samples, int n, const CnTable& table);

/// Median of a copy of the samples.
double median(std::vector<double> samples);

}  // namespace walklab::stats
