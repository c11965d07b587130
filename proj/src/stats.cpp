#include "walklab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace walklab::stats {

namespace {

void require_samples(std::size_t n, std::size_t minimum, const char* what) {
    if (n < minimum) {
        throw std::invalid_argument(std::string(what) + ": needs at least " + std::to_string(minimum) + " samples");
    }
}

double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// Plug-in standard error of a mean: sample sd / sqrt(N).
double stderr_of_mean(std::span<const double> x, double mean) {
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const auto n = static_cast<double>(x.size());
    return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace

MomentEstimate moment_estimate(std::span<const double> samples, int k) {
    require_samples(samples.size(), 2, "moment_estimate");
    if (k < 0) throw std::invalid_argument("moment order must be nonnegative");
    std::vector<double> powered(samples.size());
    std::transform(samples.begin(), samples.end(), powered.begin(), [k](double x) { return std::pow(x, k); });
    const double mean = mean_of(powered);
    return {mean, stderr_of_mean(powered, mean), samples.size(), k};
}

Estimate mean_estimate(std::span<const double> samples) {
    require_samples(samples.size(), 2, "mean_estimate");
    const double mean = mean_of(samples);
    return {mean, stderr_of_mean(samples, mean), samples.size()};
}

Estimate variance_estimate(std::span<const double> samples) {
    require_samples(samples.size(), 2, "variance_estimate");
    const double mean = mean_of(samples);
    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : samples) {
        const double d2 = (v - mean) * (v - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    const auto n = static_cast<double>(samples.size());
    const double var = m2 / (n - 1.0);
    const double mu2 = m2 / n;
    const double mu4 = m4 / n;
    return {var, std::sqrt(std::max(0.0, mu4 - mu2 * mu2) / n), samples.size()};
}

Estimate covariance_estimate(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("covariance_estimate: length mismatch");
    require_samples(x.size(), 2, "covariance_estimate");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    std::vector<double> centered(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) centered[i] = (x[i] - mx) * (y[i] - my);
    const double cov = mean_of(centered);
    return {cov, stderr_of_mean(centered, cov), x.size()};
}

ScalingFit scaling_fit(std::span<const std::pair<double, double>> pairs) {
    if (pairs.size() < 3) throw std::invalid_argument("scaling_fit: needs at least 3 points");
    ScalingFit fit;
    for (const auto& [n, stat] : pairs) {
        if (!(n > 0.0)) throw std::invalid_argument("scaling_fit: nonpositive n");
        if (!(stat > 0.0)) throw std::invalid_argument("scaling_fit: nonpositive statistic");
        fit.points.emplace_back(std::log(n), std::log(stat));
    }
    const auto count = static_cast<double>(fit.points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [lx, ly] : fit.points) {
        sx += lx;
        sy += ly;
    }
    const double mx = sx / count;
    const double my = sy / count;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [lx, ly] : fit.points) {
        sxx += (lx - mx) * (lx - mx);
        sxy += (lx - mx) * (ly - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("scaling_fit: all n identical");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (const auto& [lx, ly] : fit.points) {
        const double r = ly - (fit.intercept + fit.slope * lx);
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / count);
    return fit;
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.0) {
        // Theta-function form, fast for small lambda: 1 - sqrt(2 pi)/lambda sum exp(-(2k-1)^2 pi^2 / (8 lambda^2)).
        const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
        double s = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const double j = 2.0 * k - 1.0;
            s += std::exp(-j * j * c);
        }
        return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s, 0.0, 1.0);
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    require_samples(a.size(), 100, "ks_two_sample");
    require_samples(b.size(), 100, "ks_two_sample");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const auto na = static_cast<double>(x.size());
    const auto nb = static_cast<double>(y.size());

    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }

    const double ne = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d), x.size(), y.size()};
}

CharFnEstimate empirical_char_fn(std::span<const double> samples, double theta) {
    require_samples(samples.size(), 100, "empirical_char_fn");
    std::vector<double> c(samples.size()), s(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        c[i] = std::cos(theta * samples[i]);
        s[i] = std::sin(theta * samples[i]);
    }
    const double re = mean_of(c);
    const double im = mean_of(s);
    return {re, im, stderr_of_mean(c, re), stderr_of_mean(s, im), samples.size()};
}

DependenceReport dependence_test(std::span<const LimitSample> samples, int n, const CnTable& table) {
    if (n != 2 && n != 4) throw std::invalid_argument("dependence_test: n must be 2 or 4");
    require_samples(samples.size(), kDependenceMinSamples, "dependence_test");

    std::vector<double> v(samples.size()), bn(samples.size()), joint(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        v[i] = samples[i].v;
        bn[i] = std::pow(samples[i].b, n);
        joint[i] = v[i] * bn[i];
    }

    DependenceReport report;
    report.order = n;
    report.count = samples.size();
    report.joint = mean_estimate(joint);
    report.v_mean = mean_estimate(v);
    report.b_moment = mean_estimate(bn);
    report.product = report.v_mean.value * report.b_moment.value;
    report.difference = covariance_estimate(v, bn);
    report.gaussian_moment = n == 2 ? 1.0 : 3.0;
    report.reference_joint = table.at(n) * report.gaussian_moment;
    report.reference_product = table.at(0) * report.gaussian_moment;
    report.reference_difference = report.reference_joint - report.reference_product;
    report.reject_independence = report.difference.lo() > 0.0 || report.difference.hi() < 0.0;
    return report;
}

double median(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("median of an empty sample");
    const auto mid = samples.size() / 2;
    std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(mid), samples.end());
    const double upper = samples[mid];
    if (samples.size() % 2 == 1) return upper;
    const double lower = *std::max_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

}  // namespace walklab::stats
