#pragma once

// Continuum limit objects: discretized Brownian paths, binned local time,
// the Kesten-Spitzer value Delta_t = int L_t(x) dW(x), the self-intersection
// time V_t = int L_t(x)^2 dx and the dependence constants C(n).

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "walklab/rng.hpp"
#include "walklab/stats.hpp"
#include "walklab/types.hpp"

namespace walklab::limit {

struct BrownianPath {
    double dt = 0.0;
    double horizon = 0.0;
    std::vector<double> values;  // B_0 = 0, B_{k dt}

    std::int64_t steps() const noexcept { return static_cast<std::int64_t>(values.size()) - 1; }
    double at_time(double t) const;
};

/// Requires T > 0, 0 < dt <= T and T/dt within 1e-9 of an integer.
BrownianPath simulate_brownian(double horizon, double dt, rng::RngStream& stream);

/// centered: bin k covers [(k - 1/2) h, (k + 1/2) h), so bin 0 is centred on 0.
/// left_edge: bin k covers [k h, (k + 1) h).
enum class BinAlignment { centered, left_edge };

/// Occupation-time estimate of L_t on a grid of width h. Each time step
/// [k dt, (k+1) dt) is charged to the bin of its left endpoint B_{k dt}.
class ContinuumLocalTime {
public:
    ContinuumLocalTime(double h, double origin, double t, double dt, std::int64_t first_bin,
                       std::vector<std::int64_t> counts);

    double bin_width() const noexcept { return h_; }
    double origin() const noexcept { return origin_; }
    double horizon() const noexcept { return t_; }
    double dt() const noexcept { return dt_; }
    std::int64_t first_bin() const noexcept { return first_bin_; }
    std::int64_t last_bin() const noexcept { return first_bin_ + static_cast<std::int64_t>(counts_.size()) - 1; }
    std::span<const std::int64_t> counts() const noexcept { return counts_; }

    std::int64_t bin_of(double x) const noexcept;
    double bin_left(std::int64_t bin) const noexcept { return origin_ + static_cast<double>(bin) * h_; }
    /// L estimate on a bin: occupation time / h.
    double value(std::int64_t bin) const noexcept;
    /// L estimate in the bin containing x.
    double at(double x) const noexcept { return value(bin_of(x)); }
    /// sum over bins of L h; equals t up to rounding.
    double mass() const noexcept;
    /// Number of time steps charged; equals round(t / dt) exactly.
    std::int64_t step_count() const noexcept;
    /// sum over bins inside [a, b) of L h. a and b must be bin edges.
    double occupation(double a, double b) const;
    /// sum over bins of L^2 h.
    double self_intersection() const noexcept;

private:
    double h_, origin_, t_, dt_;
    std::int64_t first_bin_;
    std::vector<std::int64_t> counts_;
};

/// Requires 0 < t <= horizon of the path (t a multiple of dt) and h > 0.
ContinuumLocalTime continuum_local_time(const BrownianPath& path, double t, double h,
                                        BinAlignment alignment = BinAlignment::centered);

/// Lambda_t(a, b): time spent in [a, b) before t, by direct time counting on the path.
double occupation_time(const BrownianPath& path, double t, double a, double b);

enum class KsMode {
    /// sum over bins of L_bin * dW_bin; bins at or right of the origin bin use
    /// W_+, bins to its left use W_-. Increments are keyed draws of the stream,
    /// so profiles of the same path at several horizons share one scenery.
    integral,
    /// One draw N(0, sum L^2 h) from the stream's sequence.
    conditional,
};

double ks_sample(const ContinuumLocalTime& local_time, rng::RngStream& stream, KsMode mode);

double self_intersection(const ContinuumLocalTime& local_time);

/// C(n) = 2 int_{0<s<t<=1} (1-t+s)^{n/2} / sqrt(2 pi (t-s)) ds dt for even n >= 0.
/// Evaluated after u = t - s, u = v^2, which turns it into the polynomial
/// integral (4/sqrt(2 pi)) int_0^1 (1 - v^2)^{n/2+1} dv. Throws NonConvergence
/// when the panel count and its double disagree beyond the tolerance.
double cn_constant(int n, const QuadratureSettings& settings = {});

/// Same constant by tensor quadrature of the double integral over the triangle
/// (s = t - w^2 inside, t = r^2 outside). Independent cross-check of the reduction.
double cn_constant_double_integral(int n, const QuadratureSettings& settings = {});

CnTable cn_table(std::span<const int> orders, const QuadratureSettings& settings = {});
void write_cn_csv(std::ostream& out, const CnTable& table);

/// (m (1+m)^{-3/4} delta, (1+m)^{-1/2} b).
std::pair<double, double> scale_limit_pair(double delta, double b, double m);

struct LimitSettings {
    double horizon = 1.0;
    double dt = 1e-4;
    double h = 0.02;
    std::size_t replicas = 10000;
    std::uint64_t seed = 1;
    /// Distinguishes independent sample sets drawn under one seed.
    std::uint64_t family = 0;
    KsMode mode = KsMode::conditional;
    unsigned threads = 1;
};

struct LimitSampleSet {
    std::vector<LimitSample> samples;
    LimitSettings settings;
};

/// Replica r draws its path from make_stream(seed, r).split(family).split(role::brownian)
/// and its scenery from ...split(role::scenery_noise).
LimitSampleSet simulate_limit_samples(const LimitSettings& settings);

/// Columns replica,delta1,b1,v1.
void write_limit_csv(std::ostream& out, const LimitSampleSet& set);

struct SelfSimilarityReport {
    double c = 1.0;
    double delta_index = 0.75;
    double b_index = 0.5;
    stats::KsResult delta_ks;
    stats::KsResult b_ks;
    double level = stats::kKsLevel;

    bool delta_rejected() const noexcept { return delta_ks.rejected(level); }
    bool b_rejected() const noexcept { return b_ks.rejected(level); }
};

/// KS of c^{-delta_index} Delta_{ct} against Delta_t and c^{-b_index} B_{ct} against B_t.
SelfSimilarityReport self_similarity_check(std::span<const LimitSample> at_t, std::span<const LimitSample> at_ct,
                                           double c, double delta_index = 0.75, double b_index = 0.5);

}  // namespace walklab::limit
