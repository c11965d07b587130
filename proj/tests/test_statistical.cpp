// Monte Carlo checks at moderate sizes. References are exact finite-n
// moments where they exist and the continuum constants otherwise.
#include <stdexcept>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "walklab/embedding.hpp"
#include "walklab/lattice.hpp"
#include "walklab/parallel.hpp"
#include "walklab/scaling_limit.hpp"
#include "walklab/stats.hpp"

using namespace walklab;

namespace {

// E[sum_y N_n(y)^2] = (n+1) + 2 sum_{d=1}^{n} (n+1-d) P(S_d = 0) for the simple walk.
double expected_sum_of_squares(std::int64_t n) {
    double total = static_cast<double>(n + 1);
    double p0 = 1.0;  // P(S_{2k} = 0), updated by the ratio (2k-1)/(2k)
    for (std::int64_t k = 1; 2 * k <= n; ++k) {
        p0 *= static_cast<double>(2 * k - 1) / static_cast<double>(2 * k);
        total += 2.0 * static_cast<double>(n + 1 - 2 * k) * p0;
    }
    return total;
}

void check_close(const stats::Estimate& e, double reference, double k = 4.0) {
    CAPTURE(e.value);
    CAPTURE(e.std_error);
    CAPTURE(reference);
    CHECK(std::abs(e.value - reference) < k * e.std_error);
}

const double kC0 = 8.0 / (3.0 * std::sqrt(2.0 * std::numbers::pi));

}  // namespace

TEST_CASE("sum-of-squares oracle on small cases") {
    // n = 2: paths (+,+), (+,-), (-,+), (-,-); sum N^2 = 3, 5, 5, 3.
    CHECK(expected_sum_of_squares(2) == 4.0);
    CHECK(expected_sum_of_squares(1) == 2.0);
}

TEST_CASE("lattice vertical coordinate has variance p n") {
    constexpr std::int64_t kN = 2000;
    const double p = 2.0 / 3.0;
    const auto y = map_replicas(4000, default_thread_count(), [&](std::size_t r) {
        const auto base = rng::make_stream(11, r);
        auto field = lattice::OrientationField::random(base.split(rng::role::field));
        auto s = base.split(rng::role::lattice);
        return static_cast<double>(lattice::simulate_lattice_endpoint(kN, p, field, s).y) / std::sqrt(double(kN));
    });
    check_close(stats::variance_estimate(y), p);
}

TEST_CASE("vertical walk: variance n and Gaussian shape") {
    constexpr std::int64_t kN = 10000;
    const auto y = map_replicas(5000, default_thread_count(), [&](std::size_t r) {
        auto s = rng::make_stream(12, r);
        return static_cast<double>(embedding::simulate_vertical(kN, s).values.back()) / std::sqrt(double(kN));
    });
    check_close(stats::variance_estimate(y), 1.0);
    auto g = rng::make_stream(12, 1u << 20);
    std::vector<double> gaussian(y.size());
    for (auto& x : gaussian) x = g.next_standard_normal();
    CHECK_FALSE(stats::ks_two_sample(y, gaussian).rejected());
}

TEST_CASE("scenery sum variance matches the exact second moment") {
    constexpr std::int64_t kN = 1000;
    const std::vector<std::int64_t> horizons = {kN};
    const auto z = map_replicas(20000, default_thread_count(), [&](std::size_t r) {
        const auto base = rng::make_stream(13, r);
        auto field = lattice::OrientationField::random(base.split(rng::role::field));
        auto walk = base.split(rng::role::vertical);
        return static_cast<double>(embedding::scenery_endpoints(horizons, walk, field).front().z);
    });
    check_close(stats::variance_estimate(z), expected_sum_of_squares(kN));
    // The exact moment approaches the n^{3/2} constant from below.
    const double r4 = expected_sum_of_squares(10000) / std::pow(1e4, 1.5);
    const double r5 = expected_sum_of_squares(100000) / std::pow(1e5, 1.5);
    CHECK(r4 < r5);
    CHECK(r5 < kC0);
    CHECK(kC0 - r5 < 0.005);
}

TEST_CASE("centered horizontal remainder is negligible at the n^{3/4} scale") {
    const auto param = rng::GeometricParam::from_ratio(2, 3);
    double previous = INFINITY;
    for (std::int64_t n : {100, 1000, 10000}) {
        CAPTURE(n);
        const auto x1 = map_replicas(3000, default_thread_count(), [&](std::size_t r) {
            const auto base = rng::make_stream(14, r);
            auto walk = base.split(rng::role::vertical);
            const auto path = embedding::simulate_vertical(n, walk);
            auto field = lattice::OrientationField::random(base.split(rng::role::field));
            auto jumps = embedding::JumpFamily::random(base.split(rng::role::jumps), param);
            const double x = embedding::centered_horizontal(path, field, jumps, n);
            return x * x;
        });
        const auto e = stats::mean_estimate(x1);
        // Given Y the remainder is a signed sum of n independent centred jumps.
        check_close(e, static_cast<double>(n) * param.variance());
        const double scaled = e.value / std::pow(static_cast<double>(n), 1.5);
        CHECK(scaled < previous);
        previous = scaled;
    }
    CHECK(previous < 0.01);
}

TEST_CASE("continuum samples: B_1, Delta_1 and V_1") {
    limit::LimitSettings s;
    s.replicas = 20000;
    s.seed = 15;
    s.threads = default_thread_count();
    const auto set = limit::simulate_limit_samples(s);
    std::vector<double> b, d, di, v;
    for (const auto& x : set.samples) {
        b.push_back(x.b);
        d.push_back(x.delta);
        di.push_back(x.delta_integral);
        v.push_back(x.v);
    }
    check_close(stats::variance_estimate(b), 1.0);
    const auto ev = stats::mean_estimate(v);
    CHECK(std::abs(ev.value - kC0) < 0.05);
    const auto vd = stats::variance_estimate(d);
    CHECK(std::abs(vd.value - kC0) < std::max(0.05, 4 * vd.std_error));
    CHECK(std::abs(stats::mean_estimate(d).value) < 4 * stats::mean_estimate(d).std_error);
    CHECK_FALSE(stats::ks_two_sample(d, di).rejected());
}

TEST_CASE("occupation times jointly with the endpoint") {
    constexpr std::int64_t kN = 10000;
    constexpr std::size_t kReplicas = 10000;
    const auto discrete = map_replicas(kReplicas, default_thread_count(), [&](std::size_t r) {
        auto s = rng::make_stream(16, r);
        const auto path = embedding::simulate_vertical(kN, s);
        const double y = static_cast<double>(path.values.back()) / std::sqrt(double(kN));
        return embedding::occupation_fraction(path, kN, 1.0, 0.0, 1.0) * y * y;
    });
    const auto continuum = map_replicas(kReplicas, default_thread_count(), [&](std::size_t r) {
        auto s = rng::make_stream(17, r);
        const auto path = limit::simulate_brownian(1.0, 1e-4, s);
        const double b = path.values.back();
        return limit::occupation_time(path, 1.0, 0.0, 1.0) * b * b;
    });
    const auto a = stats::mean_estimate(discrete);
    const auto c = stats::mean_estimate(continuum);
    CAPTURE(a.value);
    CAPTURE(c.value);
    CHECK(std::abs(a.value - c.value) < 4 * std::hypot(a.std_error, c.std_error));
}
