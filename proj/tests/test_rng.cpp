#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "walklab/rng.hpp"

using namespace walklab::rng;

TEST_CASE("philox4x32-10 known-answer vectors") {
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("zigzag enumerates the integers") {
    CHECK(zigzag(0) == 0);
    CHECK(zigzag(-1) == 1);
    CHECK(zigzag(1) == 2);
    CHECK(zigzag(-2) == 3);
    CHECK(zigzag(2) == 4);
}

TEST_CASE("to_open_unit stays inside (0,1)") {
    CHECK(to_open_unit(0) > 0.0);
    CHECK(to_open_unit(~0ull) < 1.0);
}

namespace {

std::vector<std::uint64_t> first_draws(std::uint64_t seed, std::uint64_t id, int n = 100) {
    auto s = make_stream(seed, id);
    std::vector<std::uint64_t> v;
    for (int i = 0; i < n; ++i) v.push_back(s.next_u64());
    return v;
}

}  // namespace

TEST_CASE("streams are reproducible and separated") {
    CHECK(first_draws(1, 0) == first_draws(1, 0));
    CHECK(first_draws(1, 0) != first_draws(1, 1));
    CHECK(first_draws(1, 0) != first_draws(2, 0));
}

TEST_CASE("split children are distinct and deterministic") {
    const auto parent = make_stream(3, 9);
    std::set<std::uint64_t> ids;
    for (std::uint64_t tag = 1; tag <= 7; ++tag) ids.insert(parent.split(tag).stream_id());
    CHECK(ids.size() == 7);
    CHECK(parent.split(2).stream_id() == make_stream(3, 9).split(2).stream_id());
    CHECK(parent.split(2).stream_id() != make_stream(3, 10).split(2).stream_id());
}

TEST_CASE("keyed draws do not advance the stream") {
    auto a = make_stream(5, 0);
    auto b = make_stream(5, 0);
    const auto k1 = a.keyed(Domain::jump, 17, 3);
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.keyed(Domain::jump, 17, 3) == k1);
    CHECK(a.keyed(Domain::jump, 17, 4) != k1);
    CHECK(a.keyed(Domain::orientation, 17, 3) != k1);
}

TEST_CASE("stream works with <random> adaptors") {
    auto s = make_stream(11, 0);
    std::uniform_int_distribution<int> die(1, 6);
    for (int i = 0; i < 1000; ++i) {
        const int v = die(s);
        REQUIRE(v >= 1);
        REQUIRE(v <= 6);
    }
}

TEST_CASE("rademacher draws are fair signs") {
    auto s = make_stream(21, 0);
    constexpr int kN = 1000000;
    long sum = 0;
    long plus = 0;
    for (int i = 0; i < kN; ++i) {
        const int e = sample_rademacher(s);
        REQUIRE(std::abs(e) == 1);
        sum += e;
        plus += e > 0;
    }
    CHECK(std::abs(static_cast<double>(sum) / kN) < 0.004);
    const double expected = kN / 2.0;
    const double minus = kN - plus;
    const double chi2 = (plus - expected) * (plus - expected) / expected + (minus - expected) * (minus - expected) / expected;
    CHECK(chi2 < 10.828);  // chi-square(1) quantile at 0.999
}

TEST_CASE("geometric law on {0,1,...}") {
    const auto param = GeometricParam::from_ratio(2, 3);
    CHECK(param.m() == 0.5);
    CHECK(param.variance() == doctest::Approx(0.75));
    auto s = make_stream(22, 0);
    constexpr int kN = 1000000;
    double sum = 0;
    int zeros = 0, ones = 0;
    for (int i = 0; i < kN; ++i) {
        const auto k = sample_geometric(s, param);
        REQUIRE(k >= 0);
        sum += static_cast<double>(k);
        zeros += k == 0;
        ones += k == 1;
    }
    CHECK(std::abs(sum / kN - 0.5) < 0.004);
    CHECK(std::abs(static_cast<double>(zeros) / kN - 2.0 / 3.0) < 0.002);
    CHECK(std::abs(static_cast<double>(ones) / kN - 2.0 / 9.0) < 0.002);
}

TEST_CASE("geometric edge cases") {
    const GeometricParam certain(1.0);
    auto s = make_stream(23, 0);
    for (int i = 0; i < 1000; ++i) REQUIRE(sample_geometric(s, certain) == 0);
    CHECK_THROWS_AS(GeometricParam(0.0), std::invalid_argument);
    CHECK_THROWS_AS(GeometricParam(1.5), std::invalid_argument);
    CHECK_THROWS_AS(GeometricParam(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(GeometricParam::from_ratio(0, 3), std::invalid_argument);
    CHECK_THROWS_AS(GeometricParam::from_ratio(4, 3), std::invalid_argument);
    CHECK(GeometricParam::from_ratio(1, 2).m() == 1.0);
    // Inversion: u above 1-p lands on 0, u just below on 1.
    const auto p = GeometricParam::from_ratio(2, 3);
    CHECK(geometric_from_uniform(0.9, p) == 0);
    CHECK(geometric_from_uniform(0.3, p) == 1);
}

TEST_CASE("gaussian sampling") {
    auto s = make_stream(24, 0);
    auto t = make_stream(24, 0);
    CHECK(sample_gaussian(s, 0.0, 0.0) == 0.0);
    CHECK(s.next_u64() == t.next_u64());  // the degenerate draw consumed nothing
    CHECK_THROWS_AS(sample_gaussian(s, 0.0, -1.0), std::invalid_argument);

    constexpr int kN = 1000000;
    double m1 = 0, m2 = 0, m4 = 0;
    for (int i = 0; i < kN; ++i) {
        const double x = sample_gaussian(s, 0.0, 1.0);
        m1 += x;
        m2 += x * x;
        m4 += x * x * x * x;
    }
    m1 /= kN;
    CHECK(std::abs(m2 / kN - m1 * m1 - 1.0) < 0.006);
    CHECK(std::abs(m4 / kN - 3.0) < 0.05);
}

TEST_CASE("gaussian mean and scale") {
    auto s = make_stream(25, 0);
    constexpr int kN = 200000;
    double sum = 0, sq = 0;
    for (int i = 0; i < kN; ++i) {
        const double x = sample_gaussian(s, 2.0, 4.0);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / kN;
    CHECK(std::abs(mean - 2.0) < 4 * 2.0 / std::sqrt(kN));
    CHECK(std::abs(sq / kN - mean * mean - 4.0) < 0.06);
}

TEST_CASE("normals_from_block gives two independent standard normals") {
    const auto s = make_stream(26, 0);
    constexpr int kN = 200000;
    double a2 = 0, b2 = 0, ab = 0;
    for (int i = 0; i < kN; ++i) {
        const auto [a, b] = normals_from_block(s.keyed(Domain::scenery_plus, static_cast<std::uint64_t>(i)));
        a2 += a * a;
        b2 += b * b;
        ab += a * b;
    }
    const double se = std::sqrt(2.0 / kN);
    CHECK(std::abs(a2 / kN - 1.0) < 4 * se);
    CHECK(std::abs(b2 / kN - 1.0) < 4 * se);
    CHECK(std::abs(ab / kN) < 4 / std::sqrt(static_cast<double>(kN)));
}

TEST_CASE("sibling streams are uncorrelated") {
    auto a = make_stream(27, 0);
    auto b = make_stream(27, 1);
    constexpr int kN = 200000;
    double sum = 0;
    for (int i = 0; i < kN; ++i) sum += sample_rademacher(a) * sample_rademacher(b);
    CHECK(std::abs(sum / kN) < 4 / std::sqrt(static_cast<double>(kN)));
}
