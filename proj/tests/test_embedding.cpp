#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "walklab/embedding.hpp"
#include "walklab/errors.hpp"

using namespace walklab;
using embedding::JumpFamily;
using embedding::VerticalPath;
using lattice::OrientationField;

namespace {

const auto kTwoThirds = rng::GeometricParam::from_ratio(2, 3);

VerticalPath random_path(std::int64_t n, std::uint64_t seed) {
    auto s = rng::make_stream(seed, 0);
    return embedding::simulate_vertical(n, s);
}

}  // namespace

TEST_CASE("vertical walk") {
    auto s = rng::make_stream(1, 0);
    CHECK(embedding::simulate_vertical(0, s).values == std::vector<std::int64_t>{0});
    const auto path = embedding::simulate_vertical(1000, s);
    CHECK(path.steps() == 1000);
    CHECK(path[0] == 0);
    for (std::int64_t k = 1; k <= 1000; ++k) REQUIRE(std::abs(path[k] - path[k - 1]) == 1);
    CHECK_THROWS_AS(embedding::simulate_vertical(-1, s), std::invalid_argument);
}

TEST_CASE("local time by direct count") {
    const VerticalPath y{{0, 1, 0, -1}};
    const auto table = embedding::local_time(y, 3);
    CHECK(table.count(0) == 2);
    CHECK(table.count(1) == 1);
    CHECK(table.count(-1) == 1);
    CHECK(table.count(7) == 0);
    CHECK(table.total() == 4);
    CHECK(table.sup() == 2);
    CHECK(table.sum_of_squares() == 6);
    CHECK(embedding::local_time(y, 0).total() == 1);
    CHECK_THROWS_AS(embedding::local_time(y, 4), std::out_of_range);
    CHECK_THROWS_AS(embedding::local_time(y, -1), std::out_of_range);
}

TEST_CASE("local time mass is n + 1 on random paths") {
    const auto path = random_path(5000, 2);
    for (std::int64_t n : {0, 1, 17, 999, 5000}) CHECK(embedding::local_time(path, n).total() == n + 1);
}

TEST_CASE("scenery sum") {
    auto plus = OrientationField::constant(1);
    const auto path = random_path(100, 3);
    CHECK(embedding::scenery_sum(path, plus, 100) == 101);
    for (std::uint64_t r = 0; r < 1000; ++r) {
        const auto p = random_path(200, 100 + r);
        auto field = OrientationField::random(rng::make_stream(100 + r, 1));
        const auto table = embedding::local_time(p, 200);
        REQUIRE(embedding::scenery_sum(p, field, 200) == embedding::scenery_sum(table, field));
    }
    CHECK_THROWS_AS(embedding::scenery_sum(path, plus, 101), std::out_of_range);
}

TEST_CASE("streamed scenery endpoints match the stored path") {
    const auto base = rng::make_stream(4, 0);
    auto walk = base.split(rng::role::vertical);
    auto again = base.split(rng::role::vertical);
    auto field = OrientationField::random(base.split(rng::role::field));
    const std::vector<std::int64_t> horizons = {0, 10, 500, 2000};
    const auto ends = embedding::scenery_endpoints(horizons, walk, field);
    const auto path = embedding::simulate_vertical(2000, again);
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        CHECK(ends[i].n == horizons[i]);
        CHECK(ends[i].y == path[horizons[i]]);
        CHECK(ends[i].z == embedding::scenery_sum(path, field, horizons[i]));
    }
    const std::vector<std::int64_t> unsorted = {10, 5};
    CHECK_THROWS_AS(embedding::scenery_endpoints(unsorted, walk, field), std::invalid_argument);
}

TEST_CASE("jump family") {
    auto a = JumpFamily::random(rng::make_stream(5, 3), kTwoThirds);
    auto b = JumpFamily::random(rng::make_stream(5, 3), kTwoThirds);
    const auto late = a.at(-4, 9);
    for (std::int64_t i = 1; i <= 9; ++i) b.at(-4, i);
    CHECK(b.at(-4, 9) == late);
    std::int64_t sum = 0;
    for (std::int64_t i = 1; i <= 9; ++i) sum += a.at(-4, i);
    CHECK(a.partial_sum(-4, 9) == sum);
    CHECK(a.partial_sum(12, 0) == 0);
    CHECK_THROWS_AS(a.at(0, 0), std::out_of_range);
    auto ones = JumpFamily::constant(1, kTwoThirds);
    CHECK(ones.at(3, 5) == 1);
    CHECK(ones.partial_sum(3, 5) == 5);
}

TEST_CASE("horizontal embedding with forced jumps") {
    const auto path = random_path(300, 6);
    auto field = OrientationField::random(rng::make_stream(6, 1));
    auto zeros = JumpFamily::constant(0, kTwoThirds);
    auto ones = JumpFamily::constant(1, kTwoThirds);
    auto plus = OrientationField::constant(1);
    for (std::int64_t n : {1, 2, 50, 300}) {
        CHECK(embedding::embed_horizontal(path, field, zeros, n) == 0);
        CHECK(embedding::embed_horizontal(path, plus, ones, n) == n);
        CHECK(embedding::stopping_time_at(path, zeros, n) == n);
    }
    const auto t = embedding::stopping_times(path, zeros, 300);
    for (std::int64_t n = 0; n <= 300; ++n) REQUIRE(t[static_cast<std::size_t>(n)] == n);
}

TEST_CASE("incremental and literal embeddings agree; decomposition is exact") {
    for (const auto& param : {kTwoThirds, rng::GeometricParam::from_ratio(1, 2), rng::GeometricParam(0.3)}) {
        const auto path = random_path(400, 7);
        auto field = OrientationField::random(rng::make_stream(7, 1));
        auto jumps = JumpFamily::random(rng::make_stream(7, 2), param);
        const auto triple = embedding::embed(path, field, jumps);
        const auto t = embedding::stopping_times(path, jumps, 400);
        CHECK(t == triple.t);
        for (std::int64_t n = 1; n <= 400; ++n) {
            const auto i = static_cast<std::size_t>(n);
            REQUIRE(embedding::embed_horizontal(path, field, jumps, n) == triple.x[i]);
            REQUIRE(embedding::stopping_time_at(path, jumps, n) == triple.t[i]);
            REQUIRE(embedding::scenery_sum(path, field, n) == triple.z[i]);
            REQUIRE(triple.t[i] > triple.t[i - 1]);
            const double x1 = embedding::centered_horizontal(path, field, jumps, n);
            const double rebuilt = x1 + param.m() * static_cast<double>(triple.z[i - 1]);
            if (param.m() == 0.5 || param.m() == 1.0) {
                REQUIRE(rebuilt == static_cast<double>(triple.x[i]));
            } else {
                REQUIRE(std::abs(rebuilt - static_cast<double>(triple.x[i])) <= 1e-12 * (1 + std::abs(rebuilt)));
            }
        }
    }
}

TEST_CASE("inverse times") {
    std::vector<std::int64_t> identity(50);
    for (std::size_t k = 0; k < identity.size(); ++k) identity[k] = static_cast<std::int64_t>(k);
    for (std::int64_t n = 0; n < 50; ++n) CHECK(embedding::inverse_times(identity, n) == n);

    const std::vector<std::int64_t> shifted = {3, 5, 6, 10};
    CHECK_THROWS_AS(embedding::inverse_times(shifted, 2), std::domain_error);
    CHECK(embedding::inverse_times(shifted, 3) == 0);
    CHECK(embedding::inverse_times(shifted, 9) == 2);
    CHECK(embedding::inverse_times(shifted, 10) == 3);
    CHECK_THROWS_AS(embedding::inverse_times(shifted, 11), std::out_of_range);

    const auto path = random_path(1000, 8);
    auto jumps = JumpFamily::random(rng::make_stream(8, 2), kTwoThirds);
    const auto t = embedding::stopping_times(path, jumps, 1000);
    for (std::size_t k = 0; k < t.size(); ++k) REQUIRE(embedding::inverse_times(t, t[k]) == static_cast<std::int64_t>(k));
}

TEST_CASE("occupation fraction") {
    const VerticalPath y{{0, 1, 0, -1}};
    // n = 4, t = 1 needs Y_4, which this path does not have.
    CHECK_THROWS_AS(embedding::occupation_fraction(y, 4, 1.0, 0.0, 0.6), std::out_of_range);
    // [4 * 0.75] = 3: sites with 0 <= y/2 < 0.6 are {0, 1}; (N_3(0) + N_3(1)) / 4.
    CHECK(embedding::occupation_fraction(y, 4, 0.75, 0.0, 0.6) == 0.75);
    CHECK(embedding::occupation_fraction(y, 4, 0.75, -1e9, 1e9) == 1.0);  // ([nt] + 1) / n

    const auto path = random_path(1000, 9);
    CHECK(embedding::occupation_fraction(path, 1000, 0.5, -1e9, 1e9) == 501.0 / 1000.0);
    CHECK_THROWS_AS(embedding::occupation_fraction(path, 1000, 0.5, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(embedding::occupation_fraction(path, 0, 0.5, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(embedding::occupation_fraction(path, 1000, -0.1, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("coupled lattice walk hits (X_n, Y_n) at T_n") {
    for (const auto& param : {kTwoThirds, rng::GeometricParam::from_ratio(1, 2)}) {
        for (std::uint64_t r = 0; r < 20; ++r) {
            const auto run = embedding::coupled_simulation(300, param, 11, r);
            REQUIRE(run.lattice.states.size() == static_cast<std::size_t>(run.embedded.t.back()) + 1);
            for (std::size_t n = 0; n < run.embedded.t.size(); ++n) {
                const auto& m = run.lattice.states[static_cast<std::size_t>(run.embedded.t[n])];
                REQUIRE(m.x == run.embedded.x[n]);
                REQUIRE(m.y == run.embedded.y.values[n]);
                REQUIRE(run.vertical_moves_before[n] == static_cast<std::int64_t>(n));
            }
        }
    }
    CHECK_THROWS_AS(embedding::coupled_simulation(0, kTwoThirds, 1, 0), std::invalid_argument);
}

TEST_CASE("coupling with p = 1 is the vertical walk") {
    const auto run = embedding::coupled_simulation(200, rng::GeometricParam(1.0), 12, 0);
    for (std::size_t n = 0; n < run.embedded.t.size(); ++n) {
        CHECK(run.embedded.t[n] == static_cast<std::int64_t>(n));
        CHECK(run.lattice.states[n].x == 0);
        CHECK(run.lattice.states[n].y == run.embedded.y.values[n]);
    }
}

TEST_CASE("verify_coupling rejects a corrupted run") {
    auto run = embedding::coupled_simulation(100, kTwoThirds, 13, 0);
    auto field = OrientationField::random(rng::make_stream(13, 0).split(rng::role::field));
    CHECK_NOTHROW(embedding::verify_coupling(run, field));

    auto moved = run;
    moved.embedded.x[50] += 1;
    CHECK_THROWS_AS(embedding::verify_coupling(moved, field), IdentityViolation);

    auto illegal = run;
    illegal.lattice.states[10].x += 5;
    CHECK_THROWS_AS(embedding::verify_coupling(illegal, field), IdentityViolation);

    auto miscount = run;
    miscount.vertical_moves_before[7] += 1;
    CHECK_THROWS_AS(embedding::verify_coupling(miscount, field), IdentityViolation);
}

TEST_CASE("embedded csv") {
    const VerticalPath y{{0, 1, 0}};
    auto plus = OrientationField::constant(1);
    auto ones = JumpFamily::constant(1, kTwoThirds);
    const auto triple = embedding::embed(y, plus, ones);
    std::ostringstream out;
    embedding::write_embedded_csv(out, triple);
    CHECK(out.str() == "n,x,y,z,t\n0,0,0,1,0\n1,1,1,2,2\n2,2,0,3,4\n");
}
