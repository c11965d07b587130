#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "walklab/lattice.hpp"

using namespace walklab;
using lattice::LatticeState;
using lattice::Move;
using lattice::OrientationField;

TEST_CASE("orientation is memoized and independent of query order") {
    const auto source = rng::make_stream(1, 2);
    auto forward = OrientationField::random(source);
    auto backward = OrientationField::random(source);
    const int first = forward.at(5);
    CHECK(forward.at(5) == first);
    std::vector<int> a, b(201);
    for (std::int64_t y = -100; y <= 100; ++y) a.push_back(forward.at(y));
    for (std::int64_t y = 100; y >= -100; --y) b[static_cast<std::size_t>(y + 100)] = backward.at(y);
    CHECK(a == b);
    CHECK(forward.realized_count() == 201);
    const auto realized = forward.realized();
    CHECK(realized.front().first == -100);
    CHECK(realized.back().first == 100);
}

TEST_CASE("orientation field is balanced") {
    auto field = OrientationField::random(rng::make_stream(3, 0));
    double sum = 0;
    constexpr std::int64_t kHalf = 100000;
    for (std::int64_t y = -kHalf; y <= kHalf; ++y) sum += field.at(y);
    CHECK(std::abs(sum / (2 * kHalf + 1)) < 0.01);
}

TEST_CASE("fields from distinct streams are decorrelated") {
    auto f = OrientationField::random(rng::make_stream(4, 0));
    auto g = OrientationField::random(rng::make_stream(4, 1));
    constexpr std::int64_t kN = 100000;
    double sum = 0;
    for (std::int64_t y = 0; y < kN; ++y) sum += f.at(y) * g.at(y);
    CHECK(std::abs(sum / kN) < 4.0 / std::sqrt(static_cast<double>(kN)));
}

TEST_CASE("constant and forced fields") {
    auto plus = OrientationField::constant(1);
    CHECK(plus.at(-7) == 1);
    auto alternating = OrientationField::forced([](std::int64_t y) { return y % 2 == 0 ? 1 : -1; });
    CHECK(alternating.at(2) == 1);
    CHECK(alternating.at(3) == -1);
    CHECK_THROWS_AS(OrientationField::constant(0), std::invalid_argument);
    auto broken = OrientationField::forced([](std::int64_t) { return 2; });
    CHECK_THROWS_AS(broken.at(0), std::invalid_argument);
}

TEST_CASE("moves follow the oriented edge set") {
    auto field = OrientationField::forced([](std::int64_t y) { return y == 0 ? 1 : -1; });
    const LatticeState o{0, 0};
    CHECK(lattice::apply_move(o, Move::horizontal, field) == LatticeState{1, 0});
    CHECK(lattice::apply_move({0, 1}, Move::horizontal, field) == LatticeState{-1, 1});
    CHECK(lattice::apply_move(o, Move::up, field) == LatticeState{0, 1});
    CHECK(lattice::apply_move(o, Move::down, field) == LatticeState{0, -1});
    CHECK(lattice::is_legal_edge(o, {1, 0}, field));
    CHECK_FALSE(lattice::is_legal_edge(o, {-1, 0}, field));
    CHECK(lattice::is_legal_edge({0, 1}, {-1, 1}, field));
    CHECK_FALSE(lattice::is_legal_edge(o, {1, 1}, field));
    CHECK_FALSE(lattice::is_legal_edge(o, o, field));
}

TEST_CASE("probability validation") {
    CHECK_THROWS_AS(lattice::check_probability(0.0), std::invalid_argument);
    CHECK_THROWS_AS(lattice::check_probability(1.5), std::invalid_argument);
    CHECK_THROWS_AS(lattice::check_probability(std::nan("")), std::invalid_argument);
    CHECK_NOTHROW(lattice::check_probability(1.0));
}

TEST_CASE("one-step law from the origin at p = 2/3, eps_0 = +1") {
    auto field = OrientationField::constant(1);
    auto s = rng::make_stream(5, 0);
    std::map<std::pair<std::int64_t, std::int64_t>, int> counts;
    constexpr int kN = 1000000;
    for (int i = 0; i < kN; ++i) {
        const auto next = lattice::step_lattice({0, 0}, field, 2.0 / 3.0, s);
        ++counts[{next.x, next.y}];
    }
    CHECK(counts.size() == 3);
    for (auto key : {std::pair<std::int64_t, std::int64_t>{1, 0}, {0, 1}, {0, -1}}) {
        CHECK(std::abs(counts[key] / double(kN) - 1.0 / 3.0) < 0.002);
    }
}

TEST_CASE("horizontal moves on a -1 level go left") {
    auto field = OrientationField::constant(-1);
    auto s = rng::make_stream(6, 0);
    for (int i = 0; i < 10000; ++i) {
        const auto next = lattice::step_lattice({0, 0}, field, 2.0 / 3.0, s);
        if (next.y == 0) REQUIRE(next.x == -1);
    }
}

TEST_CASE("p = 1 never moves horizontally") {
    auto field = OrientationField::random(rng::make_stream(7, 1));
    auto s = rng::make_stream(7, 0);
    int up = 0;
    constexpr int kN = 100000;
    for (int i = 0; i < kN; ++i) {
        const auto next = lattice::step_lattice({0, 0}, field, 1.0, s);
        REQUIRE(next.x == 0);
        up += next.y == 1;
    }
    CHECK(std::abs(up / double(kN) - 0.5) < 4 * 0.5 / std::sqrt(double(kN)));
}

TEST_CASE("trajectories") {
    auto field = OrientationField::random(rng::make_stream(8, 1));
    auto s = rng::make_stream(8, 0);
    const auto empty = lattice::simulate_lattice(0, 2.0 / 3.0, field, s);
    CHECK(empty.states.size() == 1);
    CHECK(empty.back() == LatticeState{0, 0});

    auto s1 = rng::make_stream(8, 2);
    auto s2 = rng::make_stream(8, 2);
    const auto path = lattice::simulate_lattice(5000, 2.0 / 3.0, field, s1);
    CHECK(path.steps() == 5000);
    for (std::size_t k = 1; k < path.states.size(); ++k) {
        REQUIRE(lattice::is_legal_edge(path.states[k - 1], path.states[k], field));
        if (path.states[k].y == path.states[k - 1].y) {
            REQUIRE(path.states[k].x - path.states[k - 1].x == field.at(path.states[k].y));
        }
    }
    CHECK(lattice::simulate_lattice_endpoint(5000, 2.0 / 3.0, field, s2) == path.back());
    CHECK_THROWS_AS(lattice::simulate_lattice(-1, 0.5, field, s), std::invalid_argument);
}

TEST_CASE("forced +1 field gives a non-decreasing horizontal coordinate") {
    auto field = OrientationField::constant(1);
    auto s = rng::make_stream(9, 0);
    const auto path = lattice::simulate_lattice(10000, 0.5, field, s);
    for (std::size_t k = 1; k < path.states.size(); ++k) REQUIRE(path.states[k].x >= path.states[k - 1].x);
}

TEST_CASE("vertical move count is binomial(n, p) in mean") {
    auto s = rng::make_stream(10, 0);
    constexpr int kReplicas = 2000;
    constexpr int kSteps = 500;
    const double p = 2.0 / 3.0;
    double sum = 0;
    for (int r = 0; r < kReplicas; ++r) {
        auto field = OrientationField::random(rng::make_stream(10, 1000 + r));
        const auto path = lattice::simulate_lattice(kSteps, p, field, s);
        int vertical = 0;
        for (std::size_t k = 1; k < path.states.size(); ++k) vertical += path.states[k].y != path.states[k - 1].y;
        sum += vertical;
    }
    const double se = std::sqrt(kSteps * p * (1 - p) / kReplicas);
    CHECK(std::abs(sum / kReplicas - kSteps * p) < 4 * se);
}

TEST_CASE("csv exports") {
    auto field = OrientationField::constant(1);
    lattice::LatticeTrajectory t;
    t.states = {{0, 0}, {1, 0}, {1, 1}};
    std::ostringstream out;
    lattice::write_trajectory_csv(out, t);
    CHECK(out.str() == "step,x,y\n0,0,0\n1,1,0\n2,1,1\n");
    field.at(-1);
    field.at(2);
    std::ostringstream f;
    lattice::write_field_csv(f, field);
    CHECK(f.str() == "y,epsilon\n-1,1\n2,1\n");
}
