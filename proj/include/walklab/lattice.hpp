#pragma once

// The randomly horizontally-oriented lattice: an i.i.d. +/-1 orientation per
// level y and the nearest-neighbour walk that moves vertically with
// probability p (p/2 up, p/2 down) and horizontally, in the direction of the
// current level's orientation, with probability 1-p.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "walklab/rng.hpp"

namespace walklab::lattice {

/// Lazily realized orientation field. Values are memoized per level; random
/// fields derive eps_y from a keyed draw on y, so the value of a level does not
/// depend on the order in which levels are queried.
class OrientationField {
public:
    static OrientationField random(const rng::RngStream& source);
    /// Every level carries `value` (+1 or -1).
    static OrientationField constant(int value);
    /// Levels given by an arbitrary rule; the rule must return +1 or -1.
    static OrientationField forced(std::function<int(std::int64_t)> rule);

    /// eps_y. Realizes and memoizes the level on first query.
    int at(std::int64_t y);

    /// Already realized levels in increasing order of y.
    std::vector<std::pair<std::int64_t, int>> realized() const;
    std::size_t realized_count() const noexcept { return realized_count_; }

private:
    OrientationField() = default;
    int draw(std::int64_t y) const;

    std::optional<rng::RngStream> source_;
    std::function<int(std::int64_t)> rule_;
    std::vector<std::int8_t> upper_;  // y >= 0 at index y
    std::vector<std::int8_t> lower_;  // y < 0 at index -y-1
    std::size_t realized_count_ = 0;
};

struct LatticeState {
    std::int64_t x = 0;
    std::int64_t y = 0;
    friend bool operator==(const LatticeState&, const LatticeState&) = default;
};

enum class Move { up, down, horizontal };

struct LatticeTrajectory {
    std::vector<LatticeState> states;
    double p = 2.0 / 3.0;
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    std::size_t steps() const noexcept { return states.empty() ? 0 : states.size() - 1; }
    const LatticeState& back() const { return states.back(); }
};

/// Validates p in (0,1]; throws std::invalid_argument.
void check_probability(double p);

/// Applies a move from the oriented edge set at the current level.
LatticeState apply_move(const LatticeState& state, Move move, OrientationField& field);

/// True when (from, to) is an edge of the oriented lattice.
bool is_legal_edge(const LatticeState& from, const LatticeState& to, OrientationField& field);

LatticeState step_lattice(const LatticeState& state, OrientationField& field, double p, rng::RngStream& stream);

LatticeTrajectory simulate_lattice(std::int64_t n_steps, double p, OrientationField& field, rng::RngStream& stream);

/// Endpoint only; same draws and result as simulate_lattice(...).back().
LatticeState simulate_lattice_endpoint(std::int64_t n_steps, double p, OrientationField& field,
                                       rng::RngStream& stream);

void write_trajectory_csv(std::ostream& out, const LatticeTrajectory& trajectory);
void write_field_csv(std::ostream& out, const OrientationField& field);

}  // namespace walklab::lattice
