#include "walklab/lattice.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace walklab::lattice {

OrientationField OrientationField::random(const rng::RngStream& source) {
    OrientationField field;
    field.source_ = source;
    return field;
}

OrientationField OrientationField::constant(int value) {
    if (value != 1 && value != -1) throw std::invalid_argument("orientation must be +1 or -1");
    return forced([value](std::int64_t) { return value; });
}

OrientationField OrientationField::forced(std::function<int(std::int64_t)> rule) {
    if (!rule) throw std::invalid_argument("forced orientation needs a rule");
    OrientationField field;
    field.rule_ = std::move(rule);
    return field;
}

int OrientationField::draw(std::int64_t y) const {
    if (source_) {
        const auto block = source_->keyed(rng::Domain::orientation, rng::zigzag(y));
        return (block[0] & 1u) ? 1 : -1;
    }
    const int value = rule_(y);
    if (value != 1 && value != -1) throw std::invalid_argument("forced orientation rule returned a non-sign");
    return value;
}

int OrientationField::at(std::int64_t y) {
    auto& cache = y >= 0 ? upper_ : lower_;
    const auto index = static_cast<std::size_t>(y >= 0 ? y : -(y + 1));
    if (index >= cache.size()) cache.resize(std::max(index + 1, cache.size() * 2), 0);
    auto& slot = cache[index];
    if (slot == 0) {
        slot = static_cast<std::int8_t>(draw(y));
        ++realized_count_;
    }
    return slot;
}

std::vector<std::pair<std::int64_t, int>> OrientationField::realized() const {
    std::vector<std::pair<std::int64_t, int>> out;
    out.reserve(realized_count_);
    for (std::size_t i = lower_.size(); i-- > 0;) {
        if (lower_[i] != 0) out.emplace_back(-static_cast<std::int64_t>(i) - 1, lower_[i]);
    }
    for (std::size_t i = 0; i < upper_.size(); ++i) {
        if (upper_[i] != 0) out.emplace_back(static_cast<std::int64_t>(i), upper_[i]);
    }
    return out;
}

void check_probability(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0,1]");
}

LatticeState apply_move(const LatticeState& state, Move move, OrientationField& field) {
    switch (move) {
        case Move::up: return {state.x, state.y + 1};
        case Move::down: return {state.x, state.y - 1};
        case Move::horizontal: return {state.x + field.at(state.y), state.y};
    }
    return state;
}

bool is_legal_edge(const LatticeState& from, const LatticeState& to, OrientationField& field) {
    if (to.x == from.x) return to.y == from.y + 1 || to.y == from.y - 1;
    return to.y == from.y && to.x == from.x + field.at(from.y);
}

namespace {

inline LatticeState advance(const LatticeState& s, OrientationField& field, double half_p, double p,
                            rng::RngStream& stream) {
    const double u = stream.next_uniform();
    if (u < half_p) return {s.x, s.y + 1};
    if (u < p) return {s.x, s.y - 1};
    return {s.x + field.at(s.y), s.y};
}

}  // namespace

LatticeState step_lattice(const LatticeState& state, OrientationField& field, double p, rng::RngStream& stream) {
    check_probability(p);
    return advance(state, field, 0.5 * p, p, stream);
}

LatticeTrajectory simulate_lattice(std::int64_t n_steps, double p, OrientationField& field, rng::RngStream& stream) {
    check_probability(p);
    if (n_steps < 0) throw std::invalid_argument("n_steps must be nonnegative");
    LatticeTrajectory trajectory;
    trajectory.p = p;
    trajectory.master_seed = stream.master_seed();
    trajectory.stream_id = stream.stream_id();
    trajectory.states.reserve(static_cast<std::size_t>(n_steps) + 1);
    trajectory.states.push_back({0, 0});
    LatticeState state;
    for (std::int64_t k = 0; k < n_steps; ++k) {
        state = advance(state, field, 0.5 * p, p, stream);
        trajectory.states.push_back(state);
    }
    return trajectory;
}

LatticeState simulate_lattice_endpoint(std::int64_t n_steps, double p, OrientationField& field,
                                       rng::RngStream& stream) {
    check_probability(p);
    if (n_steps < 0) throw std::invalid_argument("n_steps must be nonnegative");
    LatticeState state;
    for (std::int64_t k = 0; k < n_steps; ++k) state = advance(state, field, 0.5 * p, p, stream);
    return state;
}

void write_trajectory_csv(std::ostream& out, const LatticeTrajectory& trajectory) {
    out << "step,x,y\n";
    for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
        out << k << ',' << trajectory.states[k].x << ',' << trajectory.states[k].y << '\n';
    }
}

void write_field_csv(std::ostream& out, const OrientationField& field) {
    out << "y,epsilon\n";
    for (const auto& [y, eps] : field.realized()) out << y << ',' << eps << '\n';
}

}  // namespace walklab::lattice
