#include "walklab/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "walklab/errors.hpp"

namespace walklab::embedding {

VerticalPath simulate_vertical(std::int64_t n, rng::RngStream& stream) {
    if (n < 0) throw std::invalid_argument("vertical path length must be nonnegative");
    VerticalPath path;
    path.values.resize(static_cast<std::size_t>(n) + 1);
    path.values[0] = 0;
    for (std::size_t k = 1; k < path.values.size(); ++k) {
        path.values[k] = path.values[k - 1] + (stream.next_bit() ? 1 : -1);
    }
    return path;
}

LocalTimeTable::LocalTimeTable(const VerticalPath& path, std::int64_t n) : horizon_(n) {
    if (n < 0 || n > path.steps()) {
        throw std::out_of_range("local time horizon " + std::to_string(n) + " outside path of " +
                                std::to_string(path.steps()) + " steps");
    }
    const auto first = path.values.begin();
    const auto last = first + n + 1;
    const auto [lo, hi] = std::minmax_element(first, last);
    min_site_ = *lo;
    counts_.assign(static_cast<std::size_t>(*hi - *lo + 1), 0);
    for (auto it = first; it != last; ++it) ++counts_[static_cast<std::size_t>(*it - min_site_)];
}

std::int64_t LocalTimeTable::count(std::int64_t y) const noexcept {
    if (y < min_site_ || y > max_site()) return 0;
    return counts_[static_cast<std::size_t>(y - min_site_)];
}

std::int64_t LocalTimeTable::total() const noexcept {
    std::int64_t s = 0;
    for (auto c : counts_) s += c;
    return s;
}

std::int64_t LocalTimeTable::sup() const noexcept { return *std::max_element(counts_.begin(), counts_.end()); }

std::int64_t LocalTimeTable::sum_of_squares() const noexcept {
    std::int64_t s = 0;
    for (auto c : counts_) s += c * c;
    return s;
}

LocalTimeTable local_time(const VerticalPath& path, std::int64_t n) { return LocalTimeTable(path, n); }

JumpFamily JumpFamily::random(const rng::RngStream& source, const rng::GeometricParam& param) {
    JumpFamily family(param);
    family.source_ = source;
    return family;
}

JumpFamily JumpFamily::constant(std::int64_t value, const rng::GeometricParam& param) {
    if (value < 0) throw std::invalid_argument("jumps are nonnegative");
    JumpFamily family(param);
    family.constant_ = value;
    return family;
}

std::int64_t JumpFamily::draw(std::int64_t y, std::int64_t i) const {
    if (!source_) return constant_;
    const auto block = source_->keyed(rng::Domain::jump, rng::zigzag(y), static_cast<std::uint32_t>(i));
    const std::uint64_t bits = (static_cast<std::uint64_t>(block[1]) << 32) | block[0];
    return rng::geometric_from_uniform(rng::to_open_unit(bits), param_);
}

std::vector<std::int64_t>& JumpFamily::prefix(std::int64_t y, std::int64_t count) {
    if (count < 0 || count > std::numeric_limits<std::uint32_t>::max()) {
        throw std::out_of_range("jump index out of range");
    }
    auto& levels = y >= 0 ? upper_ : lower_;
    const auto index = static_cast<std::size_t>(y >= 0 ? y : -(y + 1));
    if (index >= levels.size()) levels.resize(std::max(index + 1, levels.size() * 2));
    auto& sums = levels[index];
    if (sums.empty()) sums.push_back(0);
    while (static_cast<std::int64_t>(sums.size()) <= count) {
        const auto i = static_cast<std::int64_t>(sums.size());
        sums.push_back(sums.back() + draw(y, i));
    }
    return sums;
}

std::int64_t JumpFamily::at(std::int64_t y, std::int64_t i) {
    if (i < 1) throw std::out_of_range("jump indices start at 1");
    const auto& sums = prefix(y, i);
    return sums[static_cast<std::size_t>(i)] - sums[static_cast<std::size_t>(i - 1)];
}

std::int64_t JumpFamily::partial_sum(std::int64_t y, std::int64_t count) {
    return prefix(y, count)[static_cast<std::size_t>(count)];
}

namespace {

void check_horizon(const VerticalPath& path, std::int64_t n) {
    if (n < 0 || n > path.steps()) {
        throw std::out_of_range("horizon " + std::to_string(n) + " outside path of " + std::to_string(path.steps()) +
                                " steps");
    }
}

}  // namespace

std::int64_t scenery_sum(const VerticalPath& path, lattice::OrientationField& field, std::int64_t n) {
    check_horizon(path, n);
    std::int64_t z = 0;
    for (std::int64_t k = 0; k <= n; ++k) z += field.at(path[k]);
    return z;
}

std::int64_t scenery_sum(const LocalTimeTable& table, lattice::OrientationField& field) {
    std::int64_t z = 0;
    for (std::int64_t y = table.min_site(); y <= table.max_site(); ++y) {
        if (const auto c = table.count(y); c != 0) z += field.at(y) * c;
    }
    return z;
}

std::int64_t embed_horizontal(const VerticalPath& path, lattice::OrientationField& field, JumpFamily& jumps,
                              std::int64_t n) {
    check_horizon(path, n);
    if (n == 0) return 0;
    const auto table = local_time(path, n - 1);
    std::int64_t x = 0;
    for (std::int64_t y = table.min_site(); y <= table.max_site(); ++y) {
        if (const auto c = table.count(y); c != 0) x += field.at(y) * jumps.partial_sum(y, c);
    }
    return x;
}

double centered_horizontal(const VerticalPath& path, lattice::OrientationField& field, JumpFamily& jumps,
                           std::int64_t n) {
    check_horizon(path, n);
    if (n == 0) return 0.0;
    const auto table = local_time(path, n - 1);
    const double m = jumps.param().m();
    double x1 = 0.0;
    for (std::int64_t y = table.min_site(); y <= table.max_site(); ++y) {
        const auto c = table.count(y);
        if (c == 0) continue;
        double level = 0.0;
        for (std::int64_t i = 1; i <= c; ++i) level += static_cast<double>(jumps.at(y, i)) - m;
        x1 += field.at(y) * level;
    }
    return x1;
}

std::vector<std::int64_t> stopping_times(const VerticalPath& path, JumpFamily& jumps, std::int64_t up_to) {
    check_horizon(path, up_to);
    std::vector<std::int64_t> times(static_cast<std::size_t>(up_to) + 1, 0);
    std::vector<std::int64_t> visits(static_cast<std::size_t>(2 * up_to + 1), 0);
    for (std::int64_t k = 0; k < up_to; ++k) {
        const auto y = path[k];
        const auto i = ++visits[static_cast<std::size_t>(y + up_to)];
        times[static_cast<std::size_t>(k + 1)] = times[static_cast<std::size_t>(k)] + 1 + jumps.at(y, i);
    }
    return times;
}

std::int64_t stopping_time_at(const VerticalPath& path, JumpFamily& jumps, std::int64_t n) {
    check_horizon(path, n);
    if (n == 0) return 0;
    const auto table = local_time(path, n - 1);
    std::int64_t t = n;
    for (std::int64_t y = table.min_site(); y <= table.max_site(); ++y) {
        if (const auto c = table.count(y); c != 0) t += jumps.partial_sum(y, c);
    }
    return t;
}

std::int64_t inverse_times(std::span<const std::int64_t> times, std::int64_t n) {
    if (times.empty() || n < times.front()) throw std::domain_error("inverse time: empty supremum");
    if (n > times.back()) {
        // T_{K+1} >= T_K + 1, so the supremum is only decided up to T_K.
        throw std::out_of_range("inverse time: horizon beyond the last stopping time");
    }
    const auto it = std::upper_bound(times.begin(), times.end(), n);
    return static_cast<std::int64_t>(it - times.begin()) - 1;
}

double occupation_fraction(const VerticalPath& path, std::int64_t n, double t, double a, double b) {
    if (n <= 0) throw std::invalid_argument("occupation fraction needs n >= 1");
    if (!(a < b)) throw std::invalid_argument("occupation fraction needs a < b");
    if (t < 0.0) throw std::invalid_argument("occupation fraction needs t >= 0");
    const auto k = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * t));
    const auto table = local_time(path, k);
    const double root = std::sqrt(static_cast<double>(n));
    std::int64_t mass = 0;
    for (std::int64_t y = table.min_site(); y <= table.max_site(); ++y) {
        const double scaled = static_cast<double>(y) / root;
        if (a <= scaled && scaled < b) mass += table.count(y);
    }
    return static_cast<double>(mass) / static_cast<double>(n);
}

EmbeddedTriple embed(const VerticalPath& path, lattice::OrientationField& field, JumpFamily& jumps) {
    const auto steps = path.steps();
    const auto size = static_cast<std::size_t>(steps) + 1;
    EmbeddedTriple triple;
    triple.y = path;
    triple.x.assign(size, 0);
    triple.z.assign(size, 0);
    triple.t.assign(size, 0);
    std::vector<std::int64_t> visits(static_cast<std::size_t>(2 * steps + 1), 0);
    for (std::int64_t k = 0; k <= steps; ++k) {
        const auto y = path[k];
        const int eps = field.at(y);
        const auto uk = static_cast<std::size_t>(k);
        triple.z[uk] = (k == 0 ? 0 : triple.z[uk - 1]) + eps;
        if (k == steps) break;
        const auto i = ++visits[static_cast<std::size_t>(y + steps)];
        const auto xi = jumps.at(y, i);
        triple.x[uk + 1] = triple.x[uk] + eps * xi;
        triple.t[uk + 1] = triple.t[uk] + 1 + xi;
    }
    return triple;
}

void write_embedded_csv(std::ostream& out, const EmbeddedTriple& triple) {
    out << "n,x,y,z,t\n";
    for (std::size_t n = 0; n < triple.x.size(); ++n) {
        out << n << ',' << triple.x[n] << ',' << triple.y.values[n] << ',' << triple.z[n] << ',' << triple.t[n]
            << '\n';
    }
}

lattice::LatticeTrajectory drive_lattice(const VerticalPath& path, lattice::OrientationField& field,
                                         JumpFamily& jumps) {
    const auto steps = path.steps();
    lattice::LatticeTrajectory trajectory;
    trajectory.p = jumps.param().p();
    trajectory.states.push_back({0, 0});
    std::vector<std::int64_t> visits(static_cast<std::size_t>(2 * steps + 1), 0);
    lattice::LatticeState state;
    for (std::int64_t k = 0; k < steps; ++k) {
        if (state.y != path[k]) throw IdentityViolation("driven walk left the vertical path");
        const auto i = ++visits[static_cast<std::size_t>(state.y + steps)];
        for (auto burst = jumps.at(state.y, i); burst > 0; --burst) {
            state = lattice::apply_move(state, lattice::Move::horizontal, field);
            trajectory.states.push_back(state);
        }
        const auto move = path[k + 1] > path[k] ? lattice::Move::up : lattice::Move::down;
        state = lattice::apply_move(state, move, field);
        trajectory.states.push_back(state);
    }
    return trajectory;
}

void verify_coupling(const CoupledRun& run, lattice::OrientationField& field) {
    const auto& states = run.lattice.states;
    const auto& e = run.embedded;
    for (std::size_t k = 1; k < states.size(); ++k) {
        if (!lattice::is_legal_edge(states[k - 1], states[k], field)) {
            throw IdentityViolation("illegal lattice move at step " + std::to_string(k));
        }
    }
    if (static_cast<std::int64_t>(states.size()) != e.t.back() + 1) {
        throw IdentityViolation("lattice length differs from T_N + 1");
    }
    for (std::size_t n = 0; n < e.t.size(); ++n) {
        const auto& m = states[static_cast<std::size_t>(e.t[n])];
        if (m.x != e.x[n] || m.y != e.y.values[n]) {
            throw IdentityViolation("M_{T_n} != (X_n, Y_n) at n = " + std::to_string(n));
        }
        if (run.vertical_moves_before[n] != static_cast<std::int64_t>(n)) {
            throw IdentityViolation("vertical move count before T_n differs from n at n = " + std::to_string(n));
        }
    }
}

CoupledRun coupled_simulation(std::int64_t n_vertical, const rng::GeometricParam& param, std::uint64_t master_seed,
                              std::uint64_t replica) {
    if (n_vertical < 1) throw std::invalid_argument("coupled simulation needs n_vertical >= 1");
    const auto base = rng::make_stream(master_seed, replica);
    auto walk = base.split(rng::role::vertical);
    auto field = lattice::OrientationField::random(base.split(rng::role::field));
    auto jumps = JumpFamily::random(base.split(rng::role::jumps), param);

    const auto path = simulate_vertical(n_vertical, walk);
    CoupledRun run;
    run.lattice = drive_lattice(path, field, jumps);
    run.lattice.master_seed = master_seed;
    run.lattice.stream_id = replica;
    run.embedded = embed(path, field, jumps);

    const auto& states = run.lattice.states;
    std::vector<std::int64_t> vertical_so_far(states.size(), 0);
    for (std::size_t k = 1; k < states.size(); ++k) {
        vertical_so_far[k] = vertical_so_far[k - 1] + (states[k].y != states[k - 1].y ? 1 : 0);
    }
    run.vertical_moves_before.reserve(run.embedded.t.size());
    for (const auto tn : run.embedded.t) {
        if (tn < 0 || tn >= static_cast<std::int64_t>(states.size())) {
            throw IdentityViolation("stopping time outside the lattice trajectory");
        }
        run.vertical_moves_before.push_back(vertical_so_far[static_cast<std::size_t>(tn)]);
    }
    verify_coupling(run, field);
    run.field_snapshot = field.realized();
    return run;
}

std::vector<SceneryEndpoint> scenery_endpoints(std::span<const std::int64_t> horizons, rng::RngStream& walk,
                                               lattice::OrientationField& field) {
    if (!std::is_sorted(horizons.begin(), horizons.end()) ||
        (!horizons.empty() && horizons.front() < 0)) {
        throw std::invalid_argument("horizons must be nonnegative and ascending");
    }
    std::vector<SceneryEndpoint> out;
    out.reserve(horizons.size());
    std::int64_t y = 0;
    std::int64_t z = field.at(0);
    std::int64_t k = 0;
    for (const auto n : horizons) {
        for (; k < n; ++k) {
            y += walk.next_bit() ? 1 : -1;
            z += field.at(y);
        }
        out.push_back({n, y, z});
    }
    return out;
}

}  // namespace walklab::embedding
