#pragma once

// Discrete objects embedded in the lattice walk: the vertical simple random
// walk Y, its local times N_n(y), the scenery sum Z_n, the geometric-jump
// horizontal walk X_n, the stopping times T_n and their inverse U_n.
//
// Index conventions (checked against the lattice walk by coupled_simulation):
//   N_n(y)  counts time points 0..n, so sum_y N_n(y) = n + 1;
//   Z_n   = sum_{k=0}^{n} eps_{Y_k};
//   X_n   = sum_y eps_y sum_{i=1}^{N_{n-1}(y)} xi_i^{(y)},  X_0 = 0;
//   T_n   = n + sum_y sum_{i=1}^{N_{n-1}(y)} xi_i^{(y)},    T_0 = 0.
// The walk at time k sits on level Y_k for its N_k(Y_k)-th visit and makes
// xi_{N_k(Y_k)}^{(Y_k)} horizontal moves before the vertical move to Y_{k+1}.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "walklab/lattice.hpp"
#include "walklab/rng.hpp"

namespace walklab::embedding {

struct VerticalPath {
    std::vector<std::int64_t> values;  // Y_0 = 0, |Y_{k+1} - Y_k| = 1

    std::int64_t steps() const noexcept { return static_cast<std::int64_t>(values.size()) - 1; }
    std::int64_t operator[](std::int64_t k) const { return values[static_cast<std::size_t>(k)]; }
};

VerticalPath simulate_vertical(std::int64_t n, rng::RngStream& stream);

/// Occupation counts N_n(y) of time points 0..n.
class LocalTimeTable {
public:
    LocalTimeTable(const VerticalPath& path, std::int64_t n);

    std::int64_t horizon() const noexcept { return horizon_; }
    std::int64_t count(std::int64_t y) const noexcept;
    std::int64_t min_site() const noexcept { return min_site_; }
    std::int64_t max_site() const noexcept { return min_site_ + static_cast<std::int64_t>(counts_.size()) - 1; }
    std::int64_t total() const noexcept;
    std::int64_t sup() const noexcept;
    /// sum_y N_n(y)^2
    std::int64_t sum_of_squares() const noexcept;
    std::span<const std::int64_t> counts() const noexcept { return counts_; }

private:
    std::int64_t horizon_;
    std::int64_t min_site_ = 0;
    std::vector<std::int64_t> counts_;
};

/// Throws std::out_of_range when n is negative or exceeds the path.
LocalTimeTable local_time(const VerticalPath& path, std::int64_t n);

/// The doubly indexed geometric jumps xi_i^{(y)}, i >= 1. Random families
/// derive each jump from a keyed draw on (y, i); values are memoized as
/// per-level prefix sums.
class JumpFamily {
public:
    static JumpFamily random(const rng::RngStream& source, const rng::GeometricParam& param);
    /// Every jump equals `value`; `param` only supplies the centering mean m.
    static JumpFamily constant(std::int64_t value, const rng::GeometricParam& param);

    const rng::GeometricParam& param() const noexcept { return param_; }
    /// xi_i^{(y)}, i >= 1.
    std::int64_t at(std::int64_t y, std::int64_t i);
    /// sum_{i=1}^{count} xi_i^{(y)}; zero when count == 0.
    std::int64_t partial_sum(std::int64_t y, std::int64_t count);

private:
    explicit JumpFamily(const rng::GeometricParam& param) : param_(param) {}
    std::int64_t draw(std::int64_t y, std::int64_t i) const;
    std::vector<std::int64_t>& prefix(std::int64_t y, std::int64_t count);

    rng::GeometricParam param_;
    std::optional<rng::RngStream> source_;
    std::int64_t constant_ = 0;
    std::vector<std::vector<std::int64_t>> upper_;
    std::vector<std::vector<std::int64_t>> lower_;
};

/// Z_n = sum_{k=0}^{n} eps_{Y_k}, read along the path.
std::int64_t scenery_sum(const VerticalPath& path, lattice::OrientationField& field, std::int64_t n);
/// Z_n = sum_y eps_y N_n(y), read off the local-time table.
std::int64_t scenery_sum(const LocalTimeTable& table, lattice::OrientationField& field);

/// X_n by the double sum over levels and visit indices.
std::int64_t embed_horizontal(const VerticalPath& path, lattice::OrientationField& field, JumpFamily& jumps,
                              std::int64_t n);

/// X_n^{(1)} = sum_y eps_y sum_{i=1}^{N_{n-1}(y)} (xi_i^{(y)} - m), accumulated jump by jump.
double centered_horizontal(const VerticalPath& path, lattice::OrientationField& field, JumpFamily& jumps,
                           std::int64_t n);

/// T_0..T_up_to, built incrementally from the visit order of the path.
std::vector<std::int64_t> stopping_times(const VerticalPath& path, JumpFamily& jumps, std::int64_t up_to);
/// T_n by the double sum.
std::int64_t stopping_time_at(const VerticalPath& path, JumpFamily& jumps, std::int64_t n);

/// U_n = sup{k >= 0 : T_k <= n}. Throws std::domain_error when n < T_0 and
/// std::out_of_range when the sequence is too short to decide the supremum.
std::int64_t inverse_times(std::span<const std::int64_t> times, std::int64_t n);

/// (1/n) * sum over sites y with a <= y/sqrt(n) < b of N_{[nt]}(y).
double occupation_fraction(const VerticalPath& path, std::int64_t n, double t, double a, double b);

struct EmbeddedTriple {
    std::vector<std::int64_t> x;  // X_0..X_N
    VerticalPath y;               // Y_0..Y_N
    std::vector<std::int64_t> z;  // Z_0..Z_N
    std::vector<std::int64_t> t;  // T_0..T_N
};

/// X, Z and T along the whole path, computed incrementally.
EmbeddedTriple embed(const VerticalPath& path, lattice::OrientationField& field, JumpFamily& jumps);

void write_embedded_csv(std::ostream& out, const EmbeddedTriple& triple);

/// Lattice walk driven by a vertical path and a jump family: at time k the
/// walker makes xi_{N_k(Y_k)}^{(Y_k)} horizontal moves, then steps to Y_{k+1}.
/// Every move goes through lattice::apply_move.
lattice::LatticeTrajectory drive_lattice(const VerticalPath& path, lattice::OrientationField& field,
                                         JumpFamily& jumps);

struct CoupledRun {
    lattice::LatticeTrajectory lattice;
    EmbeddedTriple embedded;
    /// vertical_moves_before[n]: vertical moves among lattice steps 1..T_n.
    std::vector<std::int64_t> vertical_moves_before;
    std::vector<std::pair<std::int64_t, int>> field_snapshot;
};

/// Checks M_{T_n} = (X_n, Y_n), the vertical-move count and edge legality
/// for every n. Throws IdentityViolation on the first failure.
void verify_coupling(const CoupledRun& run, lattice::OrientationField& field);

/// Lattice walk and embedding from one replica stream: Y from
/// split(role::vertical), eps from split(role::field), xi from
/// split(role::jumps). Verifies the coupling before returning.
CoupledRun coupled_simulation(std::int64_t n_vertical, const rng::GeometricParam& param,
                              std::uint64_t master_seed, std::uint64_t replica);

struct SceneryEndpoint {
    std::int64_t n = 0;
    std::int64_t y = 0;  // Y_n
    std::int64_t z = 0;  // Z_n
};

/// Streams one vertical walk up to max(horizons) without storing it and
/// records (Y_n, Z_n) at each requested horizon (ascending order required).
std::vector<SceneryEndpoint> scenery_endpoints(std::span<const std::int64_t> horizons, rng::RngStream& walk,
                                               lattice::OrientationField& field);

}  // namespace walklab::embedding
