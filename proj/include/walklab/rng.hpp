#pragma once

// Counter-based random streams (Philox4x32-10) and the sampling primitives
// shared by every simulation in the lab.
//
// A stream is identified by (master_seed, stream_id). Its draws are a pure
// function of that identity and the draw position, so a replica's randomness
// never depends on which worker ran it or in which order. Keyed draws
// (`RngStream::keyed`) address the generator by an explicit counter instead of
// the sequential position; the orientation field, the jump family and the
// scenery noise use them to stay query-order independent.

#include <array>
#include <cstdint>
#include <optional>

namespace walklab::rng {

using Block = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
Block philox4x32_10(Block counter, Key key) noexcept;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Maps a signed level onto an unsigned counter word: 0,-1,1,-2,2,... -> 0,1,2,3,4,...
constexpr std::uint64_t zigzag(std::int64_t v) noexcept {
    return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

/// Uniform double in the open interval (0,1) from the top 52 of 64 random bits;
/// 52 keeps (k + 1/2) 2^-52 exact, so the largest value is 1 - 2^-53.
constexpr double to_open_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Counter domains for keyed draws. Domain 0 is the sequential stream.
enum class Domain : std::uint32_t {
    sequential = 0,
    orientation = 1,
    jump = 2,
    scenery_plus = 3,
    scenery_minus = 4,
};

class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    /// Uniform in (0,1); never returns 0 or 1.
    double next_uniform();
    /// One fair bit. Bits are taken from a private 64-bit reservoir.
    bool next_bit();
    /// Standard normal, Box-Muller; the second variate of each pair is cached.
    double next_standard_normal();

    /// Child stream with the same master seed and a stream id derived from
    /// (stream_id, child). Children of distinct parents or tags are distinct.
    RngStream split(std::uint64_t child) const;

    /// Random block addressed by (domain, index, sub). Does not advance the stream.
    Block keyed(Domain domain, std::uint64_t index, std::uint32_t sub = 0) const noexcept;

    // UniformRandomBitGenerator, so <random> adaptors and std::shuffle work.
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() { return next_u64(); }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    Key key_;
    std::uint64_t position_ = 0;
    Block buffer_{};
    unsigned buffered_ = 0;
    std::uint64_t bits_ = 0;
    unsigned bits_left_ = 0;
    std::optional<double> spare_normal_;
};

RngStream make_stream(std::uint64_t master_seed, std::uint64_t stream_id);

/// Success probability p of a geometric law on {0,1,2,...} together with its
/// mean m = (1-p)/p. Built from a ratio the mean is exact in binary whenever
/// it is dyadic (p = 2/3 gives m = 0.5 exactly).
class GeometricParam {
public:
    /// p in (0,1]; throws std::invalid_argument otherwise.
    explicit GeometricParam(double p);
    /// p = num/den with 0 < num <= den.
    static GeometricParam from_ratio(std::int64_t num, std::int64_t den);

    double p() const noexcept { return p_; }
    double m() const noexcept { return m_; }
    double variance() const noexcept { return (1.0 - p_) / (p_ * p_); }
    /// log(1-p), cached for inversion sampling; -inf when p == 1.
    double log_failure() const noexcept { return log_q_; }

private:
    GeometricParam(double p, double m);
    double p_;
    double m_;
    double log_q_;
};

int sample_rademacher(RngStream& stream);
/// P[k] = p(1-p)^k, k >= 0.
std::int64_t sample_geometric(RngStream& stream, const GeometricParam& param);
/// Geometric draw from an explicit uniform in (0,1).
std::int64_t geometric_from_uniform(double u, const GeometricParam& param) noexcept;
/// N(mean, variance). variance == 0 returns mean without consuming a draw;
/// negative variance throws std::invalid_argument.
double sample_gaussian(RngStream& stream, double mean, double variance);

/// Two independent standard normals from one random block (Box-Muller).
std::array<double, 2> normals_from_block(const Block& block) noexcept;

}  // namespace walklab::rng

namespace walklab::rng::role {
// Tags passed to RngStream::split to carve independent roles out of a replica stream.
inline constexpr std::uint64_t vertical = 1;
inline constexpr std::uint64_t field = 2;
inline constexpr std::uint64_t jumps = 3;
inline constexpr std::uint64_t lattice = 4;
inline constexpr std::uint64_t brownian = 5;
inline constexpr std::uint64_t scenery_noise = 6;
inline constexpr std::uint64_t reference = 7;
}  // namespace walklab::rng::role
