#include "walklab/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace walklab::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

inline Block philox_round(const Block& c, const Key& k) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

Key derive_key(std::uint64_t master_seed, std::uint64_t stream_id) {
    const std::uint64_t k =
        splitmix64(splitmix64(master_seed) ^ (stream_id * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull));
    return {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

}  // namespace

Block philox4x32_10(Block counter, Key key) noexcept {
    counter = philox_round(counter, key);
    for (int r = 1; r < 10; ++r) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
        counter = philox_round(counter, key);
    }
    return counter;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id), key_(derive_key(master_seed, stream_id)) {}

std::uint32_t RngStream::next_u32() {
    if (buffered_ == 0) {
        const Block counter{static_cast<std::uint32_t>(position_),
                            static_cast<std::uint32_t>(position_ >> 32), 0u,
                            static_cast<std::uint32_t>(Domain::sequential)};
        buffer_ = philox4x32_10(counter, key_);
        ++position_;
        buffered_ = 4;
    }
    return buffer_[4 - buffered_--];
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

double RngStream::next_uniform() { return to_open_unit(next_u64()); }

bool RngStream::next_bit() {
    if (bits_left_ == 0) {
        bits_ = next_u64();
        bits_left_ = 64;
    }
    const bool bit = (bits_ & 1u) != 0;
    bits_ >>= 1;
    --bits_left_;
    return bit;
}

double RngStream::next_standard_normal() {
    if (spare_normal_) {
        const double z = *spare_normal_;
        spare_normal_.reset();
        return z;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = r * std::sin(angle);
    return r * std::cos(angle);
}

RngStream RngStream::split(std::uint64_t child) const {
    return RngStream(master_seed_, splitmix64(stream_id_ ^ splitmix64(child + 0x632BE59BD9B4E019ull)));
}

Block RngStream::keyed(Domain domain, std::uint64_t index, std::uint32_t sub) const noexcept {
    const Block counter{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), sub,
                        static_cast<std::uint32_t>(domain)};
    return philox4x32_10(counter, key_);
}

RngStream make_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
    return RngStream(master_seed, stream_id);
}

GeometricParam::GeometricParam(double p) : GeometricParam(p, (1.0 - p) / p) {}

GeometricParam::GeometricParam(double p, double m) : p_(p), m_(m), log_q_(std::log1p(-p)) {
    if (!(p > 0.0 && p <= 1.0)) {
        throw std::invalid_argument("geometric parameter p must lie in (0,1]");
    }
}

GeometricParam GeometricParam::from_ratio(std::int64_t num, std::int64_t den) {
    if (num <= 0 || den <= 0 || num > den) {
        throw std::invalid_argument("geometric ratio must satisfy 0 < num <= den");
    }
    return GeometricParam(static_cast<double>(num) / static_cast<double>(den),
                          static_cast<double>(den - num) / static_cast<double>(num));
}

int sample_rademacher(RngStream& stream) { return stream.next_bit() ? 1 : -1; }

std::int64_t geometric_from_uniform(double u, const GeometricParam& param) noexcept {
    if (param.p() >= 1.0) return 0;
    // P[xi >= k] = P[u <= (1-p)^k]
    return static_cast<std::int64_t>(std::floor(std::log(u) / param.log_failure()));
}

std::int64_t sample_geometric(RngStream& stream, const GeometricParam& param) {
    return geometric_from_uniform(stream.next_uniform(), param);
}

double sample_gaussian(RngStream& stream, double mean, double variance) {
    if (variance < 0.0 || std::isnan(variance)) {
        throw std::invalid_argument("gaussian variance must be nonnegative");
    }
    if (variance == 0.0) return mean;
    return mean + std::sqrt(variance) * stream.next_standard_normal();
}

std::array<double, 2> normals_from_block(const Block& block) noexcept {
    const double u1 = to_open_unit((static_cast<std::uint64_t>(block[1]) << 32) | block[0]);
    const double u2 = to_open_unit((static_cast<std::uint64_t>(block[3]) << 32) | block[2]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(angle), r * std::sin(angle)};
}

}  // namespace walklab::rng
