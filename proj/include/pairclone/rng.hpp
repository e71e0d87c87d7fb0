#pragma once

// Counter-based random streams.
//
// Every chain, scenario and helper draws from its own Philox4x32-10 stream.
// A stream is addressed by (seed, stream id); the 64-bit stream id occupies
// the upper half of the Philox counter, so streams never overlap and results
// do not depend on how work is scheduled across threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace pairclone {

class Philox4x32 {
public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32() : Philox4x32 {0, 0} {}
    Philox4x32(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// One block of the raw bijection, exposed for known-answer tests.
    static Block encrypt(Block counter, Key key) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_index_ = 0;
    Block buffer_ {};
    int next_word_ = 4;
};

using RngStream = Philox4x32;

/// Stream roles; combined with small indices into a stream id.
enum class StreamRole : std::uint16_t {
    Chain = 1,
    Scheduler = 2,
    Indicator = 3,
    Simulation = 4,
    Diagnostics = 5,
    Reference = 6,
};

constexpr std::uint64_t stream_id(StreamRole role, std::uint64_t a = 0, std::uint64_t b = 0) noexcept
{
    return (static_cast<std::uint64_t>(role) << 48) | ((a & 0xFFFFFF) << 24) | (b & 0xFFFFFF);
}

inline RngStream make_stream(std::uint64_t seed, StreamRole role, std::uint64_t a = 0, std::uint64_t b = 0)
{
    return RngStream {seed, stream_id(role, a, b)};
}

/// Uniform on the open interval (0, 1).
inline double uniform01(RngStream& rng)
{
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double standard_normal(RngStream& rng)
{
    return std::normal_distribution<double> {0.0, 1.0}(rng);
}

/// log of a Gamma(shape, 1) variate; finite even when the variate underflows.
double log_gamma_variate(RngStream& rng, double shape);

/// log of a Dirichlet(alpha) draw, written into out.
void log_dirichlet_variate(RngStream& rng, std::span<const double> alpha, std::span<double> out);

/// Index drawn with probabilities proportional to exp(log_weights).
/// Returns -1 if every weight is zero.
int sample_log_categorical(RngStream& rng, std::span<const double> log_weights);

/// Uniform integer in [lo, hi].
int uniform_int(RngStream& rng, int lo, int hi);

double log_sum_exp(std::span<const double> values) noexcept;

} // namespace pairclone
