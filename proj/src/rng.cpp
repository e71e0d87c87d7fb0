#include "pairclone/rng.hpp"

#include <algorithm>

namespace pairclone {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept
{
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

} // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream) : seed_ {seed}, stream_ {stream} {}

Philox4x32::Block Philox4x32::encrypt(Block ctr, Key key) noexcept
{
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

void Philox4x32::refill()
{
    const Block ctr {static_cast<std::uint32_t>(block_index_), static_cast<std::uint32_t>(block_index_ >> 32),
                     static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const Key key {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    buffer_ = encrypt(ctr, key);
    ++block_index_;
    next_word_ = 0;
}

Philox4x32::result_type Philox4x32::operator()()
{
    if (next_word_ > 2) refill();
    const std::uint64_t lo = buffer_[next_word_];
    const std::uint64_t hi = buffer_[next_word_ + 1];
    next_word_ += 2;
    return (hi << 32) | lo;
}

double log_gamma_variate(RngStream& rng, double shape)
{
    if (shape >= 1.0) {
        return std::log(std::gamma_distribution<double> {shape, 1.0}(rng));
    }
    // G(a) = G(a + 1) * U^(1/a)
    const double boosted = std::log(std::gamma_distribution<double> {shape + 1.0, 1.0}(rng));
    return boosted + std::log(uniform01(rng)) / shape;
}

void log_dirichlet_variate(RngStream& rng, std::span<const double> alpha, std::span<double> out)
{
    for (std::size_t i = 0; i < alpha.size(); ++i) out[i] = log_gamma_variate(rng, alpha[i]);
    const double total = log_sum_exp(out.first(alpha.size()));
    for (std::size_t i = 0; i < alpha.size(); ++i) out[i] -= total;
}

double log_sum_exp(std::span<const double> values) noexcept
{
    double top = -std::numeric_limits<double>::infinity();
    for (double v : values) top = std::max(top, v);
    if (!std::isfinite(top)) return top;
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - top);
    return top + std::log(sum);
}

int sample_log_categorical(RngStream& rng, std::span<const double> log_weights)
{
    double top = -std::numeric_limits<double>::infinity();
    for (double v : log_weights) top = std::max(top, v);
    if (top == -std::numeric_limits<double>::infinity() || std::isnan(top)) return -1;
    double sum = 0.0;
    for (double v : log_weights) sum += std::exp(v - top);
    double u = uniform01(rng) * sum;
    const int n = static_cast<int>(log_weights.size());
    int last = -1;
    for (int i = 0; i < n; ++i) {
        const double w = std::exp(log_weights[i] - top);
        if (w > 0.0) last = i;
        if (u < w) return i;
        u -= w;
    }
    return last;
}

int uniform_int(RngStream& rng, int lo, int hi)
{
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(static_cast<double>(span) * uniform01(rng));
}

} // namespace pairclone
