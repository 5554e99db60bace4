#include "hessmc/random.hpp"

#include <cmath>
#include <numbers>

namespace hessmc {

namespace {

constexpr std::uint32_t kW32A = 0x9E3779B9;
constexpr std::uint32_t kW32B = 0xBB67AE85;
constexpr std::uint32_t kM4x32A = 0xD2511F53;
constexpr std::uint32_t kM4x32B = 0xCD9E8D57;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi)
{
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(product);
    hi = static_cast<std::uint32_t>(product >> 32);
}

inline Philox4x32::Counter round(const Philox4x32::Counter& c, const Philox4x32::Key& k)
{
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kM4x32A, c[0], lo0, hi0);
    mulhilo(kM4x32B, c[2], lo1, hi1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

Philox4x32::Counter Philox4x32::apply(Counter ctr, Key key)
{
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            key[0] += kW32A;
            key[1] += kW32B;
        }
        ctr = round(ctr, key);
    }
    return ctr;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t path_index)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      path_index_(path_index)
{
}

double NormalStream::next()
{
    ++draws_;
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    refill();
    has_cached_ = true;
    return next_value_;
}

void NormalStream::refill()
{
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                  static_cast<std::uint32_t>(block_ >> 32),
                                  static_cast<std::uint32_t>(path_index_),
                                  static_cast<std::uint32_t>(path_index_ >> 32)};
    ++block_;
    const auto out = Philox4x32::apply(ctr, key_);
    const std::uint64_t w0 = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    const std::uint64_t w1 = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];

    // Box-Muller
    const double radius = std::sqrt(-2.0 * std::log(to_unit_interval(w0)));
    const double angle = 2.0 * std::numbers::pi * to_unit_interval(w1);
    next_value_ = radius * std::cos(angle);
    cached_ = radius * std::sin(angle);
}

}  // namespace hessmc
