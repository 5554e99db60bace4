#pragma once

#include <array>
#include <cstdint>

namespace hessmc {

/// Philox4x32-10 block cipher (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). A pure function of (counter, key).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter apply(Counter ctr, Key key);
};

/// Stream of standard normals for one Monte Carlo path.
///
/// Draw n of path p under seed s depends only on (s, p, n), so paths can be
/// simulated in any order on any number of workers.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t path_index);

    double next();

    std::uint64_t draws() const { return draws_; }

private:
    void refill();

    Philox4x32::Key key_;
    std::uint64_t path_index_;
    std::uint64_t block_ = 0;
    std::uint64_t draws_ = 0;
    double next_value_ = 0.0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Uniform in (0, 1] from the top 53 bits of a 64-bit word.
inline double to_unit_interval(std::uint64_t bits)
{
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

}  // namespace hessmc
