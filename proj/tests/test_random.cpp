#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hessmc/random.hpp"

#include <cmath>
#include <vector>

using namespace hessmc;

// Known-answer vectors of the Philox4x32-10 reference implementation.
TEST_CASE("philox known answers")
{
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;

    CHECK(Philox4x32::apply(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::apply(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::apply(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normal stream is a pure function of seed, path and draw index")
{
    NormalStream a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) CHECK(a.next() == b.next());
    CHECK(a.draws() == 1000);

    NormalStream other_path(42, 8), other_seed(43, 7), fresh(42, 7);
    int same_path = 0, same_seed = 0;
    for (int i = 0; i < 100; ++i) {
        const double x = fresh.next();
        same_path += other_path.next() == x;
        same_seed += other_seed.next() == x;
    }
    CHECK(same_path == 0);
    CHECK(same_seed == 0);
}

TEST_CASE("normal stream moments")
{
    constexpr int n = 1 << 20;
    double sum = 0, sum2 = 0, sum3 = 0, sum4 = 0;
    for (std::uint64_t p = 0; p < 64; ++p) {
        NormalStream s(2024, p);
        for (int i = 0; i < n / 64; ++i) {
            const double x = s.next();
            sum += x;
            sum2 += x * x;
            sum3 += x * x * x;
            sum4 += x * x * x * x;
        }
    }
    const double mean = sum / n, var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 5.0 / std::sqrt(n));
    CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(sum3 / n) < 5.0 * std::sqrt(15.0 / n));
    CHECK(std::abs(sum4 / n - 3.0) < 5.0 * std::sqrt(96.0 / n));
}

TEST_CASE("unit interval mapping stays in (0, 1]")
{
    CHECK(to_unit_interval(0) > 0.0);
    CHECK(to_unit_interval(~0ULL) == 1.0);
    CHECK(to_unit_interval(1ULL << 11) == 2.0 * 0x1.0p-53);
}
