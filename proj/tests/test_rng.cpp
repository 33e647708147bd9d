#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "cfpe/rng.hpp"

namespace cfpe {
namespace {

using Counter = Philox4x32::Counter;

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox, KnownAnswers) {
    EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}), (Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, ReproducibleAndPositionAddressed) {
    RandomStream a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
    RandomStream c(42, 7);
    const auto block = Philox4x32::generate({0, 0, 7, 0}, {42, 0});
    EXPECT_EQ(c.next_u64(), (std::uint64_t{block[0]} << 32) | block[1]);
    EXPECT_EQ(c.next_u64(), (std::uint64_t{block[2]} << 32) | block[3]);
    EXPECT_EQ(c.blocks_used(), 1u);
}

TEST(RandomStream, StreamsAndSeedsDiffer) {
    std::set<std::uint64_t> firsts;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (std::uint64_t stream = 0; stream < 20; ++stream) firsts.insert(RandomStream(seed, stream).next_u64());
    }
    EXPECT_EQ(firsts.size(), 400u);
    // High words of seed and stream id are used too.
    EXPECT_NE(RandomStream(1ull << 40, 0).next_u64(), RandomStream(0, 0).next_u64());
    EXPECT_NE(RandomStream(0, 1ull << 40).next_u64(), RandomStream(0, 0).next_u64());
}

TEST(RandomStream, UniformMomentsAndRange) {
    RandomStream r(2024, 0);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
        sum_sq += u * u;
    }
    const double mean = sum / n;
    EXPECT_NEAR(mean, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
    EXPECT_NEAR(sum_sq / n - mean * mean, 1.0 / 12.0, 2e-3);
}

}  // namespace
}  // namespace cfpe
