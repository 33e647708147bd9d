#pragma once

// Counter-based random numbers (Philox4x32-10, Salmon et al. 2011).
//
// A stream is identified by (seed, stream id); draw i of that stream is a pure
// function of (seed, stream id, i). Monte Carlo run r uses stream id r, so runs
// can execute in any order or on any thread and still see identical numbers.

#include <array>
#include <cstdint>

namespace cfpe {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

// Sequential view of one Philox stream. Counter words 0-1 index the block,
// words 2-3 carry the stream id, and the key is the 64-bit seed.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_{static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)} {}

    std::uint64_t next_u64() {
        if (cursor_ == 2) refill();
        const std::uint64_t hi = buffer_[2 * cursor_];
        const std::uint64_t lo = buffer_[2 * cursor_ + 1];
        ++cursor_;
        return (hi << 32) | lo;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t blocks_used() const { return block_; }

private:
    void refill() {
        buffer_ = Philox4x32::generate({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                        stream_[0], stream_[1]},
                                       key_);
        ++block_;
        cursor_ = 0;
    }

    Philox4x32::Key key_;
    std::array<std::uint32_t, 2> stream_;
    Philox4x32::Counter buffer_{};
    std::uint64_t block_ = 0;
    int cursor_ = 2;
};

}  // namespace cfpe
