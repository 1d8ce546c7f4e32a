#pragma once

#include <array>
#include <cstdint>

namespace crystalwalk {

// Philox4x64-10 counter-based generator (Salmon et al., Random123 family).
// Chosen because replicate streams need no jump-ahead bookkeeping: the
// (seed, stream_id) pair is the key and the draw index is the counter, so
// any block can be produced independently and the sequence is identical on
// every platform. Output order matches NumPy's Philox bit generator
// (counter incremented before each block), which the known-answer tests
// rely on.
namespace philox {

inline constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ull;
inline constexpr std::uint64_t kMult1 = 0xCA5A826395121157ull;
inline constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

using Counter = std::array<std::uint64_t, 4>;
using Key = std::array<std::uint64_t, 2>;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

inline Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kMult0, ctr[0], hi0, lo0);
        mulhilo(kMult1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

}  // namespace philox

// One reproducible random stream: key = (seed, stream_id), 256-bit counter.
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_{seed, stream_id} {}

    std::uint64_t next_u64() {
        if (pos_ == 4) {
            increment_counter();
            buf_ = philox::block(ctr_, key_);
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Reposition so that the next output is the first word of block
    // `block_index` (blocks of four 64-bit words, counted from zero).
    void seek(std::uint64_t block_index) {
        ctr_ = {block_index, 0, 0, 0};
        pos_ = 4;
    }

private:
    void increment_counter() {
        for (int i = 0; i < 4; ++i) {
            if (++ctr_[i] != 0) break;
        }
    }

    philox::Counter ctr_{0, 0, 0, 0};
    philox::Key key_;
    philox::Counter buf_{};
    int pos_ = 4;
};

}  // namespace crystalwalk
