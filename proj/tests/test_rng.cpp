#include <array>
#include <cstdint>
#include <vector>

#include "doctest.h"

#include "crystalwalk/rng.hpp"

using crystalwalk::PhiloxStream;

namespace {

struct KnownAnswer {
    std::uint64_t seed;
    std::uint64_t stream;
    std::array<std::uint64_t, 8> words;
    std::array<double, 4> doubles;
};

// Frozen against an independent Philox4x64-10 implementation.
const KnownAnswer kVectors[] = {
    {0ull,
     0ull,
     {0x02f4ba6408e4d89bull, 0x3dd62b0b9ca8c5b2ull, 0x1c8667a55d902e79ull, 0x907d7a052fd5b4dcull,
      0x809bf322883987c3ull, 0x471128b9e807f7ddull, 0xf250ba0dbec065b7ull, 0xfc6ed66767a457bcull},
     {0.011546754286331562, 0.24154919656271812, 0.11142585551493822, 0.5644146216071337}},
    {0x123456789abcdef0ull,
     0ull,
     {0x6cbbf974e52b24dcull, 0xf7b1843d1e4fd656ull, 0xd8ff397f5c0b9a62ull, 0x8cb8647259442556ull,
      0x10d0a23ee520e17cull, 0x152955c118cda58aull, 0x7c6bbeb9c7d0f15dull, 0xcdf5f2a5ef692eafull},
     {0.42474326232801873, 0.9675524377074105, 0.8476444183288961, 0.549688604275858}},
    {0xdeadbeefull,
     7ull,
     {0x2f38dff29eecd0c2ull, 0xd496082438a471b9ull, 0xe725ec4612cd9616ull, 0x3799182d12a082d9ull,
      0xa144229e1d2b8ed4ull, 0xc95c0f42779ddbcaull, 0x7b48ad3af5423e3full, 0x6b5f44e05321c5f0ull},
     {0.18446159051284217, 0.8304143036299523, 0.9029224082067258, 0.2171797857323572}},
    {42ull,
     1ull,
     {0x719965f2debb5c86ull, 0xd0ff12852bfefaa0ull, 0x824f8a46917b59d3ull, 0x633af9b3183bb36aull,
      0x0665962d67a5a63aull, 0x58fb335daa5560b5ull, 0xf7121f0faa702e07ull, 0xc5ae1d90ae3ad1a6ull},
     {0.443746921343274, 0.8163920951010332, 0.5090261862073765, 0.3876186430208992}},
    {0xffffffffffffffffull,
     0xffffffffffffffffull,
     {0x6d46cc0e71f0be7eull, 0x924ea1693f9a8bc0ull, 0xfdc35f0198c91181ull, 0xb4a311f17aa6568dull,
      0x67e12c1eff8de57eull, 0x6877618422b87b0eull, 0x0b6af2bc95a81510ull, 0x941b27e5d2440b04ull},
     {0.4268615279451663, 0.5715123063997486, 0.9912623766802293, 0.705613252119883}},
};

}  // namespace

TEST_CASE("philox matches the frozen known-answer vectors") {
    for (const KnownAnswer& v : kVectors) {
        CAPTURE(v.seed);
        CAPTURE(v.stream);
        PhiloxStream words(v.seed, v.stream);
        for (const std::uint64_t expected : v.words) CHECK(words.next_u64() == expected);
        PhiloxStream doubles(v.seed, v.stream);
        for (const double expected : v.doubles) CHECK(doubles.next_double() == expected);
    }
}

TEST_CASE("distinct streams of the same seed produce distinct output") {
    PhiloxStream a(123, 0), b(123, 1);
    int equal = 0;
    for (int k = 0; k < 64; ++k) equal += (a.next_u64() == b.next_u64());
    CHECK(equal == 0);
}

TEST_CASE("seek jumps in whole output blocks") {
    PhiloxStream reference(0xabcdef, 3);
    std::vector<std::uint64_t> outputs;
    for (int k = 0; k < 16; ++k) outputs.push_back(reference.next_u64());

    PhiloxStream seeker(0xabcdef, 3);
    seeker.seek(2);  // skip the first two 4-word blocks
    for (int k = 8; k < 16; ++k) CHECK(seeker.next_u64() == outputs[static_cast<size_t>(k)]);

    seeker.seek(0);  // rewind to the very beginning
    for (int k = 0; k < 4; ++k) CHECK(seeker.next_u64() == outputs[static_cast<size_t>(k)]);
}

TEST_CASE("doubles land in the unit interval with 53-bit resolution") {
    PhiloxStream rng(2024, 11);
    double lo = 1.0, hi = 0.0;
    for (int k = 0; k < 20000; ++k) {
        const double u = rng.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}
