#include "wzlab/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using wzlab::Philox4x32;

namespace {

// Key given as two 32-bit words.
Philox4x32 keyed(std::uint32_t k0, std::uint32_t k1) {
    return Philox4x32{(std::uint64_t{k1} << 32) | k0};
}

}  // namespace

// Known-answer vectors from the Random123 distribution (kat_vectors, philox4x32_10).
TEST(Philox, KnownAnswerZero) {
    const auto out = keyed(0, 0)({0, 0, 0, 0});
    EXPECT_EQ(out, (Philox4x32::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
    const auto out = keyed(0xffffffffu, 0xffffffffu)({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out, (Philox4x32::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
    const auto out = keyed(0xa4093822u, 0x299f31d0u)({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u});
    EXPECT_EQ(out, (Philox4x32::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, StreamsAndIndicesDiffer) {
    const Philox4x32 g{7};
    EXPECT_NE(g.at(0, 0), g.at(1, 0));
    EXPECT_NE(g.at(0, 0), g.at(0, 1));
    EXPECT_EQ(g.at(3, 11), Philox4x32{7}.at(3, 11));
}

TEST(Philox, UniformsInOpenInterval) {
    EXPECT_GT(wzlab::to_open_unit(0, 0), 0.0);
    EXPECT_LT(wzlab::to_open_unit(0xffffffffu, 0xffffffffu), 1.0);
}

TEST(Philox, NormalMoments) {
    const Philox4x32 g{2024};
    const int n = 200000;
    double s1 = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n / 2; ++i) {
        for (double z : wzlab::normal_pair(g, 5, i)) {
            s1 += z;
            s2 += z * z;
            s4 += z * z * z * z;
        }
    }
    const double mean = s1 / n, var = s2 / n - mean * mean, kurt = s4 / n;
    // Tolerances about 4.5 standard errors.
    EXPECT_NEAR(mean, 0.0, 0.01);
    EXPECT_NEAR(var, 1.0, 0.015);
    EXPECT_NEAR(kurt, 3.0, 0.07);
}
