#include <gtest/gtest.h>

#include <set>

#include "bsdelab/philox.hpp"

namespace bsdelab {
namespace {

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST(Philox, KnownAnswers) {
    using C = Philox4x32::Counter;
    EXPECT_EQ(Philox4x32::block({0, 0, 0, 0}, {0, 0}),
              (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                {0xffffffff, 0xffffffff}),
              (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                {0xa4093822, 0x299f31d0}),
              (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterStream, ReproducibleAndDistinct) {
    CounterStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    std::set<std::uint64_t> firsts;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        firsts.insert(x);
        EXPECT_NE(x, c());
        EXPECT_NE(x, d());
    }
    EXPECT_EQ(firsts.size(), 100u);
}

TEST(CounterStream, UniformsInOpenUnitInterval) {
    EXPECT_GT(bits_to_open_unit(0), 0.0);
    EXPECT_LT(bits_to_open_unit(~std::uint64_t{0}), 1.0);
    CounterStream s(1, 0);
    double sum = 0.0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = s.next_uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    // mean of U(0,1) has standard error sqrt(1/12/n)
    EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(CounterStream, NormalMoments) {
    CounterStream s(9, 3);
    constexpr int n = 400000;
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s.next_normal();
        m1 += z;
        m2 += z * z;
    }
    m1 /= n;
    m2 /= n;
    EXPECT_NEAR(m1, 0.0, 5.0 / std::sqrt(double(n)));
    EXPECT_NEAR(m2, 1.0, 5.0 * std::sqrt(2.0 / n));
}

}  // namespace
}  // namespace bsdelab
