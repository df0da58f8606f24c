#include "markcalc/rate.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>

using markcalc::Rate;

TEST(Rate, LowestTerms) {
    Rate r(6, 4);
    EXPECT_EQ(r.numerator(), 3u);
    EXPECT_EQ(r.denominator(), 2u);
    EXPECT_EQ(Rate(0, 7), Rate::zero());
    EXPECT_EQ(Rate(0, 7).denominator(), 1u);
    EXPECT_THROW(Rate(1, 0), std::invalid_argument);
}

TEST(Rate, Arithmetic) {
    EXPECT_EQ(Rate(1, 2) + Rate(1, 3), Rate(5, 6));
    EXPECT_EQ(Rate(2, 3) * Rate(3, 4), Rate(1, 2));
    EXPECT_EQ(Rate(3, 2) - Rate(1, 2), Rate(1));
    EXPECT_THROW(Rate(1) - Rate(2), std::domain_error);
    EXPECT_EQ(scale(Rate(3, 2), 4), Rate(6));
    Rate acc;
    acc += Rate(1, 4);
    acc += Rate(3, 4);
    EXPECT_EQ(acc, Rate(1));
}

TEST(Rate, Ordering) {
    EXPECT_LT(Rate(1, 3), Rate(1, 2));
    EXPECT_GT(Rate(7, 2), Rate(3));
    EXPECT_EQ(Rate(2, 4) <=> Rate(1, 2), std::strong_ordering::equal);
}

TEST(Rate, OverflowIsReported) {
    const Rate big(std::numeric_limits<std::uint64_t>::max() / 2 + 1);
    EXPECT_THROW(big + big, std::overflow_error);
    EXPECT_THROW(big * Rate(2), std::overflow_error);
    EXPECT_THROW(Rate(1, std::numeric_limits<std::uint64_t>::max()) + Rate(1, std::numeric_limits<std::uint64_t>::max() - 1),
                 std::overflow_error);
}

TEST(Rate, ParseAndPrint) {
    Rate r;
    ASSERT_TRUE(Rate::parse("1.5", r));
    EXPECT_EQ(r, Rate(3, 2));
    ASSERT_TRUE(Rate::parse("12", r));
    EXPECT_EQ(r, Rate(12));
    ASSERT_TRUE(Rate::parse("6/8", r));
    EXPECT_EQ(r, Rate(3, 4));
    ASSERT_TRUE(Rate::parse("0.125", r));
    EXPECT_EQ(r, Rate(1, 8));
    EXPECT_FALSE(Rate::parse("", r));
    EXPECT_FALSE(Rate::parse("1/0", r));
    EXPECT_FALSE(Rate::parse("-1", r));
    EXPECT_FALSE(Rate::parse("1.", r));
    EXPECT_FALSE(Rate::parse("a", r));
    EXPECT_EQ(Rate(3, 2).to_string(), "3/2");
    EXPECT_EQ(Rate(4).to_string(), "4");
    EXPECT_EQ(Rate().to_string(), "0");
}

TEST(Rate, PrintParseRoundTrip) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::uint64_t> d(1, 100000);
    for (int i = 0; i < 500; ++i) {
        const Rate r(d(rng), d(rng));
        Rate back;
        ASSERT_TRUE(Rate::parse(r.to_string(), back));
        EXPECT_EQ(back, r);
    }
}

TEST(Rate, FieldLaws) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::uint64_t> d(1, 60);
    for (int i = 0; i < 300; ++i) {
        const Rate a(d(rng), d(rng)), b(d(rng), d(rng)), c(d(rng), d(rng));
        EXPECT_EQ(a + b, b + a);
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ((a + b) + c, a + (b + c));
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
        EXPECT_EQ((a + b) - b, a);
    }
}
