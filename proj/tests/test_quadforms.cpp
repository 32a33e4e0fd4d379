#include <gtest/gtest.h>

#include "qfcover/classgroup.hpp"
#include "qfcover/quadforms.hpp"

using namespace qfcover;

namespace {

// Reduced primitive forms by a double loop over |b| <= a <= sqrt(|D|/3).
std::size_t naive_class_number(i64 D)
{
    std::size_t h = 0;
    for (i64 a = 1; 3 * a * a <= -D; ++a)
        for (i64 b = -a; b <= a; ++b) {
            i64 num = b * b - D;
            if (num % (4 * a))
                continue;
            i64 c = num / (4 * a);
            if (c < a || (b < 0 && (-b == a || a == c)))
                continue;
            if (std::gcd(std::gcd(a, b), c) == 1)
                ++h;
        }
    return h;
}

u64 brute_rep(QuadForm const &f, u64 n)
{
    u64 c = 0;
    i64 lim = static_cast<i64>(isqrt(4 * n)) + 2;
    for (i64 x = -lim; x <= lim; ++x)
        for (i64 y = -lim; y <= lim; ++y)
            if (f(x, y) == static_cast<i64>(n))
                ++c;
    return c;
}

u64 R(i64 D, u64 n)
{
    return rep_count(principal_form(D), n) / static_cast<u64>(units_for(D));
}

} // namespace

TEST(Reduce, ProducesReducedEquivalentForm)
{
    QuadForm f{7, 13, 11};  // D = 169 - 308 = -139
    auto r = reduce(f);
    EXPECT_TRUE(r.is_reduced());
    EXPECT_EQ(r.discriminant(), f.discriminant());
    for (u64 n = 1; n < 200; ++n)
        EXPECT_EQ(rep_count(r, n), rep_count(f, n));
    EXPECT_THROW(reduce({-1, 0, 1}), std::invalid_argument);
}

TEST(EnumerateReduced, KnownValues)
{
    EXPECT_EQ(enumerate_reduced(-4), (std::vector<QuadForm>{{1, 0, 1}}));
    EXPECT_EQ(enumerate_reduced(-20), (std::vector<QuadForm>{{1, 0, 5}, {2, 2, 3}}));
    EXPECT_EQ(enumerate_reduced(-23),
              (std::vector<QuadForm>{{1, 1, 6}, {2, 1, 3}, {2, -1, 3}}));
    EXPECT_EQ(class_number_enum(-3), 1u);
    EXPECT_THROW(enumerate_reduced(-12), std::invalid_argument);
    EXPECT_THROW(enumerate_reduced(5), std::invalid_argument);
}

TEST(EnumerateReduced, MatchesNaiveScan)
{
    for (i64 D = -3; D >= -5000; --D) {
        if (!is_fundamental_discriminant(D))
            continue;
        auto forms = enumerate_reduced(D);
        ASSERT_EQ(forms.size(), naive_class_number(D)) << D;
        EXPECT_EQ(forms.front(), principal_form(D));
        for (auto const &f : forms) {
            ASSERT_TRUE(f.is_reduced()) << D;
            ASSERT_TRUE(f.is_primitive()) << D;
            ASSERT_EQ(f.discriminant(), D);
        }
    }
}

TEST(RepCount, KnownValues)
{
    EXPECT_EQ(rep_count({1, 0, 1}, 5), 8u);
    EXPECT_EQ(rep_count({1, 0, 5}, 21), 8u);
    EXPECT_EQ(rep_count({1, 0, 2}, 3), 4u);
    EXPECT_EQ(principal_rep_count(1, 5), 8u);
    EXPECT_EQ(principal_rep_count(7, 11), 4u);
    EXPECT_EQ(principal_rep_count(2, 7), 0u);
}

TEST(RepCount, MatchesBruteForce)
{
    for (QuadForm f : std::vector<QuadForm>{{1, 1, 1}, {1, 0, 1}, {2, 1, 3}, {2, 2, 3}, {3, 2, 5}, {1, 1, 6}})
        for (u64 n = 1; n <= 300; ++n)
            ASSERT_EQ(rep_count(f, n), brute_rep(f, n)) << f << " " << n;
    for (u64 d = 1; d <= 12; ++d)
        for (u64 n = 1; n <= 300; ++n)
            ASSERT_EQ(principal_rep_count(d, n), brute_rep({1, 0, static_cast<i64>(d)}, n));
}

TEST(RepCount, ClassSumCountsIdeals)
{
    for (i64 D = -3; D >= -300; --D) {
        if (!is_fundamental_discriminant(D))
            continue;
        auto forms = enumerate_reduced(D);
        u64 w = static_cast<u64>(units_for(D));
        for (u64 n = 1; n <= 2000; ++n) {
            if (std::gcd(n, static_cast<u64>(-D)) != 1)
                continue;
            u64 s = 0;
            for (auto const &f : forms)
                s += rep_count(f, n);
            ASSERT_EQ(s, w * one_star_chi(n, D)) << D << " " << n;
        }
    }
}

// x^2 + d y^2 against the principal ideal count of Q(sqrt(-d)).
TEST(PrincipalRepresentations, SquarefreeOneTwoModFour)
{
    for (u64 d = 1; d <= 60; ++d) {
        if (!is_squarefree(d) || (d % 4 != 1 && d % 4 != 2))
            continue;
        i64 D = assoc_discriminant(static_cast<i64>(d)).D;
        u64 factor = d == 1 ? 4 : 2;
        for (u64 n = 1; n <= 5000; ++n)
            ASSERT_EQ(principal_rep_count(d, n), factor * R(D, n)) << d << " " << n;
    }
}

TEST(PrincipalRepresentations, PrimeSevenModEightOddN)
{
    for (u64 d : primes_up_to(200)) {
        if (d % 8 != 7)
            continue;
        i64 D = -static_cast<i64>(d);
        for (u64 n = 1; n <= 5000; n += 2)
            ASSERT_EQ(principal_rep_count(d, n), 2 * R(D, n)) << d << " " << n;
    }
}

TEST(PrincipalRepresentations, ThreeModFourIsBoundedWithStrictWitness)
{
    u64 strict = 0;
    for (u64 d = 3; d <= 60; d += 4) {
        if (!is_squarefree(d))
            continue;
        i64 D = -static_cast<i64>(d);
        u64 factor = d == 3 ? 6 : 2;
        for (u64 n = 1; n <= 5000; ++n) {
            u64 lhs = principal_rep_count(d, n), rhs = factor * R(D, n);
            ASSERT_LE(lhs, rhs) << d << " " << n;
            strict += lhs < rhs;
        }
    }
    EXPECT_GT(strict, 0u);
    // x^2 + 3y^2 = 7 only by (+-2, +-1), while 7 splits into two principal ideals
    EXPECT_EQ(principal_rep_count(3, 7), 4u);
    EXPECT_EQ(6 * R(-3, 7), 12u);
}
