#include <gtest/gtest.h>

#include <complex>

#include "qfcover/classgroup.hpp"

using namespace qfcover;

namespace {

std::vector<i64> fundamental_down_to(i64 lo)
{
    std::vector<i64> out;
    for (i64 D = -3; D >= lo; --D)
        if (is_fundamental_discriminant(D))
            out.push_back(D);
    return out;
}

// Group-ring element of r(n, psi): coefficient k counts ideals with psi = zeta_e^k.
using Ring = std::vector<i64>;

Ring ring_add(Ring a, Ring const &b)
{
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] += b[i];
    return a;
}

Ring ring_mul(Ring const &a, Ring const &b)
{
    std::size_t e = a.size();
    Ring out(e, 0);
    for (std::size_t i = 0; i < e; ++i)
        if (a[i])
            for (std::size_t j = 0; j < e; ++j)
                out[(i + j) % e] += a[i] * b[j];
    return out;
}

// Classes of the ideals of norm p for an unramified prime p: psi values on them.
// Used by the character identities below.
struct PrimeIdeals
{
    std::vector<std::uint32_t> classes;  // one entry per prime ideal of norm p
};

PrimeIdeals prime_ideals(ClassGroup const &G, u64 p)
{
    PrimeIdeals out;
    auto counts = ideal_counts(G, p);
    for (std::uint32_t c = 0; c < G.h; ++c)
        for (u64 i = 0; i < counts[c]; ++i)
            out.classes.push_back(c);
    return out;
}

} // namespace

TEST(Compose, IdentityAndSmallGroups)
{
    auto forms = enumerate_reduced(-23);
    for (auto const &f : forms)
        EXPECT_EQ(compose(principal_form(-23), f), f);
    EXPECT_EQ(compose({2, 2, 3}, {2, 2, 3}), (QuadForm{1, 0, 5}));
    EXPECT_EQ(compose({2, 1, 3}, {2, -1, 3}), (QuadForm{1, 1, 6}));
    EXPECT_THROW(compose({1, 0, 1}, {1, 1, 1}), std::invalid_argument);
}

TEST(ClassGroup, KnownValues)
{
    auto g4 = build_class_group(-4);
    EXPECT_EQ(g4.h, 1u);
    EXPECT_EQ(g4.w, 4);
    auto g3 = build_class_group(-3);
    EXPECT_EQ(g3.h, 1u);
    EXPECT_EQ(g3.w, 6);
    auto g23 = build_class_group(-23);
    EXPECT_EQ(g23.h, 3u);
    EXPECT_TRUE(g23.is_cyclic());
    // D = -4 * 21 has class group (Z/2)^2
    auto g84 = build_class_group(-84);
    EXPECT_EQ(g84.h, 4u);
    EXPECT_FALSE(g84.is_cyclic());
    EXPECT_EQ(g84.exponent, 2u);
}

TEST(ClassGroup, GroupAxioms)
{
    for (i64 D : fundamental_down_to(-1500)) {
        auto G = build_class_group(D);
        std::size_t h = G.h;
        u64 basis = 1;
        for (auto m : G.rel_orders)
            basis *= m;
        ASSERT_EQ(basis, h) << D;
        for (std::uint32_t i = 0; i < h; ++i) {
            ASSERT_EQ(G.op(0, i), i);
            ASSERT_EQ(G.op(i, G.inv[i]), 0u);
            ASSERT_EQ(G.exponent % G.orders[i], 0u);
            for (std::uint32_t j = 0; j < h; ++j) {
                ASSERT_EQ(G.op(i, j), G.op(j, i));
                if (h <= 40) {
                    for (std::uint32_t k = 0; k < h; ++k)
                        ASSERT_EQ(G.op(G.op(i, j), k), G.op(i, G.op(j, k)));
                }
            }
        }
        // rows are permutations
        for (std::uint32_t i = 0; i < h; ++i) {
            std::vector<bool> seen(h, false);
            for (std::uint32_t j = 0; j < h; ++j)
                seen[G.op(i, j)] = true;
            for (bool s : seen)
                ASSERT_TRUE(s);
        }
    }
}

TEST(Characters, AreDistinctHomomorphisms)
{
    for (i64 D : fundamental_down_to(-1500)) {
        auto G = build_class_group(D);
        auto chars = characters(G);
        ASSERT_EQ(chars.size(), G.h);
        EXPECT_TRUE(chars[0].is_principal());
        for (std::size_t a = 0; a < chars.size(); ++a) {
            auto const &psi = chars[a];
            for (std::uint32_t i = 0; i < G.h; ++i)
                for (std::uint32_t j = 0; j < G.h; ++j)
                    ASSERT_EQ((psi.exps[i] + psi.exps[j]) % psi.modulus, psi.exps[G.op(i, j)]);
            for (std::size_t b = 0; b < a; ++b)
                ASSERT_FALSE(psi.same_values(chars[b]));
        }
    }
}

TEST(Characters, SpecShapes)
{
    auto c1 = characters(build_class_group(-4));
    ASSERT_EQ(c1.size(), 1u);
    EXPECT_TRUE(c1[0].is_principal());
    auto c23 = characters(build_class_group(-23));
    ASSERT_EQ(c23.size(), 3u);
    for (auto const &psi : c23)
        for (std::uint32_t cls = 0; cls < 3; ++cls) {
            auto v = psi.value(cls);
            EXPECT_NEAR(std::abs(v * v * v - std::complex<double>(1, 0)), 0, 1e-12);
        }
    auto c20 = characters(build_class_group(-20));
    ASSERT_EQ(c20.size(), 2u);
    EXPECT_TRUE(c20[0].is_real());
    EXPECT_TRUE(c20[1].is_real());
}

// h R_D(n) from the character sum against principal-form counts, and the
// bound R_D(n) <= (1 * chi_D)(n).
TEST(Orthogonality, ReconstructsPrincipalCounts)
{
    for (i64 D : fundamental_down_to(-500)) {
        auto G = build_class_group(D);
        auto chars = characters(G);
        IdealCountTable table(G, 2000);
        auto P = principal_form(D);
        for (u64 n = 1; n <= 2000; ++n) {
            u64 R = R_D_from_characters(table.counts(n), chars);
            ASSERT_EQ(R, rep_count(P, n) / static_cast<u64>(G.w)) << D << " " << n;
            ASSERT_LE(R, one_star_chi(n, D));
        }
    }
}

TEST(IdealCounts, TableMatchesDirectCounts)
{
    for (i64 D : {-3, -4, -23, -84, -167, -431}) {
        auto G = build_class_group(D);
        IdealCountTable table(G, 600);
        for (u64 n = 1; n <= 600; ++n)
            ASSERT_EQ(table.counts(n), ideal_counts(G, n)) << D << " " << n;
    }
}

TEST(RCoeff, PrincipalCharacterIsDivisorSum)
{
    for (i64 D : fundamental_down_to(-300)) {
        auto G = build_class_group(D);
        auto chars = characters(G);
        IdealCountTable table(G, 2000);
        for (u64 n = 1; n <= 2000; ++n) {
            auto r = r_coeff(table.counts(n), chars[0]);
            ASSERT_NEAR(r.real(), static_cast<double>(one_star_chi(n, D)), 1e-9);
            ASSERT_NEAR(r.imag(), 0, 1e-9);
        }
    }
}

TEST(RCoeff, RealAndMultiplicative)
{
    for (i64 D : {-23, -47, -71, -84, -260, -399}) {
        auto G = build_class_group(D);
        IdealCountTable table(G, 500 * 500 / 4);
        u64 absD = static_cast<u64>(-D);
        for (auto const &psi : characters(G)) {
            for (u64 n = 1; n <= 500; ++n)
                ASSERT_NEAR(r_coeff(table.counts(n), psi).imag(), 0, 1e-9);
            for (u64 m = 1; m <= 500; m += 7)
                for (u64 n = 1; n <= 500 && m * n <= table.limit(); n += 3) {
                    if (std::gcd(m, n) != 1 || std::gcd(m * n, absD) != 1)
                        continue;
                    auto lhs = r_coeff_exact(table.counts(m * n), psi);
                    auto rhs = ring_mul(r_coeff_exact(table.counts(m), psi),
                                        r_coeff_exact(table.counts(n), psi));
                    ASSERT_EQ(lhs, rhs) << D << " " << m << " " << n;
                }
        }
    }
}

// r(p, psi) r(p, psi~) = r(p, psi psi~) + r(p, conj(psi) psi~) for unramified p,
// checked as an identity of group-ring elements.
TEST(CharacterIdentities, ProductOfPrimeCoefficients)
{
    auto primes = primes_up_to(1000);
    for (i64 D : fundamental_down_to(-500)) {
        auto G = build_class_group(D);
        auto chars = characters(G);
        for (u64 p : primes) {
            if (static_cast<u64>(-D) % p == 0)
                continue;
            auto counts = ideal_counts(G, p);
            for (auto const &a : chars)
                for (auto const &b : chars) {
                    auto lhs = ring_mul(r_coeff_exact(counts, a), r_coeff_exact(counts, b));
                    auto rhs = ring_add(r_coeff_exact(counts, a * b),
                                        r_coeff_exact(counts, a.conj() * b));
                    // an inert p has no ideals of norm p: both sides vanish
                    ASSERT_EQ(lhs, rhs) << D << " p=" << p;
                }
        }
    }
}

// r(p, psi)^2 = 1 + chi_D(p) + sum over prime ideals of norm p of psi^2.
TEST(CharacterIdentities, SquareOfPrimeCoefficient)
{
    auto primes = primes_up_to(1000);
    for (i64 D : fundamental_down_to(-500)) {
        auto G = build_class_group(D);
        auto chars = characters(G);
        for (u64 p : primes) {
            if (static_cast<u64>(-D) % p == 0)
                continue;
            auto counts = ideal_counts(G, p);
            auto ideals = prime_ideals(G, p);
            int chi = kronecker(D, static_cast<i64>(p));
            for (auto const &psi : chars) {
                auto r = r_coeff_exact(counts, psi);
                auto lhs = ring_mul(r, r);
                Ring rhs(psi.modulus, 0);
                rhs[0] += 1 + chi;
                for (auto cls : ideals.classes)
                    rhs[(2 * psi.exps[cls]) % psi.modulus] += 1;
                ASSERT_EQ(lhs, rhs) << D << " p=" << p;
            }
        }
    }
}

TEST(Genus, CharacterCounts)
{
    EXPECT_EQ(genus_characters(7).chars.size(), 1u);
    auto g5 = genus_characters(5);
    ASSERT_EQ(g5.chars.size(), 2u);
    EXPECT_TRUE(g5.chars[1].is_real());
    EXPECT_FALSE(g5.chars[1].is_principal());
    EXPECT_THROW(genus_characters(9), std::invalid_argument);
    EXPECT_THROW(genus_characters(2), std::invalid_argument);
}

// r(n, psi_1) = chi_{-4}(n) r(n, psi_0) for odd n, and chi_d(2^a) r(2^a, psi_0) at powers of 2.
TEST(Genus, RelationToPrincipalCharacter)
{
    for (u64 d : primes_up_to(200)) {
        if (d % 4 != 1)
            continue;
        auto g = genus_characters(static_cast<i64>(d));
        IdealCountTable table(g.group, 5000);
        for (u64 n = 1; n <= 5000; ++n) {
            bool odd = n % 2 == 1;
            bool two_power = std::has_single_bit(n);
            if (!odd && !two_power)
                continue;
            auto counts = table.counts(n);
            auto r1 = r_coeff(counts, g.chars[1]);
            auto r0 = static_cast<double>(one_star_chi(n, g.group.D));
            int sign = kronecker(odd ? -4 : static_cast<i64>(d), static_cast<i64>(n));
            ASSERT_NEAR(r1.real(), sign * r0, 1e-9) << d << " " << n;
            ASSERT_NEAR(r1.imag(), 0, 1e-9);
        }
    }
}
