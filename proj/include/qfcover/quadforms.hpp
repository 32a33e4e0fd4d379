// Positive definite binary quadratic forms a x^2 + b xy + c y^2.
#ifndef QFCOVER_QUADFORMS_HPP
#define QFCOVER_QUADFORMS_HPP

#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "arith.hpp"

namespace qfcover {

struct QuadForm
{
    i64 a = 1;
    i64 b = 0;
    i64 c = 1;

    i64 discriminant() const { return b * b - 4 * a * c; }
    i64 operator()(i64 x, i64 y) const { return a * x * x + b * x * y + c * y * y; }
    QuadForm inverse() const { return {a, -b, c}; }

    bool is_primitive() const { return std::gcd(std::gcd(a, b), c) == 1; }

    bool is_reduced() const
    {
        i64 ab = b < 0 ? -b : b;
        if (a <= 0 || discriminant() >= 0)
            return false;
        if (!(ab <= a && a <= c))
            return false;
        if ((ab == a || a == c) && b < 0)
            return false;
        return true;
    }

    friend bool operator==(QuadForm const &, QuadForm const &) = default;
};

inline std::ostream &operator<<(std::ostream &os, QuadForm const &f)
{
    return os << '(' << f.a << ',' << f.b << ',' << f.c << ')';
}

inline QuadForm principal_form(i64 D)
{
    if (D >= 0 || !is_discriminant(D))
        throw std::invalid_argument("principal_form: bad discriminant " + std::to_string(D));
    i64 b = mod(D, 2);
    return {1, b, (b - D) / 4};
}

// Reduce a positive definite form to the unique reduced form in its class.
inline QuadForm reduce(QuadForm f)
{
    if (f.a <= 0 || f.discriminant() >= 0)
        throw std::invalid_argument("reduce: form is not positive definite");
    for (;;) {
        // normalize: -a < b <= a
        if (f.b > f.a || f.b <= -f.a) {
            i64 two_a = 2 * f.a;
            i64 r = mod(f.a - f.b, two_a);       // b' = b + 2a s = a - r
            i64 s = (f.a - r - f.b) / two_a;
            f.c = f.a * s * s + f.b * s + f.c;
            f.b = f.b + two_a * s;
        }
        if (f.a > f.c) {
            std::swap(f.a, f.c);
            f.b = -f.b;
            continue;
        }
        if (f.a == f.c && f.b < 0)
            f.b = -f.b;
        return f;
    }
}

// Reduced forms of discriminant D (one per class), ordered by (a, |b|)
// with b > 0 before -b. The principal form comes first.
inline std::vector<QuadForm> enumerate_reduced(i64 D)
{
    if (D > -3 || !is_fundamental_discriminant(D))
        throw std::invalid_argument("enumerate_reduced: " + std::to_string(D) +
                                    " is not a negative fundamental discriminant");
    std::vector<QuadForm> out;
    i64 absD = -D;
    for (i64 a = 1; 3 * a * a <= absD; ++a) {
        for (i64 ab = mod(D, 2); ab <= a; ab += 2) {
            i64 num = ab * ab - D;
            if (num % (4 * a))
                continue;
            i64 c = num / (4 * a);
            if (c < a)
                continue;
            QuadForm f{a, ab, c};
            if (!f.is_primitive())
                continue;
            out.push_back(f);
            if (ab != 0 && ab != a && a != c)
                out.push_back(f.inverse());
        }
    }
    return out;
}

inline std::size_t class_number_enum(i64 D) { return enumerate_reduced(D).size(); }

// Number of (x, y) in Z^2 with f(x, y) = n, found by lattice enumeration.
inline u64 rep_count(QuadForm const &f, u64 n)
{
    i64 D = f.discriminant();
    if (f.a <= 0 || D >= 0)
        throw std::invalid_argument("rep_count: form is not positive definite");
    u64 absD = static_cast<u64>(-D);
    // (2a x + b y)^2 + |D| y^2 = 4 a n
    u64 four_an = 4 * static_cast<u64>(f.a) * n;
    u64 ymax = isqrt(four_an / absD);
    u64 count = 0;
    for (i64 y = -static_cast<i64>(ymax); y <= static_cast<i64>(ymax); ++y) {
        u64 rest = four_an - absD * static_cast<u64>(y * y);
        u64 u = isqrt(rest);
        if (u * u != rest)
            continue;
        // 2 a x + b y = +-u
        for (i64 s : {1, -1}) {
            i64 num = s * static_cast<i64>(u) - f.b * y;
            if (num % (2 * f.a) == 0)
                ++count;
            if (u == 0)
                break;
        }
    }
    return count;
}

// Number of (x, y) in Z^2 with x^2 + d y^2 = n (any d >= 1).
inline u64 principal_rep_count(u64 d, u64 n)
{
    if (d < 1)
        throw std::invalid_argument("principal_rep_count: d must be >= 1");
    u64 count = 0;
    for (u64 y = 0; d * y * y <= n; ++y) {
        u64 rest = n - d * y * y;
        u64 x = isqrt(rest);
        if (x * x != rest)
            continue;
        u64 mult = (x == 0 ? 1 : 2) * (y == 0 ? 1 : 2);
        count += mult;
    }
    return count;
}

} // namespace qfcover

#endif
