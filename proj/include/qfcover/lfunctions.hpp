// L(1, chi) for quadratic Kronecker characters by truncated summation, with
// a certified Polya-Vinogradov tail bound.
#ifndef QFCOVER_LFUNCTIONS_HPP
#define QFCOVER_LFUNCTIONS_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "arith.hpp"
#include "classgroup.hpp"

namespace qfcover {

struct LEstimate
{
    u64 q = 0;           // modulus |disc|
    double value = 0;    // sum_{n <= M} chi(n) / n
    u64 M = 0;
    double tail_bound = 0;

    double lo() const { return value - tail_bound; }
    double hi() const { return value + tail_bound; }
};

// Bound on |sum_{a < n <= b} chi(n)| for a primitive character mod q.
inline double polya_vinogradov_bound(u64 q)
{
    double s = std::sqrt(static_cast<double>(q));
    return s * std::log(static_cast<double>(q)) + s;
}

// Partial summation: |sum_{n > M} chi(n)/n| <= 2 B / M.
inline double l1_tail_bound(u64 q, u64 M)
{
    return 2.0 * polya_vinogradov_bound(q) / static_cast<double>(M);
}

// One period of chi_disc, table[n mod q] = (disc / n).
inline std::vector<std::int8_t> character_table(i64 disc)
{
    u64 q = static_cast<u64>(disc < 0 ? -disc : disc);
    std::vector<std::int8_t> t(q);
    for (u64 n = 0; n < q; ++n)
        t[n] = static_cast<std::int8_t>(kronecker(disc, static_cast<i64>(n)));
    return t;
}

namespace detail {

// Neumaier-compensated ascending sum of chi(n)/n for n = from..to.
class CompensatedSum
{
public:
    void add(double x)
    {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0;
    double comp_ = 0;
};

template <class Chi>
double harmonic_character_sum(Chi &&chi, u64 M)
{
    CompensatedSum s;
    for (u64 n = 1; n <= M; ++n) {
        int c = chi(n);
        if (c)
            s.add(static_cast<double>(c) / static_cast<double>(n));
    }
    return s.value();
}

inline void check_l1_args(i64 disc, u64 M)
{
    if (!is_fundamental_discriminant(disc))
        throw std::invalid_argument("l1_truncated: " + std::to_string(disc) +
                                    " is not a fundamental discriminant");
    u64 q = static_cast<u64>(disc < 0 ? -disc : disc);
    if (M < q)
        throw std::invalid_argument("l1_truncated: M = " + std::to_string(M) +
                                    " is below the modulus " + std::to_string(q));
}

} // namespace detail

inline constexpr u64 kMaxTableModulus = u64{1} << 24;

inline LEstimate l1_truncated(i64 disc, u64 M)
{
    detail::check_l1_args(disc, M);
    LEstimate est;
    est.q = static_cast<u64>(disc < 0 ? -disc : disc);
    est.M = M;
    est.tail_bound = l1_tail_bound(est.q, M);
    if (est.q <= kMaxTableModulus) {
        auto table = character_table(disc);
        u64 q = est.q;
        u64 r = 0;
        est.value = detail::harmonic_character_sum(
            [&](u64) {
                if (++r == q)
                    r = 0;
                return static_cast<int>(table[r]);
            },
            M);
    } else {
        est.value = detail::harmonic_character_sum(
            [&](u64 n) { return kronecker(disc, static_cast<i64>(n)); }, M);
    }
    return est;
}

// L(1, chi_{D1 D2}) for a fundamental product D1*D2, using
// chi_{D1 D2}(n) = chi_{D1}(n) chi_{D2}(n) so only the two small periods are tabulated.
inline LEstimate l1_truncated_product(i64 D1, i64 D2, u64 M)
{
    i64 disc = D1 * D2;
    detail::check_l1_args(disc, M);
    if (!is_discriminant(D1) || !is_discriminant(D2))
        throw std::invalid_argument("l1_truncated_product: factors must be discriminants");
    auto t1 = character_table(D1);
    auto t2 = character_table(D2);
    u64 q1 = t1.size(), q2 = t2.size();
    LEstimate est;
    est.q = static_cast<u64>(disc < 0 ? -disc : disc);
    est.M = M;
    est.tail_bound = l1_tail_bound(est.q, M);
    u64 r1 = 0, r2 = 0;
    est.value = detail::harmonic_character_sum(
        [&](u64) {
            if (++r1 == q1)
                r1 = 0;
            if (++r2 == q2)
                r2 = 0;
            return static_cast<int>(t1[r1]) * static_cast<int>(t2[r2]);
        },
        M);
    return est;
}

// Smallest M with tail bound <= target.
inline u64 truncation_for_tail(u64 q, double target)
{
    double m = 2.0 * polya_vinogradov_bound(q) / target;
    u64 M = static_cast<u64>(std::ceil(m));
    while (l1_tail_bound(q, M) > target)
        ++M;
    return M;
}

struct ClassNumberEstimate
{
    i64 h = 0;
    bool certified = false;
    double h_lo = 0;
    double h_hi = 0;
};

// h = w sqrt|D| L(1, chi_D) / (2 pi); certified when the image of the value
// interval has width < 1/2 and contains h.
inline ClassNumberEstimate h_from_formula(i64 D, LEstimate const &est)
{
    if (D >= 0 || static_cast<u64>(-D) != est.q)
        throw std::invalid_argument("h_from_formula: estimate was not built for D = " +
                                    std::to_string(D));
    double scale = units_for(D) * std::sqrt(static_cast<double>(-D)) / (2.0 * std::numbers::pi);
    ClassNumberEstimate out;
    out.h = static_cast<i64>(std::llround(scale * est.value));
    out.h_lo = scale * est.lo();
    out.h_hi = scale * est.hi();
    out.certified = (out.h_hi - out.h_lo) < 0.5 && out.h_lo <= static_cast<double>(out.h) &&
                    static_cast<double>(out.h) <= out.h_hi;
    return out;
}

struct CertifiedClassNumber
{
    ClassNumberEstimate estimate;
    LEstimate l;
};

// Chooses M so the certification width is met, doubling up to max_terms.
inline CertifiedClassNumber certified_class_number(i64 D, u64 max_terms = 100'000'000)
{
    u64 q = static_cast<u64>(-D);
    double target = 0.45 * std::numbers::pi / (units_for(D) * std::sqrt(static_cast<double>(q)));
    u64 M = std::max(q, truncation_for_tail(q, target));
    for (;;) {
        CertifiedClassNumber out;
        out.l = l1_truncated(D, M);
        out.estimate = h_from_formula(D, out.l);
        if (out.estimate.certified || M >= max_terms)
            return out;
        M = std::min(max_terms, 2 * M);
    }
}

// Max |r(n, psi_1) - (chi_{-4} * chi_d)(n)| over n <= limit, for a prime d = 1 mod 4.
inline i64 genus_factorization_residual(i64 d, u64 limit)
{
    if (d % 4 != 1 || !is_prime(static_cast<u64>(d)))
        throw std::invalid_argument("genus_factorization_residual: d must be a prime = 1 mod 4");
    auto genus = genus_characters(d);
    IdealCountTable table(genus.group, limit);
    i64 worst = 0;
    for (u64 n = 1; n <= limit; ++n) {
        i64 conv = 0;
        for (u64 a = 1; a * a <= n; ++a) {
            if (n % a)
                continue;
            u64 b = n / a;
            conv += kronecker(-4, static_cast<i64>(a)) * kronecker(d, static_cast<i64>(b));
            if (a != b)
                conv += kronecker(-4, static_cast<i64>(b)) * kronecker(d, static_cast<i64>(a));
        }
        i64 r = r_coeff_real(table.counts(n), genus.chars[1]);
        worst = std::max(worst, r > conv ? r - conv : conv - r);
    }
    return worst;
}

// sum_{n <= x} (1*chi_D)(n) = sum_{b <= x} chi_D(b) floor(x / b).
inline i64 divisor_sum_prefix(i64 D, u64 x)
{
    auto table = character_table(D);
    u64 q = table.size();
    i64 s = 0;
    for (u64 b = 1; b <= x; ++b)
        s += table[b % q] * static_cast<i64>(x / b);
    return s;
}

} // namespace qfcover

#endif
