// Elementary number theory used throughout qfcover: Kronecker symbols,
// fundamental discriminants, factorization sieves, (1*chi_D)(n), the Mertens
// product gamma_W and the Gaussian distribution function.
#ifndef QFCOVER_ARITH_HPP
#define QFCOVER_ARITH_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <new>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qfcover {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

// floor(sqrt(n)) for n >= 0, exact.
inline u64 isqrt(u64 n)
{
    if (n == 0)
        return 0;
    auto r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (static_cast<u128>(r) * r > n)
        --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n)
        ++r;
    return r;
}

// smallest r >= 0 with r*r >= n.
inline u64 isqrt_ceil(u64 n)
{
    u64 r = isqrt(n);
    return r * r == n ? r : r + 1;
}

inline bool is_square(u64 n)
{
    u64 r = isqrt(n);
    return r * r == n;
}

inline i64 mod(i64 a, i64 m)
{
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

inline bool is_prime(u64 n)
{
    if (n < 2)
        return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL})
        if (n % p == 0)
            return n == p;
    for (u64 p = 11; p * p <= n; p += 2)
        if (n % p == 0)
            return false;
    return true;
}

inline bool is_squarefree(u64 n)
{
    if (n == 0)
        return false;
    for (u64 p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0)
                return false;
        }
    }
    return true;
}

// Primes p <= n in ascending order.
inline std::vector<std::uint32_t> primes_up_to(u64 n)
{
    std::vector<std::uint32_t> out;
    if (n < 2)
        return out;
    std::vector<bool> composite(n + 1, false);
    for (u64 p = 2; p <= n; ++p) {
        if (composite[p])
            continue;
        out.push_back(static_cast<std::uint32_t>(p));
        for (u64 m = p * p; m <= n; m += p)
            composite[m] = true;
    }
    return out;
}

namespace detail {

// General Kronecker symbol (a/b), reciprocity reduction loop.
inline int kronecker_any(i64 a, i64 b)
{
    if (b == 0)
        return (a == 1 || a == -1) ? 1 : 0;
    if ((a & 1) == 0 && (b & 1) == 0)
        return 0;

    int sign = 1;
    int v = std::countr_zero(static_cast<u64>(b < 0 ? -static_cast<i128>(b) : b));
    u64 bb = static_cast<u64>(b < 0 ? -static_cast<i128>(b) : b) >> v;
    if (v & 1) {
        // (a/2) = +1 for a = +-1 mod 8, -1 for a = +-3 mod 8
        i64 r = mod(a, 8);
        if (r == 3 || r == 5)
            sign = -sign;
    }
    if (b < 0 && a < 0)
        sign = -sign;

    // now bb odd positive: Jacobi symbol (a/bb)
    if (bb == 1)
        return sign;
    u64 aa = static_cast<u64>(mod(a, static_cast<i64>(bb)));
    while (aa != 0) {
        int t = std::countr_zero(aa);
        aa >>= t;
        if ((t & 1) && (bb % 8 == 3 || bb % 8 == 5))
            sign = -sign;
        if (aa % 4 == 3 && bb % 4 == 3)
            sign = -sign;
        std::swap(aa, bb);
        aa %= bb;
    }
    return bb == 1 ? sign : 0;
}

} // namespace detail

inline bool is_discriminant(i64 D)
{
    i64 r = mod(D, 4);
    return r == 0 || r == 1;
}

// Kronecker symbol (D/n) for a discriminant D (D = 0 or 1 mod 4).
// Completely multiplicative in n; (D/-1) = sgn D; (D/0) = 0 unless D = 1.
inline int kronecker(i64 D, i64 n)
{
    if (!is_discriminant(D))
        throw std::invalid_argument("kronecker: D = " + std::to_string(D) +
                                    " is not 0 or 1 mod 4");
    return detail::kronecker_any(D, n);
}

inline bool is_fundamental_discriminant(i64 D)
{
    if (D == 1 || D == 0)
        return false;
    i64 r = mod(D, 4);
    u64 absD = static_cast<u64>(D < 0 ? -D : D);
    if (r == 1)
        return is_squarefree(absD);
    if (r != 0)
        return false;
    i64 m = D / 4;
    i64 mr = mod(m, 4);
    return (mr == 2 || mr == 3) && is_squarefree(absD / 4);
}

// A positive squarefree d together with the negative fundamental
// discriminant of Q(sqrt(-d)).
struct FundDisc
{
    i64 d = 1;
    i64 D = -4;

    int chi(i64 n) const { return detail::kronecker_any(D, n); }
    u64 modulus() const { return static_cast<u64>(-D); }
    // number of units of the ring of integers
    int units() const { return D == -4 ? 4 : (D == -3 ? 6 : 2); }

    friend bool operator==(FundDisc const &, FundDisc const &) = default;
};

inline FundDisc assoc_discriminant(i64 d)
{
    if (d < 1 || !is_squarefree(static_cast<u64>(d)))
        throw std::invalid_argument("assoc_discriminant: d = " + std::to_string(d) +
                                    " is not a positive squarefree integer");
    return FundDisc{d, d % 4 == 3 ? -d : -4 * d};
}

inline int units_for(i64 D)
{
    return D == -4 ? 4 : (D == -3 ? 6 : 2);
}

// Smallest-prime-factor and Omega tables for 1..limit.
struct SieveTables
{
    u64 limit = 0;
    std::vector<std::uint32_t> spf;   // spf[n] for n >= 2; spf[0] = spf[1] = 0
    std::vector<std::uint8_t> omega;  // Omega(n), omega[0] unused

    int big_omega(u64 n) const { return omega.at(n); }
};

inline SieveTables build_sieve(u64 N)
{
    if (N < 1)
        throw std::invalid_argument("build_sieve: N must be >= 1");
    SieveTables t;
    t.limit = N;
    try {
        t.spf.assign(N + 1, 0);
        t.omega.assign(N + 1, 0);
    } catch (std::bad_alloc const &) {
        throw std::runtime_error("build_sieve: cannot allocate " +
                                 std::to_string((N + 1) * 5) + " bytes for N = " +
                                 std::to_string(N));
    }
    std::vector<std::uint32_t> primes;
    for (u64 n = 2; n <= N; ++n) {
        if (t.spf[n] == 0) {
            t.spf[n] = static_cast<std::uint32_t>(n);
            primes.push_back(static_cast<std::uint32_t>(n));
        }
        for (std::uint32_t p : primes) {
            if (p > t.spf[n] || static_cast<u64>(p) * n > N)
                break;
            t.spf[p * n] = p;
        }
        t.omega[n] = static_cast<std::uint8_t>(t.omega[n / t.spf[n]] + 1);
    }
    return t;
}

struct PrimePower
{
    u64 p;
    int e;
    friend bool operator==(PrimePower const &, PrimePower const &) = default;
};

// n = n_small * n_large where n_small collects the primes p <= W.
struct FactoredInteger
{
    u64 n = 1;
    std::vector<PrimePower> prime_powers;
    int big_omega = 0;
    int v2 = 0;
    u64 n_small = 1;
    u64 n_large = 1;

    // number of divisors of n_small
    u64 tau_small() const
    {
        u64 t = 1;
        for (auto const &pp : prime_powers)
            if (n_small % pp.p == 0)
                t *= static_cast<u64>(pp.e + 1);
        return t;
    }
};

inline FactoredInteger factorize(u64 n, SieveTables const &tables, u64 W)
{
    if (n < 1 || n > tables.limit)
        throw std::out_of_range("factorize: n = " + std::to_string(n) +
                                " outside sieve range [1, " +
                                std::to_string(tables.limit) + "]");
    FactoredInteger f;
    f.n = n;
    u64 m = n;
    while (m > 1) {
        u64 p = tables.spf[m];
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        f.prime_powers.push_back({p, e});
        f.big_omega += e;
        u64 pe = 1;
        for (int i = 0; i < e; ++i)
            pe *= p;
        if (p <= W)
            f.n_small *= pe;
        else
            f.n_large *= pe;
        if (p == 2)
            f.v2 = e;
    }
    return f;
}

// Trial-division factorization, no tables needed.
inline std::vector<PrimePower> factor_trial(u64 n)
{
    std::vector<PrimePower> out;
    for (u64 p = 2; p * p <= n; ++p) {
        if (n % p)
            continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    if (n > 1)
        out.push_back({n, 1});
    return out;
}

// (1*chi_D)(n) = sum over l | n of chi_D(l): the number of ideals of norm n.
inline u64 one_star_chi(u64 n, FundDisc const &D)
{
    if (n < 1)
        throw std::invalid_argument("one_star_chi: n must be >= 1");
    u64 total = 1;
    for (auto const &[p, e] : factor_trial(n)) {
        int c = D.chi(static_cast<i64>(p));
        if (c == 0)
            continue;  // contributes a factor 1
        if (c == 1)
            total *= static_cast<u64>(e + 1);
        else if (e & 1)
            return 0;
    }
    return total;
}

// Same, for an arbitrary discriminant (positive ones included).
inline u64 one_star_chi(u64 n, i64 disc)
{
    if (n < 1)
        throw std::invalid_argument("one_star_chi: n must be >= 1");
    u64 total = 1;
    for (auto const &[p, e] : factor_trial(n)) {
        int c = kronecker(disc, static_cast<i64>(p));
        if (c == 1)
            total *= static_cast<u64>(e + 1);
        else if (c == -1 && (e & 1))
            return 0;
    }
    return total;
}

// gamma_W = prod_{p <= W} (1 - 1/p), formed as an exact fraction first.
inline double gamma_W(u64 W)
{
    if (W < 2)
        throw std::invalid_argument("gamma_W: W must be >= 2");
    if (W > 100)
        throw std::invalid_argument("gamma_W: W > 100 overflows the exact product");
    u128 num = 1, den = 1;
    for (u64 p : primes_up_to(W)) {
        num *= p - 1;
        den *= p;
        u128 a = num, b = den;
        while (b) {
            u128 t = a % b;
            a = b;
            b = t;
        }
        num /= a;
        den /= a;
    }
    return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

// Phi(alpha) = P(Z <= alpha) for a standard normal Z.
inline double gaussian_cdf(double alpha)
{
    return 0.5 * std::erfc(-alpha / std::sqrt(2.0));
}

// Per-segment Omega(n), v_2(n) for n in [lo, hi), sieving by primes up to
// sqrt(limit). Working memory is O(hi - lo).
class SegmentedOmega
{
public:
    explicit SegmentedOmega(u64 limit)
        : limit_(limit), primes_(primes_up_to(isqrt(limit) + 1))
    {
    }

    u64 limit() const { return limit_; }

    // omega[i] = Omega(lo + i). Requires 1 <= lo < hi <= limit + 1.
    void fill(u64 lo, u64 hi, std::vector<std::uint8_t> &omega,
              std::vector<std::uint32_t> &scratch) const
    {
        if (lo < 1 || hi > limit_ + 1 || lo >= hi)
            throw std::out_of_range("SegmentedOmega::fill: bad segment");
        std::size_t len = hi - lo;
        omega.assign(len, 0);
        scratch.assign(len, 1);
        for (std::uint32_t p32 : primes_) {
            u64 p = p32;
            if (p * p >= hi)
                break;
            for (u64 pe = p; pe < hi; pe *= p) {
                u64 start = (lo + pe - 1) / pe * pe;
                for (u64 m = start; m < hi; m += pe) {
                    omega[m - lo] += 1;
                    scratch[m - lo] *= static_cast<std::uint32_t>(p);
                }
                if (pe > (hi - 1) / p)
                    break;
            }
        }
        // whatever is left is one prime > sqrt(n)
        for (std::size_t i = 0; i < len; ++i)
            if (scratch[i] != lo + i)
                omega[i] += 1;
    }

private:
    u64 limit_;
    std::vector<std::uint32_t> primes_;
};

} // namespace qfcover

#endif
