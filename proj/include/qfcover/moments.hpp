// Second-moment statistics over the prime sets D_0, D_1: the normalized
// representation count F_j(n) and exact finite evaluations of the weighted
// sums sum_{n in A_j(k)} (...) e^{-n/N}.
#ifndef QFCOVER_MOMENTS_HPP
#define QFCOVER_MOMENTS_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "arith.hpp"
#include "coverage.hpp"
#include "lfunctions.hpp"
#include "quadforms.hpp"

namespace qfcover {

struct DjSet
{
    int j = 0;
    double Delta = 0;
    u64 W = 2;
    std::vector<u64> members;
    double expected_size = 0;  // Delta / (2^{pi(W)+1-j} log Delta)
    std::string warning;

    bool contains(u64 d) const
    {
        return std::binary_search(members.begin(), members.end(), d);
    }
};

// Membership test for D_j, independent of the scan order in build_Dj.
inline bool in_Dj(int j, u64 W, u64 d)
{
    if (!is_prime(d))
        return false;
    if (j == 0) {
        if (d % 8 != 7)
            return false;
        for (u64 p : primes_up_to(W))
            if (kronecker(-static_cast<i64>(d), static_cast<i64>(p)) != 1)
                return false;
        return true;
    }
    if (d % 4 != 1)
        return false;
    for (u64 p : primes_up_to(W))
        if (p != 2 && kronecker(-4 * static_cast<i64>(d), static_cast<i64>(p)) != 1)
            return false;
    return true;
}

inline DjSet build_Dj(int j, double Delta, u64 W)
{
    if (j != 0 && j != 1)
        throw std::invalid_argument("build_Dj: j must be 0 or 1");
    if (!(Delta >= 8))
        throw std::invalid_argument("build_Dj: Delta must be >= 8");
    if (W < 2)
        throw std::invalid_argument("build_Dj: W must be >= 2");
    if (Delta > static_cast<double>(kMaxDelta))
        throw std::invalid_argument("build_Dj: Delta exceeds the cap");
    DjSet s;
    s.j = j;
    s.Delta = Delta;
    s.W = W;
    double lower = Delta / std::log(Delta);
    auto lo = static_cast<u64>(std::ceil(lower));
    auto hi = static_cast<u64>(std::floor(Delta));
    std::vector<bool> composite(hi + 1, false);
    for (u64 p = 2; p <= hi; ++p) {
        if (composite[p])
            continue;
        for (u64 m = p * p; m <= hi; m += p)
            composite[m] = true;
        if (p < lo)
            continue;
        bool ok = j == 0 ? p % 8 == 7 : p % 4 == 1;
        for (u64 q : primes_up_to(W)) {
            if (!ok)
                break;
            if (j == 0)
                ok = kronecker(-static_cast<i64>(p), static_cast<i64>(q)) == 1;
            else if (q != 2)
                ok = kronecker(-4 * static_cast<i64>(p), static_cast<i64>(q)) == 1;
        }
        if (ok)
            s.members.push_back(p);
    }
    auto piW = static_cast<int>(primes_up_to(W).size());
    s.expected_size = Delta / (std::ldexp(1.0, piW + 1 - j) * std::log(Delta));
    if (s.members.empty())
        s.warning = "D_" + std::to_string(j) + " is empty for Delta = " + std::to_string(Delta);
    return s;
}

inline u64 tau_small(u64 n, u64 W)
{
    u64 t = 1;
    for (u64 p : primes_up_to(W)) {
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        t *= static_cast<u64>(e + 1);
    }
    return t;
}

// Number of principal ideals of norm n in Q(sqrt(-d)).
inline u64 principal_ideal_count(u64 d, u64 n)
{
    auto fd = assoc_discriminant(static_cast<i64>(d));
    return rep_count(principal_form(fd.D), n) / static_cast<u64>(fd.units());
}

inline double f_weight(u64 d, double gW)
{
    auto fd = assoc_discriminant(static_cast<i64>(d));
    return std::sqrt(static_cast<double>(-fd.D)) / (std::numbers::pi * gW);
}

// F_j(n) = (1/|D_j|) sum_{d in D_j} |D|^{1/2} R_D(n) / (pi gamma_W tau(n_s)).
inline double f_statistic(u64 n, DjSet const &Dj)
{
    if (Dj.members.empty())
        throw std::invalid_argument("f_statistic: empty D_j");
    if (std::countr_zero(n) != Dj.j)
        throw std::invalid_argument("f_statistic: v_2(n) differs from j");
    double gW = gamma_W(Dj.W);
    double tau = static_cast<double>(tau_small(n, Dj.W));
    double s = 0;
    for (u64 d : Dj.members)
        s += f_weight(d, gW) * static_cast<double>(principal_ideal_count(d, n)) / tau;
    return s / static_cast<double>(Dj.members.size());
}

inline constexpr double kTailEpsilon = 1e-12;

// Last n kept in an e^{-n/N} weighted sum: ceil(N log(1/eps)).
inline u64 weighted_cutoff(u64 N, double eps = kTailEpsilon)
{
    return static_cast<u64>(std::ceil(static_cast<double>(N) * std::log(1.0 / eps)));
}

// Bound on sum_{n > cutoff} e^{-n/N}.
inline double weighted_tail_mass(u64 N, u64 cutoff)
{
    double x = 1.0 / static_cast<double>(N);
    return std::exp(-static_cast<double>(cutoff) * x) / -std::expm1(-x);
}

namespace detail {

// R_D(n) * w for n in [lo, hi): pairs (u, y) with u^2 + |D| y^2 = 4n and
// u = b y (mod 2), b the middle coefficient of the principal form.
inline void principal_histogram(i64 D, u64 lo, u64 hi, std::vector<std::uint32_t> &out)
{
    out.assign(hi - lo, 0);
    u64 absD = static_cast<u64>(-D);
    u64 b = static_cast<u64>(mod(D, 2));
    for (u64 y = 0; absD * y * y < 4 * hi; ++y) {
        u64 base = absD * y * y;
        u64 u = base >= 4 * lo ? 0 : isqrt_ceil(4 * lo - base);
        if ((u & 1) != ((b * y) & 1))
            ++u;
        std::uint32_t ymult = y == 0 ? 1 : 2;
        for (; base + u * u < 4 * hi; u += 2) {
            u64 v = base + u * u;
            if (v % 4)
                throw std::logic_error("principal_histogram: parity error");
            out[v / 4 - lo] += ymult * (u == 0 ? 1 : 2);
        }
    }
}

} // namespace detail

// All the weighted sums over n in A_j(k), n <= cutoff, for a list of d.
struct MomentSums
{
    std::vector<u64> ds;
    u64 N = 0;
    int k = 0;
    int j = 0;
    u64 W = 2;
    u64 cutoff = 0;
    double tail_mass = 0;

    double weight_sum = 0;                // sum e^{-n/N}
    std::vector<double> first;            // [i]: sum R_i / tau e^{-n/N}
    std::vector<double> second;           // [i*m + i']: sum R_i R_i' / tau^2 e^{-n/N}
    std::vector<u64> second_raw;          // [i*m + i']: sum R_i R_i' over n <= cutoff
    double variance = 0;                  // sum (F(n) - 1)^2 e^{-n/N}, F over all ds
    u64 members_upto_N = 0;               // |A_j(N, k)|
    u64 unrepresented_upto_N = 0;         // n <= N with F(n) = 0

    std::size_t index(u64 d) const
    {
        for (std::size_t i = 0; i < ds.size(); ++i)
            if (ds[i] == d)
                return i;
        throw std::invalid_argument("MomentSums: d not in list");
    }
};

inline MomentSums moment_sums(std::vector<u64> const &ds, u64 N, int k, int j, u64 W,
                              SieveOptions const &opt = {}, double eps = kTailEpsilon)
{
    if (ds.empty())
        throw std::invalid_argument("moment_sums: empty d list");
    if (j != 0 && j != 1)
        throw std::invalid_argument("moment_sums: j must be 0 or 1");
    MomentSums out;
    out.ds = ds;
    out.N = N;
    out.k = k;
    out.j = j;
    out.W = W;
    out.cutoff = weighted_cutoff(N, eps);
    out.tail_mass = weighted_tail_mass(N, out.cutoff);
    if (out.cutoff >= (u64{1} << 32))
        throw std::invalid_argument("moment_sums: N too large for the weighted range");

    std::size_t m = ds.size();
    double gW = gamma_W(W);
    std::vector<FundDisc> fds;
    std::vector<double> fw;
    for (u64 d : ds) {
        fds.push_back(assoc_discriminant(static_cast<i64>(d)));
        fw.push_back(f_weight(d, gW));
    }
    auto small_primes = primes_up_to(W);

    struct Partial
    {
        double weight_sum = 0, variance = 0;
        std::vector<double> first, second;
        std::vector<u64> second_raw;
        u64 members = 0, unrep = 0;
    };
    SieveOptions o = opt;
    o.segment_size = std::min<u64>(opt.segment_size, u64{1} << 20);
    detail::check_memory((u64{5} + 4 * m) * o.segment_size * std::max(1u, o.workers), o,
                         "moment_sums");
    std::size_t nseg = static_cast<std::size_t>(out.cutoff / o.segment_size + 1);
    std::vector<Partial> parts(nseg);
    SegmentedOmega sieve(out.cutoff);

    detail::for_each_segment(1, out.cutoff + 1, o, [&](std::size_t s, u64 lo, u64 hi) {
        Partial &p = parts[s];
        p.first.assign(m, 0);
        p.second.assign(m * m, 0);
        p.second_raw.assign(m * m, 0);
        std::vector<std::uint8_t> omega;
        std::vector<std::uint32_t> scratch;
        sieve.fill(lo, hi, omega, scratch);
        std::vector<std::vector<std::uint32_t>> hist(m);
        for (std::size_t i = 0; i < m; ++i)
            detail::principal_histogram(fds[i].D, lo, hi, hist[i]);
        std::vector<u64> R(m);
        for (u64 n = lo; n < hi; ++n) {
            if (omega[n - lo] != k || std::countr_zero(n) != j)
                continue;
            double wgt = std::exp(-static_cast<double>(n) / static_cast<double>(N));
            u64 tau = 1;
            {
                u64 t = n;
                for (u64 q : small_primes) {
                    int e = 0;
                    while (t % q == 0) {
                        t /= q;
                        ++e;
                    }
                    tau *= static_cast<u64>(e + 1);
                }
            }
            double inv_tau = 1.0 / static_cast<double>(tau);
            double F = 0;
            for (std::size_t i = 0; i < m; ++i) {
                std::uint32_t raw = hist[i][n - lo];
                if (raw % static_cast<std::uint32_t>(fds[i].units()))
                    throw std::logic_error("moment_sums: representation count not divisible by w");
                R[i] = raw / static_cast<std::uint32_t>(fds[i].units());
                F += fw[i] * static_cast<double>(R[i]) * inv_tau;
            }
            F /= static_cast<double>(m);
            p.weight_sum += wgt;
            p.variance += (F - 1) * (F - 1) * wgt;
            if (n <= N) {
                ++p.members;
                if (F == 0)
                    ++p.unrep;
            }
            for (std::size_t i = 0; i < m; ++i) {
                if (R[i] == 0)
                    continue;
                p.first[i] += static_cast<double>(R[i]) * inv_tau * wgt;
                for (std::size_t i2 = 0; i2 < m; ++i2) {
                    if (R[i2] == 0)
                        continue;
                    p.second[i * m + i2] +=
                        static_cast<double>(R[i] * R[i2]) * inv_tau * inv_tau * wgt;
                    p.second_raw[i * m + i2] += R[i] * R[i2];
                }
            }
        }
    });

    out.first.assign(m, 0);
    out.second.assign(m * m, 0);
    out.second_raw.assign(m * m, 0);
    for (auto const &p : parts) {
        if (p.first.empty())
            continue;
        out.weight_sum += p.weight_sum;
        out.variance += p.variance;
        out.members_upto_N += p.members;
        out.unrepresented_upto_N += p.unrep;
        for (std::size_t i = 0; i < m; ++i)
            out.first[i] += p.first[i];
        for (std::size_t i = 0; i < m * m; ++i) {
            out.second[i] += p.second[i];
            out.second_raw[i] += p.second_raw[i];
        }
    }
    return out;
}

struct MomentReport
{
    std::string prop;
    int j = 0;
    u64 N = 0;
    int k = 0;
    double Delta = 0;
    u64 W = 2;
    u64 d = 0;
    u64 d_tilde = 0;
    double lhs = 0;
    double main_term = 0;
    double ratio = std::numeric_limits<double>::quiet_NaN();
    double gamma_w = 0;
    double L_value = std::numeric_limits<double>::quiet_NaN();
    double L_tail = std::numeric_limits<double>::quiet_NaN();
    std::size_t Dj_size = 0;
    double tail_mass = 0;
    u64 pairs = 0;
    u64 flagged = 0;
};

inline constexpr double kLTolerance = 1e-2;
inline constexpr u64 kMaxLTerms = 100'000'000;

// L(1, chi) with M = M0 * 2^i, the first with tail bound <= tol (capped).
struct CertifiedL
{
    LEstimate est;
    bool certified = false;
};

inline u64 doubled_truncation(u64 q, u64 M0, double tol)
{
    u64 M = M0;
    while (l1_tail_bound(q, M) > tol && M < kMaxLTerms)
        M = std::min(kMaxLTerms, 2 * M);
    return M;
}

inline CertifiedL certified_l1(i64 disc, u64 M0, double tol = kLTolerance)
{
    u64 q = static_cast<u64>(disc < 0 ? -disc : disc);
    CertifiedL out;
    out.est = l1_truncated(disc, doubled_truncation(q, std::max(q, M0), tol));
    out.certified = out.est.tail_bound <= tol;
    return out;
}

// L(1, chi_{d d~}) for d, d~ in D_j, d = d~ (mod 8).
inline CertifiedL pair_l1(int j, u64 d, u64 dt, double Delta, double tol = kLTolerance)
{
    i64 a = j == 0 ? -static_cast<i64>(d) : static_cast<i64>(d);
    i64 b = j == 0 ? -static_cast<i64>(dt) : static_cast<i64>(dt);
    u64 q = d * dt;
    auto M0 = std::max<u64>(q, static_cast<u64>(std::ceil(std::pow(Delta, 1.5))));
    CertifiedL out;
    out.est = l1_truncated_product(a, b, doubled_truncation(q, M0, tol));
    out.certified = out.est.tail_bound <= tol;
    return out;
}

inline double k0_of(u64 N)
{
    return std::log(std::log(static_cast<double>(N)));
}

inline int default_k(u64 N) { return static_cast<int>(std::lround(k0_of(N))); }

// Report for one proposition from precomputed sums. prop is "5.2", "5.3" or "5.4".
inline MomentReport moment_report(std::string const &prop, DjSet const &Dj, MomentSums const &S,
                                  u64 d, u64 dt = 0, double tol = kLTolerance)
{
    if (!Dj.contains(d) || (prop == "5.3" && !Dj.contains(dt)))
        throw std::invalid_argument("moment_sum: d not in D_j");
    if (prop == "5.3" && d == dt)
        throw std::invalid_argument("moment_sum: 5.3 needs two different elements");
    MomentReport r;
    r.prop = prop;
    r.j = S.j;
    r.N = S.N;
    r.k = S.k;
    r.Delta = Dj.Delta;
    r.W = S.W;
    r.d = d;
    r.d_tilde = prop == "5.3" ? dt : 0;
    r.gamma_w = gamma_W(S.W);
    r.Dj_size = Dj.members.size();
    r.tail_mass = S.tail_mass;
    std::size_t m = S.ds.size();
    std::size_t i = S.index(d);
    double absD = std::sqrt(static_cast<double>(-assoc_discriminant(static_cast<i64>(d)).D));
    double pi = std::numbers::pi;
    if (prop == "5.2") {
        r.lhs = absD / (pi * r.gamma_w) * S.first[i];
        r.main_term = S.weight_sum;
    } else if (prop == "5.3") {
        std::size_t i2 = S.index(dt);
        double absDt = std::sqrt(static_cast<double>(-assoc_discriminant(static_cast<i64>(dt)).D));
        if (d % 8 == dt % 8) {
            r.lhs = absD * absDt / (pi * pi * r.gamma_w * r.gamma_w) * S.second[i * m + i2];
            auto L = pair_l1(S.j, d, dt, Dj.Delta, tol);
            r.L_value = L.est.value;
            r.L_tail = L.est.tail_bound;
            r.flagged = L.certified ? 0 : 1;
            r.main_term = std::ldexp(1.0, S.j) * r.gamma_w * L.est.value * S.weight_sum;
        } else {
            // no main term: the sum itself vanishes
            r.lhs = S.second[i * m + i2];
            r.main_term = 0;
        }
    } else if (prop == "5.4") {
        r.lhs = absD * absD / (pi * pi * r.gamma_w * r.gamma_w) * S.second[i * m + i];
        auto fd = assoc_discriminant(static_cast<i64>(d));
        auto L = certified_l1(fd.D, 0, tol);
        r.L_value = L.est.value;
        r.L_tail = L.est.tail_bound;
        r.flagged = L.certified ? 0 : 1;
        r.main_term = std::ldexp(1.0, S.k) * static_cast<double>(S.N) /
                      (r.gamma_w * L.est.value) / std::sqrt(k0_of(S.N));
    } else {
        throw std::invalid_argument("moment_sum: unknown proposition " + prop);
    }
    if (r.main_term != 0)
        r.ratio = r.lhs / r.main_term;
    return r;
}

inline MomentReport moment_sum(std::string const &prop, DjSet const &Dj, u64 d, u64 dt, u64 N,
                               int k, SieveOptions const &opt = {})
{
    std::vector<u64> ds{d};
    if (prop == "5.3")
        ds.push_back(dt);
    auto S = moment_sums(ds, N, k, Dj.j, Dj.W, opt);
    return moment_report(prop, Dj, S, d, dt);
}

// (1/|D_j|^2) sum over ordered d != d~ in D_j, d = d~ (mod 8), of L(1, chi_{d d~}).
inline MomentReport prop55_average(DjSet const &Dj, double tol = kLTolerance)
{
    std::size_t m = Dj.members.size();
    if (m < 2)
        throw std::invalid_argument("prop55_average: D_j has fewer than 2 members");
    MomentReport r;
    r.prop = "5.5";
    r.j = Dj.j;
    r.Delta = Dj.Delta;
    r.W = Dj.W;
    r.gamma_w = gamma_W(Dj.W);
    r.Dj_size = m;
    double sum = 0;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) {
            u64 d = Dj.members[a], dt = Dj.members[b];
            if (d % 8 != dt % 8)
                continue;
            auto L = pair_l1(Dj.j, d, dt, Dj.Delta, tol);
            sum += 2 * L.est.value;  // (d, d~) and (d~, d)
            r.pairs += 2;
            if (!L.certified)
                r.flagged += 2;
        }
    r.lhs = sum / static_cast<double>(m * m);
    r.main_term = std::ldexp(1.0, -Dj.j) / r.gamma_w;
    r.ratio = r.lhs / r.main_term;
    return r;
}

struct VarianceReport
{
    double variance = 0;            // sum (F_j(n) - 1)^2 e^{-n/N} over n <= cutoff
    u64 exceptional = 0;            // |E_j(N, k)| from the coverage bitmap
    u64 members = 0;                // |A_j(N, k)|
    u64 unrepresented_by_F = 0;     // n <= N in A_j(k) with F_j(n) = 0
    double lower_bound = 0;         // |E_j(N, k)| e^{-1}
    bool inequality_holds = false;  // lower_bound <= variance
};

inline VarianceReport variance_report(DjSet const &Dj, u64 N, int k, SieveOptions const &opt = {})
{
    if (Dj.members.empty())
        throw std::invalid_argument("variance_report: empty D_j");
    auto S = moment_sums(Dj.members, N, k, Dj.j, Dj.W, opt);
    auto bm = coverage_bitmap(N, Dj.members, opt);
    auto t = count_by_k(N, &bm, opt);
    VarianceReport v;
    v.variance = S.variance;
    v.exceptional = t.uncovered_j(k, Dj.j);
    v.members = t.A_j(k, Dj.j);
    v.unrepresented_by_F = S.unrepresented_upto_N;
    v.lower_bound = static_cast<double>(v.exceptional) * std::exp(-1.0);
    v.inequality_holds = v.lower_bound <= v.variance;
    return v;
}

} // namespace qfcover

#endif
