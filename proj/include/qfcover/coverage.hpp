// Which n <= N are of the form x^2 + d y^2 for some d in a set, and the
// counting experiments built on that bitmap.
#ifndef QFCOVER_COVERAGE_HPP
#define QFCOVER_COVERAGE_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "arith.hpp"

namespace qfcover {

struct SieveOptions
{
    u64 segment_size = u64{1} << 24;  // entries per segment
    unsigned workers = 1;
    u64 max_memory_bytes = u64{1} << 31;
};

namespace detail {

// Runs body(segment_index, lo, hi) over [first, last) cut into segments of
// `size` entries; segment starts are multiples of `size`.
inline void for_each_segment(u64 first, u64 last, SieveOptions const &opt,
                             std::function<void(std::size_t, u64, u64)> const &body)
{
    if (opt.segment_size == 0 || opt.segment_size % 64 != 0)
        throw std::invalid_argument("segment size must be a positive multiple of 64");
    if (first >= last)
        return;
    u64 size = opt.segment_size;
    u64 first_seg = first / size;
    u64 last_seg = (last - 1) / size;
    std::size_t nseg = static_cast<std::size_t>(last_seg - first_seg + 1);
    auto run = [&](std::size_t s) {
        u64 lo = std::max(first, (first_seg + s) * size);
        u64 hi = std::min(last, (first_seg + s + 1) * size);
        body(s, lo, hi);
    };
    unsigned workers = std::max(1u, opt.workers);
    if (workers == 1 || nseg == 1) {
        for (std::size_t s = 0; s < nseg; ++s)
            run(s);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (unsigned w = 0; w < std::min<std::size_t>(workers, nseg); ++w)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t s = next.fetch_add(1);
                if (s >= nseg || failed.load())
                    return;
                try {
                    run(s);
                } catch (...) {
                    if (!failed.exchange(true))
                        error = std::current_exception();
                    return;
                }
            }
        });
    for (auto &t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

inline void check_memory(u64 bytes, SieveOptions const &opt, char const *what)
{
    if (bytes > opt.max_memory_bytes)
        throw std::runtime_error(std::string(what) + ": estimated memory " + std::to_string(bytes) +
                                 " bytes exceeds the limit of " +
                                 std::to_string(opt.max_memory_bytes) +
                                 "; reduce the segment size or the worker count");
}

} // namespace detail

// One bit per n in [1, limit]; bit n set iff n = x^2 + d y^2 for some
// generator d and integers x, y.
class CoverageBitmap
{
public:
    CoverageBitmap() = default;
    explicit CoverageBitmap(u64 limit) : limit_(limit), words_(limit / 64 + 1, 0) {}

    u64 limit() const { return limit_; }
    std::vector<u64> const &generators() const { return generators_; }

    bool test(u64 n) const { return (words_[n >> 6] >> (n & 63)) & 1; }

    u64 popcount() const
    {
        u64 c = 0;
        for (u64 w : words_)
            c += static_cast<u64>(std::popcount(w));
        return c;
    }

    // Bitwise subset relation.
    bool implies(CoverageBitmap const &o) const
    {
        if (o.limit_ != limit_)
            return false;
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i])
                return false;
        return true;
    }

    friend bool operator==(CoverageBitmap const &a, CoverageBitmap const &b)
    {
        return a.limit_ == b.limit_ && a.words_ == b.words_;
    }

    // Marks x^2 + d y^2 <= limit for every d in ds (and squares on first use).
    void add(std::vector<u64> const &ds, SieveOptions const &opt = {})
    {
        for (u64 d : ds)
            if (d < 1)
                throw std::invalid_argument("coverage: generators must be >= 1");
        if (ds.empty())
            return;
        bool squares = generators_.empty();
        detail::check_memory(words_.size() * 8, opt, "coverage_bitmap");
        detail::for_each_segment(1, limit_ + 1, opt, [&](std::size_t, u64 lo, u64 hi) {
            mark_segment(lo, hi, ds, squares);
        });
        generators_.insert(generators_.end(), ds.begin(), ds.end());
    }

private:
    void set(u64 n) { words_[n >> 6] |= u64{1} << (n & 63); }

    // Outer loop d, middle y, inner x over n in [lo, hi).
    void mark_segment(u64 lo, u64 hi, std::vector<u64> const &ds, bool squares)
    {
        if (squares)
            for (u64 x = isqrt_ceil(lo); x * x < hi; ++x)
                set(x * x);
        for (u64 d : ds) {
            for (u64 y = 1;; ++y) {
                u64 base = d * y * y;
                if (base >= hi)
                    break;
                u64 x = base >= lo ? 0 : isqrt_ceil(lo - base);
                u64 n = base + x * x;
                u64 step = 2 * x + 1;
                while (n < hi) {
                    set(n);
                    n += step;
                    step += 2;
                }
            }
        }
    }

    u64 limit_ = 0;
    std::vector<u64> words_;
    std::vector<u64> generators_;
};

inline CoverageBitmap coverage_bitmap(u64 N, std::vector<u64> const &d_set,
                                      SieveOptions const &opt = {})
{
    if (N < 1)
        throw std::invalid_argument("coverage_bitmap: N must be >= 1");
    if (d_set.empty())
        throw std::invalid_argument("coverage_bitmap: empty generator set");
    CoverageBitmap bm(N);
    bm.add(d_set, opt);
    return bm;
}

// Squarefree d <= Delta: d = d1 d2^2 covers nothing that d1 does not.
inline std::vector<u64> squarefree_equivalent(u64 d_max)
{
    if (d_max < 1)
        throw std::invalid_argument("squarefree_equivalent: Delta must be >= 1");
    std::vector<bool> sqfree(d_max + 1, true);
    for (u64 p = 2; p * p <= d_max; ++p)
        for (u64 m = p * p; m <= d_max; m += p * p)
            sqfree[m] = false;
    std::vector<u64> out;
    for (u64 d = 1; d <= d_max; ++d)
        if (sqfree[d])
            out.push_back(d);
    return out;
}

inline constexpr int kMaxOmega = 64;

// Per-k tallies of A(N, k), split by 2-adic class: j = 0, j = 1, and 4 | n.
struct KCountTable
{
    struct Cell
    {
        u64 total = 0;
        u64 covered = 0;
        u64 uncovered() const { return total - covered; }
    };
    u64 N = 0;
    std::array<std::array<Cell, 3>, kMaxOmega> cells{};  // [k][jclass]

    u64 A(int k) const { return cell_sum(k).total; }
    u64 covered(int k) const { return cell_sum(k).covered; }
    u64 uncovered(int k) const { return cell_sum(k).uncovered(); }
    u64 A_j(int k, int j) const { return cells.at(k).at(j).total; }
    u64 covered_j(int k, int j) const { return cells.at(k).at(j).covered; }
    u64 uncovered_j(int k, int j) const { return cells.at(k).at(j).uncovered(); }

    int max_k() const
    {
        int m = 0;
        for (int k = 0; k < kMaxOmega; ++k)
            if (A(k))
                m = k;
        return m;
    }

    u64 total() const
    {
        u64 s = 0;
        for (int k = 0; k < kMaxOmega; ++k)
            s += A(k);
        return s;
    }

    u64 total_covered() const
    {
        u64 s = 0;
        for (int k = 0; k < kMaxOmega; ++k)
            s += covered(k);
        return s;
    }

    void merge(KCountTable const &o)
    {
        for (int k = 0; k < kMaxOmega; ++k)
            for (int j = 0; j < 3; ++j) {
                cells[k][j].total += o.cells[k][j].total;
                cells[k][j].covered += o.cells[k][j].covered;
            }
    }

private:
    Cell cell_sum(int k) const
    {
        Cell c;
        for (auto const &x : cells.at(k)) {
            c.total += x.total;
            c.covered += x.covered;
        }
        return c;
    }
};

inline int two_adic_class(u64 n)
{
    return std::min(std::countr_zero(n), 2);
}

// Counts by Omega(n) via the segmented sieve; `bitmap` may be null.
inline KCountTable count_by_k(u64 N, CoverageBitmap const *bitmap, SieveOptions const &opt = {})
{
    if (bitmap && bitmap->limit() != N)
        throw std::invalid_argument("count_by_k: bitmap limit differs from N");
    // Omega segments carry 5 bytes per entry, so they are capped at 2^20 entries
    SieveOptions o = opt;
    o.segment_size = std::min<u64>(opt.segment_size, u64{1} << 20);
    detail::check_memory(u64{5} * o.segment_size * std::max(1u, o.workers) +
                             (bitmap ? N / 8 : 0),
                         o, "count_by_k");
    SegmentedOmega sieve(N);
    std::size_t nseg = static_cast<std::size_t>(N / o.segment_size + 1);
    std::vector<KCountTable> partial(nseg);
    detail::for_each_segment(1, N + 1, o, [&](std::size_t s, u64 lo, u64 hi) {
        std::vector<std::uint8_t> omega;
        std::vector<std::uint32_t> scratch;
        sieve.fill(lo, hi, omega, scratch);
        auto &t = partial[s];
        for (u64 n = lo; n < hi; ++n) {
            auto &c = t.cells[omega[n - lo]][two_adic_class(n)];
            ++c.total;
            if (bitmap && bitmap->test(n))
                ++c.covered;
        }
    });
    KCountTable out;
    out.N = N;
    for (auto const &t : partial)
        out.merge(t);
    return out;
}

inline KCountTable count_by_k(u64 N, u64 d_max, SieveOptions const &opt = {})
{
    auto bm = coverage_bitmap(N, squarefree_equivalent(d_max), opt);
    return count_by_k(N, &bm, opt);
}

// The same counts read from full sieve tables (independent of SegmentedOmega).
inline KCountTable count_by_k(u64 N, CoverageBitmap const &bitmap, SieveTables const &tables)
{
    if (tables.limit < N || bitmap.limit() != N)
        throw std::invalid_argument("count_by_k: tables or bitmap do not cover N");
    KCountTable out;
    out.N = N;
    for (u64 n = 1; n <= N; ++n) {
        auto &c = out.cells[tables.omega[n]][two_adic_class(n)];
        ++c.total;
        if (bitmap.test(n))
            ++c.covered;
    }
    return out;
}

// Delta(alpha) = (log N)^{log 2} 2^{alpha sqrt(log log N)}
inline double delta_for_alpha(u64 N, double alpha)
{
    double L = std::log(static_cast<double>(N));
    return std::pow(L, std::log(2.0)) * std::pow(2.0, alpha * std::sqrt(std::log(L)));
}

struct PhaseRow
{
    double alpha = 0;
    double delta = 0;
    u64 covered = 0;
    double fraction = 0;
    double phi = 0;
};

inline constexpr u64 kMaxDelta = 100000;

// Coverage fraction for Delta(alpha), alphas processed in ascending order;
// generator sets are nested so one bitmap is grown across rows.
inline std::vector<PhaseRow> phase_experiment(u64 N, std::vector<double> alphas,
                                              SieveOptions const &opt = {})
{
    if (N < 16)
        throw std::invalid_argument("phase_experiment: N must be >= 16");
    std::sort(alphas.begin(), alphas.end());
    CoverageBitmap bm(N);
    u64 have = 0;
    std::vector<PhaseRow> rows;
    for (double a : alphas) {
        PhaseRow r;
        r.alpha = a;
        r.delta = delta_for_alpha(N, a);
        r.phi = gaussian_cdf(a);
        if (r.delta > static_cast<double>(kMaxDelta))
            throw std::invalid_argument("phase_experiment: Delta(" + std::to_string(a) +
                                        ") exceeds the cap " + std::to_string(kMaxDelta));
        auto dmax = static_cast<u64>(std::floor(r.delta));
        if (dmax > have) {
            std::vector<u64> fresh;
            for (u64 d : squarefree_equivalent(dmax))
                if (d > have)
                    fresh.push_back(d);
            bm.add(fresh, opt);
            have = dmax;
        }
        r.covered = have == 0 ? 0 : bm.popcount();
        r.fraction = static_cast<double>(r.covered) / static_cast<double>(N);
        rows.push_back(r);
    }
    return rows;
}

struct SelbergRow
{
    int k = 0;
    u64 count = 0;
    double prediction = 0;
    double ratio = 0;
};

inline double selberg_prediction(u64 N, int k)
{
    double L = std::log(static_cast<double>(N));
    double k0 = std::log(L);
    return static_cast<double>(N) / L * std::exp(k * std::log(k0) - std::lgamma(k + 1.0));
}

inline std::vector<SelbergRow> selberg_compare(u64 N, int k_lo, int k_hi,
                                               SieveOptions const &opt = {})
{
    if (N < 16)
        throw std::invalid_argument("selberg_compare: N must be >= 16");
    auto t = count_by_k(N, nullptr, opt);
    std::vector<SelbergRow> rows;
    for (int k = k_lo; k <= k_hi; ++k) {
        SelbergRow r;
        r.k = k;
        r.count = k < kMaxOmega ? t.A(k) : 0;
        r.prediction = selberg_prediction(N, k);
        r.ratio = static_cast<double>(r.count) / r.prediction;
        rows.push_back(r);
    }
    return rows;
}

struct Prop41Result
{
    u64 count = 0;
    u64 A = 0;
    double normalized = 0;  // count 2^k / (N (log log N)^3)
};

inline Prop41Result prop41_count(u64 N, u64 d, int k, SieveOptions const &opt = {})
{
    if (!is_squarefree(d))
        throw std::invalid_argument("prop41_count: d must be squarefree");
    auto bm = coverage_bitmap(N, {d}, opt);
    auto t = count_by_k(N, &bm, opt);
    Prop41Result r;
    r.count = t.covered(k);
    r.A = t.A(k);
    double k0 = std::log(std::log(static_cast<double>(N)));
    r.normalized = static_cast<double>(r.count) * std::ldexp(1.0, k) /
                   (static_cast<double>(N) * k0 * k0 * k0);
    return r;
}

// sum_{n <= cutoff, Omega(n) = k, v_2(n) = j} e^{-n/N}, read from sieve tables.
inline double weighted_k_sum(SieveTables const &tables, u64 N, int k, int j, u64 cutoff)
{
    if (cutoff > tables.limit)
        throw std::invalid_argument("weighted_k_sum: cutoff beyond sieve tables");
    double s = 0, comp = 0;
    for (u64 n = 1; n <= cutoff; ++n) {
        if (tables.omega[n] != k || std::countr_zero(n) != j)
            continue;
        double x = std::exp(-static_cast<double>(n) / static_cast<double>(N));
        double y = x - comp;
        double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    return s;
}

} // namespace qfcover

#endif
