// Class groups of imaginary quadratic fields via reduced forms, their
// character groups, and the coefficients r(n, psi) = sum_{N a = n} psi(a).
#ifndef QFCOVER_CLASSGROUP_HPP
#define QFCOVER_CLASSGROUP_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "arith.hpp"
#include "quadforms.hpp"

namespace qfcover {

namespace detail {

struct ExtGcd
{
    i64 g, x, y;  // a x + b y = g >= 0
};

inline ExtGcd ext_gcd(i64 a, i64 b)
{
    i64 old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        i64 q = old_r / r;
        std::tie(old_r, r) = std::make_tuple(r, old_r - q * r);
        std::tie(old_s, s) = std::make_tuple(s, old_s - q * s);
        std::tie(old_t, t) = std::make_tuple(t, old_t - q * t);
    }
    if (old_r < 0)
        return {-old_r, -old_s, -old_t};
    return {old_r, old_s, old_t};
}

} // namespace detail

// Dirichlet composition of two primitive forms of the same discriminant,
// followed by reduction.
inline QuadForm compose(QuadForm f, QuadForm g)
{
    i64 D = f.discriminant();
    if (g.discriminant() != D)
        throw std::invalid_argument("compose: discriminants differ");
    if (D >= 0 || f.a <= 0 || g.a <= 0)
        throw std::invalid_argument("compose: forms must be positive definite");
    if (f.a > g.a)
        std::swap(f, g);
    i64 s = (f.b + g.b) / 2;
    i64 n = g.b - s;

    i64 y1, d;
    if (g.a % f.a == 0) {
        y1 = 0;
        d = f.a;
    } else {
        auto e = detail::ext_gcd(g.a, f.a);
        y1 = e.x;
        d = e.g;
    }

    i64 x2, y2, d1;
    if (s % d == 0) {
        y2 = -1;
        x2 = 0;
        d1 = d;
    } else {
        auto e = detail::ext_gcd(s, d);
        x2 = e.x;
        y2 = -e.y;
        d1 = e.g;
    }

    i64 v1 = f.a / d1;
    i64 v2 = g.a / d1;
    i128 rr = (static_cast<i128>(y1) * y2 * n - static_cast<i128>(x2) * g.c) % v1;
    if (rr < 0)
        rr += v1;
    i64 r = static_cast<i64>(rr);
    i64 b3 = g.b + 2 * v2 * r;
    i64 a3 = v1 * v2;
    i128 num = static_cast<i128>(b3) * b3 - D;
    if (num % (4 * a3) != 0)
        throw std::logic_error("compose: non-integral c (internal error)");
    i64 c3 = static_cast<i64>(num / (4 * a3));
    return reduce({a3, b3, c3});
}

inline constexpr std::size_t kMaxClassNumber = 10000;

// The class group of a negative fundamental discriminant, as an explicit
// multiplication table on the reduced forms. Class 0 is the identity.
struct ClassGroup
{
    i64 D = -4;
    std::vector<QuadForm> classes;
    std::size_t h = 1;
    int w = 4;
    std::vector<std::uint32_t> mul;     // h*h, mul[i*h + j] = index of C_i C_j
    std::vector<std::uint32_t> inv;     // inverse class
    std::vector<std::uint32_t> orders;  // element orders
    std::uint32_t exponent = 1;         // lcm of orders

    // Polycyclic basis: every class is uniquely prod gens[t]^{i_t}, 0 <= i_t < rel_orders[t].
    std::vector<std::uint32_t> gens;
    std::vector<std::uint32_t> rel_orders;

    std::uint32_t op(std::uint32_t i, std::uint32_t j) const { return mul[i * h + j]; }

    std::uint32_t index_of(QuadForm const &f) const
    {
        QuadForm r = reduce(f);
        for (std::uint32_t i = 0; i < h; ++i)
            if (classes[i] == r)
                return i;
        throw std::invalid_argument("ClassGroup::index_of: form not in this group");
    }

    bool is_cyclic() const
    {
        for (auto o : orders)
            if (o == h)
                return true;
        return false;
    }
};

inline ClassGroup build_class_group(i64 D)
{
    ClassGroup G;
    G.D = D;
    G.classes = enumerate_reduced(D);
    G.h = G.classes.size();
    G.w = units_for(D);
    if (G.h > kMaxClassNumber)
        throw std::invalid_argument("build_class_group: class number " + std::to_string(G.h) +
                                    " exceeds " + std::to_string(kMaxClassNumber));
    std::size_t h = G.h;

    std::map<std::pair<i64, i64>, std::uint32_t> lookup;
    for (std::uint32_t i = 0; i < h; ++i)
        lookup[{G.classes[i].a, G.classes[i].b}] = i;
    auto find = [&](QuadForm const &f) {
        auto it = lookup.find({f.a, f.b});
        if (it == lookup.end() || G.classes[it->second] != f)
            throw std::logic_error("build_class_group: composite not among reduced forms");
        return it->second;
    };

    G.mul.assign(h * h, 0);
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = i; j < h; ++j) {
            std::uint32_t k = find(compose(G.classes[i], G.classes[j]));
            G.mul[i * h + j] = k;
            G.mul[j * h + i] = k;
        }

    G.inv.assign(h, 0);
    for (std::uint32_t i = 0; i < h; ++i)
        G.inv[i] = find(reduce(G.classes[i].inverse()));

    G.orders.assign(h, 1);
    std::uint64_t lcm = 1;
    for (std::uint32_t i = 0; i < h; ++i) {
        std::uint32_t x = i, o = 1;
        while (x != 0) {
            x = G.op(x, i);
            ++o;
            if (o > h)
                throw std::logic_error("build_class_group: element order exceeds h");
        }
        G.orders[i] = o;
        lcm = std::lcm(lcm, static_cast<std::uint64_t>(o));
    }
    G.exponent = static_cast<std::uint32_t>(lcm);

    // greedy basis: repeatedly adjoin the element of largest order outside H
    std::vector<bool> in_h(h, false);
    std::vector<std::uint32_t> members{0};
    in_h[0] = true;
    while (members.size() < h) {
        std::uint32_t best = 0;
        for (std::uint32_t i = 1; i < h; ++i)
            if (!in_h[i] && (best == 0 || G.orders[i] > G.orders[best]))
                best = i;
        // smallest m with best^m in H
        std::uint32_t m = 1, x = best;
        while (!in_h[x]) {
            x = G.op(x, best);
            ++m;
        }
        G.gens.push_back(best);
        G.rel_orders.push_back(m);
        std::vector<std::uint32_t> grown;
        grown.reserve(members.size() * m);
        std::uint32_t power = 0;  // best^t
        for (std::uint32_t t = 0; t < m; ++t) {
            for (auto hm : members)
                grown.push_back(G.op(hm, power));
            power = G.op(power, best);
        }
        for (auto g : grown)
            in_h[g] = true;
        members = std::move(grown);
    }
    return G;
}

// A character of the class group, psi(C_i) = exp(2 pi i k_i / modulus).
struct ClassCharacter
{
    std::vector<std::uint32_t> exps;
    std::uint32_t modulus = 1;
    std::size_t label = 0;

    bool is_real() const
    {
        for (auto k : exps)
            if (2 * static_cast<std::uint64_t>(k) % modulus != 0)
                return false;
        return true;
    }

    bool is_principal() const
    {
        for (auto k : exps)
            if (k != 0)
                return false;
        return true;
    }

    std::complex<double> value(std::uint32_t cls) const
    {
        double t = 2.0 * std::numbers::pi * exps[cls] / modulus;
        return {std::cos(t), std::sin(t)};
    }

    ClassCharacter conj() const
    {
        ClassCharacter c = *this;
        for (auto &k : c.exps)
            k = (modulus - k) % modulus;
        return c;
    }

    ClassCharacter operator*(ClassCharacter const &o) const
    {
        if (o.modulus != modulus || o.exps.size() != exps.size())
            throw std::invalid_argument("ClassCharacter: incompatible characters");
        ClassCharacter c = *this;
        for (std::size_t i = 0; i < exps.size(); ++i)
            c.exps[i] = (exps[i] + o.exps[i]) % modulus;
        return c;
    }

    bool same_values(ClassCharacter const &o) const
    {
        return modulus == o.modulus && exps == o.exps;
    }
};

// All h characters of G, principal first. Built by extending characters of
// <g_1, ..., g_t> one generator at a time: psi(g)^m must equal psi(g^m).
inline std::vector<ClassCharacter> characters(ClassGroup const &G)
{
    std::uint32_t e = G.exponent;
    std::size_t h = G.h;

    // characters of the growing subgroup: map class -> exponent, -1 if outside
    struct Partial
    {
        std::vector<std::int64_t> exps;
    };
    std::vector<std::int64_t> base(h, -1);
    base[0] = 0;
    std::vector<Partial> chars{{base}};
    std::vector<std::uint32_t> members{0};

    for (std::size_t t = 0; t < G.gens.size(); ++t) {
        std::uint32_t g = G.gens[t];
        std::uint32_t m = G.rel_orders[t];
        std::uint32_t gm = 0;
        for (std::uint32_t i = 0; i < m; ++i)
            gm = G.op(gm, g);

        std::vector<std::uint32_t> powers(m);
        powers[0] = 0;
        for (std::uint32_t i = 1; i < m; ++i)
            powers[i] = G.op(powers[i - 1], g);

        std::vector<Partial> next;
        for (auto const &chi : chars) {
            auto target = static_cast<std::uint64_t>(chi.exps[gm]);  // psi(g)^m
            if (target % m != 0)
                throw std::logic_error("characters: unsolvable extension (internal error)");
            for (std::uint32_t s = 0; s < m; ++s) {
                std::uint64_t u = (target / m + static_cast<std::uint64_t>(s) * (e / m)) % e;
                Partial ext{chi.exps};
                for (std::uint32_t i = 0; i < m; ++i)
                    for (auto hm : members) {
                        std::uint32_t cls = G.op(hm, powers[i]);
                        ext.exps[cls] = static_cast<std::int64_t>(
                            (static_cast<std::uint64_t>(chi.exps[hm]) + u * i) % e);
                    }
                next.push_back(std::move(ext));
            }
        }
        chars = std::move(next);
        std::vector<std::uint32_t> grown;
        for (std::uint32_t i = 0; i < m; ++i)
            for (auto hm : members)
                grown.push_back(G.op(hm, powers[i]));
        members = std::move(grown);
    }

    std::vector<ClassCharacter> out;
    out.reserve(chars.size());
    for (std::size_t l = 0; l < chars.size(); ++l) {
        ClassCharacter c;
        c.modulus = e;
        c.label = l;
        c.exps.reserve(h);
        for (auto k : chars[l].exps) {
            if (k < 0)
                throw std::logic_error("characters: class not reached (internal error)");
            c.exps.push_back(static_cast<std::uint32_t>(k));
        }
        out.push_back(std::move(c));
    }
    return out;
}

// Number of ideals of norm n in each class: rep_count(form, n) / w.
inline std::vector<u64> ideal_counts(ClassGroup const &G, u64 n)
{
    std::vector<u64> out(G.h);
    for (std::size_t i = 0; i < G.h; ++i) {
        u64 r = rep_count(G.classes[i], n);
        if (r % static_cast<u64>(G.w) != 0)
            throw std::logic_error("ideal_counts: representation count not divisible by w");
        out[i] = r / static_cast<u64>(G.w);
    }
    return out;
}

// Ideal counts per class for every norm 1..limit, by lattice enumeration.
class IdealCountTable
{
public:
    IdealCountTable(ClassGroup const &G, u64 limit) : h_(G.h), limit_(limit)
    {
        counts_.assign(h_ * (limit + 1), 0);
        u64 absD = static_cast<u64>(-G.D);
        for (std::size_t cls = 0; cls < h_; ++cls) {
            QuadForm const &f = G.classes[cls];
            // (2a x + b y)^2 + |D| y^2 = 4 a f(x, y)
            u64 four_a_lim = 4 * static_cast<u64>(f.a) * limit;
            i64 ymax = static_cast<i64>(isqrt(four_a_lim / absD));
            for (i64 y = -ymax; y <= ymax; ++y) {
                u64 rest = four_a_lim - absD * static_cast<u64>(y * y);
                i64 umax = static_cast<i64>(isqrt(rest));
                // 2a x + b y in [-umax, umax]
                i64 xlo = -((umax + f.b * y) / (2 * f.a)) - 1;
                i64 xhi = (umax - f.b * y) / (2 * f.a) + 1;
                for (i64 x = xlo; x <= xhi; ++x) {
                    i64 v = f(x, y);
                    if (v >= 1 && static_cast<u64>(v) <= limit)
                        counts_[cls * (limit + 1) + static_cast<u64>(v)] += 1;
                }
            }
            for (u64 n = 1; n <= limit; ++n) {
                auto &c = counts_[cls * (limit + 1) + n];
                if (c % static_cast<u64>(G.w) != 0)
                    throw std::logic_error("IdealCountTable: count not divisible by w");
                c /= static_cast<u64>(G.w);
            }
        }
    }

    u64 limit() const { return limit_; }
    u64 count(std::size_t cls, u64 n) const { return counts_.at(cls * (limit_ + 1) + n); }

    std::vector<u64> counts(u64 n) const
    {
        if (n < 1 || n > limit_)
            throw std::out_of_range("IdealCountTable: n out of range");
        std::vector<u64> out(h_);
        for (std::size_t i = 0; i < h_; ++i)
            out[i] = count(i, n);
        return out;
    }

private:
    std::size_t h_;
    u64 limit_;
    std::vector<u64> counts_;
};

// r(n, psi) as an element of the group ring Z[Z/e]: coefficient k counts the
// ideals of norm n with psi = exp(2 pi i k / e). Exact.
inline std::vector<i64> r_coeff_exact(std::vector<u64> const &counts, ClassCharacter const &psi)
{
    std::vector<i64> out(psi.modulus, 0);
    for (std::size_t cls = 0; cls < counts.size(); ++cls)
        out[psi.exps[cls]] += static_cast<i64>(counts[cls]);
    return out;
}

// r(n, psi) for a real character, as an integer.
inline i64 r_coeff_real(std::vector<u64> const &counts, ClassCharacter const &psi)
{
    if (!psi.is_real())
        throw std::invalid_argument("r_coeff_real: character is not real");
    i64 s = 0;
    for (std::size_t cls = 0; cls < counts.size(); ++cls)
        s += psi.exps[cls] == 0 ? static_cast<i64>(counts[cls]) : -static_cast<i64>(counts[cls]);
    return s;
}

inline std::complex<double> evaluate_group_ring(std::vector<i64> const &elt)
{
    std::complex<double> s = 0;
    auto e = static_cast<double>(elt.size());
    for (std::size_t k = 0; k < elt.size(); ++k) {
        if (elt[k] == 0)
            continue;
        double t = 2.0 * std::numbers::pi * static_cast<double>(k) / e;
        s += static_cast<double>(elt[k]) * std::complex<double>(std::cos(t), std::sin(t));
    }
    return s;
}

inline std::complex<double> r_coeff(std::vector<u64> const &counts, ClassCharacter const &psi)
{
    return evaluate_group_ring(r_coeff_exact(counts, psi));
}

inline std::complex<double> r_coeff(u64 n, ClassCharacter const &psi, ClassGroup const &G)
{
    return r_coeff(ideal_counts(G, n), psi);
}

// R_D(n) through the orthogonality relation (1/h) sum_psi r(n, psi).
inline u64 R_D_from_characters(std::vector<u64> const &counts,
                               std::vector<ClassCharacter> const &chars)
{
    std::complex<double> s = 0;
    for (auto const &psi : chars)
        s += r_coeff(counts, psi);
    double v = s.real() / static_cast<double>(chars.size());
    double rounded = std::round(v);
    if (std::abs(v - rounded) > 1e-6 || std::abs(s.imag()) > 1e-6 * static_cast<double>(chars.size()))
        throw std::runtime_error("R_D: character sum " + std::to_string(v) +
                                 " is not an integer; character table is inconsistent");
    return static_cast<u64>(rounded);
}

inline u64 R_D(u64 n, ClassGroup const &G)
{
    return R_D_from_characters(ideal_counts(G, n), characters(G));
}

// Genus characters of Q(sqrt(-d)) for an odd prime d: psi_0 alone when
// d = 3 mod 4, psi_0 and the non-trivial real character psi_1 when d = 1 mod 4.
struct GenusCharacters
{
    ClassGroup group;
    std::vector<ClassCharacter> chars;  // chars[0] = psi_0
};

inline GenusCharacters genus_characters(i64 d)
{
    if (d < 3 || d % 2 == 0 || !is_prime(static_cast<u64>(d)))
        throw std::invalid_argument("genus_characters: d = " + std::to_string(d) +
                                    " is not an odd prime");
    GenusCharacters out;
    out.group = build_class_group(assoc_discriminant(d).D);
    for (auto &psi : characters(out.group))
        if (psi.is_real())
            out.chars.push_back(std::move(psi));
    std::size_t expected = d % 4 == 1 ? 2 : 1;
    if (out.chars.size() != expected)
        throw std::logic_error("genus_characters: found " + std::to_string(out.chars.size()) +
                               " real characters, expected " + std::to_string(expected));
    return out;
}

} // namespace qfcover

#endif
