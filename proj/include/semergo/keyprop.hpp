#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semergo/averages.hpp"
#include "semergo/counting.hpp"
#include "semergo/semigroup.hpp"

namespace semergo {

// Phi(g, h) = |gcd(g, h)| - 1 = q^deg(gcd) - 1.
inline BigInt phi_correlation(const Instance& inst, const Element& g, const Element& h) {
    return BigInt::power(inst.q_int(),
                         static_cast<std::uint64_t>(sg_gcd(g, h).degree())) -
           BigInt(1);
}

// Non-integer norm bases (graphs): degree arithmetic first, one
// exponentiation at the end.
inline double phi_correlation_real(const Instance& inst, const Element& g, const Element& h) {
    return std::exp(static_cast<double>(sg_gcd(g, h).degree()) * std::log(inst.q_real())) -
           1.0;
}

// ---------------------------------------------------------------------------
// BSet: a finite element set with its harmonic sum sum 1/|g|.
// ---------------------------------------------------------------------------
struct BSet {
    enum class Kind { Primes, TwoAlmost, General };
    std::string instance_desc;
    Kind kind = Kind::General;
    std::vector<Element> elements;
    Rational harmonic_sum;        // exact; stays zero for non-integer q
    double harmonic_sum_real = 0.0;

    static BSet make(const Instance& inst, std::vector<Element> elems,
                     Kind kind = Kind::General) {
        BSet b;
        b.instance_desc = inst.description();
        b.kind = kind;
        b.elements = std::move(elems);
        for (const Element& g : b.elements) {
            if (kind == Kind::Primes && g.big_omega() != 1)
                throw Error("primes BSet requires Omega == 1 elements");
            if (kind == Kind::TwoAlmost && g.big_omega() != 2)
                throw Error("two-almost BSet requires Omega == 2 elements");
        }
        if (inst.q_is_integer()) {
            BigInt q = inst.q_int();
            long long dmax = 0;
            for (const Element& g : b.elements) dmax = std::max(dmax, g.degree());
            BigInt num(0);
            for (const Element& g : b.elements)
                num += BigInt::power(q, static_cast<std::uint64_t>(dmax - g.degree()));
            b.harmonic_sum = Rational(num, BigInt::power(q, static_cast<std::uint64_t>(dmax)));
            b.harmonic_sum_real = b.harmonic_sum.to_double();
        } else {
            KahanSum s;
            for (const Element& g : b.elements) s.add(1.0 / inst.norm_real(g));
            b.harmonic_sum_real = s.value();
        }
        return b;
    }
};

// E(B) = Elog_g Elog_h Phi(g, h), exact rational for integer q. The double
// sum is parallel over rows; exact partial sums make the reduction order
// irrelevant.
inline Rational error_functional(const Instance& inst, const BSet& B, unsigned threads = 1) {
    if (B.elements.empty()) throw EmptySet("E(B) over empty set");
    BigInt q = inst.q_int();
    long long dmax = 0;
    for (const Element& g : B.elements) dmax = std::max(dmax, g.degree());
    auto weight = [&](const Element& g) {
        return BigInt::power(q, static_cast<std::uint64_t>(dmax - g.degree()));
    };
    std::size_t n = B.elements.size();
    std::vector<BigInt> row_sums(n);
    parallel_for(n, threads, [&](std::size_t i) {
        const Element& g = B.elements[i];
        BigInt wg = weight(g);
        BigInt acc(0);
        for (std::size_t j = 0; j < n; ++j) {
            const Element& h = B.elements[j];
            BigInt p = phi_correlation(inst, g, h);
            if (p.is_zero()) continue;
            acc += p * weight(h);
        }
        row_sums[i] = wg * acc;
    });
    BigInt numerator(0);
    for (const BigInt& r : row_sums) numerator += r;
    BigInt wsum(0);
    for (const Element& g : B.elements) wsum += weight(g);
    // the q^dmax scaling cancels between numerator and wsum^2
    return Rational(numerator, wsum * wsum);
}

// Floating-point E(B) for non-integer norm bases.
inline double error_functional_real(const Instance& inst, const BSet& B) {
    if (B.elements.empty()) throw EmptySet("E(B) over empty set");
    double lnq = std::log(inst.q_real());
    KahanSum num, den;
    for (const Element& g : B.elements) {
        double wg = std::exp(-static_cast<double>(g.degree()) * lnq);
        den.add(wg);
        for (const Element& h : B.elements) {
            long long gcd_deg = sg_gcd(g, h).degree();
            if (gcd_deg == 0) continue;
            double wh = std::exp(-static_cast<double>(h.degree()) * lnq);
            num.add(wg * wh * (std::exp(static_cast<double>(gcd_deg) * lnq) - 1.0));
        }
    }
    return num.value() / (den.value() * den.value());
}

// ---------------------------------------------------------------------------
// Bounded functions on elements for Proposition 3.1.
// ---------------------------------------------------------------------------
struct ElementFn {
    std::string desc;
    std::function<Complex(const Element&)> value;

    static ElementFn one() {
        return {"one", [](const Element&) { return Complex(1.0, 0.0); }};
    }
    static ElementFn liouville() {
        return {"liouville", [](const Element& g) {
                    return Complex(g.big_omega() % 2 == 0 ? 1.0 : -1.0, 0.0);
                }};
    }
    static ElementFn omega_character(AlphaSpec alpha) {
        return {"character:alpha=" + alpha.desc, [alpha](const Element& g) {
                    double theta = 2.0 * M_PI * alpha.frac.times(g.big_omega()).to_double();
                    return Complex(std::cos(theta), std::sin(theta));
                }};
    }
};

// ---------------------------------------------------------------------------
// Proposition 3.1 at finite n, enumeration-based:
//   LHS_n = |E_{g in G_n} a(g) - Elog_{h in B} E_{g in G_{n - deg h}} a(gh)|
//   RHS   = sqrt(E(B)), with declared slack(n) = 0.7/n added on the right.
// ---------------------------------------------------------------------------
struct Prop31Row {
    int n = 0;
    double lhs = 0.0;
    bool pass = false;
    double slack = 0.0;
};

struct Prop31Report {
    std::string instance_desc;
    std::string a_desc;
    double rhs = 0.0;  // sqrt(E(B))
    Rational error_functional_value;
    std::vector<Prop31Row> rows;
    bool all_pass = false;
    bool clipped = false;
};

inline double prop31_slack(int n) { return 0.7 / static_cast<double>(n); }

inline Prop31Report proposition31_check(const Instance& inst, const BSet& B,
                                        const ElementFn& a, const std::vector<int>& n_grid) {
    check_grid(n_grid);
    if (B.elements.empty()) throw EmptySet("Proposition 3.1 with empty B");
    int nmax = n_grid.back();

    Prop31Report rep;
    rep.instance_desc = inst.description();
    rep.a_desc = a.desc;
    rep.error_functional_value = error_functional(inst, B);
    rep.rhs = std::sqrt(rep.error_functional_value.to_double());

    auto clip = [&rep](Complex z) {
        double m = std::abs(z);
        if (m > 1.0 + 1e-12) {
            rep.clipped = true;
            return z / m;
        }
        return z;
    };

    // one enumeration, grouped by degree, reused for every grid point
    std::vector<std::vector<Element>> by_degree(static_cast<std::size_t>(nmax) + 1);
    for (Element& g : inst.enumerate(nmax))
        by_degree[static_cast<std::size_t>(g.degree())].push_back(std::move(g));

    BigInt q = inst.q_int();
    long long dmax_b = 0;
    for (const Element& h : B.elements) dmax_b = std::max(dmax_b, h.degree());
    if (nmax < dmax_b) throw Error("grid too small for the degrees in B");

    for (int n : n_grid) {
        // E_{g in G_n} a(g)
        KahanComplex plain;
        std::size_t count = 0;
        for (int d = 0; d <= n; ++d) {
            for (const Element& g : by_degree[static_cast<std::size_t>(d)]) {
                plain.add(clip(a.value(g)));
                ++count;
            }
        }
        Complex lhs1 = plain.value() / static_cast<double>(count);

        // Elog_{h in B} E_{g in G_{n - deg h}} a(gh)
        KahanComplex weighted;
        KahanSum wsum;
        double lnq = std::log(inst.q_real());
        for (const Element& h : B.elements) {
            double w = std::exp(static_cast<double>(dmax_b - h.degree()) * lnq);
            KahanComplex inner;
            std::size_t inner_count = 0;
            int bound = n - static_cast<int>(h.degree());
            for (int d = 0; d <= bound; ++d) {
                for (const Element& g : by_degree[static_cast<std::size_t>(d)]) {
                    inner.add(clip(a.value(sg_mul(g, h))));
                    ++inner_count;
                }
            }
            weighted.add(w * (inner.value() / static_cast<double>(inner_count)));
            wsum.add(w);
        }
        Complex lhs2 = weighted.value() / wsum.value();

        Prop31Row row;
        row.n = n;
        row.lhs = std::abs(lhs1 - lhs2);
        row.slack = prop31_slack(n);
        row.pass = row.lhs <= rep.rhs + row.slack;
        rep.rows.push_back(row);
    }
    rep.all_pass = true;
    for (const Prop31Row& r : rep.rows) rep.all_pass &= r.pass;
    return rep;
}

// ---------------------------------------------------------------------------
// Lemma 4.2 construction. Following the proof: j0 with q^j0 >= 2 (j0 = 1 for
// integer q >= 2), C a valid lower PNT constant computed from the instance,
// P1 the full prime blocks at degrees j0 <= l < s, P2 thinned blocks at
// degrees s j, and Q_{l,j} fresh primes of degree s j + l matched in size to
// P_{1,l} x P_{2,j}. Literal epsilon-driven (s, t) explode quickly; explicit
// overrides keep properties (1)-(2) and replace (3) by reported bounds.
// ---------------------------------------------------------------------------
struct ConstructionParams {
    double epsilon = 0.0;
    int j0 = 1;
    int s = 0;
    int t = 0;
    bool overridden = false;
    Rational pnt_constant;       // C
    Rational harmonic_p1, harmonic_p2;
    Rational harmonic_b1, harmonic_b2;
    Rational bound_b1;           // E(B1) <= 1/harmonic(B1)
    Rational bound_b2;           // E(B2) <= 3/min(harmonic(P1), harmonic(P2))
    bool epsilon_achieved = false;
    std::map<int, BigInt> degree_counts;  // shared by B1 and B2
};

struct ConstructedSets {
    BSet b1, b2;
    ConstructionParams params;
};

namespace detail {

inline Rational pnt_lower_constant(const Instance& inst) {
    BigInt q = inst.q_int();
    int range = inst.pi_max_degree();
    std::optional<Rational> best;
    for (int n = 1; n <= range; ++n) {
        Rational c{BigInt(n) * inst.pi(n), BigInt::power(q, static_cast<std::uint64_t>(n))};
        if (!best || c < *best) best = c;
    }
    if (!best || best->is_zero())
        throw InsufficientPrimes("instance has a vanishing prime count in range");
    return *best;
}

}  // namespace detail

inline ConstructedSets construct_b_sets(const Instance& inst, double epsilon,
                                        std::optional<std::pair<int, int>> overrides = {},
                                        std::size_t size_budget = 1'000'000) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("epsilon must be in (0, 1)");
    if (!inst.q_is_integer())
        throw Error("construction requires an integer norm base");

    ConstructionParams params;
    params.epsilon = epsilon;
    params.j0 = 1;  // q >= 2 makes q^1 >= 2
    params.pnt_constant = detail::pnt_lower_constant(inst);
    const Rational& C = params.pnt_constant;
    // 3/epsilon as an exact rational (epsilon pinned at nine decimals)
    long long eps_num = static_cast<long long>(epsilon * 1e9);
    Rational target{BigInt(3) * BigInt(1'000'000'000LL), BigInt(eps_num)};

    int s, t;
    if (overrides) {
        params.overridden = true;
        s = overrides->first;
        t = overrides->second;
        if (s <= params.j0 || t < 1) throw Error("overrides require s > j0 and t >= 1");
    } else {
        // s: smallest with sum_{j0 <= l < s} C/l >= 3/epsilon
        Rational acc(0);
        int l = params.j0;
        const int cap = 4096;
        while (acc < target) {
            acc += C / Rational(BigInt(l));
            ++l;
            if (l > cap)
                throw InfeasibleScale("no feasible s below " + std::to_string(cap));
        }
        s = l;
        if (s - 1 > inst.pi_max_degree())
            throw InfeasibleScale("epsilon-driven s = " + std::to_string(s) +
                                  " needs pi beyond the available range (" +
                                  std::to_string(inst.pi_max_degree()) + ")");
        // t: smallest with sum_{1 <= j <= t} C/(2 |P1| s j) >= 3/epsilon
        BigInt p1_size(0);
        for (int d = params.j0; d < s; ++d) p1_size += inst.pi(d);
        Rational scale = C / (Rational(BigInt(2) * p1_size * BigInt(s)));
        // required harmonic sum H_t >= target/scale; estimate t = exp(H - gamma)
        double needed = (target / scale).to_double();
        if (needed > 30.0)
            throw InfeasibleScale(
                "epsilon-driven t is astronomically large (needs harmonic sum " +
                format_double(needed) + ", t ~ exp(" + format_double(needed - 0.5772) + "))");
        Rational h(0);
        t = 0;
        while (h < target / scale) {
            ++t;
            h += Rational(BigInt(1), BigInt(t));
            if (t > 1'000'000)
                throw InfeasibleScale("no feasible t below 1e6");
        }
    }
    params.s = s;
    params.t = t;

    BigInt q = inst.q_int();
    BigInt p1_size(0);
    for (int d = params.j0; d < s; ++d) p1_size += inst.pi(d);
    if (p1_size.is_zero()) throw InsufficientPrimes("P1 is empty");

    int max_needed_degree = s * t + (s - 1);
    if (max_needed_degree > inst.pi_max_degree())
        throw InfeasibleScale("construction needs pi up to degree " +
                              std::to_string(max_needed_degree) + ", have " +
                              std::to_string(inst.pi_max_degree()));

    // P1: all primes of degree j0 .. s-1
    std::vector<Element> p1;
    for (int d = params.j0; d < s; ++d) {
        if (!inst.pi(d).fits_u64() || inst.pi(d).to_u64() > size_budget)
            throw InfeasibleScale("P1 block at degree " + std::to_string(d) + " too large");
        std::uint64_t cnt = inst.pi(d).to_u64();
        for (std::uint64_t i = 0; i < cnt; ++i) p1.push_back(Element::prime(PrimeId{d, i}));
    }

    // P2 blocks: |P_{2,j}| = ceil(C q^(s j) / (2 |P1| s j)) primes of degree s j
    std::vector<std::vector<Element>> p2_blocks;
    std::vector<Element> p2;
    for (int j = 1; j <= t; ++j) {
        Rational size_rat = C * Rational(BigInt::power(q, static_cast<std::uint64_t>(s * j)),
                                         BigInt(2) * p1_size * BigInt(s) * BigInt(j));
        // exact ceiling
        BigInt quot, rem;
        BigInt::divmod(size_rat.num(), size_rat.den(), quot, rem);
        BigInt size = rem.is_zero() ? quot : quot + BigInt(1);
        if (size.is_zero()) size = BigInt(1);
        if (!size.fits_u64() || size.to_u64() > size_budget)
            throw InfeasibleScale("P2 block at j=" + std::to_string(j) + " too large");
        if (size > inst.pi(s * j))
            throw InsufficientPrimes("pi(" + std::to_string(s * j) +
                                     ") smaller than the required P2 block");
        std::uint64_t cnt = size.to_u64();
        std::vector<Element> block;
        for (std::uint64_t i = 0; i < cnt; ++i)
            block.push_back(Element::prime(PrimeId{s * j, i}));
        p2_blocks.push_back(block);
        p2.insert(p2.end(), block.begin(), block.end());
    }

    // B2 = union of P_{1,l} * P_{2,j}; B1 = matching prime blocks Q_{l,j} of
    // degree s j + l, drawn disjointly in increasing (j, l) order
    std::vector<Element> b1_elems, b2_elems;
    std::map<int, std::uint64_t> next_free;  // per-degree cursor for Q draws
    std::map<int, BigInt> degree_counts;
    for (int j = 1; j <= t; ++j) {
        for (int l = params.j0; l < s; ++l) {
            std::uint64_t count_l = inst.pi(l).to_u64();
            std::uint64_t block_size = count_l * p2_blocks[static_cast<std::size_t>(j - 1)].size();
            int qdeg = s * j + l;
            std::uint64_t& cursor = next_free[qdeg];
            if (BigInt(static_cast<unsigned long long>(cursor + block_size)) > inst.pi(qdeg))
                throw InsufficientPrimes("pi(" + std::to_string(qdeg) +
                                         ") cannot host the Q block");
            for (std::uint64_t i = 0; i < block_size; ++i)
                b1_elems.push_back(Element::prime(PrimeId{qdeg, cursor + i}));
            cursor += block_size;
            for (std::uint64_t i = 0; i < count_l; ++i)
                for (const Element& pb : p2_blocks[static_cast<std::size_t>(j - 1)])
                    b2_elems.push_back(sg_mul(Element::prime(PrimeId{l, i}), pb));
            degree_counts[qdeg] += BigInt(static_cast<unsigned long long>(block_size));
        }
    }

    ConstructedSets out;
    out.b1 = BSet::make(inst, std::move(b1_elems), BSet::Kind::Primes);
    out.b2 = BSet::make(inst, std::move(b2_elems), BSet::Kind::TwoAlmost);
    params.degree_counts = std::move(degree_counts);
    params.harmonic_p1 = BSet::make(inst, p1, BSet::Kind::Primes).harmonic_sum;
    params.harmonic_p2 = BSet::make(inst, p2, BSet::Kind::Primes).harmonic_sum;
    params.harmonic_b1 = out.b1.harmonic_sum;
    params.harmonic_b2 = out.b2.harmonic_sum;
    params.bound_b1 = Rational(BigInt(1)) / params.harmonic_b1;
    Rational hmin = params.harmonic_p1 < params.harmonic_p2 ? params.harmonic_p1
                                                            : params.harmonic_p2;
    params.bound_b2 = Rational(BigInt(3)) / hmin;
    Rational eps_rat{BigInt(eps_num), BigInt(1'000'000'000LL)};
    params.epsilon_achieved = params.bound_b1 <= eps_rat && params.bound_b2 <= eps_rat;
    out.params = params;
    return out;
}

// ---------------------------------------------------------------------------
// Lemma 4.3: with per-degree counts matching, the two nested averages agree
// exactly. Both sides are computed independently in rational arithmetic for
// Omega-measurable bounded functions.
// ---------------------------------------------------------------------------
struct Lemma43Result {
    Rational lhs, rhs;
    bool equal = false;
};

namespace detail {

inline std::map<int, BigInt> degree_histogram(const BSet& b) {
    std::map<int, BigInt> h;
    for (const Element& g : b.elements) h[static_cast<int>(g.degree())] += BigInt(1);
    return h;
}

// E_{g in G_m} a(Omega(g)) from the count table, exact.
inline Rational cesaro_mean_from_table(const CountTable& t, const BoundedFn& a, int m) {
    std::vector<BigInt> ck = t.cumulative_by_k(m, false);
    Rational num(0);
    for (int k = 0; k <= m; ++k) {
        const BigInt& c = ck[static_cast<std::size_t>(k)];
        if (c.is_zero()) continue;
        num += Rational(c) * a.value_rational(static_cast<std::uint64_t>(k));
    }
    return num / Rational(t.G_cum[static_cast<std::size_t>(m)]);
}

inline Rational lemma43_side(const Instance& inst, const CountTable& t, const BSet& b,
                             const BoundedFn& a, int n) {
    auto hist = detail::degree_histogram(b);
    BigInt q = inst.q_int();
    int dmax = hist.rbegin()->first;
    Rational num(0);
    BigInt den(0);
    for (const auto& [deg, count] : hist) {
        BigInt w = count * BigInt::power(q, static_cast<std::uint64_t>(dmax - deg));
        num += Rational(w) * cesaro_mean_from_table(t, a, n - deg);
        den += w;
    }
    return num / Rational(den);
}

}  // namespace detail

inline Lemma43Result lemma43_identity(const Instance& inst, const CountTable& t,
                                      const BSet& b1, const BSet& b2, const BoundedFn& a,
                                      int n) {
    if (!a.rational)
        throw Error("lemma43_identity needs a rational-valued bounded function");
    if (b1.elements.empty() || b2.elements.empty()) throw EmptySet("lemma 4.3 sets");
    auto h1 = detail::degree_histogram(b1);
    auto h2 = detail::degree_histogram(b2);
    if (h1 != h2)
        throw DegreeMismatchSets("per-degree counts of B1 and B2 differ");
    int dmax = h1.rbegin()->first;
    if (n < dmax || n > t.nmax)
        throw Error("n must cover the degrees of B within the table range");
    Lemma43Result res;
    res.lhs = detail::lemma43_side(inst, t, b1, a, n);
    res.rhs = detail::lemma43_side(inst, t, b2, a, n);
    res.equal = res.lhs == res.rhs;
    return res;
}

}  // namespace semergo
