#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semergo/bigint.hpp"
#include "semergo/numtheory.hpp"
#include "semergo/util.hpp"

namespace semergo {

// ---------------------------------------------------------------------------
// F_q = F_p[t]/(modulus), elements stored as coefficient vectors over F_p of
// length k (values reduced mod p, low degree first). For k == 1 the modulus
// is absent and every element is a single residue.
// ---------------------------------------------------------------------------
class Fq {
public:
    std::uint64_t p = 2;
    unsigned k = 1;
    BigInt q;                          // p^k
    std::vector<std::uint64_t> modulus;  // length k+1, monic; empty when k == 1

    static Fq make(std::uint64_t p, unsigned k) {
        if (!is_prime_u64(p)) throw NonPrimeP("p = " + std::to_string(p) + " is not prime");
        if (k == 0) throw Error("extension degree k must be >= 1");
        Fq f;
        f.p = p;
        f.k = k;
        f.q = BigInt::power(BigInt(p), k);
        if (k > 1) f.modulus = first_irreducible_modulus(p, k);
        return f;
    }

    bool same_as(const Fq& o) const {
        return p == o.p && k == o.k && modulus == o.modulus;
    }

    bool q_fits_u64() const { return q.fits_u64(); }
    std::uint64_t q_u64() const { return q.to_u64(); }

    // ---- element ops; all arrays have length k ----
    void el_zero(std::uint64_t* d) const {
        for (unsigned i = 0; i < k; ++i) d[i] = 0;
    }
    void el_one(std::uint64_t* d) const {
        el_zero(d);
        d[0] = 1;
    }
    bool el_is_zero(const std::uint64_t* a) const {
        for (unsigned i = 0; i < k; ++i)
            if (a[i]) return false;
        return true;
    }
    bool el_is_one(const std::uint64_t* a) const {
        if (a[0] != 1) return false;
        for (unsigned i = 1; i < k; ++i)
            if (a[i]) return false;
        return true;
    }
    void el_add(std::uint64_t* d, const std::uint64_t* a, const std::uint64_t* b) const {
        for (unsigned i = 0; i < k; ++i) {
            std::uint64_t s = a[i] + b[i];
            d[i] = s >= p ? s - p : s;
        }
    }
    void el_sub(std::uint64_t* d, const std::uint64_t* a, const std::uint64_t* b) const {
        for (unsigned i = 0; i < k; ++i) d[i] = a[i] >= b[i] ? a[i] - b[i] : a[i] + p - b[i];
    }
    void el_neg(std::uint64_t* d, const std::uint64_t* a) const {
        for (unsigned i = 0; i < k; ++i) d[i] = a[i] ? p - a[i] : 0;
    }
    void el_mul(std::uint64_t* d, const std::uint64_t* a, const std::uint64_t* b) const {
        if (k == 1) {
            d[0] = mulp(a[0], b[0]);
            return;
        }
        std::vector<std::uint64_t> t(2 * k - 1, 0);
        for (unsigned i = 0; i < k; ++i) {
            if (!a[i]) continue;
            for (unsigned j = 0; j < k; ++j)
                t[i + j] = addp(t[i + j], mulp(a[i], b[j]));
        }
        reduce_by_modulus(t);
        for (unsigned i = 0; i < k; ++i) d[i] = t[i];
    }
    // d = a * s with scalar s in F_p
    void el_scale(std::uint64_t* d, const std::uint64_t* a, std::uint64_t s) const {
        for (unsigned i = 0; i < k; ++i) d[i] = mulp(a[i], s);
    }
    void el_pow(std::uint64_t* d, const std::uint64_t* a, BigInt e) const {
        std::vector<std::uint64_t> base(a, a + k), acc(k);
        el_one(acc.data());
        while (!e.is_zero()) {
            if (e.bit(0)) el_mul(acc.data(), acc.data(), base.data());
            e >>= 1;
            if (!e.is_zero()) el_mul(base.data(), base.data(), base.data());
        }
        for (unsigned i = 0; i < k; ++i) d[i] = acc[i];
    }
    void el_inv(std::uint64_t* d, const std::uint64_t* a) const {
        if (el_is_zero(a)) throw Error("inverse of zero field element");
        if (k == 1) {
            d[0] = invp(a[0]);
            return;
        }
        // a^(q-2); fine at these field sizes and avoids a second gcd routine
        el_pow(d, a, q - BigInt(2));
    }
    // p-th root: inverse of Frobenius, c -> c^(p^(k-1))
    void el_pth_root(std::uint64_t* d, const std::uint64_t* a) const {
        if (k == 1) {
            d[0] = a[0];
            return;
        }
        el_pow(d, a, BigInt::power(BigInt(p), k - 1));
    }

    // index <-> element: index = sum rep[j] * p^j, so indices run 0 .. q-1
    void el_from_index(std::uint64_t idx, std::uint64_t* d) const {
        for (unsigned i = 0; i < k; ++i) {
            d[i] = idx % p;
            idx /= p;
        }
    }
    std::uint64_t el_to_index(const std::uint64_t* a) const {
        std::uint64_t idx = 0;
        for (unsigned i = k; i-- > 0;) idx = idx * p + a[i];
        return idx;
    }

    std::uint64_t addp(std::uint64_t a, std::uint64_t b) const {
        std::uint64_t s = a + b;
        return s >= p ? s - p : s;
    }
    std::uint64_t mulp(std::uint64_t a, std::uint64_t b) const {
        return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
    }
    std::uint64_t invp(std::uint64_t a) const {
        // Fermat; p is prime
        return detail::powmod_u64(a, p - 2, p);
    }

private:
    // Monic reduction of a coefficient buffer of length 2k-1 by the modulus.
    void reduce_by_modulus(std::vector<std::uint64_t>& t) const {
        for (std::size_t i = t.size(); i-- > k;) {
            std::uint64_t c = t[i];
            if (!c) continue;
            t[i] = 0;
            for (unsigned j = 0; j < k; ++j) {
                std::uint64_t sub = mulp(c, modulus[j]);
                std::uint64_t& slot = t[i - k + j];
                slot = slot >= sub ? slot - sub : slot + p - sub;
            }
        }
    }

    // Lexicographically-first monic irreducible of degree k over F_p, where
    // tuples (c0, c1, ..., c_{k-1}) of the non-leading coefficients are
    // compared left to right.
    static std::vector<std::uint64_t> first_irreducible_modulus(std::uint64_t p, unsigned k);
};

// ---------------------------------------------------------------------------
// Dense univariate polynomial over Fq; coefficients stored flat, k words per
// coefficient, low degree first. The zero polynomial has no coefficients.
// Semigroup elements are the monic ones (with 1 as the identity).
// ---------------------------------------------------------------------------
class Poly {
public:
    Poly() = default;
    explicit Poly(const Fq* f) : field_(f) {}

    static Poly zero(const Fq& f) { return Poly(&f); }
    static Poly one(const Fq& f) {
        Poly r(&f);
        r.c_.assign(f.k, 0);
        r.c_[0] = 1;
        return r;
    }
    static Poly x(const Fq& f) {
        Poly r(&f);
        r.c_.assign(2 * f.k, 0);
        r.c_[f.k] = 1;
        return r;
    }
    // monic of given degree from an enumeration counter: coefficient of x^i is
    // the field element with index = i-th base-q digit of `counter`.
    static Poly monic_from_counter(const Fq& f, int degree, std::uint64_t counter) {
        Poly r(&f);
        r.c_.assign(static_cast<std::size_t>(degree + 1) * f.k, 0);
        std::uint64_t qv = f.q_u64();
        for (int i = 0; i < degree; ++i) {
            f.el_from_index(counter % qv, r.coeff(i));
            counter /= qv;
        }
        f.el_one(r.coeff(degree));
        return r;
    }

    const Fq& field() const { return *field_; }
    const Fq* field_ptr() const { return field_; }

    int degree() const {
        return static_cast<int>(c_.size() / field_->k) - 1;
    }
    bool is_zero() const { return c_.empty(); }
    bool is_one() const {
        return degree() == 0 && field_->el_is_one(coeff(0));
    }
    bool is_monic() const {
        return !is_zero() && field_->el_is_one(coeff(degree()));
    }

    std::uint64_t* coeff(int i) { return c_.data() + static_cast<std::size_t>(i) * field_->k; }
    const std::uint64_t* coeff(int i) const {
        return c_.data() + static_cast<std::size_t>(i) * field_->k;
    }

    void trim() {
        while (!c_.empty() && field_->el_is_zero(c_.data() + c_.size() - field_->k))
            c_.resize(c_.size() - field_->k);
    }
    void resize_degree(int deg) { c_.assign(static_cast<std::size_t>(deg + 1) * field_->k, 0); }

    friend bool operator==(const Poly& a, const Poly& b) {
        return a.field_->same_as(*b.field_) && a.c_ == b.c_;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    // Canonical order: by degree, then coefficient indices from x^(deg-1) down.
    // This is exactly the enumeration order of monic polynomials.
    static int compare(const Poly& a, const Poly& b) {
        if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
        const Fq& f = *a.field_;
        for (int i = a.degree(); i >= 0; --i) {
            // same ordering as element indices, without overflow for huge q
            for (unsigned j = f.k; j-- > 0;) {
                std::uint64_t ca = a.coeff(i)[j], cb = b.coeff(i)[j];
                if (ca != cb) return ca < cb ? -1 : 1;
            }
        }
        return 0;
    }
    friend bool operator<(const Poly& a, const Poly& b) { return compare(a, b) < 0; }

    std::string to_string(char var = 'x') const;

private:
    const Fq* field_ = nullptr;
    std::vector<std::uint64_t> c_;

    friend Poly poly_add(const Poly&, const Poly&);
    friend Poly poly_sub(const Poly&, const Poly&);
    friend Poly poly_mul(const Poly&, const Poly&);
    friend std::pair<Poly, Poly> poly_divmod(const Poly&, const Poly&);
};

inline void require_same_field(const Poly& a, const Poly& b) {
    if (!a.field().same_as(b.field()))
        throw FieldMismatch("polynomials over different fields");
}

inline Poly poly_add(const Poly& a, const Poly& b) {
    require_same_field(a, b);
    const Fq& f = a.field();
    Poly r(&f);
    int dr = std::max(a.degree(), b.degree());
    r.resize_degree(dr);
    for (int i = 0; i <= dr; ++i) {
        if (i <= a.degree() && i <= b.degree())
            f.el_add(r.coeff(i), a.coeff(i), b.coeff(i));
        else if (i <= a.degree())
            std::copy(a.coeff(i), a.coeff(i) + f.k, r.coeff(i));
        else
            std::copy(b.coeff(i), b.coeff(i) + f.k, r.coeff(i));
    }
    r.trim();
    return r;
}

inline Poly poly_sub(const Poly& a, const Poly& b) {
    require_same_field(a, b);
    const Fq& f = a.field();
    Poly r(&f);
    int dr = std::max(a.degree(), b.degree());
    r.resize_degree(dr);
    std::vector<std::uint64_t> z(f.k, 0);
    for (int i = 0; i <= dr; ++i) {
        const std::uint64_t* ca = i <= a.degree() ? a.coeff(i) : z.data();
        const std::uint64_t* cb = i <= b.degree() ? b.coeff(i) : z.data();
        f.el_sub(r.coeff(i), ca, cb);
    }
    r.trim();
    return r;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
    require_same_field(a, b);
    const Fq& f = a.field();
    Poly r(&f);
    if (a.is_zero() || b.is_zero()) return r;
    int da = a.degree(), db = b.degree();
    r.resize_degree(da + db);
    if (f.k == 1) {
        for (int i = 0; i <= da; ++i) {
            std::uint64_t ai = *a.coeff(i);
            if (!ai) continue;
            for (int j = 0; j <= db; ++j) {
                std::uint64_t* slot = r.coeff(i + j);
                *slot = f.addp(*slot, f.mulp(ai, *b.coeff(j)));
            }
        }
    } else {
        std::vector<std::uint64_t> t(f.k);
        for (int i = 0; i <= da; ++i) {
            if (f.el_is_zero(a.coeff(i))) continue;
            for (int j = 0; j <= db; ++j) {
                f.el_mul(t.data(), a.coeff(i), b.coeff(j));
                f.el_add(r.coeff(i + j), r.coeff(i + j), t.data());
            }
        }
    }
    r.trim();
    return r;
}

inline std::pair<Poly, Poly> poly_divmod(const Poly& a, const Poly& b) {
    require_same_field(a, b);
    if (b.is_zero()) throw DivisionByZeroPoly("polynomial division by zero");
    const Fq& f = a.field();
    Poly q(&f), r = a;
    if (a.degree() < b.degree()) return {q, r};
    q.resize_degree(a.degree() - b.degree());
    std::vector<std::uint64_t> lead_inv(f.k), factor(f.k), t(f.k);
    f.el_inv(lead_inv.data(), b.coeff(b.degree()));
    while (!r.is_zero() && r.degree() >= b.degree()) {
        int shift = r.degree() - b.degree();
        f.el_mul(factor.data(), r.coeff(r.degree()), lead_inv.data());
        std::copy(factor.data(), factor.data() + f.k, q.coeff(shift));
        for (int i = 0; i <= b.degree(); ++i) {
            f.el_mul(t.data(), factor.data(), b.coeff(i));
            f.el_sub(r.coeff(i + shift), r.coeff(i + shift), t.data());
        }
        r.trim();
    }
    q.trim();
    return {q, r};
}

inline Poly poly_mod(const Poly& a, const Poly& b) { return poly_divmod(a, b).second; }

inline Poly poly_make_monic(const Poly& a) {
    if (a.is_zero()) return a;
    const Fq& f = a.field();
    if (a.is_monic()) return a;
    Poly r = a;
    std::vector<std::uint64_t> inv(f.k);
    f.el_inv(inv.data(), a.coeff(a.degree()));
    std::vector<std::uint64_t> t(f.k);
    for (int i = 0; i <= r.degree(); ++i) {
        f.el_mul(t.data(), r.coeff(i), inv.data());
        std::copy(t.data(), t.data() + f.k, r.coeff(i));
    }
    return r;
}

// Monic gcd. gcd(a, 0) = monic(a); gcd(0, 0) is rejected.
inline Poly poly_gcd(Poly a, Poly b) {
    require_same_field(a, b);
    if (a.is_zero() && b.is_zero())
        throw DivisionByZeroPoly("gcd(0, 0) is undefined");
    while (!b.is_zero()) {
        Poly r = poly_mod(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return poly_make_monic(a);
}

inline Poly poly_pow_mod(const Poly& base, BigInt e, const Poly& mod) {
    const Fq& f = base.field();
    Poly acc = Poly::one(f);
    Poly b = poly_mod(base, mod);
    while (!e.is_zero()) {
        if (e.bit(0)) acc = poly_mod(poly_mul(acc, b), mod);
        e >>= 1;
        if (!e.is_zero()) b = poly_mod(poly_mul(b, b), mod);
    }
    return acc;
}

inline Poly poly_derivative(const Poly& a) {
    const Fq& f = a.field();
    Poly r(&f);
    if (a.degree() <= 0) return r;
    r.resize_degree(a.degree() - 1);
    for (int i = 1; i <= a.degree(); ++i) {
        f.el_scale(r.coeff(i - 1), a.coeff(i), static_cast<std::uint64_t>(i % f.p));
    }
    r.trim();
    return r;
}

// f with f' == 0 is g(x^p); extracts g (taking p-th roots of coefficients).
inline Poly poly_pth_root(const Poly& a) {
    const Fq& f = a.field();
    Poly r(&f);
    if (a.is_zero()) return r;
    int d = a.degree();
    r.resize_degree(d / static_cast<int>(f.p));
    for (int i = 0; i <= d; i += static_cast<int>(f.p))
        f.el_pth_root(r.coeff(i / static_cast<int>(f.p)), a.coeff(i));
    r.trim();
    return r;
}

// Rabin irreducibility: x^(q^n) == x mod f and gcd(x^(q^(n/l)) - x, f) == 1
// for every prime l | n.
inline bool poly_is_irreducible(const Poly& f0) {
    const Fq& f = f0.field();
    int n = f0.degree();
    if (n <= 0) return false;
    if (n == 1) return true;
    Poly fm = poly_make_monic(f0);
    Poly xp = Poly::x(f);
    std::vector<int> ls = prime_factors_distinct(static_cast<std::uint64_t>(n));
    // frob[i] = x^(q^i) mod fm, built incrementally
    Poly h = poly_mod(xp, fm);
    std::vector<Poly> needed;
    std::vector<int> checkpoints;
    for (int l : ls) checkpoints.push_back(n / l);
    for (int i = 1; i <= n; ++i) {
        h = poly_pow_mod(h, f.q, fm);
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
            if (checkpoints[c] == i) {
                Poly g = poly_gcd(poly_sub(h, xp), fm);
                if (!g.is_one()) return false;
            }
        }
        if (i == n) {
            if (!(poly_sub(h, xp).is_zero())) return false;
        }
    }
    return true;
}

inline std::vector<std::uint64_t> Fq::first_irreducible_modulus(std::uint64_t p, unsigned k) {
    Fq base;
    base.p = p;
    base.k = 1;
    base.q = BigInt(p);
    // iterate tuples (c0, ..., c_{k-1}) lexicographically, c_{k-1} fastest
    std::vector<std::uint64_t> tuple(k, 0);
    while (true) {
        Poly cand(&base);
        cand.resize_degree(static_cast<int>(k));
        for (unsigned i = 0; i < k; ++i) *cand.coeff(static_cast<int>(i)) = tuple[i];
        *cand.coeff(static_cast<int>(k)) = 1;
        if (poly_is_irreducible(cand)) {
            std::vector<std::uint64_t> mod(k + 1);
            for (unsigned i = 0; i <= k; ++i) mod[i] = *cand.coeff(static_cast<int>(i));
            return mod;
        }
        // increment last component first
        unsigned pos = k;
        while (pos-- > 0) {
            if (++tuple[pos] < p) break;
            tuple[pos] = 0;
            if (pos == 0) throw Error("no irreducible modulus found");  // unreachable
        }
    }
}

// ---------------------------------------------------------------------------
// Factorization: squarefree decomposition -> distinct-degree splitting ->
// equal-degree splitting (Cantor-Zassenhaus). The equal-degree stage draws
// random polynomials from a fixed-seed schedule, so results are bit-stable.
// ---------------------------------------------------------------------------
struct PolyFactor {
    Poly prime;
    unsigned multiplicity = 1;
};

struct Factorization {
    std::vector<PolyFactor> parts;  // primes distinct, sorted canonically
    std::uint64_t big_omega() const {
        std::uint64_t s = 0;
        for (const auto& pf : parts) s += pf.multiplicity;
        return s;
    }
    std::uint64_t small_omega() const { return parts.size(); }
};

namespace detail {

inline constexpr std::uint64_t kFactorSeed = 0x5345'4d49'4752'5550ull;

inline Poly random_poly_below(const Fq& f, int deg_bound, std::mt19937_64& rng) {
    Poly r(&f);
    r.resize_degree(deg_bound - 1);
    for (int i = 0; i < deg_bound; ++i) {
        for (unsigned j = 0; j < f.k; ++j) r.coeff(i)[j] = rng() % f.p;
    }
    r.trim();
    return r;
}

// Splits a monic squarefree product of irreducibles all of degree d.
inline void equal_degree_split(const Poly& g, int d, std::mt19937_64& rng,
                               std::vector<Poly>& out) {
    const Fq& f = g.field();
    if (g.degree() == d) {
        out.push_back(g);
        return;
    }
    BigInt qd = BigInt::power(f.q, static_cast<std::uint64_t>(d));
    while (true) {
        Poly u = random_poly_below(f, g.degree(), rng);
        if (u.is_zero() || u.degree() == 0) continue;
        Poly t0 = poly_gcd(u, g);
        if (!t0.is_one() && t0.degree() < g.degree()) {
            equal_degree_split(t0, d, rng, out);
            equal_degree_split(poly_divmod(g, t0).first, d, rng, out);
            return;
        }
        Poly t(&f);
        if (f.p == 2) {
            // trace map over F_2: sum of u^(2^i), i < k*d
            Poly acc = u, cur = u;
            std::uint64_t steps = static_cast<std::uint64_t>(f.k) * static_cast<std::uint64_t>(d);
            for (std::uint64_t i = 1; i < steps; ++i) {
                cur = poly_mod(poly_mul(cur, cur), g);
                acc = poly_add(acc, cur);
            }
            t = poly_gcd(acc.is_zero() ? g : acc, g);
        } else {
            Poly w = poly_pow_mod(u, (qd - BigInt(1)) >> 1, g);
            Poly w1 = poly_sub(w, Poly::one(f));
            if (w1.is_zero()) continue;
            t = poly_gcd(w1, g);
        }
        if (t.is_one() || t.degree() == g.degree()) continue;
        equal_degree_split(t, d, rng, out);
        equal_degree_split(poly_divmod(g, t).first, d, rng, out);
        return;
    }
}

// Distinct-degree stage; emits (irreducible, 1) entries for a monic
// squarefree input.
inline void factor_squarefree(const Poly& input, std::mt19937_64& rng,
                              std::vector<Poly>& out) {
    const Fq& fq = input.field();
    Poly f = input;
    Poly xp = Poly::x(fq);
    Poly h = poly_mod(xp, f);
    int d = 0;
    while (f.degree() > 0 && 2 * (d + 1) <= f.degree()) {
        ++d;
        h = poly_pow_mod(h, fq.q, f);
        Poly g = poly_gcd(poly_sub(h, xp), f);
        if (!g.is_one()) {
            equal_degree_split(g, d, rng, out);
            f = poly_divmod(f, g).first;
            h = poly_mod(h, f);
        }
    }
    if (f.degree() > 0) out.push_back(f);
}

}  // namespace detail

// Squarefree decomposition in characteristic p (Yun's algorithm with p-th
// root recursion); returns monic squarefree parts with multiplicities.
inline std::vector<std::pair<Poly, unsigned>> squarefree_decomposition(const Poly& input) {
    const Fq& fq = input.field();
    std::vector<std::pair<Poly, unsigned>> out;
    Poly f = poly_make_monic(input);
    if (f.degree() <= 0) return out;
    Poly deriv = poly_derivative(f);
    if (deriv.is_zero()) {
        Poly root = poly_pth_root(f);
        for (auto& [g, m] : squarefree_decomposition(root))
            out.emplace_back(g, m * static_cast<unsigned>(fq.p));
        return out;
    }
    Poly c = poly_gcd(f, deriv);
    Poly w = poly_divmod(f, c).first;
    unsigned i = 1;
    while (!(w.degree() <= 0)) {
        Poly y = poly_gcd(w, c);
        Poly z = poly_divmod(w, y).first;
        if (z.degree() > 0) out.emplace_back(z, i);
        w = std::move(y);
        c = poly_divmod(c, w).first;
        ++i;
    }
    if (c.degree() > 0) {
        Poly root = poly_pth_root(c);
        for (auto& [g, m] : squarefree_decomposition(root))
            out.emplace_back(g, m * static_cast<unsigned>(fq.p));
    }
    return out;
}

inline Factorization factorize(const Poly& m) {
    if (m.is_zero()) throw ZeroPolynomial("factorize(0)");
    Factorization fact;
    Poly f = poly_make_monic(m);
    if (f.degree() == 0) return fact;  // the identity: empty factorization
    std::mt19937_64 rng(detail::kFactorSeed);
    for (auto& [part, mult] : squarefree_decomposition(f)) {
        std::vector<Poly> primes;
        detail::factor_squarefree(part, rng, primes);
        for (auto& pr : primes) fact.parts.push_back({std::move(pr), mult});
    }
    std::sort(fact.parts.begin(), fact.parts.end(),
              [](const PolyFactor& a, const PolyFactor& b) {
                  return Poly::compare(a.prime, b.prime) < 0;
              });
    return fact;
}

// ---------------------------------------------------------------------------
// Enumeration of monic polynomials of exact degree n, coefficient-
// lexicographic (constant coefficient varies fastest). Yields q^n values.
// ---------------------------------------------------------------------------
class MonicEnumerator {
public:
    // Enumerates the counter range [start, end); the full stream is
    // [0, q^degree). Streams split by leading-coefficient prefix are just
    // counter subranges, so parallel consumers can partition [0, q^n).
    MonicEnumerator(const Fq& f, int degree, std::uint64_t start = 0,
                    std::uint64_t end = 0)
        : field_(&f), degree_(degree) {
        if (degree < 0) throw Error("degree must be >= 0");
        if (!f.q_fits_u64())
            throw CountOnly("field too large for enumeration");
        q_ = f.q_u64();
        double bits = degree * std::log2(static_cast<double>(q_));
        std::uint64_t total =
            bits >= 63.0 ? ~0ull : [&] {
                std::uint64_t t = 1;
                for (int i = 0; i < degree; ++i) t *= q_;
                return t;
            }();
        end_ = end == 0 ? total : std::min(end, total);
        digits_.assign(static_cast<std::size_t>(degree), 0);
        counter_ = start;
        std::uint64_t v = start;
        for (std::size_t i = 0; i < digits_.size(); ++i) {
            digits_[i] = v % q_;
            v /= q_;
        }
        done_ = counter_ >= end_;
    }

    std::optional<Poly> next() {
        if (done_) return std::nullopt;
        Poly r(field_);
        r.resize_degree(degree_);
        for (int i = 0; i < degree_; ++i)
            field_->el_from_index(digits_[static_cast<std::size_t>(i)], r.coeff(i));
        field_->el_one(r.coeff(degree_));
        advance();
        return r;
    }

private:
    const Fq* field_;
    int degree_;
    std::uint64_t q_ = 0;
    std::uint64_t counter_ = 0, end_ = 0;
    std::vector<std::uint64_t> digits_;
    bool done_ = false;

    void advance() {
        if (++counter_ >= end_) {
            done_ = true;
            return;
        }
        for (std::size_t i = 0; i < digits_.size(); ++i) {
            if (++digits_[i] < q_) return;
            digits_[i] = 0;
        }
        done_ = true;
    }
};

inline std::vector<Poly> enumerate_monic(const Fq& f, int degree) {
    MonicEnumerator en(f, degree);
    std::vector<Poly> out;
    while (auto p = en.next()) out.push_back(std::move(*p));
    return out;
}

// All monic irreducibles of the given degree, in canonical order.
inline std::vector<Poly> irreducibles_of_degree(const Fq& f, int degree) {
    std::vector<Poly> out;
    MonicEnumerator en(f, degree);
    while (auto p = en.next()) {
        if (poly_is_irreducible(*p)) out.push_back(std::move(*p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Printing / parsing: sparse descending terms, e.g. "x^2+x+1". Extension
// field coefficients print as t-polynomials, parenthesized when composite:
// "(t+1)*x^2+t".
// ---------------------------------------------------------------------------
namespace detail {

inline std::string element_to_string(const Fq& f, const std::uint64_t* a) {
    if (f.k == 1) return std::to_string(a[0]);
    std::string s;
    for (unsigned i = f.k; i-- > 0;) {
        if (!a[i]) continue;
        if (!s.empty()) s += "+";
        if (i == 0) {
            s += std::to_string(a[i]);
        } else {
            if (a[i] != 1) s += std::to_string(a[i]) + "*";
            s += (i == 1) ? "t" : "t^" + std::to_string(i);
        }
    }
    return s.empty() ? "0" : s;
}

inline bool element_is_scalar(const Fq& f, const std::uint64_t* a) {
    for (unsigned i = 1; i < f.k; ++i)
        if (a[i]) return false;
    return true;
}

}  // namespace detail

inline std::string Poly::to_string(char var) const {
    if (is_zero()) return "0";
    const Fq& f = *field_;
    std::string s;
    for (int i = degree(); i >= 0; --i) {
        if (f.el_is_zero(coeff(i))) continue;
        if (!s.empty()) s += "+";
        bool scalar = detail::element_is_scalar(f, coeff(i));
        std::string cs = detail::element_to_string(f, coeff(i));
        if (i == 0) {
            s += scalar ? cs : "(" + cs + ")";
            continue;
        }
        if (!scalar) {
            s += "(" + cs + ")*";
        } else if (coeff(i)[0] != 1) {
            s += cs + "*";
        }
        s += var;
        if (i > 1) s += "^" + std::to_string(i);
    }
    return s;
}

namespace detail {

// Parses one power product: [coef '*'] [var ['^' int]]; `pos` advances.
// Coefficients are integers or parenthesized t-polynomials.
inline void parse_term(const Fq& f, std::string_view s, std::size_t& pos, Poly& acc,
                       char var) {
    std::vector<std::uint64_t> coef(f.k, 0);
    coef[0] = 1;
    bool have_coef = false;
    if (pos < s.size() && s[pos] == '(') {
        std::size_t close = s.find(')', pos);
        if (close == std::string_view::npos) throw ParseError("unbalanced parenthesis");
        std::string_view inner = s.substr(pos + 1, close - pos - 1);
        // recursively parse the t-polynomial into coefficient form
        Fq base;
        base.p = f.p;
        base.k = 1;
        base.q = BigInt(f.p);
        std::size_t ip = 0;
        Poly tp(&base);
        while (ip < inner.size()) {
            parse_term(base, inner, ip, tp, 't');
            if (ip < inner.size()) {
                if (inner[ip] != '+') throw ParseError("expected '+' in coefficient");
                ++ip;
            }
        }
        if (tp.degree() >= static_cast<int>(f.k))
            throw ParseError("coefficient degree exceeds field extension");
        for (int i = 0; i <= tp.degree(); ++i) coef[static_cast<std::size_t>(i)] = *tp.coeff(i);
        have_coef = true;
        pos = close + 1;
        if (pos < s.size() && s[pos] == '*') ++pos;
    } else if (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])))) {
        std::uint64_t v = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            v = (v * 10 + static_cast<std::uint64_t>(s[pos] - '0')) % f.p;
            ++pos;
        }
        coef.assign(f.k, 0);
        coef[0] = v;
        have_coef = true;
        if (pos < s.size() && s[pos] == '*') ++pos;
    }
    int expo = 0;
    if (pos < s.size() && s[pos] == var) {
        ++pos;
        expo = 1;
        if (pos < s.size() && s[pos] == '^') {
            ++pos;
            if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
                throw ParseError("expected exponent");
            expo = 0;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
                expo = expo * 10 + (s[pos++] - '0');
        }
    } else if (!have_coef) {
        throw ParseError("malformed term");
    }
    // acc += coef * x^expo
    if (acc.degree() < expo) {
        Poly widened(acc.field_ptr());
        widened.resize_degree(expo);
        for (int i = 0; i <= acc.degree(); ++i)
            std::copy(acc.coeff(i), acc.coeff(i) + f.k, widened.coeff(i));
        acc = std::move(widened);
    }
    f.el_add(acc.coeff(expo), acc.coeff(expo), coef.data());
    acc.trim();
}

}  // namespace detail

inline Poly poly_parse(const Fq& f, std::string_view text) {
    std::string compact;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
    if (compact.empty()) throw ParseError("empty polynomial");
    if (compact == "0") return Poly::zero(f);
    Poly acc(&f);
    std::size_t pos = 0;
    std::string_view s = compact;
    while (pos < s.size()) {
        detail::parse_term(f, s, pos, acc, 'x');
        if (pos < s.size()) {
            if (s[pos] != '+') throw ParseError("expected '+' between terms");
            ++pos;
            if (pos == s.size()) throw ParseError("trailing '+'");
        }
    }
    return acc;
}

}  // namespace semergo
