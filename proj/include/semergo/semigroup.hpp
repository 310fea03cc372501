#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "semergo/bigint.hpp"
#include "semergo/ffpoly.hpp"
#include "semergo/numtheory.hpp"
#include "semergo/rational.hpp"
#include "semergo/util.hpp"

namespace semergo {

// A prime is addressed by (degree, index) where index is the position within
// the instance's canonical ordering of the primes of that degree.
struct PrimeId {
    int degree = 0;
    std::uint64_t index = 0;
    friend bool operator==(const PrimeId&, const PrimeId&) = default;
    friend bool operator<(const PrimeId& a, const PrimeId& b) {
        return a.degree != b.degree ? a.degree < b.degree : a.index < b.index;
    }
};

// Canonical unique-factorization form: sorted (prime, multiplicity) pairs,
// multiplicities >= 1. The identity has no parts and degree 0.
class Element {
public:
    Element() = default;

    static Element identity() { return Element(); }
    static Element prime(PrimeId p) {
        Element e;
        e.parts_.emplace_back(p, 1u);
        e.degree_ = p.degree;
        return e;
    }
    static Element from_parts(std::vector<std::pair<PrimeId, unsigned>> parts) {
        std::sort(parts.begin(), parts.end());
        Element e;
        for (auto& [p, m] : parts) {
            if (m == 0) continue;
            if (!e.parts_.empty() && e.parts_.back().first == p)
                e.parts_.back().second += m;
            else
                e.parts_.emplace_back(p, m);
        }
        e.recompute_degree();
        return e;
    }

    const std::vector<std::pair<PrimeId, unsigned>>& parts() const { return parts_; }
    bool is_identity() const { return parts_.empty(); }
    long long degree() const { return degree_; }
    std::uint64_t big_omega() const {
        std::uint64_t s = 0;
        for (auto& [p, m] : parts_) s += m;
        return s;
    }
    std::uint64_t small_omega() const { return parts_.size(); }

    friend bool operator==(const Element&, const Element&) = default;
    friend bool operator<(const Element& a, const Element& b) {
        if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
        return a.parts_ < b.parts_;
    }

    friend Element sg_mul(const Element& a, const Element& b) {
        Element r;
        auto ia = a.parts_.begin(), ib = b.parts_.begin();
        while (ia != a.parts_.end() || ib != b.parts_.end()) {
            if (ib == b.parts_.end() || (ia != a.parts_.end() && ia->first < ib->first))
                r.parts_.push_back(*ia++);
            else if (ia == a.parts_.end() || ib->first < ia->first)
                r.parts_.push_back(*ib++);
            else {
                r.parts_.emplace_back(ia->first, ia->second + ib->second);
                ++ia;
                ++ib;
            }
        }
        r.degree_ = a.degree_ + b.degree_;
        return r;
    }
    friend Element sg_gcd(const Element& a, const Element& b) {
        Element r;
        auto ia = a.parts_.begin(), ib = b.parts_.begin();
        while (ia != a.parts_.end() && ib != b.parts_.end()) {
            if (ia->first < ib->first)
                ++ia;
            else if (ib->first < ia->first)
                ++ib;
            else {
                r.parts_.emplace_back(ia->first, std::min(ia->second, ib->second));
                ++ia;
                ++ib;
            }
        }
        r.recompute_degree();
        return r;
    }
    friend Element sg_lcm(const Element& a, const Element& b) {
        Element r;
        auto ia = a.parts_.begin(), ib = b.parts_.begin();
        while (ia != a.parts_.end() || ib != b.parts_.end()) {
            if (ib == b.parts_.end() || (ia != a.parts_.end() && ia->first < ib->first))
                r.parts_.push_back(*ia++);
            else if (ia == a.parts_.end() || ib->first < ia->first)
                r.parts_.push_back(*ib++);
            else {
                r.parts_.emplace_back(ia->first, std::max(ia->second, ib->second));
                ++ia;
                ++ib;
            }
        }
        r.recompute_degree();
        return r;
    }

private:
    std::vector<std::pair<PrimeId, unsigned>> parts_;
    long long degree_ = 0;

    void recompute_degree() {
        degree_ = 0;
        for (auto& [p, m] : parts_) degree_ += static_cast<long long>(p.degree) * m;
    }
};

namespace detail {

// True when exactly one parity class of the upper half of lambda(1..m)
// vanishes identically while the other is entirely nonzero; this is the
// signature of the alternating (non-classical) prime number theorem.
inline bool parity_alternation(const std::vector<BigInt>& lambda) {
    int m = static_cast<int>(lambda.size());
    if (m < 4) return false;
    bool even_all_zero = true, odd_all_zero = true;
    bool even_all_nonzero = true, odd_all_nonzero = true;
    for (int n = m / 2 + 1; n <= m; ++n) {
        bool z = lambda[static_cast<std::size_t>(n - 1)].is_zero();
        if (n % 2 == 0) {
            even_all_zero &= z;
            even_all_nonzero &= !z;
        } else {
            odd_all_zero &= z;
            odd_all_nonzero &= !z;
        }
    }
    return (even_all_zero && odd_all_nonzero) || (odd_all_zero && even_all_nonzero);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Instance contract. Immutable once constructed; prime tables fill lazily
// under a mutex and are shared read-only afterwards.
// ---------------------------------------------------------------------------
class Instance {
public:
    virtual ~Instance() = default;

    virtual std::string kind() const = 0;
    virtual std::string description() const = 0;

    // norm base q > 1 (integer for polynomial/synthetic, Perron for graphs)
    virtual bool q_is_integer() const = 0;
    virtual BigInt q_int() const {
        throw Error("instance norm base is not an integer");
    }
    virtual double q_real() const = 0;

    virtual int pi_max_degree() const = 0;
    virtual BigInt pi(int degree) const = 0;  // pi(d), d >= 1
    virtual bool primes_listable(int degree) const = 0;
    virtual std::vector<PrimeId> primes(int degree) const = 0;

    // classical-PNT guard for the averaging pipeline
    virtual bool classical() const = 0;

    // axiom constants, when known exactly for the instance family
    virtual std::optional<double> known_c() const { return std::nullopt; }
    virtual std::optional<double> known_eta() const { return std::nullopt; }
    virtual std::optional<double> known_theta() const { return std::nullopt; }

    BigInt norm(const Element& g) const {
        return BigInt::power(q_int(), static_cast<std::uint64_t>(g.degree()));
    }
    // norms stay symbolic q^deg; this is the one place they hit floating point
    double norm_real(const Element& g) const {
        return std::exp(static_cast<double>(g.degree()) * std::log(q_real()));
    }

    std::vector<BigInt> pi_vector(int nmax) const {
        if (nmax > pi_max_degree())
            throw Error("pi(" + std::to_string(nmax) + ") not available for " + description());
        std::vector<BigInt> out(static_cast<std::size_t>(nmax) + 1);
        for (int d = 1; d <= nmax; ++d) out[static_cast<std::size_t>(d)] = pi(d);
        return out;
    }

    // All elements of degree <= nmax by multiset composition of primes.
    // Requires listable primes and modest pi values at every degree <= nmax.
    std::vector<Element> enumerate(int nmax) const {
        std::vector<std::vector<PrimeId>> by_degree;
        for (int d = 1; d <= nmax; ++d) {
            if (!primes_listable(d))
                throw CountOnly("prime listing not available at degree " + std::to_string(d));
            by_degree.push_back(primes(d));
        }
        std::vector<Element> out;
        std::vector<std::pair<PrimeId, unsigned>> current;
        enumerate_rec(by_degree, 0, 0, nmax, current, out);
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    static void enumerate_rec(const std::vector<std::vector<PrimeId>>& by_degree,
                              std::size_t group, std::size_t idx, long long remaining,
                              std::vector<std::pair<PrimeId, unsigned>>& current,
                              std::vector<Element>& out) {
        // skip exhausted / unaffordable groups
        while (group < by_degree.size() &&
               (idx >= by_degree[group].size() ||
                static_cast<long long>(group) + 1 > remaining)) {
            if (static_cast<long long>(group) + 1 > remaining) {
                group = by_degree.size();
                break;
            }
            ++group;
            idx = 0;
        }
        if (group >= by_degree.size()) {
            out.push_back(Element::from_parts(current));
            return;
        }
        long long d = static_cast<long long>(group) + 1;
        PrimeId p = by_degree[group][idx];
        for (unsigned e = 0;; ++e) {
            long long used = d * e;
            if (used > remaining) break;
            if (e) current.emplace_back(p, 1u);
            enumerate_rec(by_degree, group, idx + 1, remaining - used, current, out);
        }
        // drop the copies of p pushed above
        while (!current.empty() && current.back().first == p) current.pop_back();
    }
};

// ---------------------------------------------------------------------------
// The classical prototype: monic polynomials over F_q.
// ---------------------------------------------------------------------------
class PolynomialInstance : public Instance {
public:
    explicit PolynomialInstance(Fq field, int pi_max = 512)
        : field_(std::move(field)), pi_max_(pi_max), mu_table_(mobius_sieve(pi_max)) {}

    const Fq& field() const { return field_; }

    std::string kind() const override { return "polynomial"; }
    std::string description() const override {
        return "poly:p=" + std::to_string(field_.p) + ",k=" + std::to_string(field_.k);
    }
    bool q_is_integer() const override { return true; }
    BigInt q_int() const override { return field_.q; }
    double q_real() const override { return field_.q.to_double(); }

    int pi_max_degree() const override { return pi_max_; }
    BigInt pi(int degree) const override {
        if (degree < 1) throw Error("pi requires degree >= 1");
        BigInt s(0);
        for (int d : divisors_of(degree)) {
            s += BigInt(mu_table_[static_cast<std::size_t>(d)]) *
                 BigInt::power(field_.q, static_cast<std::uint64_t>(degree / d));
        }
        return s / BigInt(degree);
    }

    bool primes_listable(int degree) const override {
        if (!field_.q_fits_u64()) return false;
        // listing scans all q^degree monics
        double cost = static_cast<double>(degree) * std::log2(field_.q.to_double());
        return cost <= 24.0;
    }
    std::vector<PrimeId> primes(int degree) const override {
        const std::vector<Poly>& list = irreducible_list(degree);
        std::vector<PrimeId> out;
        out.reserve(list.size());
        for (std::size_t i = 0; i < list.size(); ++i)
            out.push_back(PrimeId{degree, static_cast<std::uint64_t>(i)});
        return out;
    }
    bool classical() const override { return true; }  // Lambda(n) = q^n exactly
    std::optional<double> known_c() const override { return 1.0; }    // G(n) = q^n
    std::optional<double> known_eta() const override { return 0.0; }
    std::optional<double> known_theta() const override { return 0.5; }

    // polynomial <-> abstract element translation
    const Poly& poly_of_prime(PrimeId id) const {
        const std::vector<Poly>& list = irreducible_list(id.degree);
        if (id.index >= list.size()) throw Error("prime index out of range");
        return list[id.index];
    }
    Poly poly_of(const Element& e) const {
        Poly acc = Poly::one(field_);
        for (auto& [p, m] : e.parts()) {
            const Poly& pr = poly_of_prime(p);
            for (unsigned i = 0; i < m; ++i) acc = poly_mul(acc, pr);
        }
        return acc;
    }
    Element element_of(const Poly& m) const {
        Factorization f = factorize(m);
        std::vector<std::pair<PrimeId, unsigned>> parts;
        for (const auto& part : f.parts) {
            int d = part.prime.degree();
            const std::vector<Poly>& list = irreducible_list(d);
            auto it = std::lower_bound(list.begin(), list.end(), part.prime,
                                       [](const Poly& a, const Poly& b) {
                                           return Poly::compare(a, b) < 0;
                                       });
            if (it == list.end() || !(*it == part.prime))
                throw Error("irreducible not found in canonical list");
            parts.emplace_back(
                PrimeId{d, static_cast<std::uint64_t>(it - list.begin())},
                part.multiplicity);
        }
        return Element::from_parts(std::move(parts));
    }

private:
    Fq field_;
    int pi_max_;
    std::vector<int> mu_table_;
    mutable std::map<int, std::vector<Poly>> prime_cache_;
    mutable std::mutex cache_mutex_;

    const std::vector<Poly>& irreducible_list(int degree) const {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = prime_cache_.find(degree);
        if (it == prime_cache_.end()) {
            if (!primes_listable(degree))
                throw CountOnly("degree " + std::to_string(degree) +
                                " beyond the enumeration budget");
            it = prime_cache_.emplace(degree, irreducibles_of_degree(field_, degree)).first;
        }
        return it->second;
    }
};

// ---------------------------------------------------------------------------
// Synthetic instance: primes are opaque tokens, pi is caller-supplied.
// ---------------------------------------------------------------------------
class SyntheticInstance : public Instance {
public:
    SyntheticInstance(BigInt q, std::vector<BigInt> pi_by_degree, std::string label = "")
        : q_(std::move(q)), pi_(std::move(pi_by_degree)), label_(std::move(label)) {
        if (q_ <= BigInt(1)) throw Error("synthetic instance requires integer q > 1");
        for (const BigInt& v : pi_)
            if (v.sign() < 0) throw Error("pi values must be nonnegative");
    }

    std::string kind() const override { return "synthetic"; }
    std::string description() const override {
        return label_.empty() ? "synthetic:q=" + q_.to_string() : label_;
    }
    bool q_is_integer() const override { return true; }
    BigInt q_int() const override { return q_; }
    double q_real() const override { return q_.to_double(); }

    int pi_max_degree() const override { return static_cast<int>(pi_.size()); }
    BigInt pi(int degree) const override {
        if (degree < 1 || degree > pi_max_degree())
            throw Error("pi(" + std::to_string(degree) + ") outside synthetic table");
        return pi_[static_cast<std::size_t>(degree - 1)];
    }
    bool primes_listable(int degree) const override {
        return degree <= pi_max_degree() && pi(degree).fits_u64() &&
               pi(degree).to_u64() <= (1u << 24);
    }
    std::vector<PrimeId> primes(int degree) const override {
        if (!primes_listable(degree))
            throw CountOnly("synthetic prime list too large at degree " +
                            std::to_string(degree));
        std::uint64_t count = pi(degree).to_u64();
        std::vector<PrimeId> out;
        out.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) out.push_back(PrimeId{degree, i});
        return out;
    }
    bool classical() const override {
        std::vector<BigInt> lambda;
        int m = pi_max_degree();
        for (int n = 1; n <= m; ++n) {
            BigInt s(0);
            for (int d : divisors_of(n)) s += BigInt(d) * pi(d);
            lambda.push_back(std::move(s));
        }
        return !detail::parity_alternation(lambda);
    }

private:
    BigInt q_;
    std::vector<BigInt> pi_;
    std::string label_;
};

// pi table of the polynomial instance over F_q, handy for building the
// synthetic twin used by the construction machinery.
inline std::vector<BigInt> polynomial_pi_table(std::uint64_t q, int nmax) {
    auto mu = mobius_sieve(nmax);
    std::vector<BigInt> out;
    for (int n = 1; n <= nmax; ++n) {
        BigInt s(0);
        for (int d : divisors_of(n))
            s += BigInt(mu[static_cast<std::size_t>(d)]) *
                 BigInt::power(BigInt(q), static_cast<std::uint64_t>(n / d));
        out.push_back(s / BigInt(n));
    }
    return out;
}

}  // namespace semergo
