#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "semergo/ffpoly.hpp"
#include "semergo/numtheory.hpp"

using namespace semergo;

namespace {

Poly parse(const Fq& f, const char* s) { return poly_parse(f, s); }

Poly random_monic(const Fq& f, int deg, std::mt19937_64& rng) {
    std::uint64_t q = f.q_u64();
    std::uint64_t count = 1;
    for (int i = 0; i < deg; ++i) count *= q;
    return Poly::monic_from_counter(f, deg, rng() % count);
}

BigInt gauss_irreducible_count(std::uint64_t q, int n) {
    auto mu = mobius_sieve(n);
    BigInt s(0);
    for (int d : divisors_of(n))
        s += BigInt(mu[static_cast<std::size_t>(d)]) *
             BigInt::power(BigInt(q), static_cast<std::uint64_t>(n / d));
    return s / BigInt(n);
}

}  // namespace

TEST_CASE("field_make basics and errors") {
    Fq f2 = Fq::make(2, 1);
    CHECK(f2.q == BigInt(2));
    CHECK(f2.modulus.empty());

    Fq f4 = Fq::make(2, 2);
    // only irreducible monic quadratic over F_2 is x^2+x+1; confirmed below
    CHECK(f4.modulus == std::vector<std::uint64_t>{1, 1, 1});
    int irreducible = 0;
    for (const Poly& m : oracles::monics_of_degree(f2, 2))
        if (oracles::trial_division_irreducible(m)) ++irreducible;
    CHECK(irreducible == 1);

    CHECK_THROWS_AS(Fq::make(4, 1), NonPrimeP);
    CHECK_THROWS_AS(Fq::make(2, 0), Error);

    // deterministic: same modulus on repeated construction
    CHECK(Fq::make(3, 2).modulus == Fq::make(3, 2).modulus);
    // F_9: x^2+1 is the first tuple (c0,c1) with no root in F_3
    CHECK(Fq::make(3, 2).modulus == std::vector<std::uint64_t>{1, 0, 1});
}

TEST_CASE("poly arithmetic over F2 matches hand results") {
    Fq f = Fq::make(2, 1);
    Poly x = parse(f, "x");
    Poly xp1 = parse(f, "x+1");
    CHECK(poly_mul(x, xp1) == parse(f, "x^2+x"));
    CHECK(poly_gcd(parse(f, "x^2+x"), parse(f, "x^2+1")) == xp1);
    CHECK(poly_gcd(parse(f, "x^2+x"), Poly::one(f)) == Poly::one(f));

    auto [q, r] = poly_divmod(parse(f, "x^3+x+1"), parse(f, "x^2+1"));
    CHECK(poly_add(poly_mul(q, parse(f, "x^2+1")), r) == parse(f, "x^3+x+1"));
    CHECK(r.degree() < 2);

    CHECK_THROWS_AS(poly_divmod(x, Poly::zero(f)), DivisionByZeroPoly);
    Fq f3 = Fq::make(3, 1);
    CHECK_THROWS_AS(poly_mul(x, Poly::one(f3)), FieldMismatch);
}

TEST_CASE("factorize spec cases") {
    Fq f = Fq::make(2, 1);
    Factorization fx = factorize(parse(f, "x^2+x"));
    REQUIRE(fx.parts.size() == 2);
    CHECK(fx.parts[0].prime == parse(f, "x"));
    CHECK(fx.parts[1].prime == parse(f, "x+1"));
    CHECK(fx.big_omega() == 2);
    CHECK(fx.small_omega() == 2);

    Factorization fi = factorize(parse(f, "x^2+x+1"));
    REQUIRE(fi.parts.size() == 1);
    CHECK(fi.parts[0].multiplicity == 1);
    CHECK(fi.big_omega() == 1);

    CHECK(factorize(Poly::one(f)).parts.empty());
    CHECK(factorize(Poly::one(f)).big_omega() == 0);
    CHECK_THROWS_AS(factorize(Poly::zero(f)), ZeroPolynomial);

    // determinism across calls
    Poly m = parse(f, "x^7+x^3+x+1");
    Factorization a = factorize(m), b = factorize(m);
    REQUIRE(a.parts.size() == b.parts.size());
    for (std::size_t i = 0; i < a.parts.size(); ++i) {
        CHECK(a.parts[i].prime == b.parts[i].prime);
        CHECK(a.parts[i].multiplicity == b.parts[i].multiplicity);
    }
}

TEST_CASE("factorize reproduces input exactly (full sweeps)") {
    struct Sweep {
        std::uint64_t p;
        unsigned k;
        int nmax;
    };
    for (Sweep s : {Sweep{2, 1, 9}, Sweep{3, 1, 5}, Sweep{2, 2, 4}, Sweep{5, 1, 3},
                    Sweep{7, 1, 2}}) {
        Fq f = Fq::make(s.p, s.k);
        for (int n = 0; n <= s.nmax; ++n) {
            for (const Poly& m : enumerate_monic(f, n)) {
                Factorization fact = factorize(m);
                Poly prod = Poly::one(f);
                for (const auto& part : fact.parts) {
                    CHECK(poly_is_irreducible(part.prime));
                    for (unsigned e = 0; e < part.multiplicity; ++e)
                        prod = poly_mul(prod, part.prime);
                }
                CHECK(prod == m);
                CHECK(fact.big_omega() == oracles::trial_division_big_omega(m));
            }
        }
    }
}

TEST_CASE("enumerate_monic order and counts") {
    Fq f2 = Fq::make(2, 1);
    auto d0 = enumerate_monic(f2, 0);
    REQUIRE(d0.size() == 1);
    CHECK(d0[0].is_one());

    auto d2 = enumerate_monic(f2, 2);
    REQUIRE(d2.size() == 4);
    CHECK(d2[0] == parse(f2, "x^2"));
    CHECK(d2[1] == parse(f2, "x^2+1"));
    CHECK(d2[2] == parse(f2, "x^2+x"));
    CHECK(d2[3] == parse(f2, "x^2+x+1"));

    CHECK(enumerate_monic(Fq::make(3, 1), 1).size() == 3);

    // no repeats, and q^n values
    Fq f4 = Fq::make(2, 2);
    auto d3 = enumerate_monic(f4, 3);
    CHECK(d3.size() == 64);
    std::set<std::string> seen;
    for (const Poly& m : d3) seen.insert(m.to_string());
    CHECK(seen.size() == 64);
}

TEST_CASE("enumeration split by counter prefix is independent of the split") {
    Fq f3 = Fq::make(3, 1);
    int n = 4;  // 81 monics
    std::vector<Poly> whole = enumerate_monic(f3, n);
    for (std::uint64_t cut : {1ull, 27ull, 40ull, 80ull}) {
        std::vector<Poly> glued;
        MonicEnumerator lo(f3, n, 0, cut), hi(f3, n, cut, 0);
        while (auto p = lo.next()) glued.push_back(std::move(*p));
        while (auto p = hi.next()) glued.push_back(std::move(*p));
        REQUIRE(glued.size() == whole.size());
        for (std::size_t i = 0; i < whole.size(); ++i) CHECK(glued[i] == whole[i]);
    }
}

TEST_CASE("irreducible counts match the Mobius/Gauss formula") {
    struct Case {
        std::uint64_t p;
        unsigned k;
        int nmax;
    };
    for (Case c : {Case{2, 1, 10}, Case{3, 1, 6}, Case{2, 2, 4}, Case{5, 1, 3}}) {
        Fq f = Fq::make(c.p, c.k);
        std::uint64_t q = f.q_u64();
        for (int n = 1; n <= c.nmax; ++n) {
            BigInt count(static_cast<unsigned long long>(irreducibles_of_degree(f, n).size()));
            CHECK(count == gauss_irreducible_count(q, n));
        }
    }
}

TEST_CASE("Omega is additive and gcd*lcm preserves degree (random pairs)") {
    std::mt19937_64 rng(4242);
    for (std::uint64_t p : {2ull, 3ull}) {
        Fq f = Fq::make(p, 1);
        for (int iter = 0; iter < 60; ++iter) {
            int da = 1 + static_cast<int>(rng() % 8), db = 1 + static_cast<int>(rng() % 8);
            Poly a = random_monic(f, da, rng), b = random_monic(f, db, rng);
            CHECK(factorize(poly_mul(a, b)).big_omega() ==
                  factorize(a).big_omega() + factorize(b).big_omega());

            Poly g = poly_gcd(a, b);
            Poly l = poly_divmod(poly_mul(a, b), g).first;
            CHECK(g.degree() + l.degree() == da + db);
            // |a||b|/|lcm| == |gcd| in exponent form
            CHECK(da + db - l.degree() == g.degree());
        }
    }
}

TEST_CASE("extension field factorization: x^2+x+1 splits over F4") {
    Fq f4 = Fq::make(2, 2);
    Poly m = parse(f4, "x^2+x+1");
    Factorization fact = factorize(m);
    REQUIRE(fact.parts.size() == 2);
    CHECK(fact.parts[0].prime.degree() == 1);
    CHECK(fact.parts[1].prime.degree() == 1);
    CHECK(poly_mul(fact.parts[0].prime, fact.parts[1].prime) == m);
    // roots are t and t+1
    CHECK(fact.parts[0].prime.to_string() == "x+(t)");
    CHECK(fact.parts[1].prime.to_string() == "x+(t+1)");
}

TEST_CASE("print/parse round trip") {
    std::mt19937_64 rng(31337);
    for (auto [p, k] : {std::pair<std::uint64_t, unsigned>{2, 1}, {3, 1}, {2, 2}, {5, 1}}) {
        Fq f = Fq::make(p, k);
        for (int iter = 0; iter < 40; ++iter) {
            Poly m = random_monic(f, 1 + static_cast<int>(rng() % 6), rng);
            CHECK(poly_parse(f, m.to_string()) == m);
        }
    }
    Fq f2 = Fq::make(2, 1);
    CHECK(parse(f2, "x^2 + x + 1").to_string() == "x^2+x+1");
    CHECK(Poly::one(f2).to_string() == "1");
    CHECK(Poly::zero(f2).to_string() == "0");
    CHECK_THROWS_AS(poly_parse(f2, "x^2++1"), ParseError);
    CHECK_THROWS_AS(poly_parse(f2, ""), ParseError);

    Fq f9 = Fq::make(3, 2);
    Poly deep = parse(f9, "(2*t+1)*x^3+(t+2)*x+2");
    CHECK(poly_parse(f9, deep.to_string()) == deep);
    CHECK_THROWS_AS(poly_parse(f9, "(t^2)*x"), ParseError);  // t-degree must be < k
}

TEST_CASE("squarefree decomposition handles p-th powers") {
    Fq f = Fq::make(2, 1);
    // (x+1)^4 * (x^2+x+1)^2 * x
    Poly m = parse(f, "x");
    Poly xp1 = parse(f, "x+1");
    Poly irr = parse(f, "x^2+x+1");
    for (int i = 0; i < 4; ++i) m = poly_mul(m, xp1);
    for (int i = 0; i < 2; ++i) m = poly_mul(m, irr);
    Factorization fact = factorize(m);
    REQUIRE(fact.parts.size() == 3);
    CHECK(fact.parts[0].prime == parse(f, "x"));
    CHECK(fact.parts[0].multiplicity == 1);
    CHECK(fact.parts[1].prime == xp1);
    CHECK(fact.parts[1].multiplicity == 4);
    CHECK(fact.parts[2].prime == irr);
    CHECK(fact.parts[2].multiplicity == 2);
    CHECK(fact.big_omega() == 7);
    CHECK(fact.small_omega() == 3);
}
