#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "semergo/counting.hpp"
#include "semergo/graph.hpp"
#include "semergo/semigroup.hpp"

using namespace semergo;

namespace {

Element random_element(const Instance& inst, int max_degree, std::mt19937_64& rng) {
    std::vector<std::pair<PrimeId, unsigned>> parts;
    long long budget = max_degree;
    while (budget > 0 && rng() % 4 != 0) {
        int d = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(budget));
        if (inst.pi(d).is_zero()) break;
        std::uint64_t idx = rng() % inst.pi(d).to_u64();
        parts.emplace_back(PrimeId{d, idx}, 1u + static_cast<unsigned>(rng() % 2));
        budget -= d;
    }
    return Element::from_parts(std::move(parts));
}

}  // namespace

TEST_CASE("element degree, norm and identity") {
    Fq f2 = Fq::make(2, 1);
    PolynomialInstance inst(f2);

    Element id = Element::identity();
    CHECK(id.degree() == 0);
    CHECK(inst.norm(id) == BigInt(1));
    CHECK(id.big_omega() == 0);

    // x^2+x = x * (x+1): degree 2, norm q^2 = 4
    Element e = inst.element_of(poly_parse(f2, "x^2+x"));
    CHECK(e.degree() == 2);
    CHECK(inst.norm(e) == BigInt(4));
    CHECK(e.big_omega() == 2);
    CHECK(e.small_omega() == 2);

    Element g = inst.element_of(poly_parse(f2, "x^3+x+1"));
    CHECK(sg_mul(e, g).degree() == e.degree() + g.degree());
}

TEST_CASE("gcd/lcm laws") {
    PrimeId p{1, 0}, r{2, 0};
    Element pp = sg_mul(Element::prime(p), Element::prime(p));  // p^2
    Element pr = sg_mul(Element::prime(p), Element::prime(r));  // p*r

    CHECK(sg_gcd(pp, Element::identity()) == Element::identity());
    CHECK(sg_gcd(pp, pr) == Element::prime(p));
    CHECK(sg_lcm(pp, pr) == sg_mul(pp, Element::prime(r)));

    std::mt19937_64 rng(5150);
    Fq f3 = Fq::make(3, 1);
    PolynomialInstance inst(f3);
    for (int i = 0; i < 100; ++i) {
        Element a = random_element(inst, 6, rng), b = random_element(inst, 6, rng);
        CHECK(sg_mul(a, b) == sg_mul(sg_gcd(a, b), sg_lcm(a, b)));
        // |g||h| = |gcd||lcm| via degree arithmetic
        CHECK(a.degree() + b.degree() == sg_gcd(a, b).degree() + sg_lcm(a, b).degree());
    }
}

TEST_CASE("canonical representation is stable under recomposition") {
    std::mt19937_64 rng(24);
    for (int i = 0; i < 200; ++i) {
        std::vector<std::pair<PrimeId, unsigned>> parts;
        int n = static_cast<int>(rng() % 6);
        for (int j = 0; j < n; ++j)
            parts.emplace_back(PrimeId{1 + static_cast<int>(rng() % 4), rng() % 3},
                               1u + static_cast<unsigned>(rng() % 3));
        Element e = Element::from_parts(parts);
        // shuffle and split multiplicities, then recompose
        std::vector<std::pair<PrimeId, unsigned>> split;
        for (auto& [p, m] : e.parts())
            for (unsigned c = 0; c < m; ++c) split.emplace_back(p, 1u);
        std::shuffle(split.begin(), split.end(), rng);
        CHECK(Element::from_parts(split) == e);
    }
}

TEST_CASE("sg_primes spec cases") {
    Fq f2 = Fq::make(2, 1);
    PolynomialInstance poly(f2);
    auto p2 = poly.primes(2);
    REQUIRE(p2.size() == 1);
    CHECK(poly.poly_of_prime(p2[0]) == poly_parse(f2, "x^2+x+1"));

    SyntheticInstance synth(BigInt(2), {BigInt(2), BigInt(1), BigInt(2), BigInt(3)});
    CHECK(synth.primes(4).size() == 3);
    CHECK(synth.pi(4) == BigInt(3));

    GraphPathInstance k4(GraphSpec::complete(4), 12);
    CHECK(k4.pi(3) == BigInt(8));
    CHECK(k4.primes(3).size() == 8);
}

TEST_CASE("sg_enumerate counts") {
    Fq f2 = Fq::make(2, 1);
    PolynomialInstance poly(f2);
    CHECK(poly.enumerate(0).size() == 1);
    CHECK(poly.enumerate(0)[0].is_identity());
    CHECK(poly.enumerate(2).size() == 7);  // 1 + 2 + 4

    SyntheticInstance synth(BigInt(2), polynomial_pi_table(2, 8));
    auto elems = synth.enumerate(8);
    CountTable ct = count_table(synth, 8);
    CHECK(BigInt(static_cast<unsigned long long>(elems.size())) == ct.G_cum[8]);
    // per-degree counts match G(n)
    std::map<long long, std::uint64_t> by_degree;
    for (const Element& e : elems) ++by_degree[e.degree()];
    for (int n = 0; n <= 8; ++n)
        CHECK(BigInt(by_degree[n]) == ct.G[static_cast<std::size_t>(n)]);
}

TEST_CASE("graph instance enumeration matches the count table") {
    GraphPathInstance k4(GraphSpec::complete(4), 8);
    CountTable ct = count_table(k4, 6);
    auto elems = k4.enumerate(6);
    // degree-6 elements: 12 primitive 6-cycles plus 36 multisets of two
    // 3-cycles (28 unordered pairs + 8 doubled)
    CHECK(ct.G[6] == BigInt(48));
    CHECK(BigInt(static_cast<unsigned long long>(elems.size())) == ct.G_cum[6]);
    std::map<long long, std::uint64_t> by_degree;
    for (const Element& e : elems) ++by_degree[e.degree()];
    for (int n = 0; n <= 6; ++n)
        CHECK(BigInt(by_degree[n]) == ct.G[static_cast<std::size_t>(n)]);
}

TEST_CASE("polynomial instance enumeration agrees with ffpoly, element for element") {
    Fq f2 = Fq::make(2, 1);
    PolynomialInstance inst(f2);
    int nmax = 10;
    auto elems = inst.enumerate(nmax);
    std::set<std::string> from_abstract;
    for (const Element& e : elems) from_abstract.insert(inst.poly_of(e).to_string());
    std::set<std::string> from_poly;
    for (int n = 0; n <= nmax; ++n)
        for (const Poly& m : enumerate_monic(f2, n)) from_poly.insert(m.to_string());
    CHECK(from_abstract == from_poly);
    CHECK(elems.size() == from_poly.size());

    // primes agree with irreducibility filtering
    for (int d = 1; d <= nmax; ++d) {
        auto ids = inst.primes(d);
        std::size_t count = 0;
        for (const Poly& m : enumerate_monic(f2, d))
            if (poly_is_irreducible(m)) ++count;
        CHECK(ids.size() == count);
    }
}

TEST_CASE("graph spec: K4 traces, primes, delta, perron") {
    GraphSpec k4 = GraphSpec::complete(4);
    CHECK(k4.oriented_edges() == 12);
    auto traces = k4.closed_path_counts(6);
    // frozen from the known non-backtracking spectrum of K4:
    // {2, 1, 1, 1, -1, -1, (-1 +- i sqrt7)/2 x3 pairs}
    CHECK(traces[0] == BigInt(0));
    CHECK(traces[1] == BigInt(0));
    CHECK(traces[2] == BigInt(24));
    CHECK(traces[3] == BigInt(24));
    CHECK(traces[4] == BigInt(0));
    CHECK(traces[5] == BigInt(96));

    auto pi = graph_pi(k4, 6);
    CHECK(pi[2] == BigInt(8));   // pi(3) = 8
    CHECK(pi[3] == BigInt(6));   // pi(4) = 24/4
    CHECK(pi[4] == BigInt(0));
    CHECK(pi[5] == BigInt(12));
    CHECK(pi[0] == BigInt(0));
    CHECK(pi[1] == BigInt(0));

    CHECK(k4.delta() == 1);
    CHECK(k4.perron() == doctest::Approx(2.0).epsilon(1e-3));

    // Mobius inversion round trip: sum_{d|m} d pi(d) = N_m
    auto traces12 = k4.closed_path_counts(12);
    auto pi12 = graph_pi(k4, 12);
    for (int m = 1; m <= 12; ++m) {
        BigInt s(0);
        for (int d : divisors_of(m)) s += BigInt(d) * pi12[static_cast<std::size_t>(d - 1)];
        CHECK(s == traces12[static_cast<std::size_t>(m - 1)]);
    }

    // primitive cycle classes: 8 triangles (4 x 2 orientations), 6 squares
    CHECK(k4.primitive_cycles(3).size() == 8);
    CHECK(k4.primitive_cycles(4).size() == 6);
    CHECK_THROWS_AS(k4.primitive_cycles(8, 10), CountOnly);
}

TEST_CASE("graph spec: bipartite and degenerate graphs") {
    // K_{2,3}: the 2-vertex side forces strict alternation, so every closed
    // non-backtracking path has length divisible by 4
    std::vector<std::pair<int, int>> e23;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 3; ++b) e23.emplace_back(a, 2 + b);
    GraphSpec k23(5, e23);
    CHECK(k23.delta() == 4);
    GraphPathInstance inst23(k23, 12);
    CHECK_FALSE(inst23.classical());

    // K_{3,3} is the genuinely bipartite case: Delta = 2
    std::vector<std::pair<int, int>> e33;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) e33.emplace_back(a, 3 + b);
    GraphSpec k33(6, e33);
    CHECK(k33.delta() == 2);
    GraphPathInstance inst33(k33, 12);
    CHECK_FALSE(inst33.classical());

    GraphPathInstance k4(GraphSpec::complete(4), 12);
    CHECK(k4.classical());

    // C4: only the two oriented 4-cycles
    GraphSpec c4(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    CHECK(c4.delta() == 4);
    CHECK(graph_pi(c4, 4)[3] == BigInt(2));
    CHECK(c4.primitive_cycles(4).size() == 2);
    CHECK(c4.primitive_cycles(8).size() == 0);  // squares of the 4-cycle are imprimitive

    CHECK_THROWS_AS(GraphSpec(4, {{0, 1}, {2, 3}}), Disconnected);
    CHECK_THROWS_AS(GraphSpec(2, {{0, 0}}), Error);
}

TEST_CASE("graph edge list parsing") {
    std::istringstream in("7 9\n9 12\n12 7\n");
    GraphSpec g = GraphSpec::parse_edge_list(in);
    CHECK(g.vertices() == 3);
    CHECK(g.oriented_edges() == 6);
    CHECK(g.delta() == 3);  // a triangle
    std::istringstream empty("");
    CHECK_THROWS_AS(GraphSpec::parse_edge_list(empty), Error);
}
