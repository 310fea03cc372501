#pragma once

// Brute-force reference implementations used only by tests. These stay
// independent of the library's factorization and counting pipelines: trial
// division instead of Cantor-Zassenhaus, plain enumeration instead of the
// generating-function DP.

#include <map>
#include <vector>

#include "semergo/bigint.hpp"
#include "semergo/ffpoly.hpp"

namespace oracles {

using semergo::Fq;
using semergo::Poly;

inline std::vector<Poly> monics_of_degree(const Fq& f, int degree) {
    std::vector<Poly> out;
    std::uint64_t q = f.q_u64();
    std::uint64_t count = 1;
    for (int i = 0; i < degree; ++i) count *= q;
    for (std::uint64_t c = 0; c < count; ++c)
        out.push_back(Poly::monic_from_counter(f, degree, c));
    return out;
}

// Irreducibility by trial division over all monic divisors of degree <= n/2.
inline bool trial_division_irreducible(const Poly& m) {
    int n = m.degree();
    if (n <= 0) return false;
    const Fq& f = m.field();
    for (int d = 1; 2 * d <= n; ++d) {
        for (const Poly& cand : monics_of_degree(f, d)) {
            if (semergo::poly_divmod(m, cand).second.is_zero()) return false;
        }
    }
    return true;
}

// Complete factorization by repeated trial division in canonical order.
inline std::vector<std::pair<Poly, unsigned>> trial_division_factor(const Poly& m) {
    std::vector<std::pair<Poly, unsigned>> out;
    const Fq& f = m.field();
    Poly rest = semergo::poly_make_monic(m);
    int d = 1;
    while (rest.degree() > 0) {
        if (2 * d > rest.degree()) {
            out.emplace_back(rest, 1u);
            break;
        }
        bool found = false;
        for (const Poly& cand : monics_of_degree(f, d)) {
            unsigned mult = 0;
            while (true) {
                auto [q, r] = semergo::poly_divmod(rest, cand);
                if (!r.is_zero()) break;
                rest = q;
                ++mult;
            }
            if (mult) {
                out.emplace_back(cand, mult);
                found = true;
            }
            if (rest.degree() < d) break;
        }
        (void)found;
        ++d;
    }
    return out;
}

inline std::uint64_t trial_division_big_omega(const Poly& m) {
    std::uint64_t s = 0;
    for (auto& [p, mult] : trial_division_factor(m)) s += mult;
    return s;
}

// Histogram N(n, k) = #{monic of degree n with Omega == k} by enumeration.
inline std::map<std::uint64_t, semergo::BigInt> omega_histogram(const Fq& f, int degree,
                                                                bool distinct = false) {
    std::map<std::uint64_t, semergo::BigInt> h;
    for (const Poly& m : monics_of_degree(f, degree)) {
        auto parts = trial_division_factor(m);
        std::uint64_t k = 0;
        for (auto& [p, mult] : parts) k += distinct ? 1 : mult;
        h[k] += semergo::BigInt(1);
    }
    return h;
}

}  // namespace oracles
