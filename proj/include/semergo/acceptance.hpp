#pragma once

// The acceptance suite behind both `semergo selftest` and the dedicated test
// binary. Each criterion prints one PASS/FAIL line; tolerances are pinned
// here and nowhere else.

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "semergo/averages.hpp"
#include "semergo/counting.hpp"
#include "semergo/ffpoly.hpp"
#include "semergo/graph.hpp"
#include "semergo/keyprop.hpp"

namespace semergo {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    bool quick = false;  // halved nmax scales
    unsigned threads = 1;
};

namespace acceptance_detail {

// closed-form Liouville partial sum over G_n (telescoped slice sums)
inline BigInt closed_liouville(std::uint64_t q, int n) {
    if (n % 2 == 0) return BigInt(1);
    return BigInt(1) - BigInt::power(BigInt(q), static_cast<std::uint64_t>((n + 1) / 2));
}

struct Fixtures {
    int nmax;
    std::vector<int> grid;
    PolynomialInstance f2{Fq::make(2, 1), 512};
    CountTable table2;

    explicit Fixtures(const AcceptanceOptions& opt)
        : nmax(opt.quick ? 100 : 200),
          grid(opt.quick ? std::vector<int>{25, 50, 100} : std::vector<int>{25, 50, 100, 200}),
          table2(count_table(f2, opt.quick ? 100 : 200)) {}
};

}  // namespace acceptance_detail

inline std::vector<CriterionResult> run_acceptance(std::ostream& out,
                                                   const AcceptanceOptions& opt = {}) {
    using acceptance_detail::closed_liouville;
    std::vector<CriterionResult> results;
    acceptance_detail::Fixtures fx(opt);
    const int top = fx.grid.back();

    auto run = [&](int id, const std::string& name,
                   const std::function<bool(std::string&)>& body) {
        CriterionResult r;
        r.id = id;
        r.name = name;
        auto t0 = std::chrono::steady_clock::now();
        try {
            r.pass = body(r.detail);
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name;
        if (!r.detail.empty()) out << " (" << r.detail << ")";
        char buf[32];
        std::snprintf(buf, sizeof(buf), " (%.2fs)", r.seconds);
        out << buf << "\n";
        out.flush();
        results.push_back(r);
    };

    // 1. CountTable == enumeration + factorization histogram, exactly.
    run(1, "oracle equivalence of CountTable vs enumeration", [&](std::string& detail) {
        struct Sweep {
            std::uint64_t q;
            int nmax;
        };
        std::vector<Sweep> sweeps{{2, opt.quick ? 6 : 12}, {3, opt.quick ? 4 : 7}};
        for (Sweep s : sweeps) {
            Fq field = Fq::make(s.q, 1);
            PolynomialInstance inst(field, 64);
            CountTable ct = count_table(inst, s.nmax);
            for (int n = 0; n <= s.nmax; ++n) {
                std::vector<BigInt> hist_big(static_cast<std::size_t>(n) + 1, BigInt(0));
                std::vector<BigInt> hist_small(static_cast<std::size_t>(n) + 1, BigInt(0));
                for (const Poly& m : enumerate_monic(field, n)) {
                    Factorization f = factorize(m);
                    hist_big[f.big_omega()] += BigInt(1);
                    hist_small[f.small_omega()] += BigInt(1);
                }
                for (int k = 0; k <= n; ++k) {
                    if (ct.big_omega[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] !=
                        hist_big[static_cast<std::size_t>(k)])
                        return false;
                    if (ct.small_omega[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] !=
                        hist_small[static_cast<std::size_t>(k)])
                        return false;
                }
            }
        }
        detail = "q=2 n<=" + std::to_string(sweeps[0].nmax) + ", q=3 n<=" +
                 std::to_string(sweeps[1].nmax) + ", Omega and omega tables";
        return true;
    });

    // 2. Exact counting identities.
    run(2, "sum_{d|n} d pi(d) = q^n (n <= 64) and K4 pi(3) = 8", [&](std::string& detail) {
        int nmax = opt.quick ? 32 : 64;
        for (std::uint64_t q : {2ull, 3ull}) {
            PolynomialInstance inst(Fq::make(q, 1), nmax);
            for (int n = 1; n <= nmax; ++n) {
                if (chebyshev_lambda(inst, n) !=
                    BigInt::power(BigInt(q), static_cast<std::uint64_t>(n)))
                    return false;
            }
        }
        GraphSpec k4 = GraphSpec::complete(4);
        if (graph_pi(k4, 3)[2] != BigInt(8)) return false;
        detail = "q in {2,3}, n <= " + std::to_string(nmax) + "; trace Mobius inversion";
        return true;
    });

    // 3. Pillai-Selberg analogue.
    run(3, "density mod m: monotone errors, 0.05 cap, exact m=2 closed form",
        [&](std::string& detail) {
            for (int m : {2, 3, 5}) {
                std::vector<Rational> worst;
                for (int n : fx.grid) {
                    Rational w(0);
                    for (int r = 0; r < m; ++r) {
                        Rational err =
                            (density_mod_m(fx.table2, m, r, n) - Rational(BigInt(1), BigInt(m)))
                                .abs();
                        if (err > w) w = err;
                        if (n == top && err.to_double() > 0.05) return false;
                    }
                    worst.push_back(w);
                }
                // uniform-over-r error strictly decreases (exact comparisons)
                for (std::size_t i = 0; i + 1 < worst.size(); ++i)
                    if (!(worst[i + 1] < worst[i])) return false;
            }
            // m = 2 matches the Liouville closed form exactly, every n
            for (int n = 0; n <= top; ++n) {
                if (liouville_sum(fx.table2, n) != closed_liouville(2, n)) return false;
                Rational lhs = density_mod_m(fx.table2, 2, 0, n);
                Rational rhs{fx.table2.G_cum[static_cast<std::size_t>(n)] +
                                 closed_liouville(2, n),
                             BigInt(2) * fx.table2.G_cum[static_cast<std::size_t>(n)]};
                if (lhs != rhs) return false;
            }
            detail = "m in {2,3,5}, grid to n=" + std::to_string(top);
            return true;
        });

    // 4. Erdos-Delange analogue.
    run(4, "weyl sum alpha=sqrt2-1: strictly decreasing, <= 0.1 at top",
        [&](std::string& detail) {
            std::vector<double> mags;
            for (int n : fx.grid)
                mags.push_back(std::abs(weyl_sum(fx.table2, AlphaSpec::sqrt2(), 1, n)));
            for (std::size_t i = 0; i + 1 < mags.size(); ++i)
                if (!(mags[i + 1] < mags[i])) return false;
            if (mags.back() > 0.1) return false;
            detail = "|S(" + std::to_string(top) + ")| = " + format_double(mags.back());
            return true;
        });

    // 5. Erdos-Kac analogue.
    run(5, "Erdos-Kac KS on the jump set: decreasing, <= 0.2, exact mass",
        [&](std::string& detail) {
            ErdosKacResult lo = erdos_kac_cdf(fx.table2, 50);
            ErdosKacResult hi = erdos_kac_cdf(fx.table2, top);
            if (!lo.mass_exact || !hi.mass_exact) return false;
            if (!(hi.ks < lo.ks)) return false;
            if (hi.ks > 0.2) return false;
            // Mertens-type normalization: mean of Omega close to ln n
            std::vector<BigInt> ck = fx.table2.cumulative_by_k(top, false);
            BigInt weighted(0);
            for (int k = 0; k <= top; ++k)
                weighted += BigInt(k) * ck[static_cast<std::size_t>(k)];
            double mean = big_ratio(weighted, fx.table2.G_cum[static_cast<std::size_t>(top)]);
            double ratio = mean / std::log(static_cast<double>(top));
            if (std::fabs(ratio - 1.0) > 0.25) return false;
            detail = "KS(50) = " + format_double(lo.ks) + ", KS(" + std::to_string(top) +
                     ") = " + format_double(hi.ks) + ", mean/ln n = " + format_double(ratio);
            return true;
        });

    // 6. Windowed orbit averages.
    run(6, "loyd average: hat window + character decays; constant_one == plain",
        [&](std::string& detail) {
            DynSystem torus = DynSystem::torus({AlphaSpec::sqrt2()});
            Point x0 = Point::origin(torus);
            Observable ch = Observable::character(1);
            WindowFn hat = WindowFn::hat(-3, 3);
            // limit = (gaussian factor) * (integral of the character) = 0
            std::vector<int> sub;
            for (int n : fx.grid)
                if (n >= 50) sub.push_back(n);
            std::vector<double> errs;
            for (int n : sub)
                errs.push_back(std::abs(loyd_average(fx.f2, fx.table2, torus, x0, ch, hat, n)));
            for (std::size_t i = 0; i + 1 < errs.size(); ++i)
                if (!(errs[i + 1] < errs[i])) return false;
            if (errs.back() > 0.1) return false;
            // window degeneracy at every n in the table range
            WindowFn one = WindowFn::constant_one();
            for (int n = 3; n <= top; ++n) {
                Complex lo = loyd_average(fx.f2, fx.table2, torus, x0, ch, one, n);
                Complex br = br_average(fx.f2, fx.table2, torus, x0, ch, n).value;
                if (lo != br) return false;
            }
            detail = "err(" + std::to_string(top) + ") = " + format_double(errs.back()) +
                     "; degeneracy exact for all n";
            return true;
        });

    // 7. Proposition 3.1 at finite n, enumeration-based.
    run(7, "proposition 3.1: LHS <= sqrt(E(B)) + 0.05 on n in {10..14}",
        [&](std::string& detail) {
            std::vector<int> grid;
            int lo = 10, hi = opt.quick ? 12 : 14;
            for (int n = lo; n <= hi; ++n) grid.push_back(n);
            BSet b = BSet::make(fx.f2,
                                {Element::prime(PrimeId{1, 0}), Element::prime(PrimeId{1, 1}),
                                 Element::prime(PrimeId{2, 0})},
                                BSet::Kind::Primes);
            Prop31Report rep = proposition31_check(fx.f2, b, ElementFn::liouville(), grid);
            if (rep.error_functional_value != Rational(BigInt(11), BigInt(25))) return false;
            for (const Prop31Row& row : rep.rows)
                if (!(row.lhs <= rep.rhs + 0.05)) return false;
            detail = "sqrt(E(B)) = " + format_double(rep.rhs) + ", max LHS = " +
                     format_double([&] {
                         double m = 0;
                         for (const auto& r : rep.rows) m = std::max(m, r.lhs);
                         return m;
                     }());
            return true;
        });

    // 8. Restated error-term bounds.
    run(8, "E(B) <= 1/harmonic on 50 random prime subsets; product-set bound",
        [&](std::string& detail) {
            std::mt19937_64 rng(20240); // fixed schedule
            for (std::uint64_t q : {2ull, 3ull}) {
                SyntheticInstance inst(BigInt(q), polynomial_pi_table(q, 10));
                int checked = 0;
                while (checked < 50) {
                    std::vector<Element> subset;
                    for (int d = 1; d <= 8; ++d) {
                        std::uint64_t count = inst.pi(d).to_u64();
                        for (std::uint64_t i = 0; i < count; ++i)
                            if (rng() % 4 == 0) subset.push_back(Element::prime(PrimeId{d, i}));
                    }
                    if (subset.empty()) continue;
                    BSet b = BSet::make(inst, std::move(subset), BSet::Kind::Primes);
                    if (!(error_functional(inst, b, opt.threads) * b.harmonic_sum <=
                          Rational(1)))
                        return false;
                    ++checked;
                }
            }
            // constructed two-almost sets: E(B2) <= 3/min(harmonic sums)
            SyntheticInstance synth(BigInt(2), polynomial_pi_table(2, 24), "synthetic-f2");
            ConstructedSets cs = construct_b_sets(synth, 0.5, std::make_pair(3, 2));
            Rational hmin = cs.params.harmonic_p1 < cs.params.harmonic_p2
                                ? cs.params.harmonic_p1
                                : cs.params.harmonic_p2;
            if (!(error_functional(synth, cs.b2, opt.threads) * hmin <= Rational(3)))
                return false;
            if (!(error_functional(synth, cs.b1, opt.threads) * cs.b1.harmonic_sum <=
                  Rational(1)))
                return false;
            detail = "100 random subsets (q=2,3) + constructed P1*P2, exact rationals";
            return true;
        });

    // 9. The construction pipeline and the exchange identity.
    run(9, "lemma 4.2/4.3: matched construction and exact identity",
        [&](std::string& detail) {
            SyntheticInstance synth(BigInt(2), polynomial_pi_table(2, 24), "synthetic-f2");
            CountTable t = count_table(synth, 24);
            ConstructedSets cs = construct_b_sets(synth, 0.5, std::make_pair(3, 2));
            // per-degree matching, exactly
            std::map<int, BigInt> h1, h2;
            for (const Element& g : cs.b1.elements) h1[static_cast<int>(g.degree())] += BigInt(1);
            for (const Element& g : cs.b2.elements) h2[static_cast<int>(g.degree())] += BigInt(1);
            if (h1 != h2) return false;
            for (const Element& g : cs.b2.elements)
                if (g.big_omega() != 2) return false;
            for (const BoundedFn& a : {BoundedFn::parity(), BoundedFn::residue_indicator(3, 0),
                                       BoundedFn::residue_indicator(2, 0)}) {
                Lemma43Result res = lemma43_identity(synth, t, cs.b1, cs.b2, a, 20);
                if (!res.equal) return false;
            }
            detail = "|B1| = |B2| = " + std::to_string(cs.b1.elements.size()) +
                     ", three bounded functions, exact equality";
            return true;
        });

    // 10. Shift-invariance test.
    run(10, "shift test: exact parity gap, decreasing character gaps",
        [&](std::string& detail) {
            WindowFn one = WindowFn::constant_one();
            std::vector<int> sub;
            for (int n : fx.grid)
                if (n >= 50) sub.push_back(n);
            for (int n : sub) {
                ShiftGap g = shift_gap(fx.table2, BoundedFn::parity(), one, n);
                if (!g.exact) return false;
                Rational expect =
                    (Rational(BigInt(2)) *
                     Rational(closed_liouville(2, n),
                              fx.table2.G_cum[static_cast<std::size_t>(n)]))
                        .abs();
                if (*g.exact != expect) return false;
            }
            std::vector<double> gaps;
            for (int n : sub)
                gaps.push_back(
                    shift_gap(fx.table2, BoundedFn::character(AlphaSpec::sqrt2()), one, n).gap);
            for (std::size_t i = 0; i + 1 < gaps.size(); ++i)
                if (!(gaps[i + 1] < gaps[i])) return false;
            detail = "parity gap == 2|Liouville mean| exactly; character gap(" +
                     std::to_string(sub.back()) + ") = " + format_double(gaps.back());
            return true;
        });

    return results;
}

inline bool acceptance_all_passed(const std::vector<CriterionResult>& rs) {
    for (const CriterionResult& r : rs)
        if (!r.pass) return false;
    return true;
}

}  // namespace semergo
