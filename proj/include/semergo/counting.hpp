#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "semergo/bigint.hpp"
#include "semergo/numtheory.hpp"
#include "semergo/semigroup.hpp"

namespace semergo {

// (1/n) sum_{d|n} mu(d) q^(n/d): the irreducible count of degree n over F_q.
// Serves as the independent oracle for the polynomial instance's pi.
inline BigInt pi_from_gauss(std::uint64_t q, int n) {
    if (q < 2 || n < 1) throw Error("pi_from_gauss requires q >= 2, n >= 1");
    auto mu = mobius_sieve(n);
    BigInt s(0);
    for (int d : divisors_of(n))
        s += BigInt(mu[static_cast<std::size_t>(d)]) *
             BigInt::power(BigInt(q), static_cast<std::uint64_t>(n / d));
    BigInt quot, rem;
    BigInt::divmod(s, BigInt(n), quot, rem);
    if (!rem.is_zero()) throw Error("Gauss count not divisible by n");
    return quot;
}

// Chebyshev-function analogue: Lambda(n) = sum_{d|n} d * pi(d).
inline BigInt chebyshev_lambda(const Instance& inst, int n) {
    if (n < 1) throw Error("chebyshev_lambda requires n >= 1");
    BigInt s(0);
    for (int d : divisors_of(n)) s += BigInt(d) * inst.pi(d);
    return s;
}

// ---------------------------------------------------------------------------
// CountTable: N(n, k) = #{g : degree n, Omega(g) = k} and the omega variant,
// for 0 <= k <= n <= nmax, exact. Built degree by degree from the Euler
// product: primes of degree d contribute (1 - z u^d)^(-pi(d)) to the Omega
// table and (1 + z u^d/(1 - u^d))^pi(d) to the omega table. Coefficients are
// extracted with multiset-convolution passes, so pi(d) enters only through
// binomial values and enormous prime counts cost nothing extra.
// ---------------------------------------------------------------------------
struct CountTable {
    std::string instance_desc;
    int nmax = 0;
    BigInt q;                                   // norm base when integer, else 0
    std::vector<std::vector<BigInt>> big_omega;  // [n][k], k <= n
    std::vector<std::vector<BigInt>> small_omega;
    std::vector<BigInt> G;      // G(n) = row sums
    std::vector<BigInt> G_cum;  // |G_n| = sum_{j <= n} G(j)
    std::vector<BigInt> pi;     // pi[d], d >= 1; pi[0] unused

    // sum over j <= n of N(j, k), the weights of the cumulative distribution
    std::vector<BigInt> cumulative_by_k(int n, bool distinct = false) const {
        const auto& table = distinct ? small_omega : big_omega;
        std::vector<BigInt> out(static_cast<std::size_t>(n) + 1);
        for (int j = 0; j <= n; ++j)
            for (int k = 0; k <= j; ++k)
                out[static_cast<std::size_t>(k)] += table[static_cast<std::size_t>(j)]
                                                         [static_cast<std::size_t>(k)];
        return out;
    }
};

namespace detail {

using Table = std::vector<std::vector<BigInt>>;

inline Table empty_table(int nmax) {
    Table t(static_cast<std::size_t>(nmax) + 1);
    for (int n = 0; n <= nmax; ++n)
        t[static_cast<std::size_t>(n)].assign(static_cast<std::size_t>(n) + 1, BigInt(0));
    return t;
}

// T <- T * (1 - z u^d)^(-pi_d)
inline void apply_big_omega_factor(Table& t, int d, const BigInt& pi_d, int nmax) {
    int jmax = nmax / d;
    std::vector<BigInt> binom(static_cast<std::size_t>(jmax) + 1);
    binom[0] = BigInt(1);
    for (int j = 1; j <= jmax; ++j)
        binom[static_cast<std::size_t>(j)] = multiset_coefficient(pi_d, static_cast<std::uint64_t>(j));
    Table out = empty_table(nmax);
    for (int n = 0; n <= nmax; ++n) {
        for (int k = 0; k <= n; ++k) {
            BigInt& acc = out[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
            int top = std::min(k, n / d);
            for (int j = 0; j <= top; ++j) {
                int nn = n - d * j, kk = k - j;
                if (kk > nn) continue;
                const BigInt& prev = t[static_cast<std::size_t>(nn)][static_cast<std::size_t>(kk)];
                if (prev.is_zero()) continue;
                acc.add_product(binom[static_cast<std::size_t>(j)], prev);
            }
        }
    }
    t = std::move(out);
}

// T <- T * (1 + z u^d / (1 - u^d))^pi_d, via powers of the operator
// M = z u^d (1 - u^d)^(-1): result = sum_s C(pi_d, s) T M^s. Applying M is a
// shift by (d, 1) followed by a prefix sum along n with stride d.
inline void apply_small_omega_factor(Table& t, int d, const BigInt& pi_d, int nmax) {
    int smax = nmax / d;
    Table result = t;  // s = 0 term
    Table power = t;   // T M^s
    for (int s = 1; s <= smax; ++s) {
        BigInt coeff = binomial(pi_d, static_cast<std::uint64_t>(s));
        Table next = empty_table(nmax);
        for (int n = d; n <= nmax; ++n) {
            for (int k = 0; k <= n; ++k) {
                BigInt v;
                if (k >= 1 && k - 1 <= n - d)
                    v = power[static_cast<std::size_t>(n - d)][static_cast<std::size_t>(k - 1)];
                if (k <= n - d)
                    v += next[static_cast<std::size_t>(n - d)][static_cast<std::size_t>(k)];
                next[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] = std::move(v);
            }
        }
        power = std::move(next);
        if (coeff.is_zero()) break;  // pi_d < s: no larger subsets exist
        for (int n = 0; n <= nmax; ++n)
            for (int k = 0; k <= n; ++k) {
                const BigInt& v = power[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
                if (!v.is_zero())
                    result[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)].add_product(
                        coeff, v);
            }
    }
    t = std::move(result);
}

}  // namespace detail

inline CountTable count_table(const Instance& inst, int nmax) {
    if (nmax < 0) throw Error("count_table requires nmax >= 0");
    CountTable ct;
    ct.instance_desc = inst.description();
    ct.nmax = nmax;
    ct.q = inst.q_is_integer() ? inst.q_int() : BigInt(0);
    ct.pi = inst.pi_vector(nmax);

    detail::Table big = detail::empty_table(nmax);
    big[0][0] = BigInt(1);
    detail::Table small = big;
    for (int d = 1; d <= nmax; ++d) {
        const BigInt& pd = ct.pi[static_cast<std::size_t>(d)];
        if (pd.is_zero()) continue;
        detail::apply_big_omega_factor(big, d, pd, nmax);
        detail::apply_small_omega_factor(small, d, pd, nmax);
    }
    ct.big_omega = std::move(big);
    ct.small_omega = std::move(small);

    ct.G.assign(static_cast<std::size_t>(nmax) + 1, BigInt(0));
    ct.G_cum.assign(static_cast<std::size_t>(nmax) + 1, BigInt(0));
    BigInt cum(0);
    for (int n = 0; n <= nmax; ++n) {
        BigInt row(0);
        for (int k = 0; k <= n; ++k)
            row += ct.big_omega[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
        ct.G[static_cast<std::size_t>(n)] = row;
        cum += ct.G[static_cast<std::size_t>(n)];
        ct.G_cum[static_cast<std::size_t>(n)] = cum;
    }
    return ct;
}

// ---------------------------------------------------------------------------
// Axiom fit: G(n) ~ c q^n + O(q^(eta n)).
// ---------------------------------------------------------------------------
struct AxiomFit {
    double c_hat = 0.0;
    double q_hat = 0.0;
    double eta_hat = 0.0;  // NaN when the fit is exact
    std::vector<double> residuals;  // G(n)/q_hat^n - c_hat over the tail
};

namespace detail {

inline double ln_big(const BigInt& v) {
    long e2 = 0;
    double m = v.to_double_scaled(e2);
    return std::log(std::fabs(m)) + static_cast<double>(e2) * std::log(2.0);
}

}  // namespace detail

inline AxiomFit axiom_fit(const std::vector<BigInt>& G) {
    if (G.size() < 8) throw Error("axiom_fit requires at least 8 entries");
    int n = static_cast<int>(G.size());
    int tail_start = n / 2;
    for (int i = tail_start; i < n; ++i)
        if (G[static_cast<std::size_t>(i)].sign() <= 0)
            throw DegenerateSequence("G must be strictly positive on the fitted tail");

    double log_ratio_sum = 0.0;
    int ratios = 0;
    for (int i = tail_start; i + 1 < n; ++i) {
        log_ratio_sum += detail::ln_big(G[static_cast<std::size_t>(i + 1)]) -
                         detail::ln_big(G[static_cast<std::size_t>(i)]);
        ++ratios;
    }
    if (ratios == 0) throw DegenerateSequence("tail too short");
    double ln_q = log_ratio_sum / ratios;
    if (ln_q < 1e-9) throw DegenerateSequence("growth ratio q_hat <= 1");

    AxiomFit fit;
    fit.q_hat = std::exp(ln_q);
    double c_sum = 0.0;
    int c_terms = 0;
    for (int i = tail_start; i < n; ++i) {
        c_sum += std::exp(detail::ln_big(G[static_cast<std::size_t>(i)]) - i * ln_q);
        ++c_terms;
    }
    fit.c_hat = c_sum / c_terms;

    // eta from the log-slope of |G(n) - c q^n|; NaN when residuals vanish
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int pts = 0;
    for (int i = tail_start; i < n; ++i) {
        double rel = std::exp(detail::ln_big(G[static_cast<std::size_t>(i)]) - i * ln_q) - fit.c_hat;
        fit.residuals.push_back(rel);
        double mag = std::fabs(rel);
        if (mag < 1e-13 * fit.c_hat) continue;
        double y = std::log(mag) + i * ln_q;  // ln |G - c q^n|
        sx += i;
        sy += y;
        sxx += static_cast<double>(i) * i;
        sxy += i * y;
        ++pts;
    }
    if (pts >= 2 && std::fabs(pts * sxx - sx * sx) > 1e-9) {
        double slope = (pts * sxy - sx * sy) / (pts * sxx - sx * sx);
        fit.eta_hat = slope / ln_q;
    } else {
        fit.eta_hat = std::nan("");
    }
    return fit;
}

// ---------------------------------------------------------------------------
// PNT check: residuals of Lambda(n) against q^n, the empirical theta, and
// the alternation flag that marks non-classical instances.
// ---------------------------------------------------------------------------
struct PntReport {
    std::string instance_desc;
    int nmax = 0;
    double max_residual = 0.0;  // max |Lambda(n)/q^n - 1|
    double theta_hat = 0.0;     // NaN when Lambda(n) == q^n everywhere
    bool alternation = false;
    std::vector<double> residuals;  // indexed by n-1
};

inline PntReport pnt_check(const Instance& inst, int nmax) {
    PntReport rep;
    rep.instance_desc = inst.description();
    rep.nmax = nmax;
    std::vector<BigInt> lambda;
    for (int n = 1; n <= nmax; ++n) lambda.push_back(chebyshev_lambda(inst, n));
    rep.alternation = detail::parity_alternation(lambda);

    bool integer_q = inst.q_is_integer();
    BigInt qi = integer_q ? inst.q_int() : BigInt(0);
    double ln_q = std::log(inst.q_real());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int pts = 0;
    for (int n = 1; n <= nmax; ++n) {
        double residual;
        double diff_ln;
        bool exact_zero = false;
        if (integer_q) {
            BigInt qn = BigInt::power(qi, static_cast<std::uint64_t>(n));
            BigInt diff = lambda[static_cast<std::size_t>(n - 1)] - qn;
            exact_zero = diff.is_zero();
            residual = exact_zero ? 0.0 : std::fabs(big_ratio(diff, qn));
            diff_ln = exact_zero ? 0.0 : detail::ln_big(diff);
        } else {
            double lam = lambda[static_cast<std::size_t>(n - 1)].is_zero()
                             ? 0.0
                             : std::exp(detail::ln_big(lambda[static_cast<std::size_t>(n - 1)]));
            double qn = std::exp(n * ln_q);
            residual = std::fabs(lam / qn - 1.0);
            exact_zero = residual < 1e-15;
            diff_ln = std::log(std::max(std::fabs(lam - qn), 1e-300));
        }
        rep.residuals.push_back(residual);
        rep.max_residual = std::max(rep.max_residual, residual);
        if (!exact_zero) {
            sx += n;
            sy += diff_ln;
            sxx += static_cast<double>(n) * n;
            sxy += n * diff_ln;
            ++pts;
        }
    }
    if (pts >= 2 && std::fabs(pts * sxx - sx * sx) > 1e-9)
        rep.theta_hat = (pts * sxy - sx * sy) / (pts * sxx - sx * sx) / ln_q;
    else
        rep.theta_hat = std::nan("");
    return rep;
}

}  // namespace semergo
