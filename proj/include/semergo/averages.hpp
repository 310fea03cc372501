#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semergo/counting.hpp"
#include "semergo/dynamics.hpp"
#include "semergo/rational.hpp"
#include "semergo/util.hpp"

namespace semergo {

// ---------------------------------------------------------------------------
// Cesaro and logarithmic averages over finite element sets. The logarithmic
// weights 1/|g| = q^-deg(g) are kept exact for integer q by clearing the
// common denominator q^maxdeg.
// ---------------------------------------------------------------------------
inline Complex cesaro_avg(const std::vector<Element>& B,
                          const std::function<Complex(const Element&)>& a) {
    if (B.empty()) throw EmptySet("Cesaro average over empty set");
    KahanComplex acc;
    for (const Element& g : B) acc.add(a(g));
    return acc.value() / static_cast<double>(B.size());
}

inline Rational cesaro_avg_rational(const std::vector<Element>& B,
                                    const std::function<Rational(const Element&)>& a) {
    if (B.empty()) throw EmptySet("Cesaro average over empty set");
    Rational s(0);
    for (const Element& g : B) s += a(g);
    return s / Rational(BigInt(static_cast<long long>(B.size())));
}

namespace detail {

inline long long max_degree_of(const std::vector<Element>& B) {
    long long d = 0;
    for (const Element& g : B) d = std::max(d, g.degree());
    return d;
}

}  // namespace detail

inline Rational log_avg_rational(const Instance& inst, const std::vector<Element>& B,
                                 const std::function<Rational(const Element&)>& a) {
    if (B.empty()) throw EmptySet("logarithmic average over empty set");
    BigInt q = inst.q_int();
    long long dmax = detail::max_degree_of(B);
    Rational num(0);
    BigInt den(0);  // sum of weights, scaled by q^dmax
    for (const Element& g : B) {
        BigInt w = BigInt::power(q, static_cast<std::uint64_t>(dmax - g.degree()));
        num += Rational(w) * a(g);
        den += w;
    }
    return num / Rational(den);
}

inline Complex log_avg(const Instance& inst, const std::vector<Element>& B,
                       const std::function<Complex(const Element&)>& a) {
    if (B.empty()) throw EmptySet("logarithmic average over empty set");
    long long dmax = detail::max_degree_of(B);
    double lnq = std::log(inst.q_real());
    KahanComplex num;
    KahanSum den;
    for (const Element& g : B) {
        double w = std::exp(static_cast<double>(dmax - g.degree()) * lnq);
        num.add(w * a(g));
        den.add(w);
    }
    return num.value() / den.value();
}

// ---------------------------------------------------------------------------
// Statistics over a CountTable. Everything below works from N(j, k) alone:
// no enumeration, so n = 200 grids are cheap. `distinct` selects the omega
// table instead of the Omega table.
// ---------------------------------------------------------------------------

// (1/|G_n|) sum_{j<=n,k} N(j,k) Window((k - ln n)/sqrt(ln n)) f(T^k x).
// Passing window = nullptr (or constant_one) gives the plain orbit average;
// the two share this code path so the degenerate window is *exactly* the
// plain average, term for term.
inline Complex weighted_orbit_sum(const CountTable& t, bool distinct, const DynSystem& sys,
                                  const Point& x, const Observable& f, int n,
                                  const WindowFn* window) {
    if (n < 0 || n > t.nmax) throw Error("n outside the count table range");
    std::vector<BigInt> ck = t.cumulative_by_k(n, distinct);
    const BigInt& gn = t.G_cum[static_cast<std::size_t>(n)];
    double ln_n = std::log(static_cast<double>(n));
    double sq = std::sqrt(ln_n);
    KahanComplex acc;
    for (int k = 0; k <= n; ++k) {
        const BigInt& c = ck[static_cast<std::size_t>(k)];
        if (c.is_zero()) continue;
        double w = big_ratio(c, gn);
        double fv = window ? (*window)((static_cast<double>(k) - ln_n) / sq) : 1.0;
        acc.add(w * fv * orbit_value(sys, x, static_cast<std::uint64_t>(k), f));
    }
    return acc.value();
}

struct StatValue {
    Complex value;
    std::optional<Rational> exact;  // set when the computation was rational
};

// Plain orbit average (1/|G_n|) sum f(T^Omega(g) x), from counts.
inline StatValue br_average(const Instance& inst, const CountTable& t, const DynSystem& sys,
                            const Point& x, const Observable& f, int n,
                            bool distinct = false) {
    if (!inst.classical())
        throw NonClassicalInstance("instance fails the classical PNT guard");
    StatValue out;
    if (sys.kind == DynSystem::Kind::FiniteRotation && f.rational_valued()) {
        std::vector<BigInt> ck = t.cumulative_by_k(n, distinct);
        int m = sys.modulus;
        std::vector<BigInt> by_residue(static_cast<std::size_t>(m), BigInt(0));
        for (int k = 0; k <= n; ++k)
            by_residue[static_cast<std::size_t>((x.finite + k) % m)] +=
                ck[static_cast<std::size_t>(k)];
        Rational num(0);
        for (int r = 0; r < m; ++r)
            num += Rational(by_residue[static_cast<std::size_t>(r)]) *
                   f.finite_values()[static_cast<std::size_t>(r)];
        out.exact = num / Rational(t.G_cum[static_cast<std::size_t>(n)]);
        out.value = Complex(out.exact->to_double(), 0.0);
        return out;
    }
    out.value = weighted_orbit_sum(t, distinct, sys, x, f, n, nullptr);
    return out;
}

// Windowed orbit average with the normalized-Omega window argument.
inline Complex loyd_average(const Instance& inst, const CountTable& t, const DynSystem& sys,
                            const Point& x, const Observable& f, const WindowFn& window,
                            int n, bool distinct = false) {
    if (!inst.classical())
        throw NonClassicalInstance("instance fails the classical PNT guard");
    if (n < 3) throw Error("loyd_average requires n >= 3");
    return weighted_orbit_sum(t, distinct, sys, x, f, n, &window);
}

// Natural density of {Omega(g) == r mod m} inside G_n, exact.
inline Rational density_mod_m(const CountTable& t, int m, int r, int n,
                              bool distinct = false) {
    if (m < 2 || r < 0 || r >= m) throw Error("density_mod_m requires m >= 2, 0 <= r < m");
    std::vector<BigInt> ck = t.cumulative_by_k(n, distinct);
    BigInt num(0);
    for (int k = r; k <= n; k += m) num += ck[static_cast<std::size_t>(k)];
    return Rational(num, t.G_cum[static_cast<std::size_t>(n)]);
}

// Weyl sum (1/|G_n|) sum N(j,k) e^(2 pi i h k alpha). h = 0 and the
// degenerate rational case (h alpha integral) return exactly 1.
inline Complex weyl_sum(const CountTable& t, const AlphaSpec& alpha, long long h, int n,
                        bool distinct = false) {
    if (h == 0) return Complex(1.0, 0.0);
    if (alpha.is_rational && ((h * alpha.num) % alpha.den) == 0) return Complex(1.0, 0.0);
    std::vector<BigInt> ck = t.cumulative_by_k(n, distinct);
    const BigInt& gn = t.G_cum[static_cast<std::size_t>(n)];
    std::uint64_t habs = static_cast<std::uint64_t>(h < 0 ? -h : h);
    KahanComplex acc;
    for (int k = 0; k <= n; ++k) {
        const BigInt& c = ck[static_cast<std::size_t>(k)];
        if (c.is_zero()) continue;
        double w = big_ratio(c, gn);
        double theta =
            2.0 * M_PI * alpha.frac.times(habs * static_cast<std::uint64_t>(k)).to_double();
        Complex phase(std::cos(theta), std::sin(theta));
        if (h < 0) phase = std::conj(phase);
        acc.add(w * phase);
    }
    return acc.value();
}

// Liouville partial sum sum_{g in G_n} (-1)^Omega(g), exact.
inline BigInt liouville_sum(const CountTable& t, int n) {
    std::vector<BigInt> ck = t.cumulative_by_k(n, false);
    BigInt s(0);
    for (int k = 0; k <= n; ++k) {
        if (k % 2 == 0)
            s += ck[static_cast<std::size_t>(k)];
        else
            s -= ck[static_cast<std::size_t>(k)];
    }
    return s;
}

// ---------------------------------------------------------------------------
// Erdos-Kac: distribution of phi(g) = (Omega(g) - ln n)/sqrt(ln n) over G_n
// with exact weights, and its Kolmogorov-Smirnov distance to the standard
// normal evaluated on the jump set (the atoms of the discrete distribution).
// ---------------------------------------------------------------------------
struct ErdosKacAtom {
    double x = 0.0;       // phi value of the atom
    double mass = 0.0;    // N weight / |G_n|
    double cdf = 0.0;     // empirical CDF at the atom (right limit)
    double normal = 0.0;  // standard normal CDF at x
};

struct ErdosKacResult {
    int n = 0;
    double ks = 0.0;
    bool mass_exact = false;  // total mass equals 1 as exact integers
    std::vector<ErdosKacAtom> atoms;
};

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline ErdosKacResult erdos_kac_cdf(const CountTable& t, int n, bool distinct = false) {
    if (n < 3) throw Error("erdos_kac_cdf requires n >= 3");
    ErdosKacResult res;
    res.n = n;
    std::vector<BigInt> ck = t.cumulative_by_k(n, distinct);
    const BigInt& gn = t.G_cum[static_cast<std::size_t>(n)];
    BigInt total(0);
    for (const BigInt& c : ck) total += c;
    res.mass_exact = (total == gn);
    double ln_n = std::log(static_cast<double>(n));
    double sq = std::sqrt(ln_n);
    BigInt partial(0);
    for (int k = 0; k <= n; ++k) {
        const BigInt& c = ck[static_cast<std::size_t>(k)];
        if (c.is_zero()) continue;
        partial += c;
        ErdosKacAtom atom;
        atom.x = (static_cast<double>(k) - ln_n) / sq;
        atom.mass = big_ratio(c, gn);
        atom.cdf = big_ratio(partial, gn);  // exact partial sums, one rounding
        atom.normal = normal_cdf(atom.x);
        res.ks = std::max(res.ks, std::fabs(atom.cdf - atom.normal));
        res.atoms.push_back(atom);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Shift test: gap(n) = E_{G_n} F(phi) [a(Omega+1) - a(Omega)].
// ---------------------------------------------------------------------------
struct BoundedFn {
    std::string desc;
    std::function<Complex(std::uint64_t)> value;
    bool rational = false;
    std::function<Rational(std::uint64_t)> value_rational;

    static BoundedFn constant(double c) {
        BoundedFn f;
        f.desc = "constant:" + format_double(c);
        f.value = [c](std::uint64_t) { return Complex(c, 0.0); };
        f.rational = false;
        return f;
    }
    static BoundedFn one() {
        BoundedFn f;
        f.desc = "one";
        f.value = [](std::uint64_t) { return Complex(1.0, 0.0); };
        f.rational = true;
        f.value_rational = [](std::uint64_t) { return Rational(1); };
        return f;
    }
    // 1 when k == r mod m
    static BoundedFn residue_indicator(int m, int r) {
        BoundedFn f;
        f.desc = "residue:m=" + std::to_string(m) + ",r=" + std::to_string(r);
        f.value = [m, r](std::uint64_t k) {
            return Complex(static_cast<int>(k % static_cast<std::uint64_t>(m)) == r ? 1.0 : 0.0,
                           0.0);
        };
        f.rational = true;
        f.value_rational = [m, r](std::uint64_t k) {
            return Rational(static_cast<int>(k % static_cast<std::uint64_t>(m)) == r ? 1 : 0);
        };
        return f;
    }
    static BoundedFn parity() {
        BoundedFn f;
        f.desc = "parity";
        f.value = [](std::uint64_t k) { return Complex(k % 2 == 0 ? 1.0 : -1.0, 0.0); };
        f.rational = true;
        f.value_rational = [](std::uint64_t k) { return Rational(k % 2 == 0 ? 1 : -1); };
        return f;
    }
    static BoundedFn character(AlphaSpec alpha, long long h = 1) {
        BoundedFn f;
        f.desc = "character:alpha=" + alpha.desc + ",h=" + std::to_string(h);
        std::uint64_t habs = static_cast<std::uint64_t>(h < 0 ? -h : h);
        bool neg = h < 0;
        f.value = [alpha, habs, neg](std::uint64_t k) {
            double theta = 2.0 * M_PI * alpha.frac.times(habs * k).to_double();
            Complex z(std::cos(theta), std::sin(theta));
            return neg ? std::conj(z) : z;
        };
        return f;
    }
};

struct ShiftGap {
    int n = 0;
    double gap = 0.0;
    std::optional<Rational> exact;  // |gap| as an exact rational when available
    bool clipped = false;
};

inline ShiftGap shift_gap(const CountTable& t, const BoundedFn& a, const WindowFn& window,
                          int n, bool distinct = false) {
    ShiftGap out;
    out.n = n;
    std::vector<BigInt> ck = t.cumulative_by_k(n, distinct);
    const BigInt& gn = t.G_cum[static_cast<std::size_t>(n)];
    if (a.rational && window.kind() == WindowFn::Kind::ConstantOne) {
        Rational num(0);
        for (int k = 0; k <= n; ++k) {
            const BigInt& c = ck[static_cast<std::size_t>(k)];
            if (c.is_zero()) continue;
            Rational diff = a.value_rational(static_cast<std::uint64_t>(k) + 1) -
                            a.value_rational(static_cast<std::uint64_t>(k));
            num += Rational(c) * diff;
        }
        Rational gap = (num / Rational(gn)).abs();
        out.exact = gap;
        out.gap = gap.to_double();
        return out;
    }
    double ln_n = std::log(static_cast<double>(n));
    double sq = std::sqrt(ln_n);
    KahanComplex acc;
    for (int k = 0; k <= n; ++k) {
        const BigInt& c = ck[static_cast<std::size_t>(k)];
        if (c.is_zero()) continue;
        auto clip = [&out](Complex z) {
            double m = std::abs(z);
            if (m > 1.0 + 1e-12) {
                out.clipped = true;
                return z / m;
            }
            return z;
        };
        Complex diff = clip(a.value(static_cast<std::uint64_t>(k) + 1)) -
                       clip(a.value(static_cast<std::uint64_t>(k)));
        double w = big_ratio(c, gn);
        double fv = window((static_cast<double>(k) - ln_n) / sq);
        acc.add(w * fv * diff);
    }
    out.gap = std::abs(acc.value());
    return out;
}

// ---------------------------------------------------------------------------
// AverageReport: one statistic evaluated over an n-grid against its limit.
// ---------------------------------------------------------------------------
struct AverageReport {
    std::string statistic;
    std::string instance;
    std::vector<int> n_grid;
    std::vector<Complex> empirical;
    std::vector<std::string> empirical_exact;  // "" when not rational
    Complex limit{0.0, 0.0};
    std::string limit_exact;
    std::vector<double> abs_error;
    std::vector<Rational> abs_error_exact;  // parallel to abs_error when exact
    bool monotone_improving = false;
    bool clipped_warning = false;
    std::map<std::string, std::string> params;

    void finalize() {
        abs_error.clear();
        for (const Complex& e : empirical) abs_error.push_back(std::abs(e - limit));
        monotone_improving = true;
        if (!abs_error_exact.empty()) {
            for (std::size_t i = 0; i + 1 < abs_error_exact.size(); ++i)
                monotone_improving &= abs_error_exact[i + 1] < abs_error_exact[i];
        } else {
            for (std::size_t i = 0; i + 1 < abs_error.size(); ++i)
                monotone_improving &= abs_error[i + 1] < abs_error[i];
        }
    }
};

inline void check_grid(const std::vector<int>& grid) {
    if (grid.empty()) throw Error("n-grid must be nonempty");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (grid[i + 1] <= grid[i]) throw Error("n-grid must be strictly increasing");
}

inline AverageReport density_report(const CountTable& t, int m, int r,
                                    const std::vector<int>& grid, bool distinct = false,
                                    unsigned threads = 1) {
    check_grid(grid);
    AverageReport rep;
    rep.statistic = distinct ? "density-omega" : "density";
    rep.instance = t.instance_desc;
    rep.n_grid = grid;
    rep.params["m"] = std::to_string(m);
    rep.params["r"] = std::to_string(r);
    Rational target{BigInt(1), BigInt(m)};
    rep.limit = Complex(target.to_double(), 0.0);
    rep.limit_exact = target.to_string();
    rep.empirical.resize(grid.size());
    rep.empirical_exact.resize(grid.size());
    rep.abs_error_exact.resize(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        Rational d = density_mod_m(t, m, r, grid[i], distinct);
        rep.empirical[i] = Complex(d.to_double(), 0.0);
        rep.empirical_exact[i] = d.to_string();
        rep.abs_error_exact[i] = (d - target).abs();
    });
    rep.finalize();
    return rep;
}

inline AverageReport weyl_report(const CountTable& t, const AlphaSpec& alpha, long long h,
                                 const std::vector<int>& grid, bool distinct = false,
                                 unsigned threads = 1) {
    check_grid(grid);
    AverageReport rep;
    rep.statistic = distinct ? "weyl-omega" : "weyl";
    rep.instance = t.instance_desc;
    rep.n_grid = grid;
    rep.params["alpha"] = alpha.desc;
    rep.params["h"] = std::to_string(h);
    bool degenerate = h == 0 || (alpha.is_rational && ((h * alpha.num) % alpha.den) == 0);
    rep.limit = degenerate ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
    rep.limit_exact = degenerate ? "1" : "0";
    rep.empirical.resize(grid.size());
    rep.empirical_exact.assign(grid.size(), "");
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        rep.empirical[i] = weyl_sum(t, alpha, h, grid[i], distinct);
    });
    rep.finalize();
    return rep;
}

inline AverageReport br_report(const Instance& inst, const CountTable& t, const DynSystem& sys,
                               const Point& x, const Observable& f,
                               const std::vector<int>& grid, bool distinct = false,
                               unsigned threads = 1) {
    check_grid(grid);
    AverageReport rep;
    rep.statistic = distinct ? "br-average-omega" : "br-average";
    rep.instance = t.instance_desc;
    rep.n_grid = grid;
    rep.params["system"] = sys.description;
    rep.params["observable"] = f.description();
    rep.params["x"] = point_description(sys, x);
    Complex target = f.exact_integral(sys);
    rep.limit = target;
    if (sys.kind == DynSystem::Kind::FiniteRotation && f.rational_valued())
        rep.limit_exact = f.exact_integral_rational(sys).to_string();
    rep.empirical.resize(grid.size());
    rep.empirical_exact.assign(grid.size(), "");
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        StatValue v = br_average(inst, t, sys, x, f, grid[i], distinct);
        rep.empirical[i] = v.value;
        if (v.exact) rep.empirical_exact[i] = v.exact->to_string();
    });
    rep.finalize();
    return rep;
}

inline AverageReport loyd_report(const Instance& inst, const CountTable& t,
                                 const DynSystem& sys, const Point& x, const Observable& f,
                                 const WindowFn& window, const std::vector<int>& grid,
                                 bool distinct = false, unsigned threads = 1) {
    check_grid(grid);
    AverageReport rep;
    rep.statistic = distinct ? "loyd-average-omega" : "loyd-average";
    rep.instance = t.instance_desc;
    rep.n_grid = grid;
    rep.params["system"] = sys.description;
    rep.params["observable"] = f.description();
    rep.params["x"] = point_description(sys, x);
    rep.params["window"] = window.description();
    double gauss = window.gaussian_integral();
    rep.params["gaussian_factor"] = format_double(gauss);
    rep.limit = gauss * f.exact_integral(sys);
    rep.empirical.resize(grid.size());
    rep.empirical_exact.assign(grid.size(), "");
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        rep.empirical[i] = loyd_average(inst, t, sys, x, f, window, grid[i], distinct);
    });
    rep.finalize();
    return rep;
}

inline AverageReport erdos_kac_report(const CountTable& t, const std::vector<int>& grid,
                                      bool distinct = false, unsigned threads = 1) {
    check_grid(grid);
    AverageReport rep;
    rep.statistic = distinct ? "erdos-kac-omega" : "erdos-kac";
    rep.instance = t.instance_desc;
    rep.n_grid = grid;
    rep.limit = Complex(0.0, 0.0);
    rep.limit_exact = "0";
    rep.empirical.resize(grid.size());
    rep.empirical_exact.assign(grid.size(), "");
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        rep.empirical[i] = Complex(erdos_kac_cdf(t, grid[i], distinct).ks, 0.0);
    });
    rep.finalize();
    return rep;
}

inline AverageReport shift_report(const CountTable& t, const BoundedFn& a,
                                  const WindowFn& window, const std::vector<int>& grid,
                                  bool distinct = false, unsigned threads = 1) {
    check_grid(grid);
    AverageReport rep;
    rep.statistic = distinct ? "shift-test-omega" : "shift-test";
    rep.instance = t.instance_desc;
    rep.n_grid = grid;
    rep.params["a"] = a.desc;
    rep.params["window"] = window.description();
    rep.limit = Complex(0.0, 0.0);
    rep.limit_exact = "0";
    rep.empirical.resize(grid.size());
    rep.empirical_exact.assign(grid.size(), "");
    std::vector<ShiftGap> gaps(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        gaps[i] = shift_gap(t, a, window, grid[i], distinct);
    });
    for (std::size_t i = 0; i < grid.size(); ++i) {
        rep.empirical[i] = Complex(gaps[i].gap, 0.0);
        if (gaps[i].exact) {
            rep.empirical_exact[i] = gaps[i].exact->to_string();
            rep.abs_error_exact.push_back(*gaps[i].exact);
        }
        rep.clipped_warning |= gaps[i].clipped;
    }
    if (rep.abs_error_exact.size() != grid.size()) rep.abs_error_exact.clear();
    rep.finalize();
    return rep;
}

}  // namespace semergo
