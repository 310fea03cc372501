#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semergo/bigint.hpp"
#include "semergo/rational.hpp"
#include "semergo/util.hpp"

namespace semergo {

// ---------------------------------------------------------------------------
// Fixed128: a fraction in [0, 1) with 128 binary digits. Rotation orbits are
// computed here so that k*alpha mod 1 stays exact to ~2^-128 for any iterate
// count that fits in 64 bits; only the final conversion to double rounds.
// ---------------------------------------------------------------------------
class Fixed128 {
public:
    Fixed128() = default;
    explicit Fixed128(unsigned __int128 frac) : frac_(frac) {}

    static Fixed128 from_double(double x) {
        x -= std::floor(x);
        // split to keep all 53 mantissa bits
        double hi = std::floor(std::ldexp(x, 32));
        double lo = std::ldexp(x, 64) - std::ldexp(hi, 32);
        unsigned __int128 f = (static_cast<unsigned __int128>(static_cast<std::uint64_t>(hi))
                               << 96) |
                              (static_cast<unsigned __int128>(static_cast<std::uint64_t>(lo))
                               << 32);
        return Fixed128(f);
    }

    // frac(sqrt(n)) for non-square n, exact to the last bit
    static Fixed128 sqrt_of(std::uint64_t n) {
        BigInt s = BigInt::isqrt(BigInt(n) << 256);  // floor(sqrt(n) * 2^128)
        BigInt ip = BigInt::isqrt(BigInt(n));        // integer part
        return Fixed128(low128(s - (ip << 128)));
    }
    // frac(golden ratio) = (sqrt(5) - 1)/2
    static Fixed128 golden() {
        BigInt s = BigInt::isqrt(BigInt(5) << 256) - (BigInt(1) << 128);
        return Fixed128(low128(s >> 1));
    }
    // frac(pi); the 128 fractional bits of pi (verified in tests against an
    // independent Machin-series computation)
    static Fixed128 pi_frac() {
        unsigned __int128 f = (static_cast<unsigned __int128>(0x243F6A8885A308D3ull) << 64) |
                              0x13198A2E03707344ull;
        return Fixed128(f);
    }
    static Fixed128 from_rational(long long num, long long den) {
        if (den <= 0) throw Error("rational alpha needs positive denominator");
        BigInt scaled = ((BigInt(num) % BigInt(den) + BigInt(den)) % BigInt(den)) << 128;
        return Fixed128(low128(scaled / BigInt(den)));
    }

    unsigned __int128 raw() const { return frac_; }

    double to_double() const {
        return std::ldexp(static_cast<double>(static_cast<std::uint64_t>(frac_ >> 64)), -64) +
               std::ldexp(static_cast<double>(static_cast<std::uint64_t>(frac_)), -128);
    }

    // (k * alpha) mod 1: u128 multiplication wraps mod 2^128 by definition
    Fixed128 times(std::uint64_t k) const { return Fixed128(frac_ * k); }
    Fixed128 plus(const Fixed128& o) const { return Fixed128(frac_ + o.frac_); }

    friend bool operator==(const Fixed128&, const Fixed128&) = default;

private:
    unsigned __int128 frac_ = 0;

    static unsigned __int128 low128(const BigInt& v) {
        unsigned __int128 out = 0;
        for (int i = 127; i >= 0; --i) {
            out <<= 1;
            if (v.bit(static_cast<std::size_t>(i))) out |= 1;
        }
        return out;
    }
};

// A named rotation angle: closed forms stay exact, decimals are best-effort.
struct AlphaSpec {
    Fixed128 frac;
    bool is_rational = false;
    long long num = 0, den = 1;
    std::string desc;

    static AlphaSpec sqrt2() { return {Fixed128::sqrt_of(2), false, 0, 1, "sqrt2"}; }
    static AlphaSpec golden() { return {Fixed128::golden(), false, 0, 1, "golden"}; }
    static AlphaSpec pi() { return {Fixed128::pi_frac(), false, 0, 1, "pi"}; }
    static AlphaSpec rational(long long p, long long q) {
        return {Fixed128::from_rational(p, q), true, p, q,
                std::to_string(p) + "/" + std::to_string(q)};
    }
    static AlphaSpec decimal(double x) {
        return {Fixed128::from_double(x), false, 0, 1, format_double(x)};
    }
};

// Continued-fraction heuristic: returns a convergent p/q with q < 10^6 that
// matches alpha to 1e-12, if one exists. Unique ergodicity of the rotation
// is the caller's responsibility; this only powers a warning.
inline std::optional<std::pair<long long, long long>> rational_proximity(const Fixed128& a) {
    double x = a.to_double();
    double value = x;
    long long p0 = 1, q0 = 0, p1 = 0, q1 = 1;  // convergents of the CF
    for (int it = 0; it < 64; ++it) {
        double fl = std::floor(x);
        if (fl > 1e15) break;
        long long ai = static_cast<long long>(fl);
        long long p2 = ai * p0 + p1, q2 = ai * q0 + q1;
        if (q2 >= 1'000'000 || q2 <= 0) break;
        p1 = p0; q1 = q0; p0 = p2; q0 = q2;
        if (q0 > 0 && std::fabs(value - static_cast<double>(p0) / static_cast<double>(q0)) < 1e-12)
            return std::make_pair(p0, q0);
        double fracp = x - fl;
        if (fracp < 1e-15) break;
        x = 1.0 / fracp;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Uniquely ergodic systems: rotation on m points, or a torus rotation by a
// rationally independent vector (caller-asserted; see rational_proximity).
// ---------------------------------------------------------------------------
struct DynSystem {
    enum class Kind { FiniteRotation, TorusRotation };
    Kind kind = Kind::FiniteRotation;
    int modulus = 1;                  // finite rotation
    std::vector<AlphaSpec> alpha;     // torus rotation components
    std::string description;

    static DynSystem finite(int m) {
        if (m < 1) throw Error("finite rotation needs m >= 1");
        DynSystem s;
        s.kind = Kind::FiniteRotation;
        s.modulus = m;
        s.description = "finite:m=" + std::to_string(m);
        return s;
    }
    static DynSystem torus(std::vector<AlphaSpec> a) {
        if (a.empty()) throw Error("torus rotation needs at least one component");
        DynSystem s;
        s.kind = Kind::TorusRotation;
        s.alpha = std::move(a);
        s.description = "torus:alpha=";
        for (std::size_t i = 0; i < s.alpha.size(); ++i)
            s.description += (i ? "," : "") + s.alpha[i].desc;
        return s;
    }
    int dimension() const {
        return kind == Kind::TorusRotation ? static_cast<int>(alpha.size()) : 0;
    }
};

struct Point {
    long long finite = 0;
    std::vector<Fixed128> torus;

    static Point finite_at(long long r) {
        Point p;
        p.finite = r;
        return p;
    }
    static Point torus_at(std::vector<Fixed128> t) {
        Point p;
        p.torus = std::move(t);
        return p;
    }
    static Point origin(const DynSystem& sys) {
        Point p;
        if (sys.kind == DynSystem::Kind::TorusRotation)
            p.torus.assign(sys.alpha.size(), Fixed128());
        return p;
    }
};

inline std::string point_description(const DynSystem& sys, const Point& x) {
    if (sys.kind == DynSystem::Kind::FiniteRotation) return std::to_string(x.finite);
    std::string out;
    for (std::size_t i = 0; i < x.torus.size(); ++i)
        out += (i ? ";" : "") + format_double(x.torus[i].to_double());
    return out;
}

// T^k x
inline Point iterate(const DynSystem& sys, const Point& x, std::uint64_t k) {
    Point out = x;
    if (sys.kind == DynSystem::Kind::FiniteRotation) {
        out.finite = static_cast<long long>(
            (static_cast<unsigned long long>(x.finite) + k) %
            static_cast<unsigned long long>(sys.modulus));
    } else {
        if (x.torus.size() != sys.alpha.size()) throw DomainMismatch("point dimension");
        for (std::size_t i = 0; i < out.torus.size(); ++i)
            out.torus[i] = x.torus[i].plus(sys.alpha[i].frac.times(k));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Observables paired with their exact invariant integrals.
// ---------------------------------------------------------------------------
class Observable {
public:
    enum class Kind { FiniteTable, TrigPolynomial, Tabulated };

    // f on {0..m-1} given by rational values; integral is the mean
    static Observable finite_table(std::vector<Rational> values, std::string desc = "") {
        Observable f;
        f.kind_ = Kind::FiniteTable;
        f.table_ = std::move(values);
        f.desc_ = desc.empty() ? "table[m=" + std::to_string(f.table_.size()) + "]" : std::move(desc);
        return f;
    }
    static Observable indicator(int m, int r) {
        if (r < 0 || r >= m) throw Error("indicator point out of range");
        std::vector<Rational> v(static_cast<std::size_t>(m), Rational(0));
        v[static_cast<std::size_t>(r)] = Rational(1);
        return finite_table(std::move(v), "indicator:r=" + std::to_string(r));
    }

    // sum of coeff * e^(2 pi i <freq, t>) on the d-torus
    static Observable trig_polynomial(
        std::vector<std::pair<std::vector<long long>, Complex>> terms, std::string desc = "") {
        Observable f;
        f.kind_ = Kind::TrigPolynomial;
        f.trig_ = std::move(terms);
        f.desc_ = desc.empty() ? "trig[" + std::to_string(f.trig_.size()) + " terms]"
                               : std::move(desc);
        return f;
    }
    static Observable character(long long freq) {
        return trig_polynomial({{{freq}, Complex(1.0, 0.0)}},
                               "character:freq=" + std::to_string(freq));
    }
    static Observable constant(Complex c) {
        return trig_polynomial({{{0}, c}}, "constant:" + format_complex(c));
    }

    // piecewise-linear periodic interpolation of samples on [0,1); continuous,
    // and the trapezoid integral of the interpolant is its exact integral
    static Observable tabulated(std::vector<double> samples, std::string desc = "") {
        if (samples.size() < 2) throw Error("tabulated observable needs >= 2 samples");
        Observable f;
        f.kind_ = Kind::Tabulated;
        f.samples_ = std::move(samples);
        f.desc_ = desc.empty() ? "tabulated[" + std::to_string(f.samples_.size()) + "]"
                               : std::move(desc);
        return f;
    }

    Kind kind() const { return kind_; }
    const std::string& description() const { return desc_; }
    bool rational_valued() const { return kind_ == Kind::FiniteTable; }
    const std::vector<Rational>& finite_values() const {
        if (kind_ != Kind::FiniteTable) throw DomainMismatch("observable has no finite table");
        return table_;
    }

    Complex eval(const DynSystem& sys, const Point& x) const {
        switch (kind_) {
            case Kind::FiniteTable: {
                if (sys.kind != DynSystem::Kind::FiniteRotation)
                    throw DomainMismatch("finite observable on non-finite system");
                if (table_.size() != static_cast<std::size_t>(sys.modulus))
                    throw DomainMismatch("observable table size != m");
                return Complex(table_[static_cast<std::size_t>(x.finite)].to_double(), 0.0);
            }
            case Kind::TrigPolynomial: {
                if (sys.kind != DynSystem::Kind::TorusRotation)
                    throw DomainMismatch("trig polynomial on non-torus system");
                Complex out(0.0, 0.0);
                for (const auto& [freq, coeff] : trig_) {
                    if (freq.size() != x.torus.size())
                        throw DomainMismatch("frequency dimension != torus dimension");
                    // <freq, t> mod 1 in fixed point, then one complex exp
                    Fixed128 phase;
                    for (std::size_t i = 0; i < freq.size(); ++i) {
                        long long h = freq[i];
                        if (h >= 0) {
                            phase = phase.plus(x.torus[i].times(static_cast<std::uint64_t>(h)));
                        } else {
                            // -|h| t == -(|h| t) mod 1
                            Fixed128 part = x.torus[i].times(static_cast<std::uint64_t>(-h));
                            phase = phase.plus(Fixed128(static_cast<unsigned __int128>(0) -
                                                        part.raw()));
                        }
                    }
                    double theta = 2.0 * M_PI * phase.to_double();
                    out += coeff * Complex(std::cos(theta), std::sin(theta));
                }
                return out;
            }
            case Kind::Tabulated: {
                if (sys.kind != DynSystem::Kind::TorusRotation || x.torus.size() != 1)
                    throw DomainMismatch("tabulated observable needs the 1-torus");
                double t = x.torus[0].to_double();
                double pos = t * static_cast<double>(samples_.size());
                std::size_t i = static_cast<std::size_t>(pos) % samples_.size();
                double w = pos - std::floor(pos);
                double a = samples_[i];
                double b = samples_[(i + 1) % samples_.size()];
                return Complex(a + (b - a) * w, 0.0);
            }
        }
        throw Error("unreachable");
    }

    // exact invariant integral; rational for finite tables
    Rational exact_integral_rational(const DynSystem& sys) const {
        if (kind_ != Kind::FiniteTable || sys.kind != DynSystem::Kind::FiniteRotation)
            throw DomainMismatch("rational integral only for finite tables");
        Rational s(0);
        for (const Rational& v : table_) s += v;
        return s / Rational(BigInt(static_cast<long long>(table_.size())));
    }
    Complex exact_integral(const DynSystem& sys) const {
        switch (kind_) {
            case Kind::FiniteTable:
                return Complex(exact_integral_rational(sys).to_double(), 0.0);
            case Kind::TrigPolynomial: {
                if (sys.kind != DynSystem::Kind::TorusRotation)
                    throw DomainMismatch("trig polynomial on non-torus system");
                Complex out(0.0, 0.0);
                for (const auto& [freq, coeff] : trig_) {
                    bool zero = true;
                    for (long long h : freq) zero &= (h == 0);
                    if (zero) out += coeff;
                }
                return out;
            }
            case Kind::Tabulated: {
                // exact for the piecewise-linear interpolant
                double s = 0.0;
                for (std::size_t i = 0; i < samples_.size(); ++i)
                    s += 0.5 * (samples_[i] + samples_[(i + 1) % samples_.size()]);
                return Complex(s / static_cast<double>(samples_.size()), 0.0);
            }
        }
        throw Error("unreachable");
    }

private:
    Kind kind_ = Kind::FiniteTable;
    std::vector<Rational> table_;
    std::vector<std::pair<std::vector<long long>, Complex>> trig_;
    std::vector<double> samples_;
    std::string desc_;
};

inline Complex orbit_value(const DynSystem& sys, const Point& x, std::uint64_t k,
                           const Observable& f) {
    return f.eval(sys, iterate(sys, x, k));
}

inline Complex birkhoff_average(const DynSystem& sys, const Point& x, const Observable& f,
                                std::uint64_t N) {
    if (N == 0) throw Error("birkhoff_average requires N >= 1");
    KahanComplex acc;
    for (std::uint64_t n = 1; n <= N; ++n) acc.add(orbit_value(sys, x, n, f));
    return acc.value() / static_cast<double>(N);
}

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature (used for window Gaussian factors).
// ---------------------------------------------------------------------------
namespace detail {

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12) {
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// ---------------------------------------------------------------------------
// Compactly supported windows F with their Gaussian factors
// (1/sqrt(2 pi)) integral F(t) exp(-t^2/2) dt, quadrature target 1e-12.
// ---------------------------------------------------------------------------
class WindowFn {
public:
    enum class Kind { Hat, SmoothBump, ConstantOne };

    static WindowFn hat(double a, double b) {
        if (!(a < b)) throw Error("hat window needs a < b");
        return WindowFn(Kind::Hat, a, b, "hat:a=" + format_double(a) + ",b=" + format_double(b));
    }
    static WindowFn smooth_bump(double a, double b) {
        if (!(a < b)) throw Error("bump window needs a < b");
        return WindowFn(Kind::SmoothBump, a, b,
                        "bump:a=" + format_double(a) + ",b=" + format_double(b));
    }
    static WindowFn constant_one() { return WindowFn(Kind::ConstantOne, 0, 0, "constant_one"); }

    Kind kind() const { return kind_; }
    const std::string& description() const { return desc_; }

    double operator()(double t) const {
        switch (kind_) {
            case Kind::ConstantOne:
                return 1.0;
            case Kind::Hat: {
                if (t <= a_ || t >= b_) return 0.0;
                double mid = 0.5 * (a_ + b_), half = 0.5 * (b_ - a_);
                return 1.0 - std::fabs(t - mid) / half;
            }
            case Kind::SmoothBump: {
                if (t <= a_ || t >= b_) return 0.0;
                double s = (2.0 * t - a_ - b_) / (b_ - a_);  // in (-1, 1)
                return std::exp(1.0 - 1.0 / (1.0 - s * s));
            }
        }
        return 0.0;
    }

    double gaussian_integral() const {
        double lo = kind_ == Kind::ConstantOne ? -12.0 : a_;
        double hi = kind_ == Kind::ConstantOne ? 12.0 : b_;
        const WindowFn& self = *this;
        double integral = adaptive_simpson(
            [&self](double t) { return self(t) * std::exp(-0.5 * t * t); }, lo, hi, 1e-13);
        return integral / std::sqrt(2.0 * M_PI);
    }

private:
    Kind kind_;
    double a_, b_;
    std::string desc_;
    WindowFn(Kind k, double a, double b, std::string d)
        : kind_(k), a_(a), b_(b), desc_(std::move(d)) {}
};

}  // namespace semergo
