#include <cmath>
#include <random>

#include "doctest.h"
#include "semergo/dynamics.hpp"

using namespace semergo;

namespace {

// atan(1/x) * 2^F by the alternating series, truncated integer arithmetic.
BigInt atan_inv_fixed(std::uint64_t x, int F) {
    BigInt num = (BigInt(1) << static_cast<std::size_t>(F)) / BigInt(x);
    BigInt xsq = BigInt(x) * BigInt(x);
    BigInt acc(0);
    std::uint64_t k = 0;
    while (!num.is_zero()) {
        BigInt term = num / BigInt(2 * k + 1);
        if (k % 2 == 0)
            acc += term;
        else
            acc -= term;
        num = num / xsq;
        ++k;
    }
    return acc;
}

BigInt u128_to_big(unsigned __int128 v) {
    return (BigInt(static_cast<unsigned long long>(v >> 64)) << 64) +
           BigInt(static_cast<unsigned long long>(v));
}

}  // namespace

TEST_CASE("fixed-point closed forms match their defining equations") {
    CHECK(Fixed128::sqrt_of(2).to_double() == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));
    CHECK(Fixed128::golden().to_double() ==
          doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-15));
    CHECK(Fixed128::pi_frac().to_double() == doctest::Approx(M_PI - 3.0).epsilon(1e-15));
    CHECK(Fixed128::from_rational(1, 3).to_double() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(Fixed128::from_rational(-1, 3).to_double() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(Fixed128::from_double(0.25).to_double() == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("hardcoded pi fraction agrees with an independent Machin computation") {
    // pi = 16 atan(1/5) - 4 atan(1/239), computed at 140 fractional bits;
    // the extra 12 bits absorb series truncation before comparing 128 bits.
    const int F = 140;
    BigInt pi_fixed = BigInt(16) * atan_inv_fixed(5, F) - BigInt(4) * atan_inv_fixed(239, F);
    BigInt frac = pi_fixed - (BigInt(3) << static_cast<std::size_t>(F));
    BigInt frac128 = frac >> 12;
    CHECK(frac128 == u128_to_big(Fixed128::pi_frac().raw()));
}

TEST_CASE("k * alpha mod 1 is exact in fixed point") {
    Fixed128 a = Fixed128::sqrt_of(2);
    long double al = std::sqrt(2.0L) - 1.0L;
    for (std::uint64_t k : {1ull, 7ull, 100ull, 999ull, 12345ull}) {
        long double expect = std::fmod(static_cast<long double>(k) * al, 1.0L);
        CHECK(a.times(k).to_double() ==
              doctest::Approx(static_cast<double>(expect)).epsilon(1e-12));
    }
    // additivity of the fixed-point orbit
    CHECK(a.times(12).plus(a.times(30)) == a.times(42));
}

TEST_CASE("rational proximity heuristic") {
    CHECK(rational_proximity(Fixed128::from_rational(1, 3)).has_value());
    auto hit = rational_proximity(Fixed128::from_rational(355, 1000));
    REQUIRE(hit.has_value());
    CHECK(hit->first * 1000 == hit->second * 355);
    CHECK_FALSE(rational_proximity(Fixed128::sqrt_of(2)).has_value());
    // the golden ratio is approximated to 6.5e-13 by 514229/832040, inside
    // the declared q < 1e6 / 1e-12 thresholds, so it does warn
    CHECK(rational_proximity(Fixed128::golden()).has_value());
}

TEST_CASE("orbit values on the finite rotation") {
    DynSystem sys = DynSystem::finite(2);
    Observable f = Observable::indicator(2, 0);
    Point x0 = Point::finite_at(0);
    CHECK(orbit_value(sys, x0, 3, f).real() == 0.0);  // parity
    CHECK(orbit_value(sys, x0, 4, f).real() == 1.0);
    CHECK(orbit_value(sys, x0, 0, f) == f.eval(sys, x0));

    DynSystem s3 = DynSystem::finite(3);
    Observable f1 = Observable::indicator(3, 1);
    CHECK(f1.exact_integral_rational(s3) == Rational(BigInt(1), BigInt(3)));
    CHECK_THROWS_AS(orbit_value(DynSystem::torus({AlphaSpec::sqrt2()}),
                                Point::finite_at(0), 1, f),
                    DomainMismatch);
}

TEST_CASE("orbit values on the torus") {
    DynSystem sys = DynSystem::torus({AlphaSpec::sqrt2()});
    Observable ch = Observable::character(1);
    Point x0 = Point::origin(sys);
    double alpha = std::sqrt(2.0) - 1.0;
    for (std::uint64_t k : {0ull, 1ull, 5ull, 42ull}) {
        Complex expect = std::polar(1.0, 2.0 * M_PI * std::fmod(k * alpha, 1.0));
        CHECK(std::abs(orbit_value(sys, x0, k, ch) - expect) < 1e-12);
    }
    CHECK(std::abs(ch.exact_integral(sys)) == 0.0);  // mean-zero character

    Observable c5 = Observable::constant(Complex(5.0, 0.0));
    CHECK(orbit_value(sys, x0, 17, c5).real() == doctest::Approx(5.0));
    CHECK(c5.exact_integral(sys).real() == doctest::Approx(5.0));

    // conjugate character via negative frequency
    Observable chm = Observable::character(-1);
    CHECK(std::abs(orbit_value(sys, x0, 7, chm) - std::conj(orbit_value(sys, x0, 7, ch))) <
          1e-12);
}

TEST_CASE("orbit additivity: T^(j+k) x == T^k (T^j x)") {
    std::mt19937_64 rng(99);
    DynSystem torus = DynSystem::torus({AlphaSpec::sqrt2(), AlphaSpec::golden()});
    Observable f = Observable::trig_polynomial(
        {{{1, 0}, Complex(0.5, 0)}, {{0, 2}, Complex(0, 1.0)}, {{1, -1}, Complex(0.25, 0.25)}});
    Point x = Point::torus_at({Fixed128::from_rational(1, 7), Fixed128::from_rational(2, 11)});
    for (int i = 0; i < 50; ++i) {
        std::uint64_t j = rng() % 1000, k = rng() % 1000;
        Complex lhs = orbit_value(torus, x, j + k, f);
        Complex rhs = orbit_value(torus, iterate(torus, x, j), k, f);
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
    DynSystem fin = DynSystem::finite(7);
    Observable g = Observable::indicator(7, 3);
    Point y = Point::finite_at(2);
    for (int i = 0; i < 50; ++i) {
        std::uint64_t j = rng() % 1000, k = rng() % 1000;
        CHECK(orbit_value(fin, y, j + k, g) == orbit_value(fin, iterate(fin, y, j), k, g));
    }
}

TEST_CASE("birkhoff averages") {
    DynSystem m2 = DynSystem::finite(2);
    Observable f = Observable::indicator(2, 0);
    CHECK(birkhoff_average(m2, Point::finite_at(0), f, 10000).real() ==
          doctest::Approx(0.5).epsilon(1e-15));

    DynSystem torus = DynSystem::torus({AlphaSpec::sqrt2()});
    Observable c = Observable::constant(Complex(2.5, -1.0));
    for (std::uint64_t n : {10ull, 1000ull})
        CHECK(std::abs(birkhoff_average(torus, Point::origin(torus), c, n) -
                       Complex(2.5, -1.0)) < 1e-13);

    // geometric-sum bound for the character: |avg| <= 2/(N |1 - e^(2 pi i a)|)
    Observable ch = Observable::character(1);
    double alpha = std::sqrt(2.0) - 1.0;
    double gap = std::abs(1.0 - std::polar(1.0, 2.0 * M_PI * alpha));
    std::uint64_t N = 10000;
    Complex avg = birkhoff_average(torus, Point::origin(torus), ch, N);
    CHECK(std::abs(avg) <= 2.0 / (static_cast<double>(N) * gap) + 1e-15);

    // regression-style convergence: an order of magnitude more iterates
    // cannot be more than 10x worse
    Complex avg5 = birkhoff_average(torus, Point::origin(torus), ch, 100000);
    CHECK(std::abs(avg5) <= 10.0 * std::abs(avg));
}

TEST_CASE("window functions and Gaussian factors") {
    WindowFn hat = WindowFn::hat(-3, 3);
    CHECK(hat(0.0) == doctest::Approx(1.0));
    CHECK(hat(-3.0) == 0.0);
    CHECK(hat(3.0) == 0.0);
    CHECK(hat(1.5) == doctest::Approx(0.5));

    // closed form: 2 Phi(3) - 1 - (2/3) phi(0) (1 - e^(-9/2)) with the
    // standard normal cdf/pdf; independent of the quadrature route
    double phi3 = 0.5 * std::erfc(-3.0 / std::sqrt(2.0));
    double closed = (2.0 * phi3 - 1.0) -
                    (2.0 / 3.0) * (1.0 - std::exp(-4.5)) / std::sqrt(2.0 * M_PI);
    CHECK(hat.gaussian_integral() == doctest::Approx(closed).epsilon(1e-10));
    // frozen value cross-checked against an independent prototype
    CHECK(hat.gaussian_integral() == doctest::Approx(0.7342932492770831).epsilon(1e-9));

    CHECK(WindowFn::constant_one().gaussian_integral() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(WindowFn::constant_one()(123.0) == 1.0);

    // far-tail window is negligible (normal tail beyond 5 sigma)
    CHECK(WindowFn::hat(5, 6).gaussian_integral() < 3e-7);

    WindowFn bump = WindowFn::smooth_bump(-3, 3);
    CHECK(bump(0.0) == doctest::Approx(1.0));
    CHECK(bump(-3.0) == 0.0);
    CHECK(bump(2.999) < 1e-6);
    CHECK(bump.gaussian_integral() > 0.0);
    CHECK(bump.gaussian_integral() < 1.0);
}

TEST_CASE("tabulated observable: continuous, exact trapezoid integral") {
    DynSystem torus = DynSystem::torus({AlphaSpec::golden()});
    std::vector<double> samples{0.0, 1.0, 0.5, 2.0};
    Observable f = Observable::tabulated(samples);
    CHECK(f.exact_integral(torus).real() == doctest::Approx((0.5 + 0.75 + 1.25 + 1.0) / 4.0));
    // interpolation hits the samples at the knots
    Point x = Point::torus_at({Fixed128::from_rational(1, 4)});
    CHECK(f.eval(torus, x).real() == doctest::Approx(1.0));
    Point mid = Point::torus_at({Fixed128::from_rational(1, 8)});
    CHECK(f.eval(torus, mid).real() == doctest::Approx(0.5));
}
