#include <cmath>
#include <random>

#include "doctest.h"
#include "semergo/bigint.hpp"
#include "semergo/rational.hpp"

using semergo::BigInt;
using semergo::Rational;

TEST_CASE("bigint small arithmetic round trips through i64") {
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<long long> dist(-1'000'000'000LL, 1'000'000'000LL);
    for (int i = 0; i < 2000; ++i) {
        long long a = dist(rng), b = dist(rng);
        CHECK((BigInt(a) + BigInt(b)).to_i64() == a + b);
        CHECK((BigInt(a) - BigInt(b)).to_i64() == a - b);
        CHECK((BigInt(a) * BigInt(b)).to_i64() == a * b);
        if (b != 0) {
            CHECK((BigInt(a) / BigInt(b)).to_i64() == a / b);
            CHECK((BigInt(a) % BigInt(b)).to_i64() == a % b);
        }
    }
}

TEST_CASE("bigint decimal round trip and powers") {
    CHECK(BigInt::power(BigInt(2), 64).to_string() == "18446744073709551616");
    CHECK(BigInt::power(BigInt(10), 30).to_string() == "1000000000000000000000000000000");
    CHECK(BigInt::from_decimal("-123456789012345678901234567890").to_string() ==
          "-123456789012345678901234567890");
    CHECK(BigInt::from_decimal("0").is_zero());
    // 3^200, checked against an independently computed value
    BigInt p = BigInt::power(BigInt(3), 200);
    CHECK(BigInt::from_decimal(p.to_string()) == p);
    CHECK(p % BigInt::power(BigInt(3), 100) == BigInt(0));
}

TEST_CASE("bigint divmod against random reconstruction") {
    std::mt19937_64 rng(999);
    for (int i = 0; i < 400; ++i) {
        BigInt a = BigInt(rng()) * BigInt(rng()) * BigInt(rng()) + BigInt(rng());
        BigInt b = BigInt(rng()) * BigInt(rng() % 1000 + 1) + BigInt(1);
        if (i % 3 == 0) a = -a;
        if (i % 5 == 0) b = -b;
        BigInt q, r;
        BigInt::divmod(a, b, q, r);
        CHECK(q * b + r == a);
        BigInt rr = r;
        if (rr.sign() < 0) rr = -rr;
        BigInt bb = b;
        if (bb.sign() < 0) bb = -bb;
        CHECK(rr < bb);
    }
}

TEST_CASE("bigint gcd and isqrt") {
    BigInt a = BigInt::power(BigInt(2), 120) * BigInt(9);
    BigInt b = BigInt::power(BigInt(2), 100) * BigInt(15);
    CHECK(BigInt::gcd(a, b) == BigInt::power(BigInt(2), 100) * BigInt(3));
    CHECK(BigInt::gcd(BigInt(0), BigInt(-7)) == BigInt(7));

    for (std::uint64_t v : {0ull, 1ull, 2ull, 3ull, 4ull, 99ull, 100ull, 101ull}) {
        BigInt s = BigInt::isqrt(BigInt(v));
        CHECK(s * s <= BigInt(v));
        CHECK((s + BigInt(1)) * (s + BigInt(1)) > BigInt(v));
    }
    BigInt big = BigInt::power(BigInt(10), 60);
    CHECK(BigInt::isqrt(big) == BigInt::power(BigInt(10), 30));
}

TEST_CASE("bigint algebraic identities on large random values") {
    std::mt19937_64 rng(2718);
    auto random_big = [&](int limbs) {
        BigInt v(0);
        for (int i = 0; i < limbs; ++i) v = (v << 64) + BigInt(rng());
        return v;
    };
    for (int iter = 0; iter < 100; ++iter) {
        BigInt a = random_big(3), b = random_big(2) + BigInt(1), c = random_big(1) + BigInt(1);
        // gcd scales multiplicatively
        CHECK(BigInt::gcd(a * c, b * c) == c * BigInt::gcd(a, b));
        // gcd divides both arguments
        BigInt g = BigInt::gcd(a, b);
        CHECK(a % g == BigInt(0));
        CHECK(b % g == BigInt(0));
        // distributivity through divmod reconstruction at ~320 bits
        BigInt m = a * b + c;
        CHECK(m / b * b + m % b == m);
        // isqrt pinches squares exactly
        CHECK(BigInt::isqrt(a * a) == a);
        CHECK(BigInt::isqrt(a * a - BigInt(1)) == a - BigInt(1));
        CHECK(BigInt::isqrt(a * a + BigInt(1)) == a);
    }
}

TEST_CASE("bigint to_double and big_ratio handle large magnitudes") {
    BigInt a = BigInt::power(BigInt(2), 200);
    CHECK(a.to_double() == doctest::Approx(std::ldexp(1.0, 200)));
    CHECK(semergo::big_ratio(a + a, a) == doctest::Approx(2.0));
    BigInt b = BigInt::power(BigInt(3), 200);
    double r = semergo::big_ratio(a, b);
    CHECK(r == doctest::Approx(std::exp(200 * (std::log(2) - std::log(3)))).epsilon(1e-12));
    CHECK(semergo::big_ratio(-a, a) == doctest::Approx(-1.0));
}

TEST_CASE("bigint shifts and bits") {
    BigInt x(1);
    x <<= 130;
    CHECK(x.bit_length() == 131);
    CHECK(x.bit(130));
    CHECK_FALSE(x.bit(129));
    x >>= 130;
    CHECK(x == BigInt(1));
}

TEST_CASE("rational reduction and ordering") {
    Rational half(BigInt(2), BigInt(4));
    CHECK(half.num() == BigInt(1));
    CHECK(half.den() == BigInt(2));
    CHECK(half.to_string() == "1/2");
    CHECK(Rational(BigInt(-6), BigInt(-4)) == Rational(BigInt(3), BigInt(2)));
    CHECK(Rational(BigInt(1), BigInt(-2)).sign() == -1);

    Rational a{BigInt(1), BigInt(3)}, b{BigInt(1), BigInt(4)};
    CHECK(b < a);
    CHECK((a - b) == Rational(BigInt(1), BigInt(12)));
    CHECK((a * b) == Rational(BigInt(1), BigInt(12)));
    CHECK((a / b) == Rational(BigInt(4), BigInt(3)));
    CHECK((a + b + a + b - a - a) == Rational(BigInt(1), BigInt(2)));
    CHECK(Rational(BigInt(7)).to_string() == "7");
    CHECK(a.to_double() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("rational arithmetic matches double arithmetic on random fractions") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<long long> dist(-1000, 1000);
    for (int i = 0; i < 500; ++i) {
        long long p1 = dist(rng), p2 = dist(rng);
        long long q1 = dist(rng), q2 = dist(rng);
        if (q1 == 0 || q2 == 0) continue;
        Rational a{BigInt(p1), BigInt(q1)}, b{BigInt(p2), BigInt(q2)};
        double da = double(p1) / double(q1), db = double(p2) / double(q2);
        CHECK((a + b).to_double() == doctest::Approx(da + db).epsilon(1e-12));
        CHECK((a * b).to_double() == doctest::Approx(da * db).epsilon(1e-12));
    }
}
