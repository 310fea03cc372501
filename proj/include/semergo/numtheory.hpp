#pragma once

#include <cstdint>
#include <vector>

#include "semergo/bigint.hpp"

namespace semergo {

// Mobius function mu(1..n) by linear sieve.
inline std::vector<int> mobius_sieve(int n) {
    std::vector<int> mu(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> primes;
    std::vector<bool> comp(static_cast<std::size_t>(n) + 1, false);
    if (n >= 1) mu[1] = 1;
    for (int i = 2; i <= n; ++i) {
        if (!comp[i]) {
            primes.push_back(i);
            mu[i] = -1;
        }
        for (int p : primes) {
            long long ip = 1LL * i * p;
            if (ip > n) break;
            comp[ip] = true;
            if (i % p == 0) {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    return mu;
}

inline std::vector<int> divisors_of(int n) {
    std::vector<int> out;
    for (int d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            if (d != n / d) out.push_back(n / d);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<int> prime_factors_distinct(std::uint64_t n) {
    std::vector<int> out;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(static_cast<int>(p));
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(static_cast<int>(n));
    return out;
}

namespace detail {
inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(a) * b % m);
}
inline std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}
}  // namespace detail

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull,
                            19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull,
                            19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = detail::powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int r = 1; r < s; ++r) {
            x = detail::mulmod_u64(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

// C(n + j - 1, j): number of size-j multisets from n options, exact.
inline BigInt multiset_coefficient(const BigInt& n, std::uint64_t j) {
    BigInt c(1);
    for (std::uint64_t i = 1; i <= j; ++i) {
        c *= n + BigInt(i) - BigInt(1);
        c = c / BigInt(i);  // exact at every step
    }
    return c;
}

// C(n, j) for BigInt n >= 0, small j.
inline BigInt binomial(const BigInt& n, std::uint64_t j) {
    if (BigInt(static_cast<unsigned long long>(j)) > n) return BigInt(0);
    BigInt c(1);
    for (std::uint64_t i = 1; i <= j; ++i) {
        c *= n - BigInt(i) + BigInt(1);
        c = c / BigInt(i);
    }
    return c;
}

}  // namespace semergo
