#pragma once

#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace semergo {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Precondition / argument failures named after the condition they report.
struct NonPrimeP : Error { using Error::Error; };
struct FieldMismatch : Error { using Error::Error; };
struct DivisionByZeroPoly : Error { using Error::Error; };
struct ZeroPolynomial : Error { using Error::Error; };
struct InstanceMismatch : Error { using Error::Error; };
struct CountOnly : Error { using Error::Error; };
struct Disconnected : Error { using Error::Error; };
struct DegenerateSequence : Error { using Error::Error; };
struct EmptySet : Error { using Error::Error; };
struct NonClassicalInstance : Error { using Error::Error; };
struct InfeasibleScale : Error { using Error::Error; };
struct InsufficientPrimes : Error { using Error::Error; };
struct DegreeMismatchSets : Error { using Error::Error; };
struct DomainMismatch : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

using Complex = std::complex<double>;

// Compensated (Kahan) accumulator; complex accumulations in the statistics
// layer must not depend on summation order beyond the fixed loop order.
class KahanSum {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class KahanComplex {
public:
    void add(Complex z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    Complex value() const { return {re_.value(), im_.value()}; }

private:
    KahanSum re_, im_;
};

// Runs fn(i) for i in [0, n). Tasks are split into contiguous chunks; each
// index is processed by exactly one worker, so any per-index output written
// to a preallocated slot is independent of the thread count.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    unsigned workers = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

// 15 significant digits, enough to reproduce a double on re-parse while
// keeping CSV output byte-stable.
inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", x);
    return buf;
}

inline std::string format_complex(Complex z) {
    return format_double(z.real()) + (z.imag() < 0 ? "-" : "+") +
           format_double(std::abs(z.imag())) + "i";
}

// FNV-1a over a canonicalized byte string; used for config hashes.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace semergo
