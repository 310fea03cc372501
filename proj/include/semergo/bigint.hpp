#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "semergo/util.hpp"

namespace semergo {

// Sign-magnitude arbitrary-precision integer on 64-bit limbs (little endian).
// Sized for this project's workloads (counts up to a few thousand bits);
// multiplication is schoolbook, division is shift-and-subtract with a fast
// path for word-sized divisors.
class BigInt {
public:
    BigInt() = default;
    BigInt(int v) : BigInt(static_cast<long long>(v)) {}
    BigInt(long v) : BigInt(static_cast<long long>(v)) {}
    BigInt(long long v) {
        if (v > 0) {
            sign_ = 1;
            mag_.push_back(static_cast<std::uint64_t>(v));
        } else if (v < 0) {
            sign_ = -1;
            // avoid overflow on LLONG_MIN
            mag_.push_back(~static_cast<std::uint64_t>(v) + 1u);
        }
    }
    BigInt(unsigned v) : BigInt(static_cast<unsigned long long>(v)) {}
    BigInt(unsigned long v) : BigInt(static_cast<unsigned long long>(v)) {}
    BigInt(unsigned long long v) {
        if (v) {
            sign_ = 1;
            mag_.push_back(v);
        }
    }

    static BigInt from_decimal(std::string_view s) {
        int sign = 1;
        std::size_t i = 0;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            if (s[i] == '-') sign = -1;
            ++i;
        }
        if (i == s.size()) throw ParseError("empty integer literal");
        BigInt out;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9')
                throw ParseError("bad digit in integer literal");
            out.mul_small_inplace(10);
            out.add_small_inplace(static_cast<std::uint64_t>(s[i] - '0'));
        }
        if (!out.is_zero()) out.sign_ = sign;
        return out;
    }

    bool is_zero() const { return sign_ == 0; }
    int sign() const { return sign_; }

    bool fits_u64() const { return mag_.size() <= 1 && sign_ >= 0; }
    std::uint64_t to_u64() const {
        if (sign_ < 0 || mag_.size() > 1) throw Error("BigInt does not fit u64");
        return mag_.empty() ? 0 : mag_[0];
    }
    bool fits_i64() const {
        if (mag_.empty()) return true;
        if (mag_.size() > 1) return false;
        return sign_ > 0 ? mag_[0] <= 0x7fffffffffffffffull
                         : mag_[0] <= 0x8000000000000000ull;
    }
    long long to_i64() const {
        if (!fits_i64()) throw Error("BigInt does not fit i64");
        if (mag_.empty()) return 0;
        return sign_ > 0 ? static_cast<long long>(mag_[0])
                         : -static_cast<long long>(mag_[0] - 1) - 1;
    }

    std::size_t bit_length() const {
        if (mag_.empty()) return 0;
        return 64 * (mag_.size() - 1) +
               (64 - static_cast<std::size_t>(std::countl_zero(mag_.back())));
    }
    bool bit(std::size_t i) const {
        std::size_t w = i / 64;
        if (w >= mag_.size()) return false;
        return (mag_[w] >> (i % 64)) & 1u;
    }

    friend bool operator==(const BigInt& a, const BigInt& b) {
        return a.sign_ == b.sign_ && a.mag_ == b.mag_;
    }
    friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }
    friend bool operator<(const BigInt& a, const BigInt& b) {
        if (a.sign_ != b.sign_) return a.sign_ < b.sign_;
        int c = ucmp(a.mag_, b.mag_);
        return a.sign_ >= 0 ? c < 0 : c > 0;
    }
    friend bool operator>(const BigInt& a, const BigInt& b) { return b < a; }
    friend bool operator<=(const BigInt& a, const BigInt& b) { return !(b < a); }
    friend bool operator>=(const BigInt& a, const BigInt& b) { return !(a < b); }

    BigInt operator-() const {
        BigInt r = *this;
        r.sign_ = -r.sign_;
        return r;
    }

    BigInt& operator+=(const BigInt& o) {
        if (o.is_zero()) return *this;
        if (is_zero()) return *this = o;
        if (sign_ == o.sign_) {
            uadd(mag_, o.mag_);
        } else {
            int c = ucmp(mag_, o.mag_);
            if (c == 0) {
                sign_ = 0;
                mag_.clear();
            } else if (c > 0) {
                usub(mag_, o.mag_);
            } else {
                std::vector<std::uint64_t> tmp = o.mag_;
                usub(tmp, mag_);
                mag_ = std::move(tmp);
                sign_ = o.sign_;
            }
        }
        return *this;
    }
    BigInt& operator-=(const BigInt& o) {
        BigInt t = o;
        t.sign_ = -t.sign_;
        return *this += t;
    }
    friend BigInt operator+(BigInt a, const BigInt& b) { return a += b; }
    friend BigInt operator-(BigInt a, const BigInt& b) { return a -= b; }

    friend BigInt operator*(const BigInt& a, const BigInt& b) {
        BigInt r;
        if (a.is_zero() || b.is_zero()) return r;
        r.mag_ = umul(a.mag_, b.mag_);
        r.sign_ = a.sign_ * b.sign_;
        return r;
    }
    BigInt& operator*=(const BigInt& o) { return *this = *this * o; }

    // *this += a*b without materializing the product as a separate BigInt.
    // Requires all three values >= 0 (the DP hot path); falls back otherwise.
    void add_product(const BigInt& a, const BigInt& b) {
        if (a.is_zero() || b.is_zero()) return;
        if (sign_ < 0 || a.sign_ < 0 || b.sign_ < 0) {
            *this += a * b;
            return;
        }
        std::size_t need = a.mag_.size() + b.mag_.size() + 1;
        if (mag_.size() < need) mag_.resize(need, 0);
        for (std::size_t i = 0; i < a.mag_.size(); ++i) {
            std::uint64_t ai = a.mag_[i];
            if (!ai) continue;
            unsigned __int128 carry = 0;
            std::size_t j = 0;
            for (; j < b.mag_.size(); ++j) {
                unsigned __int128 cur = static_cast<unsigned __int128>(ai) * b.mag_[j] +
                                        mag_[i + j] + carry;
                mag_[i + j] = static_cast<std::uint64_t>(cur);
                carry = cur >> 64;
            }
            for (std::size_t k = i + j; carry; ++k) {
                unsigned __int128 cur = static_cast<unsigned __int128>(mag_[k]) + carry;
                mag_[k] = static_cast<std::uint64_t>(cur);
                carry = cur >> 64;
            }
        }
        trim();
        sign_ = mag_.empty() ? 0 : 1;
    }

    // Truncated division (C semantics: remainder carries the dividend's sign).
    static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
        if (b.is_zero()) throw Error("BigInt division by zero");
        int c = ucmp(a.mag_, b.mag_);
        if (c < 0) {
            q = BigInt();
            r = a;
            return;
        }
        if (b.mag_.size() == 1) {
            BigInt qq = a;
            qq.sign_ = 1;
            std::uint64_t rem = qq.divmod_small_inplace(b.mag_[0]);
            q = std::move(qq);
            r = BigInt(rem);
        } else {
            BigInt qq, rr;
            qq.mag_.assign(a.mag_.size(), 0);
            for (std::size_t i = a.bit_length(); i-- > 0;) {
                rr.shl1();
                if (a.bit(i)) rr.mag_.empty() ? rr.mag_.push_back(1) : void(rr.mag_[0] |= 1);
                if (ucmp(rr.mag_, b.mag_) >= 0) {
                    usub(rr.mag_, b.mag_);
                    qq.mag_[i / 64] |= (1ull << (i % 64));
                }
            }
            qq.trim();
            rr.trim();
            qq.sign_ = qq.mag_.empty() ? 0 : 1;
            rr.sign_ = rr.mag_.empty() ? 0 : 1;
            q = std::move(qq);
            r = std::move(rr);
        }
        int qs = a.sign_ * b.sign_;
        if (!q.is_zero()) q.sign_ = qs;
        if (!r.is_zero()) r.sign_ = a.sign_;
    }
    friend BigInt operator/(const BigInt& a, const BigInt& b) {
        BigInt q, r;
        divmod(a, b, q, r);
        return q;
    }
    friend BigInt operator%(const BigInt& a, const BigInt& b) {
        BigInt q, r;
        divmod(a, b, q, r);
        return r;
    }

    static BigInt power(BigInt base, std::uint64_t exp) {
        BigInt r(1);
        while (exp) {
            if (exp & 1) r *= base;
            exp >>= 1;
            if (exp) base *= base;
        }
        return r;
    }

    static BigInt gcd(BigInt a, BigInt b) {
        a.sign_ = a.mag_.empty() ? 0 : 1;
        b.sign_ = b.mag_.empty() ? 0 : 1;
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        std::size_t az = a.trailing_zero_bits();
        std::size_t bz = b.trailing_zero_bits();
        std::size_t shift = std::min(az, bz);
        a.shr(az);
        b.shr(bz);
        while (true) {
            int c = ucmp(a.mag_, b.mag_);
            if (c == 0) break;
            if (c > 0) std::swap(a, b);
            usub(b.mag_, a.mag_);
            b.trim();
            b.shr(b.trailing_zero_bits());
        }
        a.shl(shift);
        return a;
    }

    static BigInt isqrt(const BigInt& a) {
        if (a.sign_ < 0) throw Error("isqrt of negative");
        if (a.is_zero()) return BigInt();
        // initial guess: 2^ceil(bits/2), always >= sqrt(a)
        BigInt x(1);
        x.shl((a.bit_length() + 1) / 2);
        while (true) {
            BigInt y = (x + a / x);
            y.shr(1);
            if (!(y < x)) break;
            x = std::move(y);
        }
        return x;
    }

    BigInt& operator<<=(std::size_t bits) {
        shl(bits);
        return *this;
    }
    BigInt& operator>>=(std::size_t bits) {
        shr(bits);
        if (mag_.empty()) sign_ = 0;
        return *this;
    }
    friend BigInt operator<<(BigInt a, std::size_t bits) { return a <<= bits; }
    friend BigInt operator>>(BigInt a, std::size_t bits) { return a >>= bits; }

    double to_double() const {
        long e = 0;
        double m = to_double_scaled(e);
        return std::ldexp(m, e);
    }
    // Returns mantissa in [0.5, 1) with *this == mantissa * 2^exp2 (sign kept).
    double to_double_scaled(long& exp2) const {
        if (is_zero()) {
            exp2 = 0;
            return 0.0;
        }
        std::size_t bl = bit_length();
        // take the top (up to) 64 bits
        double m = 0.0;
        std::size_t top = bl;
        for (int taken = 0; taken < 64 && top > 0; ++taken) {
            --top;
            m = m * 2.0 + (bit(top) ? 1.0 : 0.0);
        }
        std::size_t used = bl - top;
        m = std::ldexp(m, -static_cast<long>(used));  // in [0.5, 1)
        exp2 = static_cast<long>(bl);
        return sign_ < 0 ? -m : m;
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        BigInt t = *this;
        t.sign_ = 1;
        std::string out;
        while (!t.is_zero()) {
            std::uint64_t rem = t.divmod_small_inplace(10000000000000000000ull);
            bool last = t.is_zero();
            for (int i = 0; i < 19 && (!last || rem); ++i) {
                out.push_back(static_cast<char>('0' + rem % 10));
                rem /= 10;
            }
        }
        if (out.empty()) out.push_back('0');
        if (sign_ < 0) out.push_back('-');
        std::reverse(out.begin(), out.end());
        return out;
    }

private:
    int sign_ = 0;
    std::vector<std::uint64_t> mag_;

    void trim() {
        while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
        if (mag_.empty()) sign_ = 0;
    }

    static int ucmp(const std::vector<std::uint64_t>& a,
                    const std::vector<std::uint64_t>& b) {
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        for (std::size_t i = a.size(); i-- > 0;) {
            if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
        }
        return 0;
    }

    static void uadd(std::vector<std::uint64_t>& a,
                     const std::vector<std::uint64_t>& b) {
        if (a.size() < b.size()) a.resize(b.size(), 0);
        unsigned __int128 carry = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            unsigned __int128 cur = carry + a[i];
            if (i < b.size()) cur += b[i];
            a[i] = static_cast<std::uint64_t>(cur);
            carry = cur >> 64;
            if (!carry && i >= b.size()) break;
        }
        if (carry) a.push_back(static_cast<std::uint64_t>(carry));
    }

    // requires a >= b
    static void usub(std::vector<std::uint64_t>& a,
                     const std::vector<std::uint64_t>& b) {
        std::int64_t borrow = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            unsigned __int128 sub = borrow;
            if (i < b.size()) sub += b[i];
            if (static_cast<unsigned __int128>(a[i]) >= sub) {
                a[i] -= static_cast<std::uint64_t>(sub);
                borrow = 0;
            } else {
                a[i] = static_cast<std::uint64_t>(
                    (static_cast<unsigned __int128>(1) << 64) + a[i] - sub);
                borrow = 1;
            }
            if (!borrow && i >= b.size()) break;
        }
        while (!a.empty() && a.back() == 0) a.pop_back();
    }

    static std::vector<std::uint64_t> umul(const std::vector<std::uint64_t>& a,
                                           const std::vector<std::uint64_t>& b) {
        std::vector<std::uint64_t> out(a.size() + b.size(), 0);
        for (std::size_t i = 0; i < a.size(); ++i) {
            std::uint64_t ai = a[i];
            if (!ai) continue;
            unsigned __int128 carry = 0;
            for (std::size_t j = 0; j < b.size(); ++j) {
                unsigned __int128 cur =
                    static_cast<unsigned __int128>(ai) * b[j] + out[i + j] + carry;
                out[i + j] = static_cast<std::uint64_t>(cur);
                carry = cur >> 64;
            }
            out[i + b.size()] = static_cast<std::uint64_t>(carry);
        }
        while (!out.empty() && out.back() == 0) out.pop_back();
        return out;
    }

    void mul_small_inplace(std::uint64_t m) {
        if (m == 0 || mag_.empty()) {
            mag_.clear();
            sign_ = 0;
            return;
        }
        unsigned __int128 carry = 0;
        for (auto& limb : mag_) {
            unsigned __int128 cur = static_cast<unsigned __int128>(limb) * m + carry;
            limb = static_cast<std::uint64_t>(cur);
            carry = cur >> 64;
        }
        if (carry) mag_.push_back(static_cast<std::uint64_t>(carry));
    }
    void add_small_inplace(std::uint64_t v) {
        if (!v) return;
        if (mag_.empty()) {
            mag_.push_back(v);
            sign_ = 1;
            return;
        }
        unsigned __int128 cur = static_cast<unsigned __int128>(mag_[0]) + v;
        mag_[0] = static_cast<std::uint64_t>(cur);
        std::uint64_t carry = static_cast<std::uint64_t>(cur >> 64);
        for (std::size_t i = 1; carry && i < mag_.size(); ++i) {
            cur = static_cast<unsigned __int128>(mag_[i]) + carry;
            mag_[i] = static_cast<std::uint64_t>(cur);
            carry = static_cast<std::uint64_t>(cur >> 64);
        }
        if (carry) mag_.push_back(carry);
    }

    // magnitude /= d, returns magnitude remainder; ignores sign
    std::uint64_t divmod_small_inplace(std::uint64_t d) {
        unsigned __int128 rem = 0;
        for (std::size_t i = mag_.size(); i-- > 0;) {
            unsigned __int128 cur = (rem << 64) | mag_[i];
            mag_[i] = static_cast<std::uint64_t>(cur / d);
            rem = cur % d;
        }
        trim();
        return static_cast<std::uint64_t>(rem);
    }

    std::size_t trailing_zero_bits() const {
        for (std::size_t i = 0; i < mag_.size(); ++i) {
            if (mag_[i])
                return 64 * i + static_cast<std::size_t>(std::countr_zero(mag_[i]));
        }
        return 0;
    }

    void shl1() {
        std::uint64_t carry = 0;
        for (auto& limb : mag_) {
            std::uint64_t next = limb >> 63;
            limb = (limb << 1) | carry;
            carry = next;
        }
        if (carry) mag_.push_back(carry);
        if (!mag_.empty() && sign_ == 0) sign_ = 1;
    }
    void shl(std::size_t bits) {
        if (is_zero() || bits == 0) return;
        std::size_t words = bits / 64, rem = bits % 64;
        if (rem) {
            std::uint64_t carry = 0;
            for (auto& limb : mag_) {
                std::uint64_t next = limb >> (64 - rem);
                limb = (limb << rem) | carry;
                carry = next;
            }
            if (carry) mag_.push_back(carry);
        }
        mag_.insert(mag_.begin(), words, 0);
    }
    void shr(std::size_t bits) {
        if (mag_.empty() || bits == 0) return;
        std::size_t words = bits / 64, rem = bits % 64;
        if (words >= mag_.size()) {
            mag_.clear();
            sign_ = 0;
            return;
        }
        mag_.erase(mag_.begin(), mag_.begin() + static_cast<std::ptrdiff_t>(words));
        if (rem) {
            for (std::size_t i = 0; i + 1 < mag_.size(); ++i)
                mag_[i] = (mag_[i] >> rem) | (mag_[i + 1] << (64 - rem));
            mag_.back() >>= rem;
        }
        trim();
    }
};

// a/b as a double, immune to overflow of either operand alone.
inline double big_ratio(const BigInt& a, const BigInt& b) {
    if (b.is_zero()) throw Error("big_ratio division by zero");
    if (a.is_zero()) return 0.0;
    long ea = 0, eb = 0;
    double ma = a.to_double_scaled(ea);
    double mb = b.to_double_scaled(eb);
    return std::ldexp(ma / mb, ea - eb);
}

}  // namespace semergo
