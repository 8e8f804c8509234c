#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace awqpe {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt pow2(int n) { return BigInt(1) << n; }

/// Fixed-length binary string, most significant bit first.
class BitString {
public:
    BitString() : value_(0), length_(1) {}

    BitString(BigInt value, int length) : value_(std::move(value)), length_(length) {
        if (length_ < 1) throw std::invalid_argument("BitString: length must be >= 1");
        if (value_ < 0 || value_ >= pow2(length_))
            throw std::invalid_argument("BitString: value out of range for length");
    }

    static BitString parse(std::string_view s) {
        if (s.empty()) throw std::invalid_argument("BitString: empty string");
        BigInt v = 0;
        for (char c : s) {
            if (c != '0' && c != '1') throw std::invalid_argument("BitString: expected '0' or '1'");
            v = (v << 1) | (c == '1' ? 1 : 0);
        }
        return BitString(v, static_cast<int>(s.size()));
    }

    static BitString concat(std::span<const BitString> parts) {
        if (parts.empty()) throw std::invalid_argument("BitString: nothing to concatenate");
        BigInt v = 0;
        int len = 0;
        for (const auto& p : parts) {
            v = (v << p.length()) | p.value();
            len += p.length();
        }
        return BitString(v, len);
    }

    const BigInt& value() const { return value_; }
    int length() const { return length_; }

    // bit(0) is the most significant bit.
    bool bit(int i) const {
        if (i < 0 || i >= length_) throw std::out_of_range("BitString: bit index");
        return boost::multiprecision::bit_test(value_, static_cast<unsigned>(length_ - 1 - i));
    }

    bool msb() const { return bit(0); }

    // Substring of `len` bits starting at bit position `pos` (MSB-first).
    BitString slice(int pos, int len) const {
        if (pos < 0 || len < 1 || pos + len > length_)
            throw std::out_of_range("BitString: slice out of range");
        BigInt v = (value_ >> (length_ - pos - len)) & (pow2(len) - 1);
        return BitString(v, len);
    }

    std::string str() const {
        std::string out(static_cast<std::size_t>(length_), '0');
        for (int i = 0; i < length_; ++i)
            if (bit(i)) out[static_cast<std::size_t>(i)] = '1';
        return out;
    }

    friend bool operator==(const BitString& a, const BitString& b) {
        return a.length_ == b.length_ && a.value_ == b.value_;
    }

private:
    BigInt value_;
    int length_;
};

/// Exact binary fraction numerator / 2^bits in [0, 1).
struct DyadicFraction {
    BigInt numerator;
    int bits;

    DyadicFraction() : numerator(0), bits(1) {}

    DyadicFraction(BigInt num, int b) : numerator(std::move(num)), bits(b) {
        if (bits < 1) throw std::invalid_argument("DyadicFraction: bits must be >= 1");
        if (numerator < 0 || numerator >= pow2(bits))
            throw std::invalid_argument("DyadicFraction: numerator out of range");
    }

    static DyadicFraction from_bits(const BitString& s) {
        return DyadicFraction(s.value(), s.length());
    }

    BitString to_bits() const { return BitString(numerator, bits); }

    double to_double() const;

    // Exact decimal expansion (dyadic fractions terminate in base 10).
    std::string decimal() const;
};

namespace detail {

inline std::string dyadic_decimal(const BigInt& num, int bits) {
    if (num == 0) return "0.0";
    BigInt five = 1;
    for (int i = 0; i < bits; ++i) five *= 5;
    std::string digits = BigInt(num * five).str();
    if (static_cast<int>(digits.size()) < bits)
        digits.insert(digits.begin(), static_cast<std::size_t>(bits) - digits.size(), '0');
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
    return "0." + digits;
}

inline double fixed_point_to_double(const BigInt& num, int bits) {
    // Keep the top 53 bits (exact in a double) and round half up on the rest.
    if (num == 0) return 0.0;
    int msb = static_cast<int>(boost::multiprecision::msb(num));
    int drop = std::max(0, msb - 52);
    auto top = (num >> drop).convert_to<std::uint64_t>();
    if (drop > 0 && boost::multiprecision::bit_test(num, static_cast<unsigned>(drop - 1))) ++top;
    return std::ldexp(static_cast<double>(top), drop - bits);
}

} // namespace detail

inline double DyadicFraction::to_double() const {
    return detail::fixed_point_to_double(numerator, bits);
}

inline std::string DyadicFraction::decimal() const {
    return detail::dyadic_decimal(numerator, bits);
}

/// Phase in [0, 1) stored as an exact fixed-point value num / 2^bits.
///
/// Callers that shift by k and round to n bits are expected to hold at least
/// n + k + guard bits of precision; the estimator widens inputs to
/// n_total + 64 bits before use.
class PhaseValue {
public:
    PhaseValue() : num_(0), bits_(64) {}

    PhaseValue(BigInt num, int bits) : num_(std::move(num)), bits_(bits) {
        if (bits_ < 1) throw std::invalid_argument("PhaseValue: bits must be >= 1");
        if (num_ < 0 || num_ >= pow2(bits_))
            throw std::invalid_argument("PhaseValue: value out of [0,1)");
    }

    static PhaseValue from_dyadic(const DyadicFraction& d) { return PhaseValue(d.numerator, d.bits); }

    // Exact conversion; every finite double in [0,1) is dyadic.
    static PhaseValue from_double(double x, int min_bits = 64) {
        if (!(x >= 0.0 && x < 1.0)) throw std::invalid_argument("PhaseValue: double out of [0,1)");
        if (x == 0.0) return PhaseValue(0, min_bits);
        int e = 0;
        double f = std::frexp(x, &e); // x = f * 2^e, f in [0.5, 1)
        auto mant = static_cast<std::uint64_t>(std::ldexp(f, 53));
        int bits = 53 - e;
        PhaseValue v{BigInt(mant), bits};
        return v.widened(min_bits);
    }

    // Parses "0.8203125", ".5", "0"; rounds to nearest at `bits`, wrapping mod 1.
    static PhaseValue parse_decimal(std::string_view s, int bits = kDefaultBits) {
        std::string_view t = s;
        if (!t.empty() && t.front() == '0') t.remove_prefix(1);
        if (t.empty()) return PhaseValue(0, bits);
        if (t.front() != '.') throw std::invalid_argument("PhaseValue: expected value in [0,1)");
        t.remove_prefix(1);
        if (t.empty()) return PhaseValue(0, bits);
        BigInt digits = 0;
        BigInt den = 1;
        for (char c : t) {
            if (c < '0' || c > '9') throw std::invalid_argument("PhaseValue: bad decimal digit");
            digits = digits * 10 + (c - '0');
            den *= 10;
        }
        BigInt num = ((digits << bits) + den / 2) / den;
        return PhaseValue(num % pow2(bits), bits);
    }

    const BigInt& numerator() const { return num_; }
    int bits() const { return bits_; }
    bool is_zero() const { return num_ == 0; }

    // Exact left-shift of the representation; never narrows.
    PhaseValue widened(int bits) const {
        if (bits <= bits_) return *this;
        return PhaseValue(num_ << (bits - bits_), bits);
    }

    double to_double() const { return detail::fixed_point_to_double(num_, bits_); }

    std::string decimal() const { return detail::dyadic_decimal(num_, bits_); }

    PhaseValue add_mod1(const PhaseValue& o) const {
        int b = std::max(bits_, o.bits_);
        BigInt s = (num_ << (b - bits_)) + (o.num_ << (b - o.bits_));
        return PhaseValue(s % pow2(b), b);
    }

    PhaseValue sub_mod1(const PhaseValue& o) const {
        int b = std::max(bits_, o.bits_);
        BigInt s = (num_ << (b - bits_)) - (o.num_ << (b - o.bits_));
        BigInt m = pow2(b);
        s %= m;
        if (s < 0) s += m;
        return PhaseValue(s, b);
    }

    // Distance on the unit circle, in [0, 1/2].
    PhaseValue circle_distance(const PhaseValue& o) const {
        PhaseValue d = sub_mod1(o);
        BigInt half = pow2(d.bits_ - 1);
        if (d.num_ > half) return PhaseValue(pow2(d.bits_) - d.num_, d.bits_);
        return d;
    }

    friend std::strong_ordering operator<=>(const PhaseValue& a, const PhaseValue& b) {
        int s = std::max(a.bits_, b.bits_);
        BigInt x = a.num_ << (s - a.bits_);
        BigInt y = b.num_ << (s - b.bits_);
        return x < y ? std::strong_ordering::less
             : x > y ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }
    friend bool operator==(const PhaseValue& a, const PhaseValue& b) { return (a <=> b) == 0; }

    static constexpr int kDefaultBits = 192;

private:
    BigInt num_;
    int bits_;
};

/// Excluded case of the composition rule: the k-bit remainder rounds to
/// exactly one half, so the borrow direction is undecidable.
struct ambiguous_half_error : std::domain_error {
    ambiguous_half_error() : std::domain_error("combine_approx: remainder rounds to exactly 1/2") {}
};

/// Best n-bit approximation of y: floor(y * 2^n + 1/2) reduced mod 2^n, so a
/// phase just below 1 wraps to 0.
inline BigInt best_approx(const PhaseValue& y, int n) {
    if (n < 1) throw std::invalid_argument("best_approx: n must be >= 1");
    BigInt b = ((y.numerator() << n) + pow2(y.bits() - 1)) >> y.bits();
    return b % pow2(n);
}

/// Fractional part of 2^k * phi, computed exactly on the fixed-point
/// representation. Shifting out every represented digit (k >= bits) is a
/// precision-budget error.
inline PhaseValue window_fraction(const PhaseValue& phi, int k) {
    if (k < 0) throw std::invalid_argument("window_fraction: k must be >= 0");
    if (k >= phi.bits())
        throw std::domain_error("window_fraction: shift exceeds the precision budget of phi");
    if (k == 0) return phi;
    return PhaseValue((phi.numerator() << k) % pow2(phi.bits()), phi.bits());
}

/// Minimum of two distinct outcomes on the circle Z/nZ: the pair {0, n-1} is
/// adjacent across the wrap, so its minimum is n-1; every other pair orders
/// normally.
inline std::uint64_t cyclic_min(std::uint64_t a, std::uint64_t b, std::uint64_t n) {
    if (n < 2) throw std::invalid_argument("cyclic_min: n must be >= 2");
    if (a >= n || b >= n) throw std::invalid_argument("cyclic_min: argument out of range");
    if (a == b) throw std::invalid_argument("cyclic_min: arguments must be distinct");
    if ((a == 0 && b == n - 1) || (b == 0 && a == n - 1)) return n - 1;
    return std::min(a, b);
}

/// Composition rule for best approximations: given b_m = best m-bit
/// approximation of x and b_k = best k-bit approximation of frac(2^m x),
/// the best (m+k)-bit numerator is p * 2^k + b_k with p = b_m - 1 when the
/// remainder exceeds 1/2 and p = b_m otherwise. The remainder equal to 1/2
/// exactly is the excluded case.
inline BigInt combine_approx(const BigInt& b_m, int m, const BigInt& b_k, int k) {
    if (m < 1 || k < 1) throw std::invalid_argument("combine_approx: m, k must be >= 1");
    if (b_m < 0 || b_m >= pow2(m)) throw std::invalid_argument("combine_approx: b_m out of range");
    if (b_k < 0 || b_k >= pow2(k)) throw std::invalid_argument("combine_approx: b_k out of range");
    BigInt half = pow2(k - 1);
    if (b_k == half) throw ambiguous_half_error();
    BigInt p = b_k > half ? b_m - 1 : b_m;
    BigInt mod = pow2(m + k);
    BigInt out = ((p << k) + b_k) % mod;
    if (out < 0) out += mod;
    return out;
}

} // namespace awqpe
