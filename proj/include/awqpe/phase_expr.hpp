#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "awqpe/binary_math.hpp"

namespace awqpe {

namespace detail {

// 640-bit working precision for the built-in irrational constants; enough to
// round them correctly to any supported fixed-point width.
using BigFloat = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<
    640, boost::multiprecision::digit_base_2>>;

inline constexpr int kMaxExprBits = 512;

inline PhaseValue round_to_phase(const BigFloat& x, int bits) {
    if (bits > kMaxExprBits)
        throw std::invalid_argument("phase expression: requested precision exceeds 512 bits");
    BigFloat scaled = x * pow(BigFloat(2), bits) + BigFloat(0.5);
    BigInt num = floor(scaled).convert_to<BigInt>();
    return PhaseValue(num % pow2(bits), bits);
}

} // namespace detail

/// Parses a phase given as a decimal in [0,1) ("0.8203125"), a binary
/// fraction ("0b11010010" meaning 0.11010010), or one of the built-in
/// constants "pi/6", "1/sqrt2", "sin(pi/12)". The result carries `bits`
/// fixed-point digits.
inline PhaseValue parse_phase(std::string_view s, int bits = PhaseValue::kDefaultBits) {
    if (s.empty()) throw std::invalid_argument("parse_phase: empty input");
    if (s.rfind("0b", 0) == 0) {
        BitString b = BitString::parse(s.substr(2));
        return PhaseValue::from_dyadic(DyadicFraction::from_bits(b)).widened(bits);
    }
    using detail::BigFloat;
    if (s == "pi/6")
        return detail::round_to_phase(boost::math::constants::pi<BigFloat>() / 6, bits);
    if (s == "1/sqrt2" || s == "1/sqrt(2)")
        return detail::round_to_phase(1 / sqrt(BigFloat(2)), bits);
    if (s == "sin(pi/12)")
        return detail::round_to_phase(sin(boost::math::constants::pi<BigFloat>() / 12), bits);
    return PhaseValue::parse_decimal(s, bits);
}

} // namespace awqpe
