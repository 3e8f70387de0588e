#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace randlab {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

// Accepts "p/q", "p" and optional leading '-'. Throws ParseError otherwise.
Rational parse_rational(std::string_view text);

// Always "p/q" with q >= 1, e.g. "1/1", "0/1", "-3/4".
std::string to_string(const Rational& r);

// Human rendering with `digits` fractional digits (round half away from zero).
std::string to_decimal(const Rational& r, int digits);

BigInt numerator_of(const Rational& r);
BigInt denominator_of(const Rational& r);

// Least common multiple of all denominators.
BigInt common_denominator(const std::vector<Rational>& values);

Rational sum(const std::vector<Rational>& values);

}  // namespace randlab
