#include "randlab/rational.hpp"

#include <cctype>

#include "randlab/error.hpp"

namespace randlab {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && s.front() == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  auto slash = s.find('/');
  std::string_view num = s.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : s.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den))
    throw ParseError("malformed rational '" + std::string(text) + "'", 0);
  BigInt d{std::string(den)};
  if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'", 0);
  Rational r{BigInt{std::string(num)}, d};
  return negative ? Rational(-r) : r;
}

BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }

BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

std::string to_string(const Rational& r) {
  return numerator_of(r).str() + "/" + denominator_of(r).str();
}

std::string to_decimal(const Rational& r, int digits) {
  BigInt scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  BigInt num = numerator_of(r) * scale;
  BigInt den = denominator_of(r);
  bool negative = num < 0;
  if (negative) num = -num;
  BigInt q = (2 * num + den) / (2 * den);
  std::string body = q.str();
  if (digits > 0) {
    if (static_cast<int>(body.size()) <= digits)
      body.insert(0, static_cast<std::size_t>(digits + 1 - static_cast<int>(body.size())), '0');
    body.insert(body.size() - static_cast<std::size_t>(digits), ".");
  }
  return (negative && q != 0 ? "-" : "") + body;
}

BigInt common_denominator(const std::vector<Rational>& values) {
  BigInt l = 1;
  for (const auto& v : values) l = boost::multiprecision::lcm(l, denominator_of(v));
  return l;
}

Rational sum(const std::vector<Rational>& values) {
  Rational s = 0;
  for (const auto& v : values) s += v;
  return s;
}

}  // namespace randlab
