#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tfr {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using IntVector = std::vector<std::int64_t>;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::int64_t to_int64(const Integer& z) {
  if (z > std::numeric_limits<std::int64_t>::max() ||
      z < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("integer does not fit in 64 bits: " + z.str());
  return z.convert_to<std::int64_t>();
}

inline Integer gcd(Integer a, Integer b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Integer r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

inline Integer lcm(const Integer& a, const Integer& b) {
  if (a == 0 || b == 0) return 0;
  Integer g = gcd(a, b);
  Integer l = (a / g) * b;
  return l < 0 ? Integer(-l) : l;
}

/// Parses "p", "p/q" or a finite decimal such as "-0.125" into an exact
/// rational. Decimals are read digit by digit, so "0.1" is exactly 1/10.
inline Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) throw std::invalid_argument("empty rational literal");

  auto parse_integer = [](std::string_view s) {
    std::string_view digits = s;
    if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) digits.remove_prefix(1);
    if (digits.empty()) throw std::invalid_argument("malformed integer literal '" + std::string(s) + "'");
    for (char ch : digits)
      if (!std::isdigit(static_cast<unsigned char>(ch)))
        throw std::invalid_argument("malformed integer literal '" + std::string(s) + "'");
    // cpp_int reads a leading 0 as an octal prefix.
    std::size_t first = digits.find_first_not_of('0');
    std::string canonical = first == std::string_view::npos ? "0" : std::string(digits.substr(first));
    return s.front() == '-' ? Integer(-Integer(canonical)) : Integer(canonical);
  };

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(trim(text.substr(0, slash)));
    Integer den = parse_integer(trim(text.substr(slash + 1)));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole.front() == '-';
    std::string digits(whole);
    if (digits.empty() || digits == "-" || digits == "+") digits += "0";
    digits += frac;
    Integer scaled = parse_integer(digits);
    Integer den = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(frac.size()));
    Rational q(scaled, den);
    // "-0.5": the leading "-0" loses the sign once the digits are joined.
    if (negative && q > 0) q = -q;
    return q;
  }
  return Rational(parse_integer(text));
}

inline std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

}  // namespace tfr
