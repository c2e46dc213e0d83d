#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lcn {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Largest integer <= q.
inline BigInt rat_floor(const Rational& q) {
  BigInt num = boost::multiprecision::numerator(q);
  BigInt den = boost::multiprecision::denominator(q);
  BigInt d = num / den;
  if (num < 0 && d * den != num) --d;
  return d;
}

// Smallest integer >= q.
inline BigInt rat_ceil(const Rational& q) {
  BigInt num = boost::multiprecision::numerator(q);
  BigInt den = boost::multiprecision::denominator(q);
  BigInt d = num / den;
  if (num > 0 && d * den != num) ++d;
  return d;
}

inline bool is_integer(const Rational& q) {
  return boost::multiprecision::denominator(q) == 1;
}

// Renders as "p" for integers, "p/q" otherwise.
inline std::string rat_to_string(const Rational& q) {
  std::ostringstream oss;
  oss << boost::multiprecision::numerator(q);
  if (!is_integer(q)) oss << '/' << boost::multiprecision::denominator(q);
  return oss.str();
}

// Accepts "p" and "p/q" with optional leading '-'.
inline std::optional<Rational> rat_from_string(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(s));
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) return std::nullopt;
    return Rational(num, den);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace lcn
