#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

#include "cachecast/error.hpp"

namespace cachecast {

using rational = boost::multiprecision::cpp_rational;
using big_int = boost::multiprecision::cpp_int;

inline double to_double(const rational& q) { return q.convert_to<double>(); }

// "p/q", "p" or an exact decimal such as "0.25".
inline rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  auto parse_int = [&](std::string_view s) -> big_int {
    s = trim(s);
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
      negative = s.front() == '-';
      s.remove_prefix(1);
    }
    if (s.empty()) throw error(errc::bad_config, "malformed fraction '" + std::string(text) + "'");
    big_int value = 0;
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw error(errc::bad_config, "malformed fraction '" + std::string(text) + "'");
      value = value * 10 + (c - '0');
    }
    return negative ? big_int(-value) : value;
  };

  std::string_view s = trim(text);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    big_int num = parse_int(s.substr(0, slash));
    big_int den = parse_int(s.substr(slash + 1));
    if (den == 0) throw error(errc::bad_config, "zero denominator in '" + std::string(text) + "'");
    return rational(num, den);
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string digits(s.substr(0, dot));
    std::string_view frac = s.substr(dot + 1);
    digits += frac;
    if (digits.empty() || digits == "-" || digits == "+")
      throw error(errc::bad_config, "malformed decimal '" + std::string(text) + "'");
    big_int scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    return rational(parse_int(digits), scale);
  }
  return rational(parse_int(s));
}

inline std::string format_rational(const rational& q) {
  const big_int num = boost::multiprecision::numerator(q);
  const big_int den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline big_int floor_of(const rational& q) {
  big_int num = boost::multiprecision::numerator(q);
  big_int den = boost::multiprecision::denominator(q);
  big_int quotient = num / den;
  if (num < 0 && quotient * den != num) quotient -= 1;
  return quotient;
}

inline bool is_integer(const rational& q) { return boost::multiprecision::denominator(q) == 1; }

}  // namespace cachecast
