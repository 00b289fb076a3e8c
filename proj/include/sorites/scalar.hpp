#pragma once

// Numeric currency of the library. Every model and check is a template over
// a scalar type: `Rational` for exact work, `double` for floating ingestion
// and the sin^2 curve. Equality in the checkers is always |a - b| <= tol,
// with tol = 0 in exact mode.

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdio>
#include <string>
#include <string_view>

#include "sorites/error.hpp"

namespace sorites {

using Rational = boost::multiprecision::cpp_rational;

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational default_tolerance() { return Rational(0); }
  static double to_double(const Rational& v) { return v.convert_to<double>(); }

  /// Always "num/den", also for integers ("1/1", "0/1").
  static std::string format(const Rational& v) {
    return boost::multiprecision::numerator(v).str() + "/" +
           boost::multiprecision::denominator(v).str();
  }

  /// Accepts "num/den" or a bare integer.
  static Rational parse(std::string_view text) {
    auto trim = [](std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
      return s;
    };
    auto is_integer = [](std::string_view s) {
      if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
      if (s.empty()) return false;
      for (char c : s)
        if (c < '0' || c > '9') return false;
      return true;
    };
    text = trim(text);
    const auto slash = text.find('/');
    const auto num = trim(text.substr(0, slash));
    const auto den = slash == std::string_view::npos ? std::string_view("1") : trim(text.substr(slash + 1));
    if (!is_integer(num) || !is_integer(den))
      throw Error(Errc::ParseError, "not a rational literal: '" + std::string(text) + "'");
    boost::multiprecision::cpp_int n(std::string(num.front() == '+' ? num.substr(1) : num));
    boost::multiprecision::cpp_int d(std::string(den.front() == '+' ? den.substr(1) : den));
    if (d == 0) throw Error(Errc::ParseError, "zero denominator in '" + std::string(text) + "'");
    return Rational(n, d);
  }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double default_tolerance() { return 1e-9; }
  static double to_double(double v) { return v; }

  /// Shortest round-trippable decimal.
  static std::string format(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  }

  static double parse(std::string_view text) {
    if (text.find('/') != std::string_view::npos) return ScalarTraits<Rational>::parse(text).convert_to<double>();
    std::string s(text);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
      throw Error(Errc::ParseError, "not a decimal literal: '" + s + "'");
    return v;
  }
};

template <class T>
concept Scalar = requires { ScalarTraits<T>::exact; };

/// True when a literal can only be read in floating mode.
inline bool is_decimal_literal(std::string_view text) {
  return text.find('/') == std::string_view::npos &&
         text.find_first_of(".eE") != std::string_view::npos;
}

template <Scalar T>
T abs_diff(const T& a, const T& b) {
  return a < b ? T(b - a) : T(a - b);
}

template <Scalar T>
bool approx_equal(const T& a, const T& b, const T& tol) {
  return abs_diff(a, b) <= tol;
}

template <Scalar T>
bool positive(const T& v, const T& tol) {
  return v > tol;
}

template <Scalar To, Scalar From>
To scalar_cast(const From& v) {
  if constexpr (std::same_as<To, From>)
    return v;
  else if constexpr (std::same_as<To, double>)
    return ScalarTraits<From>::to_double(v);
  else
    return To(v);
}

}  // namespace sorites
