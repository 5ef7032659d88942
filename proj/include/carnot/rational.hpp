#pragma once

// Exact scalars: arbitrary-precision integers, rationals, and complex
// rationals. Rationals are kept canonical (positive denominator, reduced,
// zero is 0/1) by the backing library; the helpers below add sign-safe
// construction and the "p/q" string format used by all serializers.

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace carnot {

namespace mp = boost::multiprecision;

// et_off: plain value semantics, so numerator(a - b) and friends work on
// temporaries without expression-template surprises.
using Int = mp::number<mp::cpp_int_backend<>, mp::et_off>;
using Rat = mp::number<mp::rational_adaptor<mp::cpp_int_backend<>>, mp::et_off>;

inline Int rat_num(const Rat& r) { return numerator(r); }
inline Int rat_den(const Rat& r) { return denominator(r); }

// Accepts any nonzero denominator sign; the backing type rejects negative
// denominators at construction, so normalize first.
inline Rat make_rat(Int num, Int den) {
  if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Rat(num, den);
}

inline Rat make_rat(long long num, long long den = 1) {
  return make_rat(Int(num), Int(den));
}

namespace detail {

inline Int parse_int(const std::string& s) {
  std::size_t start = 0;
  if (start < s.size() && (s[start] == '+' || s[start] == '-')) ++start;
  if (start == s.size())
    throw std::invalid_argument("parse_rat: missing digits in '" + s + "'");
  for (std::size_t i = start; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9')
      throw std::invalid_argument("parse_rat: bad character in '" + s + "'");
  Int value(s.substr(start));
  return s[0] == '-' ? Int(-value) : value;
}

}  // namespace detail

// Parses "p" or "p/q"; q may carry a sign and is canonicalized, q = 0 is
// rejected. Throws std::invalid_argument on malformed input.
inline Rat parse_rat(const std::string& s) {
  std::size_t slash = s.find('/');
  if (slash == std::string::npos) return Rat(detail::parse_int(s));
  Int num = detail::parse_int(s.substr(0, slash));
  Int den = detail::parse_int(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("parse_rat: zero denominator in '" + s + "'");
  return make_rat(std::move(num), std::move(den));
}

// "p" when the denominator is 1, else "p/q" with q > 0.
inline std::string format_rat(const Rat& r) {
  Int den = rat_den(r);
  if (den == 1) return rat_num(r).str();
  return rat_num(r).str() + "/" + den.str();
}

inline double rat_to_double(const Rat& r) { return r.convert_to<double>(); }

inline Int factorial(int n) {
  Int f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Complex rationals. std::complex is only specified for floating-point
// types, so this is a small exact substitute with just the field operations
// the solvers need.
struct CRat {
  Rat re;
  Rat im;

  CRat() : re(0), im(0) {}
  CRat(int v) : re(v), im(0) {}  // NOLINT: implicit by design, mirrors Rat(int)
  CRat(Rat r) : re(std::move(r)), im(0) {}
  CRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return re == 0 && im == 0; }

  friend bool operator==(const CRat& a, const CRat& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const CRat& a, const CRat& b) { return !(a == b); }

  CRat operator-() const { return CRat(-re, -im); }

  friend CRat operator+(const CRat& a, const CRat& b) {
    return CRat(a.re + b.re, a.im + b.im);
  }
  friend CRat operator-(const CRat& a, const CRat& b) {
    return CRat(a.re - b.re, a.im - b.im);
  }
  friend CRat operator*(const CRat& a, const CRat& b) {
    return CRat(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
  }
  friend CRat operator/(const CRat& a, const CRat& b) {
    Rat n = b.re * b.re + b.im * b.im;
    if (n == 0) throw std::invalid_argument("CRat: division by zero");
    return CRat((a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n);
  }
  CRat& operator+=(const CRat& o) { return *this = *this + o; }
  CRat& operator-=(const CRat& o) { return *this = *this - o; }
  CRat& operator*=(const CRat& o) { return *this = *this * o; }
  CRat& operator/=(const CRat& o) { return *this = *this / o; }
};

inline CRat conj(const CRat& z) { return CRat(z.re, -z.im); }
inline Rat norm(const CRat& z) { return z.re * z.re + z.im * z.im; }

inline std::ostream& operator<<(std::ostream& os, const CRat& z) {
  os << format_rat(z.re);
  if (z.im != 0) os << (z.im > 0 ? "+" : "") << format_rat(z.im) << "i";
  return os;
}

}  // namespace carnot
