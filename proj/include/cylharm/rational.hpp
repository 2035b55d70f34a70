#pragma once

// Exact rational scalars backed by GMP.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cylharm {

/// Arbitrary-precision rational, always canonical (lowest terms, den > 0).
using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p/q" or "p" (optional sign). Returns nullopt on malformed input or zero denominator.
inline std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  auto valid_int = [](std::string_view s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) ++i;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  const auto slash = text.find('/');
  std::string num(text.substr(0, slash));
  std::string den = slash == std::string_view::npos ? "1" : std::string(text.substr(slash + 1));
  if (!valid_int(num, true) || !valid_int(den, false)) return std::nullopt;
  if (num[0] == '+') num.erase(0, 1);
  Integer n(num, 10), d(den, 10);
  if (d == 0) return std::nullopt;
  Rational r(n, d);
  r.canonicalize();
  return r;
}

inline Rational rational_or_throw(std::string_view text) {
  auto r = parse_rational(text);
  if (!r) throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  return *r;
}

/// "p/q", or "p" when the denominator is 1.
inline std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

/// Natural log of |z| for huge or tiny integers without overflow. z must be nonzero.
inline double log_abs(const Integer& z) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

/// Natural log of |r|; r must be nonzero. Valid far outside the double range.
inline double log_abs(const Rational& r) {
  return log_abs(r.get_num()) - log_abs(r.get_den());
}

inline double to_double(const Rational& r) { return r.get_d(); }

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

/// Integer power of a rational.
inline Rational pow(const Rational& base, unsigned e) {
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), e);
  return Rational(num, den);
}

inline Integer factorial(unsigned m) {
  Integer out;
  mpz_fac_ui(out.get_mpz_t(), m);
  return out;
}

inline Integer binomial(unsigned n, unsigned k) {
  Integer out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

}  // namespace cylharm
