#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "soskit/error.hpp"

namespace soskit {

using Integer = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

inline int sign(const Rational& r) { return sgn(r); }

/// Parses `p`, `-p`, `+p` or `p/q` with decimal digits; q must be positive.
inline std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::size_t pos = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  auto digits = [&](std::size_t from, std::size_t to) {
    if (from >= to) return false;
    for (std::size_t k = from; k < to; ++k)
      if (!std::isdigit(static_cast<unsigned char>(text[k]))) return false;
    return true;
  };
  const std::size_t slash = text.find('/', pos);
  const std::size_t num_end = slash == std::string_view::npos ? text.size() : slash;
  if (!digits(pos, num_end)) return std::nullopt;
  Integer num(std::string(text.substr(pos, num_end - pos)), 10);
  Integer den = 1;
  if (slash != std::string_view::npos) {
    if (!digits(slash + 1, text.size())) return std::nullopt;
    den = Integer(std::string(text.substr(slash + 1)), 10);
    if (den == 0) return std::nullopt;
  }
  Rational r(negative ? Integer(-num) : num, den);
  r.canonicalize();
  return r;
}

inline Rational parse_rational_or_throw(std::string_view text) {
  auto r = parse_rational(text);
  if (!r) throw Error(Errc::ParseError, "not a rational: '" + std::string(text) + "'");
  return *r;
}

inline Integer factorial(unsigned long n) {
  Integer f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return f;
}

inline Integer binomial(unsigned long n, unsigned long k) {
  Integer b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return b;
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// from the continued fraction expansion of the exact binary value of `x`
/// (convergents plus the final admissible semiconvergent).
inline Rational best_rational(double x, const Integer& max_den) {
  if (!std::isfinite(x)) throw Error(Errc::BadParams, "cannot rationalize a non-finite value");
  const Rational exact(x);
  Integer h_prev2 = 0, h_prev = 1;  // numerators h_{-2}, h_{-1}
  Integer k_prev2 = 1, k_prev = 0;  // denominators
  Rational rest = exact;
  while (true) {
    Integer a;
    mpz_fdiv_q(a.get_mpz_t(), rest.get_num_mpz_t(), rest.get_den_mpz_t());
    Integer h = a * h_prev + h_prev2;
    Integer k = a * k_prev + k_prev2;
    if (k > max_den) {
      // Largest semiconvergent that still respects the bound.
      Integer m = (max_den - k_prev2) / k_prev;
      Rational semi(m * h_prev + h_prev2, m * k_prev + k_prev2);
      Rational conv(h_prev, k_prev);
      semi.canonicalize();
      conv.canonicalize();
      return abs(semi - exact) < abs(conv - exact) ? semi : conv;
    }
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    Rational frac = rest - Rational(a);
    if (frac == 0) {
      Rational r(h, k);
      r.canonicalize();
      return r;
    }
    rest = 1 / frac;
  }
}

}  // namespace soskit
