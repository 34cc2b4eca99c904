#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "soskit/error.hpp"
#include "soskit/form.hpp"

namespace soskit {

namespace detail {

// Dense univariate polynomials over Q, lowest degree first, no trailing zeros.
using UniPoly = std::vector<Rational>;

inline void trim(UniPoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline UniPoly derivative(const UniPoly& f) {
  UniPoly d;
  for (std::size_t k = 1; k < f.size(); ++k) d.push_back(f[k] * static_cast<long>(k));
  trim(d);
  return d;
}

inline UniPoly remainder(UniPoly a, const UniPoly& b) {
  trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    const Rational factor = a.back() / b.back();
    const std::size_t shift = a.size() - b.size();
    for (std::size_t k = 0; k < b.size(); ++k) a[shift + k] -= factor * b[k];
    trim(a);
  }
  return a;
}

inline UniPoly gcd(UniPoly a, UniPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    UniPoly r = remainder(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

}  // namespace detail

/// True iff the binary form f has no repeated factor over C. With
/// F(t) = f(t,1): gcd(F, F') must be constant and y may divide f at most once
/// (y's multiplicity is d - deg F).
inline bool is_square_free_binary(const Form& f) {
  if (f.arity() != 2) throw Error(Errc::NotBinary, "expected a binary form");
  if (f.is_zero()) throw Error(Errc::ZeroForm, "the zero form has no factorization");
  detail::UniPoly poly(static_cast<std::size_t>(f.degree()) + 1);
  for (const auto& [i, a] : f.coefficients()) poly[static_cast<std::size_t>(i[0])] = f.raw_coeff(i);
  detail::trim(poly);
  const int deg = static_cast<int>(poly.size()) - 1;
  if (f.degree() - deg > 1) return false;
  return detail::gcd(poly, detail::derivative(poly)).size() <= 1;
}

struct SignWitnessPair {
  std::vector<Rational> x_plus;   // p(x_plus) > 0
  std::vector<Rational> x_minus;  // p(x_minus) < 0
};

/// Looks for points where p takes both signs: first e_1..e_n, then
/// -e_1..-e_n, then e_i + e_j, e_i - e_j, -e_i + e_j, -e_i - e_j (i < j), then
/// 10^4 seeded random points with coordinates in [-1,1] (denominator 1024).
/// The first positive and the first negative point found are returned.
/// nullopt means no witness was found, not that p is definite.
inline std::optional<SignWitnessPair> indefiniteness_witness(const Form& p, std::uint64_t seed = 0) {
  const std::size_t n = static_cast<std::size_t>(p.arity());
  std::optional<std::vector<Rational>> plus, minus;
  auto consider = [&](std::vector<Rational> x) {
    const Rational v = p.evaluate(x);
    if (v > 0 && !plus) plus = std::move(x);
    else if (v < 0 && !minus) minus = std::move(x);
    return plus && minus;
  };
  auto unit = [&](std::size_t i, int si, std::optional<std::size_t> j = {}, int sj = 0) {
    std::vector<Rational> x(n, Rational(0));
    x[i] = si;
    if (j) x[*j] = sj;
    return x;
  };
  auto done = [&] { return SignWitnessPair{*plus, *minus}; };

  for (int s : {1, -1})
    for (std::size_t i = 0; i < n; ++i)
      if (consider(unit(i, s))) return done();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (auto [si, sj] : {std::pair{1, 1}, std::pair{1, -1}, std::pair{-1, 1}, std::pair{-1, -1}})
        if (consider(unit(i, si, j, sj))) return done();

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> coord(-1024, 1024);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<Rational> x(n);
    for (auto& v : x) v = make_rational(coord(rng), 1024);
    if (consider(std::move(x))) return done();
  }
  return std::nullopt;
}

struct BbemResult {
  Rational lhs;  // ||f g||^2
  Rational rhs;  // e1! e2! / (e1 + e2)! * ||f||^2 ||g||^2
  bool holds = false;
};

/// Product inequality for the Bombieri norm:
/// ||f g||^2 >= e1! e2! / (e1+e2)! * ||f||^2 ||g||^2.
inline BbemResult bbem_check(const Form& f, const Form& g) {
  if (f.arity() != g.arity()) throw Error(Errc::ArityMismatch, "bbem_check needs forms in the same variables");
  const auto e1 = static_cast<unsigned long>(f.degree());
  const auto e2 = static_cast<unsigned long>(g.degree());
  BbemResult r;
  r.lhs = fischer_norm_sq(f * g);
  r.rhs = Rational(factorial(e1) * factorial(e2), factorial(e1 + e2)) * fischer_norm_sq(f) * fischer_norm_sq(g);
  r.rhs.canonicalize();
  r.holds = r.lhs >= r.rhs;
  return r;
}

/// a(p;i)^2 <= ||p||^2 for every i.
inline bool coeff_bound_check(const Form& p) {
  const Rational norm = fischer_norm_sq(p);
  for (const auto& [i, a] : p.coefficients())
    if (a * a > norm) return false;
  return true;
}

}  // namespace soskit
