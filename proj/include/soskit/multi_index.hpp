#pragma once

#include <algorithm>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "soskit/error.hpp"
#include "soskit/rational.hpp"

namespace soskit {

/// Exponent tuple of a monomial x^i. Indexes monomials, matrix rows and
/// supports throughout the library.
class MultiIndex {
 public:
  MultiIndex() = default;

  explicit MultiIndex(std::vector<int> exponents) : e_(std::move(exponents)) {
    for (int v : e_)
      if (v < 0) throw Error(Errc::ShapeError, "negative exponent in multi-index");
    degree_ = std::accumulate(e_.begin(), e_.end(), 0);
  }

  MultiIndex(std::initializer_list<int> exponents) : MultiIndex(std::vector<int>(exponents)) {}

  /// power * e_k in n variables.
  static MultiIndex unit(std::size_t n, std::size_t k, int power = 1) {
    std::vector<int> e(n, 0);
    e.at(k) = power;
    return MultiIndex(std::move(e));
  }

  static MultiIndex zero(std::size_t n) { return MultiIndex(std::vector<int>(n, 0)); }

  std::size_t arity() const noexcept { return e_.size(); }
  int degree() const noexcept { return degree_; }
  int operator[](std::size_t k) const { return e_[k]; }
  const std::vector<int>& exponents() const noexcept { return e_; }

  bool all_even() const {
    return std::all_of(e_.begin(), e_.end(), [](int v) { return v % 2 == 0; });
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.e_ == b.e_; }

  friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    if (a.arity() != b.arity()) throw Error(Errc::ArityMismatch, "adding multi-indices of different arity");
    std::vector<int> e(a.e_);
    for (std::size_t k = 0; k < e.size(); ++k) e[k] += b.e_[k];
    return MultiIndex(std::move(e));
  }

 private:
  std::vector<int> e_;
  int degree_ = 0;
};

/// Canonical order: lexicographically descending on the exponent tuple, so
/// (2,0) < (1,1) < (0,2) in the sense of "comes first".
struct CanonicalOrder {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    return std::lexicographical_compare(b.exponents().begin(), b.exponents().end(),
                                        a.exponents().begin(), a.exponents().end());
  }
};

inline std::string to_string(const MultiIndex& i) {
  std::string s = "(";
  for (std::size_t k = 0; k < i.arity(); ++k) {
    if (k) s += ',';
    s += std::to_string(i[k]);
  }
  return s + ")";
}

/// N(n,d) = binom(n+d-1, n-1).
inline Integer monomial_count(int n, int d) {
  if (n < 1 || d < 0) throw Error(Errc::ShapeError, "monomial_count requires n >= 1, d >= 0");
  return binomial(static_cast<unsigned long>(n + d - 1), static_cast<unsigned long>(n - 1));
}

namespace detail {
inline void enumerate_indices(std::vector<int>& prefix, std::size_t pos, int remaining,
                              std::vector<MultiIndex>& out) {
  if (pos + 1 == prefix.size()) {
    prefix[pos] = remaining;
    out.emplace_back(prefix);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    prefix[pos] = v;
    enumerate_indices(prefix, pos + 1, remaining - v, out);
  }
}
}  // namespace detail

/// All exponent tuples of length n summing to d, in canonical order.
inline std::vector<MultiIndex> index_set(int n, int d) {
  if (n < 1 || d < 0) throw Error(Errc::ShapeError, "index_set requires n >= 1, d >= 0");
  std::vector<MultiIndex> out;
  out.reserve(monomial_count(n, d).get_ui());
  std::vector<int> prefix(static_cast<std::size_t>(n), 0);
  detail::enumerate_indices(prefix, 0, d, out);
  return out;
}

/// c(i) = d! / (i_1! ... i_n!).
inline Integer multinomial(const MultiIndex& i) {
  Integer c = factorial(static_cast<unsigned long>(i.degree()));
  for (int v : i.exponents()) c /= factorial(static_cast<unsigned long>(v));
  return c;
}

}  // namespace soskit
