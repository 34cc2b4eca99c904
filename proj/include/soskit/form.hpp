#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "soskit/error.hpp"
#include "soskit/multi_index.hpp"
#include "soskit/rational.hpp"

namespace soskit {

/// A raw monomial term: `coefficient * x^index` as a human would write it.
struct RawTerm {
  Rational coefficient;
  MultiIndex index;
};

/// A real n-ary form of degree d with exact rational coefficients.
///
/// Coefficients are stored in normalized form a(p;i), where the raw
/// coefficient of x^i is c(i) * a(p;i) with c(i) the multinomial
/// coefficient. Zero coefficients are never stored, so the key set is the
/// support S(p).
class Form {
 public:
  using Coefficients = std::map<MultiIndex, Rational, CanonicalOrder>;

  Form(int n, int d) : n_(n), d_(d) {
    if (n < 1 || d < 0) throw Error(Errc::ShapeError, "form requires n >= 1 and d >= 0");
  }

  static Form from_raw_terms(int n, int d, std::span<const RawTerm> terms) {
    Form p(n, d);
    for (const auto& t : terms) p.add_raw(t.index, t.coefficient);
    return p;
  }

  static Form from_raw_terms(int n, int d, std::initializer_list<RawTerm> terms) {
    return from_raw_terms(n, d, std::span<const RawTerm>(terms.begin(), terms.size()));
  }

  /// raw * x^i.
  static Form monomial(const MultiIndex& i, const Rational& raw = 1) {
    Form p(static_cast<int>(i.arity()), i.degree());
    p.add_raw(i, raw);
    return p;
  }

  /// The degree-0 unit form 1 in n variables.
  static Form one(int n) { return monomial(MultiIndex::zero(static_cast<std::size_t>(n))); }

  int arity() const noexcept { return n_; }
  int degree() const noexcept { return d_; }

  /// a(p;i); zero outside the support.
  Rational coeff(const MultiIndex& i) const {
    auto it = coeffs_.find(i);
    return it == coeffs_.end() ? Rational(0) : it->second;
  }

  /// c(i) * a(p;i), the coefficient of x^i in the ordinary expansion.
  Rational raw_coeff(const MultiIndex& i) const {
    auto it = coeffs_.find(i);
    return it == coeffs_.end() ? Rational(0) : Rational(it->second * multinomial(i));
  }

  const Coefficients& coefficients() const noexcept { return coeffs_; }

  std::vector<MultiIndex> support() const {
    std::vector<MultiIndex> s;
    s.reserve(coeffs_.size());
    for (const auto& [i, a] : coeffs_) s.push_back(i);
    return s;
  }

  std::size_t term_count() const noexcept { return coeffs_.size(); }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  bool in_Fk(std::size_t k) const noexcept { return coeffs_.size() <= k; }

  /// Adds raw * x^i. Duplicate indices accumulate.
  void add_raw(const MultiIndex& i, const Rational& raw) {
    check_index(i);
    add_normalized(i, raw / multinomial(i));
  }

  /// Adds a to a(p;i).
  void add_normalized(const MultiIndex& i, const Rational& a) {
    check_index(i);
    if (a == 0) return;
    auto [it, inserted] = coeffs_.try_emplace(i, a);
    if (!inserted) {
      it->second += a;
      if (it->second == 0) coeffs_.erase(it);
    }
  }

  Rational evaluate(std::span<const Rational> x) const {
    if (x.size() != static_cast<std::size_t>(n_))
      throw Error(Errc::ArityMismatch, "evaluation point has wrong length");
    Rational value = 0;
    for (const auto& [i, a] : coeffs_) {
      Rational term = a * multinomial(i);
      for (std::size_t k = 0; k < x.size(); ++k) {
        Rational power;
        mpz_pow_ui(power.get_num_mpz_t(), x[k].get_num_mpz_t(), static_cast<unsigned long>(i[k]));
        mpz_pow_ui(power.get_den_mpz_t(), x[k].get_den_mpz_t(), static_cast<unsigned long>(i[k]));
        term *= power;
      }
      value += term;
    }
    return value;
  }

  Rational evaluate(std::initializer_list<Rational> x) const {
    return evaluate(std::span<const Rational>(x.begin(), x.size()));
  }

  Form scaled(const Rational& lambda) const {
    Form out(n_, d_);
    if (lambda == 0) return out;
    for (const auto& [i, a] : coeffs_) out.coeffs_.emplace(i, a * lambda);
    return out;
  }

  friend bool operator==(const Form& p, const Form& q) {
    return p.n_ == q.n_ && p.d_ == q.d_ && p.coeffs_ == q.coeffs_;
  }

  friend Form operator+(const Form& p, const Form& q) {
    check_same_shape(p, q);
    Form out = p;
    for (const auto& [i, a] : q.coeffs_) out.add_normalized(i, a);
    return out;
  }

  friend Form operator-(const Form& p) { return p.scaled(-1); }
  friend Form operator-(const Form& p, const Form& q) { return p + (-q); }

  /// Product; raw coefficients convolve.
  friend Form operator*(const Form& p, const Form& q) {
    if (p.n_ != q.n_) throw Error(Errc::ArityMismatch, "multiplying forms in different variable counts");
    Form out(p.n_, p.d_ + q.d_);
    for (const auto& [i, a] : p.coeffs_) {
      const Rational raw_i = a * multinomial(i);
      for (const auto& [j, b] : q.coeffs_) out.add_raw(i + j, raw_i * b * multinomial(j));
    }
    return out;
  }

  static void check_same_shape(const Form& p, const Form& q) {
    if (p.n_ != q.n_) throw Error(Errc::ArityMismatch, "forms have different variable counts");
    if (p.d_ != q.d_) throw Error(Errc::DegreeMismatch, "forms have different degrees");
  }

 private:
  void check_index(const MultiIndex& i) const {
    if (i.arity() != static_cast<std::size_t>(n_))
      throw Error(Errc::ArityMismatch, "index " + to_string(i) + " has wrong arity");
    if (i.degree() != d_)
      throw Error(Errc::DegreeMismatch, "index " + to_string(i) + " does not have degree " + std::to_string(d_));
  }

  int n_;
  int d_;
  Coefficients coeffs_;
};

inline Form add(const Form& p, const Form& q) { return p + q; }
inline Form scale(const Form& p, const Rational& lambda) { return p.scaled(lambda); }
inline Form multiply(const Form& p, const Form& q) { return p * q; }

inline Form power(const Form& p, unsigned e) {
  Form out = Form::one(p.arity());
  for (unsigned k = 0; k < e; ++k) out = out * p;
  return out;
}

/// [p,q] = sum_i c(i) a(p;i) a(q;i).
inline Rational fischer_inner(const Form& p, const Form& q) {
  Form::check_same_shape(p, q);
  Rational s = 0;
  const Form& small = p.term_count() <= q.term_count() ? p : q;
  const Form& large = &small == &p ? q : p;
  for (const auto& [i, a] : small.coefficients()) {
    auto it = large.coefficients().find(i);
    if (it != large.coefficients().end()) s += multinomial(i) * a * it->second;
  }
  return s;
}

inline Rational fischer_norm_sq(const Form& p) {
  Rational s = 0;
  for (const auto& [i, a] : p.coefficients()) s += multinomial(i) * a * a;
  return s;
}

}  // namespace soskit
