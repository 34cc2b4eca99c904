#pragma once

#include <numeric>
#include <set>
#include <vector>

#include "soskit/error.hpp"
#include "soskit/form.hpp"
#include "soskit/multi_index.hpp"

namespace soskit {

/// a_1 x_1^{2d} + ... + a_n x_n^{2d} - 2d x^a, with 2d = sum a_j.
inline Form hurwitz(const std::vector<int>& a) {
  if (a.empty()) throw Error(Errc::ShapeError, "hurwitz needs at least one exponent");
  for (int v : a)
    if (v < 0) throw Error(Errc::BadParams, "hurwitz exponents must be non-negative");
  const int total = std::accumulate(a.begin(), a.end(), 0);
  if (total <= 0 || total % 2 != 0) throw Error(Errc::OddSum, "hurwitz exponents must have an even positive sum");
  const int n = static_cast<int>(a.size());
  Form p(n, total);
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a[j] > 0) p.add_raw(MultiIndex::unit(a.size(), j, total), a[j]);
  p.add_raw(MultiIndex(a), -total);
  return p;
}

struct AgiformSpec {
  std::vector<Rational> lambdas;
  std::vector<MultiIndex> alphas;
};

/// sum lambda_j x^{alpha_j} - x^{sum lambda_j alpha_j}.
inline Form agiform(const AgiformSpec& spec) {
  if (spec.lambdas.empty() || spec.lambdas.size() != spec.alphas.size())
    throw Error(Errc::BadParams, "agiform needs matching non-empty lambdas and alphas");
  const std::size_t n = spec.alphas.front().arity();
  const int degree = spec.alphas.front().degree();
  Rational total = 0;
  for (std::size_t j = 0; j < spec.lambdas.size(); ++j) {
    if (spec.lambdas[j] <= 0) throw Error(Errc::BadParams, "agiform weights must be positive");
    if (spec.alphas[j].arity() != n) throw Error(Errc::ArityMismatch, "agiform exponents differ in length");
    if (spec.alphas[j].degree() != degree) throw Error(Errc::DegreeMismatch, "agiform exponents differ in degree");
    if (!spec.alphas[j].all_even()) throw Error(Errc::OddAlpha, to_string(spec.alphas[j]) + " has an odd entry");
    total += spec.lambdas[j];
  }
  if (total != 1) throw Error(Errc::LambdaSumNotOne, "weights sum to " + to_string(total));
  std::vector<int> barycenter(n);
  for (std::size_t k = 0; k < n; ++k) {
    Rational c = 0;
    for (std::size_t j = 0; j < spec.alphas.size(); ++j) c += spec.lambdas[j] * spec.alphas[j][k];
    if (c.get_den() != 1) throw Error(Errc::NonIntegralBarycenter, "weighted exponent mean is not integral");
    barycenter[k] = static_cast<int>(c.get_num().get_si());
  }
  Form p(static_cast<int>(n), degree);
  for (std::size_t j = 0; j < spec.alphas.size(); ++j) p.add_raw(spec.alphas[j], spec.lambdas[j]);
  p.add_raw(MultiIndex(std::move(barycenter)), -1);
  return p;
}

/// x^4 y^2 + x^2 y^4 + z^6 - 3 x^2 y^2 z^2, or one third of it (the
/// agiform with equal weights) when `classical` is false.
inline Form motzkin(bool classical = true) {
  const Rational third = make_rational(1, 3);
  Form p = agiform({{third, third, third}, {MultiIndex{4, 2, 0}, MultiIndex{2, 4, 0}, MultiIndex{0, 0, 6}}});
  return classical ? p.scaled(3) : p;
}

/// g_k = x^{d-k+1} (x + y)^{k-1}, a binary d-ic with exactly k terms.
inline Form binary_separator(int d, int k) {
  if (d < 0 || k < 1 || k > d + 1)
    throw Error(Errc::KOutOfRange, "separator needs 1 <= k <= d+1, got d=" + std::to_string(d) +
                                       " k=" + std::to_string(k));
  const Form x = Form::monomial(MultiIndex{1, 0});
  const Form x_plus_y = x + Form::monomial(MultiIndex{0, 1});
  return power(x, static_cast<unsigned>(d - k + 1)) * power(x_plus_y, static_cast<unsigned>(k - 1));
}

/// x_1 x_2^{d-1} + x_3^d in n >= 3 variables.
inline Form trinomial(int n, int d) {
  if (n < 3 || d < 2) throw Error(Errc::ShapeError, "trinomial needs n >= 3 and d >= 2");
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  e[0] = 1;
  e[1] = d - 1;
  Form p(n, d);
  p.add_raw(MultiIndex(e), 1);
  p.add_raw(MultiIndex::unit(static_cast<std::size_t>(n), 2, d), 1);
  return p;
}

struct PerturbationTerm {
  Rational epsilon;  // raw coefficient
  MultiIndex index;
};

struct PerturbationSpec {
  Rational s = make_rational(1, 100);  // bound on |epsilon|
  std::vector<PerturbationTerm> terms;
};

/// x_1^d - x_2^d + x_3^d plus small raw multiples of further monomials.
inline Form perturbed_fermat(int n, int d, const PerturbationSpec& spec) {
  if (n < 3 || d < 1) throw Error(Errc::ShapeError, "perturbed_fermat needs n >= 3 and d >= 1");
  if (spec.s <= 0) throw Error(Errc::BadParams, "perturbation radius must be positive");
  const std::size_t un = static_cast<std::size_t>(n);
  const std::set<MultiIndex, CanonicalOrder> base{MultiIndex::unit(un, 0, d), MultiIndex::unit(un, 1, d),
                                                  MultiIndex::unit(un, 2, d)};
  if (Integer(spec.terms.size()) + 3 > monomial_count(n, d))
    throw Error(Errc::TooManyTerms, "more perturbation terms than free monomials");
  std::set<MultiIndex, CanonicalOrder> seen;
  Form p(n, d);
  p.add_raw(MultiIndex::unit(un, 0, d), 1);
  p.add_raw(MultiIndex::unit(un, 1, d), -1);
  p.add_raw(MultiIndex::unit(un, 2, d), 1);
  for (const auto& t : spec.terms) {
    if (t.index.arity() != un) throw Error(Errc::ArityMismatch, "perturbation monomial has wrong arity");
    if (t.index.degree() != d) throw Error(Errc::DegreeMismatch, "perturbation monomial has wrong degree");
    if (base.count(t.index) || !seen.insert(t.index).second)
      throw Error(Errc::MonomialCollision, to_string(t.index) + " collides with another term");
    if (abs(t.epsilon) > spec.s) throw Error(Errc::ConstraintViolation, "|epsilon| exceeds the radius s");
    p.add_raw(t.index, t.epsilon);
  }
  return p;
}

/// The two binary quartics used to separate consecutive dual cones.
inline Form dual_example(int which) {
  switch (which) {
    case 1:
      return Form::from_raw_terms(2, 4, {{1, MultiIndex{4, 0}}, {-4, MultiIndex{3, 1}}});
    case 2:
      return Form::from_raw_terms(2, 4, {{4, MultiIndex{4, 0}},
                                         {-8, MultiIndex{3, 1}},
                                         {6, MultiIndex{2, 2}},
                                         {-8, MultiIndex{1, 3}},
                                         {4, MultiIndex{0, 4}}});
    default:
      throw Error(Errc::BadParams, "dual example must be 1 or 2");
  }
}

/// Binary quartic with b = (b_0..b_4), i.e. sum binom(4,i) b_i x^{4-i} y^i.
inline Form quartic_from_b(const Rational (&b)[5]) {
  Form q(2, 4);
  for (int i = 0; i < 5; ++i) q.add_normalized(MultiIndex{4 - i, i}, b[i]);
  return q;
}

/// The form with b = (r^2, e1 r t, t^2, e2 s t, s^2), requiring r s >= t^2.
inline Form extremal_generator(const Rational& r, const Rational& s, const Rational& t, int eps1, int eps2) {
  if (r <= 0 || s <= 0 || t <= 0) throw Error(Errc::BadParams, "r, s, t must be positive");
  if ((eps1 != 1 && eps1 != -1) || (eps2 != 1 && eps2 != -1))
    throw Error(Errc::BadParams, "signs must be +1 or -1");
  if (r * s < t * t) throw Error(Errc::ConstraintViolation, "need r s >= t^2");
  const Rational b[5] = {r * r, eps1 * r * t, t * t, eps2 * s * t, s * s};
  return quartic_from_b(b);
}

/// g^2 + lambda x_1^{2d}.
inline Form thicken(const Form& g, const Rational& lambda) {
  if (lambda <= 0) throw Error(Errc::BadParams, "lambda must be positive");
  const MultiIndex lead = MultiIndex::unit(static_cast<std::size_t>(g.arity()), 0, g.degree());
  if (g.is_zero() || (g.term_count() == 1 && g.coefficients().begin()->first == lead))
    throw Error(Errc::DegenerateG, "g is a multiple of x_1^d");
  return g * g + Form::monomial(lead + lead, lambda);
}

/// (x_1^2 + ... + x_n^2)^r p.
inline Form polya_lift(const Form& p, int r) {
  if (r < 0) throw Error(Errc::BadParams, "power must be non-negative");
  Form squares(p.arity(), 2);
  for (std::size_t j = 0; j < static_cast<std::size_t>(p.arity()); ++j)
    squares.add_raw(MultiIndex::unit(static_cast<std::size_t>(p.arity()), j, 2), 1);
  return power(squares, static_cast<unsigned>(r)) * p;
}

}  // namespace soskit
