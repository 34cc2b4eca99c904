#include <gtest/gtest.h>

#include <random>

#include "soskit/algebra.hpp"
#include "soskit/constructions.hpp"
#include "test_util.hpp"

using namespace soskit;
using soskit::testing::random_sparse;

namespace {

Form binary(std::initializer_list<RawTerm> terms, int d) { return Form::from_raw_terms(2, d, terms); }

Form swap_xy(const Form& f) {
  Form g(2, f.degree());
  for (const auto& [i, a] : f.coefficients()) g.add_normalized(MultiIndex{i[1], i[0]}, a);
  return g;
}

}  // namespace

TEST(SquareFree, Examples) {
  for (int d = 1; d <= 8; ++d) EXPECT_TRUE(is_square_free_binary(binary({{1, {d, 0}}, {-1, {0, d}}}, d))) << d;
  EXPECT_FALSE(is_square_free_binary(binary({{1, {2, 0}}, {2, {1, 1}}, {1, {0, 2}}}, 2)));
  EXPECT_FALSE(is_square_free_binary(binary({{1, {3, 1}}}, 4)));
  EXPECT_TRUE(is_square_free_binary(binary({{1, {1, 1}}}, 2)));
  EXPECT_FALSE(is_square_free_binary(binary({{1, {0, 2}}}, 2)));
  EXPECT_THROW(is_square_free_binary(Form(2, 2)), Error);
  EXPECT_THROW(is_square_free_binary(Form::monomial({2, 0, 0})), Error);
}

TEST(SquareFree, SquaresAndSwaps) {
  std::mt19937_64 rng(41);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 60; ++trial) {
    const Form f = random_sparse(2, 1 + trial % 5, rng, 4, 0.7);
    if (f.is_zero() || !is_square_free_binary(f)) continue;
    ++checked;
    EXPECT_FALSE(is_square_free_binary(f * f));
    EXPECT_TRUE(is_square_free_binary(swap_xy(f)));
  }
  EXPECT_GT(checked, 20);
}

TEST(Indefinite, Examples) {
  const Form fermat = perturbed_fermat(3, 4, {});
  const auto w = indefiniteness_witness(fermat);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->x_plus, (std::vector<Rational>{1, 0, 0}));
  EXPECT_EQ(w->x_minus, (std::vector<Rational>{0, 1, 0}));
  EXPECT_FALSE(indefiniteness_witness(binary({{1, {2, 0}}, {1, {0, 2}}}, 2)));
  const Form t = trinomial(3, 3);
  EXPECT_EQ(t.evaluate({1, 1, 0}), 1);
  EXPECT_EQ(t.evaluate({-1, 1, 0}), -1);
  EXPECT_TRUE(indefiniteness_witness(t));
}

TEST(Indefinite, ClaimsVerifiedByEvaluation) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const Form p = random_sparse(3, 1 + trial % 4, rng, 3, 0.6);
    const auto w = indefiniteness_witness(p, static_cast<std::uint64_t>(trial));
    if (!w) continue;
    EXPECT_GT(p.evaluate(w->x_plus), 0);
    EXPECT_LT(p.evaluate(w->x_minus), 0);
  }
}

TEST(Bbem, Examples) {
  const Form x = binary({{1, {1, 0}}}, 1), y = binary({{1, {0, 1}}}, 1);
  const BbemResult r = bbem_check(x, y);
  EXPECT_EQ(r.lhs, make_rational(1, 2));
  EXPECT_EQ(r.rhs, make_rational(1, 2));
  EXPECT_TRUE(r.holds);
  const BbemResult s = bbem_check(x, x);
  EXPECT_EQ(s.lhs, 1);
  EXPECT_EQ(s.rhs, make_rational(1, 2));
  EXPECT_TRUE(s.holds);
  const Form f = binary({{1, {2, 0}}, {-1, {0, 2}}}, 2);
  const Form g = binary({{1, {1, 0}}, {1, {0, 1}}}, 1);
  // Hand computation: ||f||^2 = 2, ||g||^2 = 2, fg = x^3 + x^2y - xy^2 - y^3,
  // ||fg||^2 = 1 + 1/3 + 1/3 + 1 = 8/3, rhs = (2!1!/3!) * 4 = 4/3.
  const BbemResult t = bbem_check(f, g);
  EXPECT_EQ(t.lhs, make_rational(8, 3));
  EXPECT_EQ(t.rhs, make_rational(4, 3));
  EXPECT_TRUE(t.holds);
}

TEST(Bbem, RandomPairs) {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> arity(1, 3), degree(0, 4);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = arity(rng);
    const Form f = random_sparse(n, degree(rng), rng, 3, 0.7);
    const Form g = random_sparse(n, degree(rng), rng, 3, 0.7);
    EXPECT_TRUE(bbem_check(f, g).holds) << trial;
  }
}

TEST(Bbem, EqualityAtPurePowers) {
  for (int e1 = 0; e1 <= 4; ++e1)
    for (int e2 = 0; e2 <= 4; ++e2) {
      const BbemResult r = bbem_check(Form::monomial({e1, 0}), Form::monomial({0, e2}));
      EXPECT_EQ(r.lhs, r.rhs);
    }
}

TEST(CoeffBound, Examples) {
  EXPECT_TRUE(coeff_bound_check(dual_example(1)));
  EXPECT_TRUE(coeff_bound_check(Form(3, 4)));
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    Form p(3, 4);
    const auto set = index_set(3, 4);
    std::uniform_int_distribution<int> coeff(-5, 5);
    for (std::size_t j = 0; j < 20 && j < set.size(); ++j) p.add_raw(set[j], coeff(rng));
    EXPECT_TRUE(coeff_bound_check(p));
  }
}
