#include <gtest/gtest.h>

#include <random>

#include "soskit/constructions.hpp"
#include "soskit/linalg.hpp"
#include "soskit/sos_solver.hpp"
#include "test_util.hpp"

using namespace soskit;
using soskit::testing::random_rational;
using soskit::testing::random_sparse;

namespace {

Form binary(std::initializer_list<RawTerm> terms, int d) { return Form::from_raw_terms(2, d, terms); }

const Form x2_minus_y2 = binary({{1, {2, 0}}, {-1, {0, 2}}}, 2);

// Independent soundness check of a certificate: re-expand and compare.
void expect_sound_certificate(const Form& p, const MembershipVerdict& v, int k) {
  ASSERT_EQ(v.status, MembershipStatus::Member);
  ASSERT_TRUE(v.certificate);
  EXPECT_FALSE(v.witness);
  Form sum(p.arity(), p.degree());
  for (const auto& t : v.certificate->terms) {
    EXPECT_GT(t.weight, 0);
    EXPECT_LE(t.h.term_count(), static_cast<std::size_t>(k));
    sum = sum + (t.h * t.h).scaled(t.weight);
  }
  EXPECT_EQ(sum, p);
}

void expect_sound_witness(const Form& p, const MembershipVerdict& v, int k) {
  ASSERT_EQ(v.status, MembershipStatus::NotMember);
  ASSERT_TRUE(v.witness);
  EXPECT_FALSE(v.certificate);
  EXPECT_LT(fischer_inner(p, v.witness->q), 0);
  EXPECT_EQ(fischer_inner(p, v.witness->q), v.witness->pairing);
  DualOptions forced;
  forced.force = true;
  EXPECT_TRUE(dual_membership(v.witness->q, k, forced).member);
}

NumericGram single_block(std::vector<MultiIndex> basis, std::vector<std::vector<double>> entries) {
  NumericGram g;
  g.basis = std::move(basis);
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < g.basis.size(); ++i) support.push_back(i);
  g.supports.push_back(support);
  linalg::DenseMatrix m(entries.size(), 0.0);
  for (std::size_t r = 0; r < entries.size(); ++r)
    for (std::size_t c = 0; c < entries.size(); ++c) m(r, c) = entries[r][c];
  g.blocks.push_back(m);
  return g;
}

}  // namespace

TEST(GramBasis, Pruning) {
  const Form fermat = binary({{1, {4, 0}}, {1, {0, 4}}}, 4);
  EXPECT_EQ(gram_basis(fermat, true), (std::vector<MultiIndex>{{2, 0}, {1, 1}, {0, 2}}));
  EXPECT_EQ(gram_basis(Form::monomial({8, 0}), true), (std::vector<MultiIndex>{{4, 0}}));
  EXPECT_EQ(gram_basis(Form::monomial({8, 0}), false), index_set(2, 4));
}

TEST(Options, Validation) {
  SolverOptions o;
  o.rho = 0;
  EXPECT_THROW(membership(x2_minus_y2 * x2_minus_y2, 2, o), Error);
}

TEST(Feasibility, DifferenceOfSquares) {
  const Form p = x2_minus_y2 * x2_minus_y2;
  const FeasibilityResult r = fwk_feasibility(p, 2);
  EXPECT_EQ(r.status, SplitStatus::Converged);
  // The block on {(2,0),(0,2)} carries the certificate.
  bool found = false;
  for (std::size_t b = 0; b < r.gram.blocks.size(); ++b) {
    const auto& s = r.gram.supports[b];
    if (s.size() == 2 && r.gram.basis[s[0]] == MultiIndex{2, 0} && r.gram.basis[s[1]] == MultiIndex{0, 2}) {
      found = true;
      EXPECT_NEAR(r.gram.blocks[b](0, 1), -1.0, 1e-5);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Feasibility, SquareOfFermatQuarticIsMonomialSquares) {
  // (x^4 + y^4)^2 = (x^4)^2 + 2 (x^2 y^2)^2 + (y^4)^2
  const Form x4y4 = binary({{1, {4, 0}}, {1, {0, 4}}}, 4);
  const Form p = x4y4 * x4y4;
  const MembershipVerdict v = membership(p, 1);
  expect_sound_certificate(p, v, 1);
  EXPECT_EQ(v.certificate->terms.size(), 3u);
  expect_sound_certificate(p, membership(p, 2), 2);
}

TEST(Feasibility, DiagonalGramCannotReachCrossTerm) {
  const Form x2y2 = binary({{1, {2, 0}}, {1, {0, 2}}}, 2);
  const Form p = x2y2 * x2y2 + binary({{1, {3, 1}}}, 4);
  EXPECT_EQ(membership(p, 1).status, MembershipStatus::NotMember);
}

TEST(Feasibility, KOutOfRange) {
  const Form p = x2_minus_y2 * x2_minus_y2;
  for (int k : {0, -1}) {
    try {
      fwk_feasibility(p, k);
      FAIL() << k;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::KOutOfRange);
    }
  }
}

TEST(Feasibility, LevelsBeyondBasisSizeAreFullSos) {
  const Form p = x2_minus_y2 * x2_minus_y2;
  EXPECT_EQ(fwk_feasibility(p, 4).gram.supports.size(), 1u);
  expect_sound_certificate(p, membership(p, 10), 10);
}

TEST(Feasibility, SupportExplosion) {
  SolverOptions o;
  o.support_cap = 2;
  try {
    membership(motzkin(), 3, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SupportExplosion);
  }
}

TEST(Extract, Blocks) {
  const auto c1 = extract_certificate(single_block({{2, 0}, {0, 2}}, {{1, -1}, {-1, 1}}), 2);
  ASSERT_EQ(c1.summands.size(), 1u);
  EXPECT_EQ(c1.summands[0].support, (std::vector<MultiIndex>{{2, 0}, {0, 2}}));
  EXPECT_NEAR(c1.summands[0].coefficients[0], 1.0, 1e-12);
  EXPECT_NEAR(c1.summands[0].coefficients[1], -1.0, 1e-12);

  const auto c2 = extract_certificate(single_block({{2, 0}}, {{4}}), 1);
  ASSERT_EQ(c2.summands.size(), 1u);
  EXPECT_NEAR(c2.summands[0].coefficients[0], 2.0, 1e-12);

  const auto c3 = extract_certificate(single_block({{2, 0}, {0, 2}}, {{2, 0}, {0, 2}}), 2);
  ASSERT_EQ(c3.summands.size(), 2u);
  EXPECT_NEAR(c3.summands[0].coefficients[0], std::sqrt(2.0), 1e-12);

  EXPECT_THROW(extract_certificate(single_block({{2, 0}, {0, 2}}, {{1, 2}, {2, 1}}), 2), Error);
  EXPECT_THROW(extract_certificate(single_block({{2, 0}, {0, 2}}, {{1, 0}, {0, 1}}), 1), Error);
}

TEST(Rounding, RecoversExactBlock) {
  const Form p = x2_minus_y2 * x2_minus_y2;
  const RoundingOutcome r = rationalize_and_verify(single_block({{2, 0}, {0, 2}}, {{1 + 1e-12, -1}, {-1, 1}}), p, 2);
  ASSERT_TRUE(r.certificate);
  EXPECT_TRUE(verify_certificate(p, *r.certificate, 2));
  ASSERT_EQ(r.certificate->terms.size(), 1u);
  const Form& h = r.certificate->terms[0].h;
  EXPECT_EQ(h * h * Form::one(2), p);
}

TEST(Rounding, CorruptedBlockFails) {
  // Satisfies every linear constraint of (x^2 + y^2)^2 but is indefinite.
  const Form s = binary({{1, {2, 0}}, {1, {0, 2}}}, 2);
  const Form p = s * s;
  const RoundingOutcome r =
      rationalize_and_verify(single_block({{2, 0}, {1, 1}, {0, 2}}, {{1, 0, 3.5}, {0, -5, 0}, {3.5, 0, 1}}), p, 3);
  EXPECT_FALSE(r.certificate);
  EXPECT_FALSE(r.failure.empty());
}

TEST(Verify, RejectsWrongCertificates) {
  const Form p = x2_minus_y2 * x2_minus_y2;
  EXPECT_TRUE(verify_certificate(p, SosCertificate{2, {{1, x2_minus_y2}}, true}, 2));
  EXPECT_FALSE(verify_certificate(p, SosCertificate{1, {{1, x2_minus_y2}}, true}, 1));
  EXPECT_FALSE(verify_certificate(p, SosCertificate{2, {{2, x2_minus_y2}}, true}, 2));
  EXPECT_FALSE(verify_certificate(p, SosCertificate{2, {{-1, x2_minus_y2}}, true}, 2));
}

TEST(Witness, ShortcutOnOddMonomial) {
  const Form h = binary({{1, {2, 0}}, {1, {1, 1}}}, 2);
  const Form p = h * h;
  const auto w = dual_witness_search(p, 1);
  ASSERT_TRUE(w);
  EXPECT_TRUE(verify_witness(p, *w));
  EXPECT_EQ(w->q, binary({{-1, {3, 1}}}, 4));
  EXPECT_EQ(w->pairing, make_rational(-1, 2));
}

TEST(Witness, NoneForMember) {
  EXPECT_FALSE(dual_witness_search(Form::monomial({4, 0}), 1));
  EXPECT_FALSE(dual_witness_search(Form::monomial({4, 0}), 3));
}

TEST(Witness, VerifyRejectsBadWitness) {
  const Form p = binary({{1, {4, 0}}, {2, {3, 1}}, {1, {2, 2}}}, 4);
  EXPECT_FALSE(verify_witness(p, DualWitness{binary({{1, {3, 1}}}, 4), make_rational(1, 2), 1}));
  EXPECT_FALSE(verify_witness(p, DualWitness{binary({{-1, {3, 1}}}, 4), make_rational(-1, 3), 1}));
  // Pairing negative but q outside the dual cone at k = 2.
  EXPECT_FALSE(verify_witness(p, DualWitness{binary({{-1, {3, 1}}}, 4), make_rational(-1, 2), 2}));
}

TEST(Membership, SquareOfBinomialProduct) {
  const Form h = binary({{1, {2, 0}}, {1, {1, 1}}}, 2);
  const Form p = h * h;
  expect_sound_certificate(p, membership(p, 2), 2);
  expect_sound_witness(p, membership(p, 1), 1);
}

TEST(Membership, SeparatorAtK3) {
  const Form g = binary_separator(4, 3);
  const Form p = g * g;
  expect_sound_certificate(p, membership(p, 3), 3);
  expect_sound_witness(p, membership(p, 2), 2);
}

TEST(Membership, Motzkin) {
  const Form p = motzkin();
  const MembershipVerdict v = membership(p, 10);
  expect_sound_witness(p, v, 10);
  EXPECT_TRUE(is_psd_exact(moment_matrix(v.witness->q).entries).is_psd);
}

TEST(Membership, ZeroForm) {
  const MembershipVerdict v = membership(Form(2, 4), 1);
  EXPECT_EQ(v.status, MembershipStatus::Member);
  ASSERT_TRUE(v.certificate);
  EXPECT_TRUE(v.certificate->terms.empty());
}

TEST(Membership, OddDegreeRejected) {
  EXPECT_THROW(membership(Form::monomial({3, 0}), 1), Error);
}

TEST(MembershipProperty, MonotoneInK) {
  const Form h = binary({{1, {2, 0}}, {1, {1, 1}}}, 2);
  const Form p = h * h;
  const MembershipVerdict v = membership(p, 2);
  ASSERT_TRUE(v.certificate);
  EXPECT_TRUE(verify_certificate(p, *v.certificate, 3));
  expect_sound_certificate(p, membership(p, 3), 3);
}

TEST(MembershipProperty, FullLevelIsSos) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 2;
    Form p(n, 4);
    for (int j = 0; j < 3; ++j) {
      const Form h = random_sparse(n, 2, rng, 3, 0.7);
      p = p + h * h;
    }
    if (p.is_zero()) continue;
    const int top = static_cast<int>(monomial_count(n, 2).get_si());
    const MembershipVerdict v = membership(p, top);
    expect_sound_certificate(p, v, top);
  }
}

TEST(MembershipProperty, SoundOnRandomInputs) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const Form p = random_sparse(2, 4, rng, 4, 0.7) + binary({{3, {4, 0}}, {3, {0, 4}}}, 4);
    const int k = 1 + trial % 3;
    SolverOptions o;
    o.cross_check = true;
    o.seed = static_cast<std::uint64_t>(trial);
    MembershipVerdict v;
    ASSERT_NO_THROW(v = membership(p, k, o));
    EXPECT_FALSE(v.certificate && v.witness);
    if (v.status == MembershipStatus::Member) {
      expect_sound_certificate(p, v, k);
      std::uniform_int_distribution<int> num(-20, 20), den(1, 9);
      for (int s = 0; s < 100; ++s) EXPECT_GE(p.evaluate({make_rational(num(rng), den(rng)), make_rational(num(rng), den(rng))}), 0);
    } else if (v.status == MembershipStatus::NotMember) {
      expect_sound_witness(p, v, k);
    }
  }
}

TEST(MembershipProperty, DeterministicForSeed) {
  const Form p = hurwitz({2, 1, 1});
  SolverOptions o;
  o.seed = 42;
  const MembershipVerdict a = membership(p, 2, o), b = membership(p, 2, o);
  ASSERT_TRUE(a.certificate && b.certificate);
  ASSERT_EQ(a.certificate->terms.size(), b.certificate->terms.size());
  for (std::size_t j = 0; j < a.certificate->terms.size(); ++j) {
    EXPECT_EQ(a.certificate->terms[j].weight, b.certificate->terms[j].weight);
    EXPECT_EQ(a.certificate->terms[j].h, b.certificate->terms[j].h);
  }
}

TEST(Linalg, JacobiAndProjection) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 7);
    linalg::DenseMatrix a(n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = r; c < n; ++c) a(r, c) = a(c, r) = to_double(random_rational(rng));
    const linalg::SymmetricEigen e = linalg::jacobi_eigen(a);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        double s = 0;
        for (std::size_t k = 0; k < n; ++k) s += e.vectors(r, k) * e.values[k] * e.vectors(c, k);
        EXPECT_NEAR(s, a(r, c), 1e-10);
      }
    const linalg::DenseMatrix p = linalg::project_psd(a, 0.0);
    const linalg::SymmetricEigen ep = linalg::jacobi_eigen(p);
    for (double v : ep.values) EXPECT_GE(v, -1e-10);
  }
}
