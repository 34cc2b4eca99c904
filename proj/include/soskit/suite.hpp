#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "soskit/algebra.hpp"
#include "soskit/constructions.hpp"
#include "soskit/form.hpp"
#include "soskit/moment.hpp"
#include "soskit/sos_solver.hpp"

// Built-in reproduction suite: the worked dual examples, the separating
// families, and the property checks, each with a runtime budget.

namespace soskit::suite {

struct CriterionResult {
  int id = 0;
  std::string group;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double limit_seconds = 0.0;
};

/// Random form with integer raw coefficients in [lo, hi] on every monomial.
inline Form random_form(int n, int d, std::mt19937_64& rng, long lo, long hi) {
  std::uniform_int_distribution<long> coeff(lo, hi);
  Form p(n, d);
  for (const auto& i : index_set(n, d)) p.add_raw(i, coeff(rng));
  return p;
}

namespace detail {

struct Check {
  bool ok = true;
  std::ostringstream log;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      if (ok) log << "failed: ";
      else log << "; ";
      log << what;
      ok = false;
    }
  }
};

inline bool certificate_ok(const Form& p, const MembershipVerdict& v, int k) {
  return v.status == MembershipStatus::Member && v.certificate && v.certificate->exact &&
         verify_certificate(p, *v.certificate, k);
}

inline bool witness_ok(const Form& p, const MembershipVerdict& v, int k) {
  return v.status == MembershipStatus::NotMember && v.witness && v.witness->k == k && verify_witness(p, *v.witness);
}

inline Form mono(int a, int b) { return Form::monomial(MultiIndex{a, b}); }

// 1. Worked dual examples for binary quartics.
inline void dual_examples(Check& c) {
  const Form p1 = dual_example(1), p2 = dual_example(2);
  const MomentMatrix m1 = moment_matrix(p1), m2 = moment_matrix(p2);
  const auto R = [](long v) { return Rational(v); };
  c.expect(m1.entries == RationalMatrix{{R(1), R(-1), R(0)}, {R(-1), R(0), R(0)}, {R(0), R(0), R(0)}}, "M_p1");
  c.expect(m2.entries == RationalMatrix{{R(4), R(-2), R(1)}, {R(-2), R(1), R(-2)}, {R(1), R(-2), R(4)}}, "M_p2");
  c.expect(dual_quartic_criteria(p2).det == -9, "det M_p2 = -9");
  const Form h1 = mono(2, 0) + mono(1, 1);
  const Form h2 = mono(2, 0) + mono(1, 1).scaled(2) + mono(0, 2);
  c.expect(fischer_inner(p1, h1 * h1) == -1 && pair_with_square(p1, h1) == -1, "[p1,(x^2+xy)^2] = -1");
  c.expect(fischer_inner(p2, h2 * h2) == -2 && pair_with_square(p2, h2) == -2, "[p2,(x^2+2xy+y^2)^2] = -2");
  c.expect(dual_membership(p1, 1).member && !dual_membership(p1, 2).member, "p1 in (S^1)* minus (S^2)*");
  c.expect(dual_membership(p2, 2).member && !dual_membership(p2, 3).member, "p2 in (S^2)* minus (S^3)*");
  c.log << "M_p1, M_p2, det, pairings and dual verdicts reproduced exactly";
}

// 2. g_k^2 separates consecutive cones for binary octics.
inline void separation_chain(Check& c, const SolverOptions& opts) {
  for (int k = 2; k <= 5; ++k) {
    const Form g = binary_separator(4, k);
    const Form p = g * g;
    const MembershipVerdict in = membership(p, k, opts);
    const MembershipVerdict out = membership(p, k - 1, opts);
    c.expect(certificate_ok(p, in, k), "g_" + std::to_string(k) + "^2 member at k");
    c.expect(witness_ok(p, out, k - 1), "g_" + std::to_string(k) + "^2 refuted at k-1");
    c.log << "k=" << k << ":" << to_string(in.status) << "/" << to_string(out.status) << " ";
  }
}

// 3. The square of x1 x2^2 + x3^3.
inline void trinomial_separation(Check& c, const SolverOptions& opts) {
  const Form t = trinomial(3, 3);
  const Form p = t * t;
  const SosCertificate trivial{2, {{Rational(1), t}}, true};
  c.expect(verify_certificate(p, trivial, 2), "p itself certifies p^2");
  const MembershipVerdict in = membership(p, 2, opts);
  const MembershipVerdict out = membership(p, 1, opts);
  c.expect(certificate_ok(p, in, 2), "p^2 member at k=2");
  c.expect(witness_ok(p, out, 1), "p^2 refuted at k=1");
  c.log << "k=2:" << to_string(in.status) << " k=1:" << to_string(out.status);
}

// 4. The Motzkin form is not a sum of squares.
inline void motzkin_nonmembership(Check& c, const SolverOptions& opts) {
  const Form p = motzkin();
  const MembershipVerdict v = membership(p, 10, opts);
  c.expect(witness_ok(p, v, 10), "verified dual witness at k=10");
  if (v.witness) {
    c.expect(is_psd_exact(moment_matrix(v.witness->q).entries).is_psd, "M_q psd");
    c.expect(fischer_inner(p, v.witness->q) < 0, "[motzkin, q] < 0");
    c.log << "pairing " << to_string(v.witness->pairing);
  }
}

// 5. Hurwitz form with exponents (2,1,1) is a sum of binomial squares.
inline void hurwitz_membership(Check& c, const SolverOptions& opts) {
  const Form p = hurwitz({2, 1, 1});
  const MembershipVerdict v = membership(p, 2, opts);
  c.expect(certificate_ok(p, v, 2), "rational certificate at k=2");
  if (v.certificate) c.log << v.certificate->terms.size() << " binomial squares";
}

// 6. Zero-pairing identities and dual membership of the extremal family.
inline void extremal_generators(Check& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x6a09e667f3bcc908ULL);
  std::uniform_int_distribution<long> num(1, 12), den(1, 5), sgn(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const Rational r = make_rational(num(rng), den(rng));
    const Rational s = make_rational(num(rng), den(rng));
    // t in (0, sqrt(rs)], exactly sqrt(rs) when that is rational
    Rational t = make_rational(static_cast<long>(std::floor(std::sqrt(to_double(r * s)) * 64.0)), 64);
    if (t <= 0) t = make_rational(1, 64);
    while (t * t > r * s) t -= make_rational(1, 64);
    if (trial % 4 == 0) {
      // boundary t^2 = r s
      const Form q = extremal_generator(r, r, r, 1, trial % 8 == 0 ? 1 : -1);
      c.expect(dual_membership(q, 2).member, "boundary extremal member");
    }
    const int e1 = sgn(rng) ? 1 : -1, e2 = sgn(rng) ? 1 : -1;
    const Form q = extremal_generator(r, s, t, e1, e2);
    const Form x2 = mono(2, 0), y2 = mono(0, 2), xy = mono(1, 1);
    const Form h1 = x2.scaled(t) - xy.scaled(e1 * r);
    const Form h2 = y2.scaled(t) - xy.scaled(e2 * s);
    c.expect(fischer_inner(q, h1 * h1) == 0, "[q,(t x^2 - e1 r xy)^2] = 0");
    c.expect(fischer_inner(q, h2 * h2) == 0, "[q,(t y^2 - e2 s xy)^2] = 0");
    const QuarticCriteria crit = dual_quartic_criteria(q);
    c.expect(crit.minor02 == 0 && crit.minor24 == 0, "b0b2-b1^2 = b2b4-b3^2 = 0");
    c.expect(dual_membership(q, 2).member && crit.member_k2, "dual member at k=2");
  }
  c.log << "20 parameter sets";
}

// 7. Product inequality for the Bombieri norm.
inline void bbem_property(Check& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0xbb67ae8584caa73bULL);
  std::uniform_int_distribution<int> arity(1, 3), degree(1, 4);
  int strict = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = arity(rng);
    const Form f = random_form(n, degree(rng), rng, -3, 3);
    const Form g = random_form(n, degree(rng), rng, -3, 3);
    const BbemResult r = bbem_check(f, g);
    c.expect(r.holds, "random pair " + std::to_string(trial));
    if (r.lhs > r.rhs) ++strict;
  }
  for (int e1 = 0; e1 <= 4; ++e1)
    for (int e2 = 0; e2 <= 4; ++e2) {
      const BbemResult r = bbem_check(mono(e1, 0), mono(0, e2));
      c.expect(r.lhs == r.rhs, "equality at x^" + std::to_string(e1) + ", y^" + std::to_string(e2));
    }
  c.log << "500 pairs hold (" << strict << " strictly), equality at pure powers";
}

/// Exact rank of a rational matrix by Gaussian elimination.
inline std::size_t exact_rank(RationalMatrix a) {
  std::size_t rank = 0;
  const std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t piv = rank;
    while (piv < rows && a[piv][col] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[rank]);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || a[r][col] == 0) continue;
      const Rational f = a[r][col] / a[rank][col];
      for (std::size_t c2 = col; c2 < cols; ++c2) a[r][c2] -= f * a[rank][c2];
    }
    ++rank;
  }
  return rank;
}

// 8. Coefficients are recovered from pairings with (x^j +- x^j')^2.
inline void pointedness(Check& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x3c6ef372fe94f82bULL);
  const auto moments = index_set(2, 4);
  auto pairings = [](const Form& q, const MultiIndex& i) {
    const auto [j, jp] = pointedness_decomposition(i);
    const Form a = Form::monomial(j), b = Form::monomial(jp);
    return std::pair{pair_with_square(q, a + b), pair_with_square(q, a - b)};
  };
  for (int trial = 0; trial < 50; ++trial) {
    const Form q = random_form(2, 4, rng, -9, 9);
    for (const auto& i : moments) {
      const auto [plus, minus] = pairings(q, i);
      c.expect((plus - minus) / 4 == q.coeff(i), "recover a(q;" + to_string(i) + ")");
    }
  }
  // The pairing map q -> ([q,(x^j+x^j')^2], [q,(x^j-x^j')^2])_i is injective.
  RationalMatrix map(2 * moments.size(), RationalVector(moments.size()));
  for (std::size_t col = 0; col < moments.size(); ++col) {
    Form e(2, 4);
    e.add_normalized(moments[col], 1);
    for (std::size_t r = 0; r < moments.size(); ++r) {
      const auto [plus, minus] = pairings(e, moments[r]);
      map[2 * r][col] = plus;
      map[2 * r + 1][col] = minus;
    }
  }
  c.expect(exact_rank(map) == moments.size(), "pairing map has full rank");
  c.log << "50 random quartics recovered; kernel of the pairing map is {0}";
}

// 9. Small perturbations of x^4 + y^4 + z^4 stay in the binomial-square cone.
inline void robinson_perturbation(Check& c, const SolverOptions& opts, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0xa54ff53a5f1d36f1ULL);
  std::uniform_int_distribution<long> eps(-100, 100);
  int members = 0;
  for (int trial = 0; trial < 10; ++trial) {
    Form p(3, 4);
    for (std::size_t j = 0; j < 3; ++j) p.add_raw(MultiIndex::unit(3, j, 4), 1);
    for (const auto& u : index_set(3, 4)) p.add_raw(u, make_rational(eps(rng), 10000));
    const MembershipVerdict v = membership(p, 2, opts);
    c.expect(certificate_ok(p, v, 2), "perturbation " + std::to_string(trial));
    members += v.status == MembershipStatus::Member;
  }
  c.log << members << "/10 certified at k=2";
}

// 10. Dual cones are nested and the solver never certifies both ways.
inline void nestedness(Check& c, const SolverOptions& opts, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x510e527fade682d1ULL);
  std::uniform_int_distribution<int> pick(0, 2);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = trial < 100 ? 2 : 3;
    Form q(n, 4);
    switch (pick(rng)) {
      case 0:
        q = random_form(n, 4, rng, -5, 5);
        break;
      case 1: {
        // sum of fourth powers of linear forms, then a small perturbation
        for (int m = 0; m < 3; ++m) {
          const Form l = random_form(n, 1, rng, -2, 2);
          q = q + power(l, 4);
        }
        q = q + random_form(n, 4, rng, -1, 1);
        break;
      }
      default:
        q = random_form(n, 4, rng, 0, 4);
        break;
    }
    const int top = static_cast<int>(monomial_count(n, 2).get_ui());
    std::vector<bool> member;
    for (int k = 1; k <= top; ++k) member.push_back(dual_membership(q, k).member);
    for (int k = 1; k < top; ++k)
      c.expect(!member[k] || member[k - 1], "nested at trial " + std::to_string(trial));
    ++checked;
  }

  SolverOptions both = opts;
  both.cross_check = true;
  std::vector<std::pair<Form, int>> cases;
  for (int k = 2; k <= 5; ++k) {
    const Form g = binary_separator(4, k);
    cases.emplace_back(g * g, k);
    cases.emplace_back(g * g, k - 1);
  }
  const Form t = trinomial(3, 3);
  cases.emplace_back(t * t, 2);
  cases.emplace_back(t * t, 1);
  cases.emplace_back(hurwitz({2, 1, 1}), 2);
  cases.emplace_back(motzkin(), 10);
  for (int trial = 0; trial < 10; ++trial) cases.emplace_back(random_form(2, 4, rng, -3, 3), 1 + trial % 3);
  int runs = 0;
  for (const auto& [p, k] : cases) {
    try {
      const MembershipVerdict v = membership(p, k, both);
      c.expect(!(v.certificate && v.witness), "certificate and witness together");
      ++runs;
    } catch (const std::logic_error& e) {
      c.expect(false, e.what());
    }
  }
  c.log << checked << " random forms nested; " << runs << " cross-checked membership runs";
}

}  // namespace detail

struct CriterionSpec {
  int id;
  const char* group;
  const char* title;
  double limit_seconds;
};

inline const std::vector<CriterionSpec>& criteria() {
  static const std::vector<CriterionSpec> specs{
      {1, "duals", "dual examples p1, p2 (exact)", 1.0},
      {2, "separation", "separation chain g_k^2, n=2, d=4", 60.0},
      {3, "separation", "trinomial square separation", 30.0},
      {4, "nonsos", "Motzkin non-membership at k=10", 120.0},
      {5, "sdsos", "Hurwitz (2,1,1) in binomial-square cone", 30.0},
      {6, "duals", "extremal generators, zero pairings", 5.0},
      {7, "norms", "Bombieri product inequality", 10.0},
      {8, "duals", "pointedness reconstruction", 5.0},
      {9, "sdsos", "perturbations of x^4+y^4+z^4 at k=2", 120.0},
      {10, "duals", "dual nestedness, never both verdicts", 60.0},
  };
  return specs;
}

inline CriterionResult run_criterion(const CriterionSpec& spec, std::uint64_t seed = 0,
                                     const SolverOptions& opts = {}) {
  CriterionResult result{spec.id, spec.group, spec.title, false, "", 0.0, spec.limit_seconds};
  detail::Check c;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (spec.id) {
      case 1: detail::dual_examples(c); break;
      case 2: detail::separation_chain(c, opts); break;
      case 3: detail::trinomial_separation(c, opts); break;
      case 4: detail::motzkin_nonmembership(c, opts); break;
      case 5: detail::hurwitz_membership(c, opts); break;
      case 6: detail::extremal_generators(c, seed); break;
      case 7: detail::bbem_property(c, seed); break;
      case 8: detail::pointedness(c, seed); break;
      case 9: detail::robinson_perturbation(c, opts, seed); break;
      case 10: detail::nestedness(c, opts, seed); break;
      default: c.expect(false, "unknown criterion");
    }
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(result.seconds < spec.limit_seconds, "runtime over budget");
  result.passed = c.ok;
  result.detail = c.log.str();
  return result;
}

/// `only` selects a group name or a comma-separated list of criterion ids;
/// empty runs everything.
inline bool selected(const CriterionSpec& spec, std::string_view only) {
  if (only.empty() || only == "all") return true;
  std::string token;
  std::istringstream in{std::string(only)};
  while (std::getline(in, token, ',')) {
    if (token == spec.group || token == std::to_string(spec.id)) return true;
  }
  return false;
}

inline std::vector<CriterionResult> run_suite(std::string_view only = "", std::uint64_t seed = 0,
                                              const SolverOptions& opts = {},
                                              const std::function<void(const CriterionResult&)>& on_result = {}) {
  std::vector<CriterionResult> results;
  for (const auto& spec : criteria()) {
    if (!selected(spec, only)) continue;
    results.push_back(run_criterion(spec, seed, opts));
    if (on_result) on_result(results.back());
  }
  return results;
}

}  // namespace soskit::suite
