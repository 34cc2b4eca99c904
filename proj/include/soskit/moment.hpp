#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "soskit/error.hpp"
#include "soskit/form.hpp"
#include "soskit/multi_index.hpp"
#include "soskit/subsets.hpp"

namespace soskit {

using RationalMatrix = std::vector<std::vector<Rational>>;
using RationalVector = std::vector<Rational>;

/// Generalized Hankel matrix M_p = [a(p; i+j)] over the canonical basis
/// I(n,d) of a form p of degree 2d.
struct MomentMatrix {
  std::vector<MultiIndex> basis;
  RationalMatrix entries;
  int source_degree = 0;

  std::size_t size() const noexcept { return basis.size(); }
  const Rational& operator()(std::size_t r, std::size_t c) const { return entries[r][c]; }
};

inline void require_even_degree(const Form& p) {
  if (p.degree() % 2 != 0)
    throw Error(Errc::OddDegree, "form of odd degree " + std::to_string(p.degree()));
}

inline MomentMatrix moment_matrix(const Form& p) {
  require_even_degree(p);
  MomentMatrix m;
  m.source_degree = p.degree();
  m.basis = index_set(p.arity(), p.degree() / 2);
  const std::size_t n = m.basis.size();
  m.entries.assign(n, RationalVector(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = r; c < n; ++c) {
      m.entries[r][c] = p.coeff(m.basis[r] + m.basis[c]);
      m.entries[c][r] = m.entries[r][c];
    }
  return m;
}

/// t^T A t.
inline Rational quadratic_value(const RationalMatrix& a, std::span<const Rational> t) {
  Rational s = 0;
  for (std::size_t r = 0; r < t.size(); ++r) {
    if (t[r] == 0) continue;
    Rational row = 0;
    for (std::size_t c = 0; c < t.size(); ++c)
      if (t[c] != 0) row += a[r][c] * t[c];
    s += t[r] * row;
  }
  return s;
}

/// H_p(t) = [p, h^2] where t is the raw coefficient vector of h.
inline Rational pair_with_square(const Form& p, const Form& h) {
  if (p.arity() != h.arity()) throw Error(Errc::ArityMismatch, "pairing forms of different arity");
  if (p.degree() != 2 * h.degree())
    throw Error(Errc::DegreeMismatch, "pair_with_square needs deg p = 2 deg h");
  const MomentMatrix m = moment_matrix(p);
  RationalVector t(m.size());
  for (std::size_t r = 0; r < m.size(); ++r) t[r] = h.raw_coeff(m.basis[r]);
  return quadratic_value(m.entries, t);
}

/// One step of the symmetric elimination: `pivot` at `index`, and the
/// column l with l[index] = 1, so the eliminated part equals
/// pivot * l l^T.
struct PivotStep {
  std::size_t index;
  Rational pivot;
  RationalVector column;
};

struct PsdVerdict {
  bool is_psd = true;
  std::optional<RationalVector> witness;  // v with v^T M v < 0
  std::vector<PivotStep> pivot_trace;     // when psd: M = sum pivot * l l^T
};

inline bool is_symmetric(const RationalMatrix& a) {
  const std::size_t n = a.size();
  for (std::size_t r = 0; r < n; ++r) {
    if (a[r].size() != n) return false;
    for (std::size_t c = 0; c < r; ++c)
      if (a[r][c] != a[c][r]) return false;
  }
  return true;
}

/// Exact PSD decision by symmetric rational elimination.
inline PsdVerdict is_psd_exact(const RationalMatrix& m) {
  if (!is_symmetric(m)) throw Error(Errc::NotSymmetric, "matrix is not square and symmetric");
  const std::size_t n = m.size();
  RationalMatrix a = m;
  std::vector<bool> active(n, true);
  PsdVerdict verdict;

  // A reduced witness w on the active coordinates lifts back through the
  // recorded steps: x_r = -sum_j column_j x_j.
  auto lift = [&](RationalVector x) {
    for (auto step = verdict.pivot_trace.rbegin(); step != verdict.pivot_trace.rend(); ++step) {
      Rational s = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != step->index && step->column[j] != 0) s += step->column[j] * x[j];
      x[step->index] = -s;
    }
    return x;
  };
  auto fail = [&](RationalVector reduced) {
    verdict.is_psd = false;
    verdict.witness = lift(std::move(reduced));
    return verdict;
  };

  while (true) {
    std::optional<std::size_t> pivot_at;
    for (std::size_t r = 0; r < n; ++r) {
      if (!active[r]) continue;
      if (a[r][r] < 0) {
        RationalVector w(n);
        w[r] = 1;
        return fail(std::move(w));
      }
      if (!pivot_at && a[r][r] > 0) pivot_at = r;
    }
    if (!pivot_at) {
      // Zero diagonal: any nonzero off-diagonal entry gives e_r - sign(a_rc) e_c.
      for (std::size_t r = 0; r < n; ++r) {
        if (!active[r]) continue;
        for (std::size_t c = r + 1; c < n; ++c) {
          if (!active[c] || a[r][c] == 0) continue;
          RationalVector w(n);
          w[r] = 1;
          w[c] = a[r][c] > 0 ? -1 : 1;
          return fail(std::move(w));
        }
      }
      break;
    }
    const std::size_t r = *pivot_at;
    PivotStep step{r, a[r][r], RationalVector(n)};
    step.column[r] = 1;
    for (std::size_t j = 0; j < n; ++j)
      if (active[j] && j != r && a[r][j] != 0) step.column[j] = a[r][j] / step.pivot;
    active[r] = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i] || step.column[i] == 0) continue;
      for (std::size_t j = i; j < n; ++j) {
        if (!active[j] || a[r][j] == 0) continue;
        a[i][j] -= step.column[i] * a[r][j];
        a[j][i] = a[i][j];
      }
    }
    verdict.pivot_trace.push_back(std::move(step));
  }
  return verdict;
}

inline RationalMatrix principal_submatrix(const RationalMatrix& m, std::span<const std::size_t> rows) {
  RationalMatrix out(rows.size(), RationalVector(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows.size(); ++c) out[r][c] = m.at(rows[r]).at(rows[c]);
  return out;
}

/// Rows and columns of M restricted to S, keeping the order of S.
inline RationalMatrix principal_submatrix(const MomentMatrix& m, std::span<const MultiIndex> s) {
  std::vector<std::size_t> rows;
  rows.reserve(s.size());
  for (const auto& i : s) {
    auto it = std::find(m.basis.begin(), m.basis.end(), i);
    if (it == m.basis.end()) throw Error(Errc::IndexOutOfBasis, to_string(i) + " is not in the moment basis");
    rows.push_back(static_cast<std::size_t>(it - m.basis.begin()));
  }
  return principal_submatrix(m.entries, rows);
}

struct DualOptions {
  std::uint64_t cap = 1'000'000;  // max number of k-subsets examined
  bool force = false;             // ignore the cap
  unsigned threads = 0;           // 0: SOSKIT_THREADS or hardware concurrency
};

struct DualVerdict {
  bool member = true;
  std::optional<std::vector<MultiIndex>> violating_support;
  std::optional<RationalVector> violating_vector;  // indexed like violating_support
};

/// p is in the dual of the k-sparse sos cone iff every k x k principal
/// submatrix of M_p is psd. Checks the min(k,N)-subsets in lexicographic
/// order; on failure reports the smallest violating support inside the first
/// violating subset.
inline DualVerdict dual_membership(const Form& p, int k, const DualOptions& opts = {}) {
  require_even_degree(p);
  const MomentMatrix mm = moment_matrix(p);
  const std::size_t n = mm.size();
  if (k < 1) throw Error(Errc::KOutOfRange, "k=" + std::to_string(k) + " must be at least 1");
  const std::size_t m = std::min(static_cast<std::size_t>(k), n);
  const std::uint64_t count = subset_count(n, m);
  if (count > opts.cap && !opts.force)
    throw Error(Errc::SubsetExplosion, std::to_string(count) + " principal submatrices exceed the cap of " +
                                           std::to_string(opts.cap));

  DualVerdict verdict;
  const auto subsets = subsets_lex(n, m);
  const unsigned workers = opts.threads ? opts.threads : worker_count();
  const std::size_t hit = first_match(
      subsets.size(), [&](std::size_t s) { return !is_psd_exact(principal_submatrix(mm.entries, subsets[s])).is_psd; },
      workers);
  if (hit == subsets.size()) return verdict;

  // Shrink to the smallest violating support inside the violating subset.
  const auto& bad = subsets[hit];
  verdict.member = false;
  constexpr std::size_t kMinimizeLimit = 16;
  for (std::size_t size = m <= kMinimizeLimit ? 1 : m; size <= m; ++size) {
    for (const auto& local : subsets_lex(m, size)) {
      std::vector<std::size_t> rows;
      for (std::size_t idx : local) rows.push_back(bad[idx]);
      PsdVerdict v = is_psd_exact(principal_submatrix(mm.entries, rows));
      if (v.is_psd) continue;
      std::vector<MultiIndex> support;
      for (std::size_t r : rows) support.push_back(mm.basis[r]);
      verdict.violating_support = std::move(support);
      verdict.violating_vector = std::move(*v.witness);
      return verdict;
    }
  }
  return verdict;  // unreachable: the full subset violates
}

/// The b-coefficients b_i = a(p; (4-i, i)) of a binary quartic together with
/// the quantities deciding dual membership at k = 1 and k = 2.
struct QuarticCriteria {
  Rational b[5];
  Rational minor02;  // b0 b2 - b1^2
  Rational minor04;  // b0 b4 - b2^2
  Rational minor24;  // b2 b4 - b3^2
  Rational det;      // det M_p
  bool member_k1 = false;
  bool member_k2 = false;
  bool member_k3 = false;
};

inline QuarticCriteria dual_quartic_criteria(const Form& p) {
  if (p.arity() != 2 || p.degree() != 4) throw Error(Errc::WrongShape, "expected a binary quartic");
  QuarticCriteria q;
  for (int i = 0; i < 5; ++i) q.b[i] = p.coeff(MultiIndex{4 - i, i});
  const auto& b = q.b;
  q.minor02 = b[0] * b[2] - b[1] * b[1];
  q.minor04 = b[0] * b[4] - b[2] * b[2];
  q.minor24 = b[2] * b[4] - b[3] * b[3];
  q.det = b[0] * (b[2] * b[4] - b[3] * b[3]) - b[1] * (b[1] * b[4] - b[3] * b[2]) +
          b[2] * (b[1] * b[3] - b[2] * b[2]);
  q.member_k1 = b[0] >= 0 && b[2] >= 0 && b[4] >= 0;
  q.member_k2 = q.member_k1 && q.minor02 >= 0 && q.minor04 >= 0 && q.minor24 >= 0;
  q.member_k3 = is_psd_exact(moment_matrix(p).entries).is_psd;
  return q;
}

/// Splits i (degree 2d) as j + j' with both of degree d, giving the first d
/// exponent units to j.
inline std::pair<MultiIndex, MultiIndex> pointedness_decomposition(const MultiIndex& i) {
  if (i.degree() % 2 != 0) throw Error(Errc::OddDegree, "index of odd degree " + std::to_string(i.degree()));
  int left = i.degree() / 2;
  std::vector<int> j(i.arity()), jp(i.arity());
  for (std::size_t k = 0; k < i.arity(); ++k) {
    j[k] = std::min(left, i[k]);
    left -= j[k];
    jp[k] = i[k] - j[k];
  }
  return {MultiIndex(std::move(j)), MultiIndex(std::move(jp))};
}

}  // namespace soskit
