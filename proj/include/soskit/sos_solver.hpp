#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "soskit/error.hpp"
#include "soskit/form.hpp"
#include "soskit/linalg.hpp"
#include "soskit/moment.hpp"
#include "soskit/multi_index.hpp"
#include "soskit/subsets.hpp"

namespace soskit {

struct SolverOptions {
  double rho = 1.0;          // splitting penalty; scales the dual residual
  double tol_primal = 1e-9;  // relative disagreement between affine and psd iterates
  double tol_dual = 1e-9;    // rho * max block change per iteration
  int max_iters = 50000;
  std::uint64_t support_cap = 1'000'000;
  std::uint64_t seed = 0;
  bool prune = true;
  bool cross_check = false;  // run the dual search even after a certificate is found

  void validate() const {
    if (!(rho > 0) || !(tol_primal > 0) || !(tol_dual > 0) || max_iters < 1 || support_cap < 1)
      throw Error(Errc::BadParams, "solver options must be positive");
  }
};

/// Gram basis for p: I(n,d), optionally pruned of monomials that cannot
/// appear in any Gram representation. x^i is dropped when a(p;2i) = 0 and
/// 2i has no representation j + j' (j != j') among the remaining basis.
inline std::vector<MultiIndex> gram_basis(const Form& p, bool prune) {
  require_even_degree(p);
  std::vector<MultiIndex> basis = index_set(p.arity(), p.degree() / 2);
  if (!prune) return basis;
  std::set<MultiIndex, CanonicalOrder> alive(basis.begin(), basis.end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = alive.begin(); it != alive.end();) {
      const MultiIndex doubled = *it + *it;
      bool keep = p.coeff(doubled) != 0;
      for (auto jt = alive.begin(); !keep && jt != alive.end(); ++jt) {
        if (*jt == *it) continue;
        std::vector<int> rest(doubled.arity());
        bool valid = true;
        for (std::size_t k = 0; k < rest.size(); ++k) {
          rest[k] = doubled[k] - (*jt)[k];
          valid = valid && rest[k] >= 0;
        }
        keep = valid && alive.count(MultiIndex(std::move(rest))) > 0;
      }
      if (keep) {
        ++it;
      } else {
        it = alive.erase(it);
        changed = true;
      }
    }
  }
  return {alive.begin(), alive.end()};
}

/// Linear constraints of the Gram problem: for every u in I(n,2d) the
/// entries G_ij with basis_i + basis_j = u must sum to the raw coefficient
/// of x^u in p.
struct GramSystem {
  std::vector<MultiIndex> basis;
  std::vector<MultiIndex> moments;  // I(n,2d), canonical order
  std::vector<Rational> target;     // raw coefficient of x^u in p
  std::vector<std::size_t> pair_moment;  // basis.size()^2 table: moment index of basis_i + basis_j

  static GramSystem build(const Form& p, std::vector<MultiIndex> basis) {
    require_even_degree(p);
    GramSystem g;
    g.basis = std::move(basis);
    g.moments = index_set(p.arity(), p.degree());
    std::map<MultiIndex, std::size_t, CanonicalOrder> pos;
    for (std::size_t u = 0; u < g.moments.size(); ++u) pos.emplace(g.moments[u], u);
    g.target.reserve(g.moments.size());
    for (const auto& u : g.moments) g.target.push_back(p.raw_coeff(u));
    const std::size_t b = g.basis.size();
    g.pair_moment.resize(b * b);
    for (std::size_t i = 0; i < b; ++i)
      for (std::size_t j = 0; j < b; ++j) g.pair_moment[i * b + j] = pos.at(g.basis[i] + g.basis[j]);
    return g;
  }

  std::size_t moment_of(std::size_t i, std::size_t j) const { return pair_moment[i * basis.size() + j]; }

  /// True when some nonzero target has no entry inside any block of the
  /// given supports.
  bool uncovered_target(const std::vector<std::vector<std::size_t>>& supports) const {
    std::vector<bool> covered(moments.size(), false);
    for (const auto& s : supports)
      for (std::size_t a : s)
        for (std::size_t b : s) covered[moment_of(a, b)] = true;
    for (std::size_t u = 0; u < moments.size(); ++u)
      if (!covered[u] && target[u] != 0) return true;
    return false;
  }
};

/// Numeric factor-width decomposition: one symmetric block per support.
struct NumericGram {
  std::vector<MultiIndex> basis;
  std::vector<std::vector<std::size_t>> supports;  // positions into basis
  std::vector<linalg::DenseMatrix> blocks;
};

enum class SplitStatus { Converged, IterationLimit, Stalled, Infeasible };

inline const char* to_string(SplitStatus s) {
  switch (s) {
    case SplitStatus::Converged: return "converged";
    case SplitStatus::IterationLimit: return "iteration-limit";
    case SplitStatus::Stalled: return "stalled";
    case SplitStatus::Infeasible: return "infeasible";
  }
  return "?";
}

struct FeasibilityResult {
  SplitStatus status = SplitStatus::IterationLimit;
  NumericGram gram;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

namespace detail {

struct SplitRun {
  std::vector<linalg::DenseMatrix> x;  // affine iterate
  std::vector<linalg::DenseMatrix> z;  // psd iterate
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  SplitStatus status = SplitStatus::IterationLimit;
};

/// Consensus splitting between an affine set (projection supplied by the
/// caller) and the product of psd cones of the blocks:
///   x <- P_affine(z - u);  x' = 1.6 x - 0.6 z;  z <- P_psd(x' + u);  u <- u + x' - z.
/// Stops when x and z agree to tol_primal (relative) and z moves less than
/// tol_dual / rho, or when progress stalls (the residual fails to shrink by
/// 5% while the iteration count doubles).
inline constexpr double kRelaxation = 1.6;

template <class Affine>
SplitRun run_splitting(std::vector<linalg::DenseMatrix> z, Affine&& affine, const SolverOptions& opts,
                       double margin) {
  using linalg::DenseMatrix;
  const std::size_t nb = z.size();
  SplitRun run;
  std::vector<DenseMatrix> u, w(nb);
  u.reserve(nb);
  for (const auto& b : z) u.emplace_back(b.size());
  std::map<int, double> history;

  for (int it = 1; it <= opts.max_iters; ++it) {
    for (std::size_t b = 0; b < nb; ++b) {
      w[b] = z[b];
      auto& wd = w[b].data();
      const auto& ud = u[b].data();
      for (std::size_t e = 0; e < wd.size(); ++e) wd[e] -= ud[e];
    }
    run.x = affine(w);

    double change = 0.0, gap = 0.0, scale = 1.0;
    for (std::size_t b = 0; b < nb; ++b) {
      // Over-relaxed point alpha x + (1 - alpha) z.
      DenseMatrix relaxed = run.x[b];
      auto& rd = relaxed.data();
      const auto& zd = z[b].data();
      for (std::size_t e = 0; e < rd.size(); ++e) rd[e] = kRelaxation * rd[e] + (1.0 - kRelaxation) * zd[e];
      DenseMatrix v = relaxed;
      auto& vd = v.data();
      const auto& ud = u[b].data();
      for (std::size_t e = 0; e < vd.size(); ++e) vd[e] += ud[e];
      DenseMatrix next = linalg::project_psd(v, margin);
      const auto& nd = next.data();
      const auto& xd = run.x[b].data();
      auto& um = u[b].data();
      for (std::size_t e = 0; e < nd.size(); ++e) {
        change = std::max(change, std::abs(nd[e] - zd[e]));
        gap = std::max(gap, std::abs(xd[e] - nd[e]));
        scale = std::max(scale, std::abs(xd[e]));
        um[e] += rd[e] - nd[e];
      }
      z[b] = std::move(next);
    }
    run.iterations = it;
    run.primal_residual = gap / scale;
    run.dual_residual = opts.rho * change;
    if (run.primal_residual < opts.tol_primal && run.dual_residual < opts.tol_dual) {
      run.status = SplitStatus::Converged;
      break;
    }
    if (it % 500 == 0) {
      history[it] = run.primal_residual;
      if (it >= 4000 && it % 1000 == 0) {
        auto half = history.find(it / 2);
        if (half != history.end() && run.primal_residual > 0.95 * half->second) {
          run.status = SplitStatus::Stalled;
          break;
        }
      }
    }
  }
  run.z = std::move(z);
  return run;
}

inline std::vector<linalg::DenseMatrix> seeded_start(const std::vector<std::size_t>& sizes, std::uint64_t seed,
                                                     double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  std::vector<linalg::DenseMatrix> z;
  z.reserve(sizes.size());
  for (std::size_t m : sizes) {
    linalg::DenseMatrix b(m);
    for (std::size_t i = 0; i < m; ++i) {
      b(i, i) = scale;
      for (std::size_t j = i + 1; j < m; ++j) b(i, j) = b(j, i) = scale * noise(rng);
    }
    z.push_back(std::move(b));
  }
  return z;
}

inline std::vector<std::vector<std::size_t>> block_supports(std::size_t basis_size, std::size_t k,
                                                            std::uint64_t cap) {
  if (basis_size == 0) return {};
  if (basis_size <= k) {
    std::vector<std::size_t> all(basis_size);
    for (std::size_t i = 0; i < basis_size; ++i) all[i] = i;
    return {all};
  }
  const std::uint64_t count = subset_count(basis_size, k);
  if (count > cap)
    throw Error(Errc::SupportExplosion,
                std::to_string(count) + " block supports exceed the cap of " + std::to_string(cap));
  return subsets_lex(basis_size, k);
}

/// Levels k >= N(n,d) all describe the full sos cone.
inline void check_level(const Form& p, int k) {
  require_even_degree(p);
  if (k < 1) throw Error(Errc::KOutOfRange, "k=" + std::to_string(k) + " must be at least 1");
}

inline FeasibilityResult primal_splitting(const Form& p, int k, const SolverOptions& opts, double margin) {
  FeasibilityResult result;
  const GramSystem sys = GramSystem::build(p, gram_basis(p, opts.prune));
  result.gram.basis = sys.basis;
  result.gram.supports = block_supports(sys.basis.size(), static_cast<std::size_t>(k), opts.support_cap);
  const auto& supports = result.gram.supports;

  if (sys.uncovered_target(supports)) {
    result.status = SplitStatus::Infeasible;
    return result;
  }

  const std::size_t nm = sys.moments.size();
  std::vector<double> target(nm), counts(nm, 0.0);
  double target_scale = 0.0;
  for (std::size_t u = 0; u < nm; ++u) {
    target[u] = to_double(sys.target[u]);
    target_scale = std::max(target_scale, std::abs(target[u]));
  }
  std::vector<std::vector<std::size_t>> entry_moment(supports.size());
  std::vector<std::size_t> sizes;
  for (std::size_t b = 0; b < supports.size(); ++b) {
    const auto& s = supports[b];
    sizes.push_back(s.size());
    for (std::size_t r = 0; r < s.size(); ++r)
      for (std::size_t c = 0; c < s.size(); ++c) {
        const std::size_t u = sys.moment_of(s[r], s[c]);
        entry_moment[b].push_back(u);
        counts[u] += 1.0;
      }
  }
  if (supports.empty()) {
    result.status = target_scale == 0.0 ? SplitStatus::Converged : SplitStatus::Infeasible;
    return result;
  }

  // Orthogonal projection onto {blocks : constraint sums equal targets}. Each
  // entry belongs to exactly one constraint, so the residual of a constraint
  // spreads evenly over its entries.
  std::vector<double> sums(nm);
  auto affine = [&](std::vector<linalg::DenseMatrix> w) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t b = 0; b < w.size(); ++b) {
      const auto& d = w[b].data();
      for (std::size_t e = 0; e < d.size(); ++e) sums[entry_moment[b][e]] += d[e];
    }
    for (std::size_t u = 0; u < nm; ++u)
      sums[u] = counts[u] > 0 ? (target[u] - sums[u]) / counts[u] : 0.0;
    for (std::size_t b = 0; b < w.size(); ++b) {
      auto& d = w[b].data();
      for (std::size_t e = 0; e < d.size(); ++e) d[e] += sums[entry_moment[b][e]];
    }
    return w;
  };

  const double start_scale = std::max(target_scale, 1e-12) / static_cast<double>(supports.size());
  SplitRun run = run_splitting(seeded_start(sizes, opts.seed, start_scale), affine, opts, margin);
  result.status = run.status;
  result.iterations = run.iterations;
  result.primal_residual = run.primal_residual;
  result.dual_residual = run.dual_residual;
  result.gram.blocks = std::move(run.z);
  return result;
}

}  // namespace detail

/// Numeric search for p = sum_S m_S^T Q_S m_S with Q_S psd and each S a
/// k-subset of the Gram basis.
inline FeasibilityResult fwk_feasibility(const Form& p, int k, const SolverOptions& opts = {}) {
  opts.validate();
  detail::check_level(p, k);
  return detail::primal_splitting(p, k, opts, 0.0);
}

namespace detail {

/// Refines a numeric decomposition into a low-rank one that meets the linear
/// constraints to machine precision. Each block is factored as V V^T, keeping
/// eigenvectors whose eigenvalue exceeds `rel_floor` times the largest
/// eigenvalue over all blocks, and V is fitted by Levenberg-Marquardt.
inline std::optional<NumericGram> polish_low_rank(const GramSystem& sys, const NumericGram& gram, double rel_floor,
                                                  int max_steps = 200) {
  using linalg::DenseMatrix;
  const std::size_t nb = gram.blocks.size();
  std::vector<linalg::SymmetricEigen> eig;
  double lambda_max = 0.0;
  for (const auto& b : gram.blocks) {
    eig.push_back(linalg::jacobi_eigen(b));
    for (double v : eig.back().values) lambda_max = std::max(lambda_max, v);
  }
  if (!(lambda_max > 0.0)) return std::nullopt;

  std::vector<std::size_t> rank(nb), offset(nb);
  std::vector<double> v;
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t m = gram.blocks[b].size();
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < m; ++c)
      if (eig[b].values[c] > rel_floor * lambda_max) keep.push_back(c);
    rank[b] = keep.size();
    offset[b] = v.size();
    v.resize(v.size() + m * keep.size());
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t c = 0; c < keep.size(); ++c)
        v[offset[b] + a * keep.size() + c] = std::sqrt(eig[b].values[keep[c]]) * eig[b].vectors(a, keep[c]);
  }
  const std::size_t nv = v.size();
  if (nv == 0) return std::nullopt;
  const std::size_t nm = sys.moments.size();
  std::vector<double> target(nm);
  double scale = 1.0;
  for (std::size_t u = 0; u < nm; ++u) {
    target[u] = to_double(sys.target[u]);
    scale = std::max(scale, std::abs(target[u]));
  }

  auto residual = [&](const std::vector<double>& x) {
    std::vector<double> r(nm, 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& s = gram.supports[b];
      const std::size_t m = s.size(), rk = rank[b];
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          double g = 0.0;
          for (std::size_t c = 0; c < rk; ++c) g += x[offset[b] + i * rk + c] * x[offset[b] + j * rk + c];
          r[sys.moment_of(s[i], s[j])] += g;
        }
    }
    for (std::size_t u = 0; u < nm; ++u) r[u] -= target[u];
    return r;
  };
  auto sq = [](const std::vector<double>& r) {
    double s = 0.0;
    for (double x : r) s += x * x;
    return s;
  };
  auto max_abs = [](const std::vector<double>& r) {
    double s = 0.0;
    for (double x : r) s = std::max(s, std::abs(x));
    return s;
  };

  std::vector<double> r = residual(v);
  double cost = sq(r);
  double mu = 1e-3;
  for (int step = 0; step < max_steps && max_abs(r) > 1e-15 * scale; ++step) {
    // Dense Jacobian, nm x nv.
    std::vector<double> jac(nm * nv, 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& s = gram.supports[b];
      const std::size_t m = s.size(), rk = rank[b];
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t c = 0; c < rk; ++c) {
          const std::size_t col = offset[b] + a * rk + c;
          for (std::size_t j = 0; j < m; ++j)
            jac[sys.moment_of(s[a], s[j]) * nv + col] += 2.0 * v[offset[b] + j * rk + c];
        }
    }
    DenseMatrix jtj(nv);
    std::vector<double> grad(nv, 0.0);
    for (std::size_t u = 0; u < nm; ++u) {
      const double* row = &jac[u * nv];
      for (std::size_t a = 0; a < nv; ++a) {
        if (row[a] == 0.0) continue;
        grad[a] += row[a] * r[u];
        for (std::size_t c = 0; c < nv; ++c) jtj(a, c) += row[a] * row[c];
      }
    }
    bool improved = false;
    for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
      DenseMatrix damped = jtj;
      for (std::size_t a = 0; a < nv; ++a) damped(a, a) += mu * (1.0 + jtj(a, a));
      std::vector<double> delta(grad);
      if (linalg::cholesky_solve(damped, delta)) {
        std::vector<double> trial(v);
        for (std::size_t a = 0; a < nv; ++a) trial[a] -= delta[a];
        std::vector<double> tr = residual(trial);
        const double tc = sq(tr);
        if (tc < cost) {
          v = std::move(trial);
          r = std::move(tr);
          cost = tc;
          mu = std::max(mu / 3.0, 1e-15);
          improved = true;
          break;
        }
      }
      mu *= 4.0;
    }
    if (!improved) break;
  }
  if (max_abs(r) > 1e-9 * scale) return std::nullopt;

  NumericGram out{gram.basis, gram.supports, {}};
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t m = gram.blocks[b].size(), rk = rank[b];
    DenseMatrix g(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t c = 0; c < rk; ++c) g(i, j) += v[offset[b] + i * rk + c] * v[offset[b] + j * rk + c];
    out.blocks.push_back(std::move(g));
  }
  return out;
}

}  // namespace detail

struct NumericSummand {
  std::vector<MultiIndex> support;
  std::vector<double> coefficients;  // raw coefficients on support
};

struct NumericCertificate {
  std::vector<NumericSummand> summands;
};

/// Splits each block by pivoted LDL^T: every pivot contributes the square of
/// sqrt(pivot) * (row of L), supported inside the block's support.
inline NumericCertificate extract_certificate(const NumericGram& gram, int k) {
  NumericCertificate cert;
  for (std::size_t b = 0; b < gram.blocks.size(); ++b) {
    const auto& s = gram.supports.at(b);
    if (s.size() > static_cast<std::size_t>(k))
      throw Error(Errc::KOutOfRange, "block support larger than k");
    linalg::DenseMatrix a = gram.blocks[b];
    const std::size_t m = a.size();
    const double tol = 1e-9 * std::max(1.0, a.max_abs());
    std::vector<bool> active(m, true);
    for (std::size_t step = 0; step < m; ++step) {
      std::size_t r = m;
      for (std::size_t i = 0; i < m; ++i)
        if (active[i] && (r == m || a(i, i) > a(r, r))) r = i;
      if (a(r, r) < -tol) throw Error(Errc::BlockNotPsd, "negative pivot in block " + std::to_string(b));
      if (a(r, r) <= tol) {
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j)
            if (active[i] && active[j] && std::abs(a(i, j)) > std::sqrt(tol))
              throw Error(Errc::BlockNotPsd, "indefinite remainder in block " + std::to_string(b));
        break;
      }
      const double pivot = a(r, r), root = std::sqrt(pivot);
      NumericSummand h;
      for (std::size_t j = 0; j < m; ++j) {
        if (!active[j]) continue;
        const double l = j == r ? 1.0 : a(r, j) / pivot;
        if (l == 0.0) continue;
        h.support.push_back(gram.basis[s[j]]);
        h.coefficients.push_back(root * l);
      }
      active[r] = false;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
          if (active[i] && active[j]) a(i, j) -= a(i, r) * a(r, j) / pivot;
      cert.summands.push_back(std::move(h));
    }
  }
  return cert;
}

struct SosTerm {
  Rational weight;  // > 0
  Form h;
};

/// p = sum weight_j h_j^2 with every h_j having at most k terms.
struct SosCertificate {
  int k = 0;
  std::vector<SosTerm> terms;
  bool exact = true;

  Form expand(int n, int degree) const {
    Form sum(n, degree);
    for (const auto& t : terms) sum = sum + (t.h * t.h).scaled(t.weight);
    return sum;
  }
};

/// Exact re-check of a certificate, independent of how it was produced.
inline bool verify_certificate(const Form& p, const SosCertificate& cert, int k) {
  for (const auto& t : cert.terms) {
    if (t.weight <= 0 || !t.h.in_Fk(static_cast<std::size_t>(k))) return false;
    if (t.h.arity() != p.arity() || 2 * t.h.degree() != p.degree()) return false;
  }
  return cert.expand(p.arity(), p.degree()) == p;
}

namespace detail {

inline std::optional<Rational> rational_sqrt(const Rational& w) {
  if (w < 0) return std::nullopt;
  Integer num = w.get_num(), den = w.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) return std::nullopt;
  Integer rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  Rational r(rn, rd);
  r.canonicalize();
  return r;
}

/// Term weight * h^2 with a rational square root of the weight folded into h.
inline SosTerm normalized_term(Rational weight, Form h) {
  // Make the leading coefficient positive for stable output.
  if (!h.is_zero() && h.coefficients().begin()->second < 0) h = -h;
  if (auto root = rational_sqrt(weight)) return {Rational(1), h.scaled(*root)};
  return {std::move(weight), std::move(h)};
}

}  // namespace detail

struct RoundingOutcome {
  std::optional<SosCertificate> certificate;
  int denominator_bits = 0;  // bound that succeeded
  std::string failure;
};

/// Rounds the blocks to rationals (continued fractions, denominator bound
/// 2^10, 2^11, ..., 2^40), restores the linear constraints exactly by the
/// orthogonal correction, and accepts the first bound for which every
/// corrected block is psd and the expanded certificate equals p.
inline RoundingOutcome rationalize_and_verify(const NumericGram& gram, const Form& p, int k) {
  RoundingOutcome outcome;
  const GramSystem sys = GramSystem::build(p, gram.basis);
  if (sys.uncovered_target(gram.supports)) {
    outcome.failure = "a coefficient of p is not reachable from the block supports";
    return outcome;
  }
  const std::size_t nm = sys.moments.size();
  std::vector<long> counts(nm, 0);
  for (const auto& s : gram.supports)
    for (std::size_t a : s)
      for (std::size_t b : s) ++counts[sys.moment_of(a, b)];

  for (int bits = 10; bits <= 40; ++bits) {
    const Integer bound = Integer(1) << bits;
    std::vector<RationalMatrix> blocks;
    blocks.reserve(gram.blocks.size());
    for (const auto& q : gram.blocks) {
      RationalMatrix r(q.size(), RationalVector(q.size()));
      for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = i; j < q.size(); ++j) r[i][j] = r[j][i] = best_rational(q(i, j), bound);
      blocks.push_back(std::move(r));
    }
    std::vector<Rational> shift(sys.target);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& s = gram.supports[b];
      for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j) shift[sys.moment_of(s[i], s[j])] -= blocks[b][i][j];
    }
    for (std::size_t u = 0; u < nm; ++u)
      if (counts[u] > 0) shift[u] /= counts[u];
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& s = gram.supports[b];
      for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i; j < s.size(); ++j) {
          blocks[b][i][j] += shift[sys.moment_of(s[i], s[j])];
          blocks[b][j][i] = blocks[b][i][j];
        }
    }

    SosCertificate cert{k, {}, true};
    bool all_psd = true;
    for (std::size_t b = 0; b < blocks.size() && all_psd; ++b) {
      PsdVerdict v = is_psd_exact(blocks[b]);
      if (!v.is_psd) {
        all_psd = false;
        break;
      }
      const auto& s = gram.supports[b];
      for (const auto& step : v.pivot_trace) {
        Form h(p.arity(), p.degree() / 2);
        for (std::size_t j = 0; j < s.size(); ++j)
          if (step.column[j] != 0) h.add_raw(gram.basis[s[j]], step.column[j]);
        cert.terms.push_back(detail::normalized_term(step.pivot, std::move(h)));
      }
    }
    if (!all_psd) continue;
    if (verify_certificate(p, cert, k)) {
      outcome.certificate = std::move(cert);
      outcome.denominator_bits = bits;
      return outcome;
    }
  }
  outcome.failure = "no denominator bound up to 2^40 gave a psd exact decomposition";
  return outcome;
}

/// q in the dual of the k-sparse cone with [p,q] < 0; refutes p in the cone.
struct DualWitness {
  Form q;
  Rational pairing;
  int k = 0;
};

inline bool verify_witness(const Form& p, const DualWitness& w, const DualOptions& dual = {}) {
  if (w.q.arity() != p.arity() || w.q.degree() != p.degree()) return false;
  const Rational pairing = fischer_inner(p, w.q);
  if (pairing != w.pairing || pairing >= 0) return false;
  DualOptions forced = dual;
  forced.force = true;
  return dual_membership(w.q, w.k, forced).member;
}

namespace detail {

/// sum over alpha in I(n,d) of (alpha . x)^{2d}: its moment matrix is
/// positive definite since the points alpha are unisolvent for forms of
/// degree d.
inline Form interior_dual_form(int n, int two_d) {
  Form q(n, two_d);
  const auto points = index_set(n, two_d / 2);
  for (const auto& u : index_set(n, two_d)) {
    Rational a = 0;
    for (const auto& alpha : points) {
      Integer term = 1;
      for (std::size_t k = 0; k < u.arity(); ++k) {
        Integer pw;
        mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(alpha[k]), static_cast<unsigned long>(u[k]));
        term *= pw;
      }
      a += term;
    }
    q.add_normalized(u, a);
  }
  return q;
}

inline std::optional<DualWitness> accept_witness(const Form& p, Form q, int k) {
  DualWitness w{std::move(q), 0, k};
  w.pairing = fischer_inner(p, w.q);
  if (w.pairing >= 0) return std::nullopt;
  if (!verify_witness(p, w)) return std::nullopt;
  return w;
}

}  // namespace detail

struct WitnessSearch {
  std::optional<DualWitness> witness;
  SplitStatus status = SplitStatus::IterationLimit;
  int iterations = 0;
  double residual = 0.0;
};

/// Searches for q with every min(k,N) principal submatrix of M_q psd and
/// [p,q] = -1 (up to scale), then rounds q to rationals and verifies it
/// exactly. Failure does not prove membership.
inline WitnessSearch dual_witness_search_detailed(const Form& p, int k, const SolverOptions& opts = {}) {
  opts.validate();
  detail::check_level(p, k);
  WitnessSearch search;
  if (p.is_zero()) return search;

  const int n = p.arity();
  const auto basis = index_set(n, p.degree() / 2);
  const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(k), basis.size());
  const std::uint64_t count = subset_count(basis.size(), m);
  if (count > opts.support_cap)
    throw Error(Errc::SupportExplosion,
                std::to_string(count) + " dual blocks exceed the cap of " + std::to_string(opts.support_cap));
  const auto supports = subsets_lex(basis.size(), m);
  const GramSystem sys = GramSystem::build(p, basis);
  const std::size_t nm = sys.moments.size();

  // A monomial of p that no block sees pairs with -sign * x^u, and x^u is
  // unconstrained in the dual cone.
  {
    std::vector<bool> covered(nm, false);
    for (const auto& s : supports)
      for (std::size_t a : s)
        for (std::size_t b : s) covered[sys.moment_of(a, b)] = true;
    for (std::size_t u = 0; u < nm; ++u) {
      if (covered[u] || sys.target[u] == 0) continue;
      Form q = Form::monomial(sys.moments[u], sys.target[u] > 0 ? -1 : 1);
      if (auto w = detail::accept_witness(p, std::move(q), k)) {
        search.witness = std::move(w);
        search.status = SplitStatus::Converged;
        return search;
      }
    }
  }

  // Positive definite moment matrix: if it already pairs negatively, done.
  const Form interior = detail::interior_dual_form(n, p.degree());
  const Rational interior_pairing = fischer_inner(p, interior);
  if (interior_pairing < 0) {
    if (auto w = detail::accept_witness(p, interior, k)) {
      search.witness = std::move(w);
      search.status = SplitStatus::Converged;
      return search;
    }
  }

  std::vector<double> weight(nm);
  double wscale = 0.0;
  for (std::size_t u = 0; u < nm; ++u) {
    weight[u] = to_double(sys.target[u]);
    wscale = std::max(wscale, std::abs(weight[u]));
  }
  for (double& v : weight) v /= wscale;

  std::vector<std::vector<std::size_t>> entry_moment(supports.size());
  std::vector<double> counts(nm, 0.0);
  std::vector<std::size_t> sizes;
  for (std::size_t b = 0; b < supports.size(); ++b) {
    const auto& s = supports[b];
    sizes.push_back(s.size());
    for (std::size_t r = 0; r < s.size(); ++r)
      for (std::size_t c = 0; c < s.size(); ++c) {
        const std::size_t u = sys.moment_of(s[r], s[c]);
        entry_moment[b].push_back(u);
        counts[u] += 1.0;
      }
  }
  double weight_norm = 0.0;
  for (std::size_t u = 0; u < nm; ++u)
    if (counts[u] > 0) weight_norm += weight[u] * weight[u] / counts[u];
  if (weight_norm == 0.0) return search;

  // Projection onto {blocks = M_y restricted to S, <w, y> = -1}: average each
  // moment over its entries, then move along w (weighted by 1/count).
  std::vector<double> y(nm);
  auto affine = [&](std::vector<linalg::DenseMatrix> blocks) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& d = blocks[b].data();
      for (std::size_t e = 0; e < d.size(); ++e) y[entry_moment[b][e]] += d[e];
    }
    double inner = 0.0;
    for (std::size_t u = 0; u < nm; ++u) {
      if (counts[u] > 0) y[u] /= counts[u];
      inner += weight[u] * y[u];
    }
    const double lambda = (inner + 1.0) / weight_norm;
    for (std::size_t u = 0; u < nm; ++u)
      if (counts[u] > 0) y[u] -= lambda * weight[u] / counts[u];
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      auto& d = blocks[b].data();
      for (std::size_t e = 0; e < d.size(); ++e) d[e] = y[entry_moment[b][e]];
    }
    return blocks;
  };

  detail::SplitRun run =
      detail::run_splitting(detail::seeded_start(sizes, opts.seed ^ 0x9e3779b97f4a7c15ULL, 1.0), affine, opts, 0.0);
  search.status = run.status;
  search.iterations = run.iterations;
  search.residual = run.primal_residual;
  affine(run.z);  // y <- consensus moments of the final psd iterate

  // Push towards the interior with the positive definite form, keeping the
  // pairing negative, then round.
  double interior_max = 0.0;
  std::vector<double> y0(nm, 0.0);
  for (std::size_t u = 0; u < nm; ++u) {
    y0[u] = to_double(interior.coeff(sys.moments[u]));
    interior_max = std::max(interior_max, std::abs(y0[u]));
  }
  double y_pair = 0.0, y0_pair = 0.0;
  for (std::size_t u = 0; u < nm; ++u) {
    y0[u] /= interior_max;
    y_pair += weight[u] * y[u];
    y0_pair += weight[u] * y0[u];
  }
  std::vector<double> shifts{0.0};
  if (y_pair < 0 && y0_pair > 0) {
    const double tau_max = -y_pair / y0_pair;
    for (double f : {0.5, 0.25, 1.0 / 16, 1.0 / 64, 1.0 / 256}) shifts.push_back(f * tau_max);
  }
  for (double tau : shifts) {
    for (int bits = 10; bits <= 40; bits += 2) {
      const Integer bound = Integer(1) << bits;
      Form q(n, p.degree());
      for (std::size_t u = 0; u < nm; ++u) {
        const double v = y[u] + tau * y0[u];
        if (v != 0.0) q.add_normalized(sys.moments[u], best_rational(v, bound));
      }
      if (fischer_inner(p, q) >= 0) continue;
      if (auto w = detail::accept_witness(p, std::move(q), k)) {
        search.witness = std::move(w);
        return search;
      }
    }
  }
  return search;
}

inline std::optional<DualWitness> dual_witness_search(const Form& p, int k, const SolverOptions& opts = {}) {
  return dual_witness_search_detailed(p, k, opts).witness;
}

enum class MembershipStatus { Member, NotMember, Undecided };

inline const char* to_string(MembershipStatus s) {
  switch (s) {
    case MembershipStatus::Member: return "MEMBER";
    case MembershipStatus::NotMember: return "NOT_MEMBER";
    case MembershipStatus::Undecided: return "UNDECIDED";
  }
  return "?";
}

struct MembershipVerdict {
  MembershipStatus status = MembershipStatus::Undecided;
  int k = 0;
  std::optional<SosCertificate> certificate;  // set iff MEMBER
  std::optional<DualWitness> witness;         // set iff NOT_MEMBER
  std::optional<NumericCertificate> numeric_evidence;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

/// Decides p in the cone of sums of squares of forms with at most k terms.
/// MEMBER and NOT_MEMBER are returned only with exactly verified artifacts.
inline MembershipVerdict membership(const Form& p, int k, const SolverOptions& opts = {}) {
  opts.validate();
  detail::check_level(p, k);
  MembershipVerdict verdict;
  verdict.k = k;
  if (p.is_zero()) {
    verdict.status = MembershipStatus::Member;
    verdict.certificate = SosCertificate{k, {}, true};
    return verdict;
  }

  // Retry with an eigenvalue floor when the plain run converges but rounds
  // badly: interior solutions survive rounding.
  std::optional<FeasibilityResult> last;
  for (double margin_factor : {0.0, 1e-6, 1e-4, 1e-3}) {
    double scale = 0.0;
    for (const auto& [i, a] : p.coefficients()) scale = std::max(scale, std::abs(to_double(a * multinomial(i))));
    FeasibilityResult feas = detail::primal_splitting(p, k, opts, margin_factor * scale);
    verdict.iterations += feas.iterations;
    verdict.primal_residual = feas.primal_residual;
    verdict.dual_residual = feas.dual_residual;
    if (feas.status == SplitStatus::Infeasible) break;
    RoundingOutcome rounded = rationalize_and_verify(feas.gram, p, k);
    if (!rounded.certificate) {
      // Boundary solutions converge slowly; refine at the detected rank.
      const GramSystem sys = GramSystem::build(p, feas.gram.basis);
      for (double floor : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
        auto polished = detail::polish_low_rank(sys, feas.gram, floor);
        if (!polished) continue;
        rounded = rationalize_and_verify(*polished, p, k);
        if (rounded.certificate) break;
      }
    }
    if (rounded.certificate) {
      verdict.status = MembershipStatus::Member;
      verdict.certificate = std::move(rounded.certificate);
      break;
    }
    const bool converged = feas.status == SplitStatus::Converged;
    last = std::move(feas);
    if (!converged) break;
  }

  if (verdict.status != MembershipStatus::Member || opts.cross_check) {
    WitnessSearch dual = dual_witness_search_detailed(p, k, opts);
    verdict.iterations += dual.iterations;
    if (dual.witness) {
      if (verdict.status == MembershipStatus::Member)
        throw std::logic_error("verified certificate and verified dual witness for the same input");
      verdict.status = MembershipStatus::NotMember;
      verdict.witness = std::move(dual.witness);
    }
  }

  if (verdict.status == MembershipStatus::Undecided && last) {
    try {
      verdict.numeric_evidence = extract_certificate(last->gram, k);
    } catch (const Error&) {
    }
  }
  return verdict;
}

}  // namespace soskit
