#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace soskit::linalg {

/// Dense row-major square matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  std::vector<double>& data() noexcept { return a_; }
  const std::vector<double>& data() const noexcept { return a_; }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

struct SymmetricEigen {
  std::vector<double> values;
  DenseMatrix vectors;  // column k is the eigenvector of values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi rotations on a symmetric matrix. Stops once the
/// off-diagonal Frobenius norm drops below 1e-14 times the Frobenius norm
/// of the input (or the off-diagonal part vanishes).
inline SymmetricEigen jacobi_eigen(DenseMatrix a, int max_sweeps = 100) {
  const std::size_t n = a.size();
  SymmetricEigen out{std::vector<double>(n), DenseMatrix::identity(n), 0};
  DenseMatrix& v = out.vectors;

  double total = 0.0;
  for (double x : a.data()) total += x * x;
  const double threshold = 1e-14 * std::sqrt(total);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(s);
  };

  while (out.sweeps < max_sweeps) {
    const double off = off_norm();
    if (off == 0.0 || off <= threshold) break;
    ++out.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double app = a(p, p), aqq = a(q, q);
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
          if (r == p || r == q) continue;
          const double arp = a(r, p), arq = a(r, q);
          a(p, r) = a(r, p) = arp - s * (arq + tau * arp);
          a(q, r) = a(r, q) = arq + s * (arp - tau * arq);
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  return out;
}

/// Frobenius-nearest matrix with all eigenvalues >= floor.
inline DenseMatrix project_psd(const DenseMatrix& a, double floor = 0.0) {
  const std::size_t n = a.size();
  if (n == 1) {
    DenseMatrix out(1);
    out(0, 0) = std::max(a(0, 0), floor);
    return out;
  }
  const SymmetricEigen eig = jacobi_eigen(a);
  DenseMatrix out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = std::max(eig.values[k], floor);
    if (lambda == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double vi = lambda * eig.vectors(i, k);
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vi * eig.vectors(j, k);
    }
  }
  return out;
}

}  // namespace soskit::linalg

namespace soskit::linalg {

/// Solves A x = b for symmetric positive definite A by Cholesky. Returns
/// false when a pivot is not positive.
inline bool cholesky_solve(DenseMatrix a, std::vector<double>& b) {
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > 0.0)) return false;
    a(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / a(j, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a(i, k) * b[k];
    b[i] = s / a(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a(k, i) * b[k];
    b[i] = s / a(i, i);
  }
  return true;
}

}  // namespace soskit::linalg
