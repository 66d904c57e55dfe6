#pragma once

// Shared test utilities: synthetic systems with prescribed spectra and a few
// dense conveniences. Header-only, test tree only.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cslsq/cslsq.hpp"

namespace testutil {

using cslsq::CsrMatrix;
using cslsq::DenseMatrix;
using cslsq::Rng;
using cslsq::Vector;

inline DenseMatrix gaussian_dense(std::size_t rows, std::size_t cols,
                                  Rng& rng) {
  DenseMatrix M(rows, cols);
  for (auto& v : M.a) v = rng.normal();
  return M;
}

// Orthonormal columns via QR of a Gaussian matrix.
inline DenseMatrix random_orthonormal(std::size_t rows, std::size_t cols,
                                      Rng& rng) {
  DenseMatrix Q, R;
  cslsq::dense_qr(gaussian_dense(rows, cols, rng), Q, R);
  return Q;
}

// Geometrically spaced spectrum from 1 down to 1/kappa.
inline std::vector<double> geometric_spectrum(std::size_t n, double kappa) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i)
    s[i] = std::pow(kappa, -static_cast<double>(i) /
                               static_cast<double>(n - 1));
  return s;
}

// A = U diag(sigma) V^T with Haar-ish U (m x n) and V (n x n).
inline DenseMatrix dense_with_spectrum(std::size_t m, std::size_t n,
                                       const std::vector<double>& sigma,
                                       std::uint64_t seed) {
  if (sigma.size() != n) throw std::invalid_argument("spectrum length != n");
  Rng rng(seed);
  const DenseMatrix U = random_orthonormal(m, n, rng);
  const DenseMatrix V = random_orthonormal(n, n, rng);
  DenseMatrix A(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        acc += U.at(i, k) * sigma[k] * V.at(j, k);
      A.at(i, j) = acc;
    }
  return A;
}

inline CsrMatrix synthetic_with_spectrum(std::size_t m, std::size_t n,
                                         const std::vector<double>& sigma,
                                         std::uint64_t seed) {
  return cslsq::csr_from_dense(dense_with_spectrum(m, n, sigma, seed));
}

inline CsrMatrix synthetic_kappa(std::size_t m, std::size_t n, double kappa,
                                 std::uint64_t seed) {
  return synthetic_with_spectrum(m, n, geometric_spectrum(n, kappa), seed);
}

// Rank-r matrix: r prescribed-spectrum columns followed by bitwise
// duplicates of them (n - r <= r).
inline CsrMatrix synthetic_rank_deficient(std::size_t m, std::size_t n,
                                          std::size_t r, double kappa,
                                          std::uint64_t seed) {
  if (n < r || n - r > r) throw std::invalid_argument("need r <= n <= 2r");
  DenseMatrix base = dense_with_spectrum(m, r, geometric_spectrum(r, kappa),
                                         seed);
  DenseMatrix A(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < r; ++j) A.at(i, j) = base.at(i, j);
    for (std::size_t j = r; j < n; ++j) A.at(i, j) = base.at(i, j - r);
  }
  return cslsq::csr_from_dense(A);
}

inline Vector gaussian_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return Vector::from_raw(std::move(v));
}

// b = A x* (consistent) or b = A x* + noise * ||Ax*|| * w/||w|| (inconsistent).
inline Vector make_rhs(const CsrMatrix& A, std::uint64_t seed,
                       double noise = 0.0) {
  const Vector xs = gaussian_vector(A.cols, seed);
  Vector b = spmv(A, xs);
  if (noise > 0.0) {
    const Vector w = gaussian_vector(A.rows, seed ^ 0x9e3779b97f4a7c15ULL);
    const double scale = noise * norm2(b) / norm2(w);
    std::vector<double> out(b.data(), b.data() + b.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += scale * w[i];
    return Vector::from_raw(std::move(out));
  }
  return b;
}

inline double residual_norm(const CsrMatrix& A, const Vector& x,
                            const Vector& b) {
  const Vector ax = spmv(A, x);
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double d = b[i] - ax[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Identity padded with zero rows to the requested height.
inline CsrMatrix padded_identity(std::size_t n, std::size_t m) {
  CsrMatrix A;
  A.rows = m;
  A.cols = n;
  A.row_ptr.assign(m + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    A.col_idx.push_back(i);
    A.values.push_back(1.0);
  }
  for (std::size_t i = 0; i < m; ++i)
    A.row_ptr[i + 1] = i < n ? i + 1 : n;
  return A;
}

}  // namespace testutil
