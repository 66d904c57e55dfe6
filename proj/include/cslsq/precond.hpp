#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "cslsq/count_sketch.hpp"
#include "cslsq/csr.hpp"
#include "cslsq/dense.hpp"
#include "cslsq/vector.hpp"

namespace cslsq {

// Numerically rank-deficient input to the QR preconditioner. Callers are
// expected to catch this and fall back to the SVD preconditioner.
struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QrPreconditioner {
  DenseMatrix R;  // n x n upper triangular, nonnegative diagonal
  DenseMatrix Q;  // s x n, thin factor kept for the warm start
};

struct SvdPreconditioner {
  DenseMatrix P;               // n x r, columns v_i / sigma_i
  std::size_t effective_rank;  // r
  double rcond;                // truncation constant used
  Vector sigma;                // retained singular values, nonincreasing
  DenseMatrix U;               // s x r
};

using Preconditioner = std::variant<QrPreconditioner, SvdPreconditioner>;

inline std::size_t pre_cols(const QrPreconditioner& pre) {
  return pre.R.cols;
}
inline std::size_t pre_cols(const SvdPreconditioner& pre) {
  return pre.P.cols;
}
inline std::size_t pre_cols(const Preconditioner& pre) {
  return std::visit([](const auto& p) { return pre_cols(p); }, pre);
}

// Solve R z = y for upper-triangular R (back-substitution).
inline std::vector<double> solve_upper(const DenseMatrix& R,
                                       const double* y) {
  const std::size_t n = R.cols;
  std::vector<double> z(y, y + n);
  for (std::size_t ii = n; ii-- > 0;) {
    const double* row = &R.a[ii * n];
    double acc = z[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc -= row[j] * z[j];
    if (row[ii] == 0.0)
      throw std::runtime_error("triangular solve: zero diagonal");
    z[ii] = acc / row[ii];
  }
  return z;
}

// Solve R^T z = y using R's upper-triangular storage (forward substitution).
inline std::vector<double> solve_upper_t(const DenseMatrix& R,
                                         const double* y) {
  const std::size_t n = R.cols;
  std::vector<double> z(y, y + n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = z[i];
    for (std::size_t k = 0; k < i; ++k) acc -= R.a[k * n + i] * z[k];
    const double d = R.a[i * n + i];
    if (d == 0.0) throw std::runtime_error("triangular solve: zero diagonal");
    z[i] = acc / d;
  }
  return z;
}

inline QrPreconditioner build_qr_precond(const DenseMatrix& A_sketched,
                                         double diag_tol = 1e-14) {
  QrPreconditioner pre;
  dense_qr(A_sketched, pre.Q, pre.R);
  const std::size_t n = pre.R.cols;
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(pre.R.at(i, i));
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  if (dmin <= diag_tol * dmax)
    throw RankDeficient("build_qr_precond: sketched matrix numerically "
                        "rank-deficient (R diagonal collapse)");
  return pre;
}

inline SvdPreconditioner build_svd_precond(const DenseMatrix& A_sketched,
                                           double rcond = 1e-12) {
  if (!(rcond > 0.0 && rcond < 1.0))
    throw std::invalid_argument("build_svd_precond: rcond must be in (0,1)");
  DenseMatrix U, V;
  Vector sigma;
  dense_svd(A_sketched, U, sigma, V);
  const double thresh = rcond * sigma[0];
  std::size_t r = 0;
  while (r < sigma.size() && sigma[r] > thresh) ++r;
  if (r == 0)
    throw std::runtime_error(
        "build_svd_precond: all singular values below rcond threshold");
  SvdPreconditioner pre;
  pre.effective_rank = r;
  pre.rcond = rcond;
  pre.P = DenseMatrix(A_sketched.cols, r);
  for (std::size_t i = 0; i < A_sketched.cols; ++i)
    for (std::size_t j = 0; j < r; ++j)
      pre.P.at(i, j) = V.at(i, j) / sigma[j];
  pre.U = DenseMatrix(A_sketched.rows, r);
  for (std::size_t i = 0; i < A_sketched.rows; ++i)
    for (std::size_t j = 0; j < r; ++j) pre.U.at(i, j) = U.at(i, j);
  std::vector<double> kept(sigma.data(), sigma.data() + r);
  pre.sigma = Vector::from_raw(std::move(kept));
  return pre;
}

// B = A * R^{-1}, generated column by column: column j is A * (R^{-1} e_j).
inline DenseMatrix form_explicit(const CsrMatrix& A,
                                 const QrPreconditioner& pre) {
  const std::size_t n = pre.R.cols;
  if (A.cols != n)
    throw std::invalid_argument("form_explicit: dimension mismatch");
  DenseMatrix B(A.rows, n);
  std::vector<double> ej(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    ej[j] = 1.0;
    const std::vector<double> w = solve_upper(pre.R, ej.data());
    ej[j] = 0.0;
    for (std::size_t i = 0; i < A.rows; ++i) {
      double acc = 0.0;
      for (std::size_t p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p)
        acc += A.values[p] * w[A.col_idx[p]];
      B.at(i, j) = acc;
    }
  }
  return B;
}

// B = A * P, column by column.
inline DenseMatrix form_explicit(const CsrMatrix& A,
                                 const SvdPreconditioner& pre) {
  if (A.cols != pre.P.rows)
    throw std::invalid_argument("form_explicit: dimension mismatch");
  const std::size_t r = pre.P.cols;
  DenseMatrix B(A.rows, r);
  std::vector<double> w(A.cols);
  for (std::size_t j = 0; j < r; ++j) {
    for (std::size_t k = 0; k < A.cols; ++k) w[k] = pre.P.at(k, j);
    for (std::size_t i = 0; i < A.rows; ++i) {
      double acc = 0.0;
      for (std::size_t p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p)
        acc += A.values[p] * w[A.col_idx[p]];
      B.at(i, j) = acc;
    }
  }
  return B;
}

inline DenseMatrix form_explicit(const CsrMatrix& A,
                                 const Preconditioner& pre) {
  return std::visit([&](const auto& p) { return form_explicit(A, p); }, pre);
}

// A * (R^{-1} y) without forming B.
inline Vector apply_implicit(const QrPreconditioner& pre, const CsrMatrix& A,
                             const Vector& y) {
  if (y.size() != pre.R.cols || A.cols != pre.R.cols)
    throw std::invalid_argument("apply_implicit: dimension mismatch");
  const std::vector<double> z = solve_upper(pre.R, y.data());
  return spmv(A, Vector::from_raw(std::vector<double>(z)));
}

// R^{-T} (A^T u).
inline Vector apply_implicit_t(const QrPreconditioner& pre, const CsrMatrix& A,
                               const Vector& u) {
  const Vector w = spmv_t(A, u);
  std::vector<double> z = solve_upper_t(pre.R, w.data());
  return Vector::from_raw(std::move(z));
}

// A * (P y).
inline Vector apply_implicit(const SvdPreconditioner& pre, const CsrMatrix& A,
                             const Vector& y) {
  if (y.size() != pre.P.cols || A.cols != pre.P.rows)
    throw std::invalid_argument("apply_implicit: dimension mismatch");
  std::vector<double> z(pre.P.rows, 0.0);
  for (std::size_t i = 0; i < pre.P.rows; ++i) {
    const double* row = &pre.P.a[i * pre.P.cols];
    double acc = 0.0;
    for (std::size_t j = 0; j < pre.P.cols; ++j) acc += row[j] * y[j];
    z[i] = acc;
  }
  return spmv(A, Vector::from_raw(std::move(z)));
}

// P^T (A^T u).
inline Vector apply_implicit_t(const SvdPreconditioner& pre, const CsrMatrix& A,
                               const Vector& u) {
  const Vector w = spmv_t(A, u);
  std::vector<double> z(pre.P.cols, 0.0);
  for (std::size_t i = 0; i < pre.P.rows; ++i) {
    const double* row = &pre.P.a[i * pre.P.cols];
    for (std::size_t j = 0; j < pre.P.cols; ++j) z[j] += row[j] * w[i];
  }
  return Vector::from_raw(std::move(z));
}

// Map the preconditioned solution back: x = R^{-1} y.
inline Vector recover_solution(const QrPreconditioner& pre, const Vector& y) {
  if (y.size() != pre.R.cols)
    throw std::invalid_argument("recover_solution: length mismatch");
  std::vector<double> x = solve_upper(pre.R, y.data());
  return Vector::from_raw(std::move(x));
}

// x = P y.
inline Vector recover_solution(const SvdPreconditioner& pre, const Vector& y) {
  if (y.size() != pre.P.cols)
    throw std::invalid_argument("recover_solution: length mismatch");
  std::vector<double> x(pre.P.rows, 0.0);
  for (std::size_t i = 0; i < pre.P.rows; ++i) {
    const double* row = &pre.P.a[i * pre.P.cols];
    double acc = 0.0;
    for (std::size_t j = 0; j < pre.P.cols; ++j) acc += row[j] * y[j];
    x[i] = acc;
  }
  return Vector::from_raw(std::move(x));
}

inline Vector recover_solution(const Preconditioner& pre, const Vector& y) {
  return std::visit([&](const auto& p) { return recover_solution(p, y); },
                    pre);
}

// y0 = Q^T (S b): the natural initial guess for the preconditioned system,
// exact when b lies in range(A) and the sketch is benign.
inline Vector warm_start(const QrPreconditioner& pre, const CountSketch& S,
                         const Vector& b) {
  if (b.size() != S.m || pre.Q.rows != S.s)
    throw std::invalid_argument("warm_start: dimension mismatch");
  const Vector sb = apply_to_vector(S, b);
  std::vector<double> y(pre.Q.cols, 0.0);
  for (std::size_t i = 0; i < pre.Q.rows; ++i) {
    const double* row = &pre.Q.a[i * pre.Q.cols];
    for (std::size_t j = 0; j < pre.Q.cols; ++j) y[j] += row[j] * sb[i];
  }
  return Vector::from_raw(std::move(y));
}

// Groups a formed system for the solver layer: either the explicit dense B
// or the (A, preconditioner) pair applied on the fly.
enum class PrecondMode { kExplicit, kImplicit };

struct PreconditionedSystem {
  PrecondMode mode = PrecondMode::kExplicit;
  std::optional<DenseMatrix> B;  // explicit mode only
  const CsrMatrix* A = nullptr;  // implicit mode operand
  Preconditioner pre;
  Vector b;
};

}  // namespace cslsq
