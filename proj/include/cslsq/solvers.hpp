#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cslsq/count_sketch.hpp"
#include "cslsq/csr.hpp"
#include "cslsq/dense.hpp"
#include "cslsq/precond.hpp"
#include "cslsq/vector.hpp"

namespace cslsq {

// Abstract matrix application: anything that can do y -> By and u -> B^T u.
struct LinearOperator {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::function<Vector(const Vector&)> forward;
  std::function<Vector(const Vector&)> adjoint;
};

inline LinearOperator operator_from_dense(DenseMatrix B) {
  auto M = std::make_shared<DenseMatrix>(std::move(B));
  LinearOperator op;
  op.rows = M->rows;
  op.cols = M->cols;
  op.forward = [M](const Vector& y) {
    if (y.size() != M->cols)
      throw std::invalid_argument("operator: forward length mismatch");
    std::vector<double> out(M->rows, 0.0);
    for (std::size_t i = 0; i < M->rows; ++i) {
      const double* row = &M->a[i * M->cols];
      double acc = 0.0;
      for (std::size_t j = 0; j < M->cols; ++j) acc += row[j] * y[j];
      out[i] = acc;
    }
    return Vector::from_raw(std::move(out));
  };
  op.adjoint = [M](const Vector& u) {
    if (u.size() != M->rows)
      throw std::invalid_argument("operator: adjoint length mismatch");
    std::vector<double> out(M->cols, 0.0);
    for (std::size_t i = 0; i < M->rows; ++i) {
      const double* row = &M->a[i * M->cols];
      for (std::size_t j = 0; j < M->cols; ++j) out[j] += row[j] * u[i];
    }
    return Vector::from_raw(std::move(out));
  };
  return op;
}

inline LinearOperator operator_from_csr(CsrMatrix A) {
  auto M = std::make_shared<CsrMatrix>(std::move(A));
  LinearOperator op;
  op.rows = M->rows;
  op.cols = M->cols;
  op.forward = [M](const Vector& y) { return spmv(*M, y); };
  op.adjoint = [M](const Vector& u) { return spmv_t(*M, u); };
  return op;
}

// Preconditioned operator applied on the fly: y -> A (R^{-1} y) or A (P y).
template <class Pre>
LinearOperator operator_from_implicit(std::shared_ptr<const CsrMatrix> A,
                                      std::shared_ptr<const Pre> pre) {
  LinearOperator op;
  op.rows = A->rows;
  op.cols = pre_cols(*pre);
  op.forward = [A, pre](const Vector& y) {
    return apply_implicit(*pre, *A, y);
  };
  op.adjoint = [A, pre](const Vector& u) {
    return apply_implicit_t(*pre, *A, u);
  };
  return op;
}

struct SolveOptions {
  double tau = 1e-8;
  std::size_t max_iter = 0;        // 0 means "number of columns"
  std::optional<Vector> initial;   // starting iterate for the lsqr core
  bool record_history = false;
  bool use_warm_start = false;     // composed methods: y0 = Q^T (S b)
  bool compute_kappa_B = false;    // composed methods: report cond(B)
};

enum class StopReason {
  kResidualTol,   // compatible-system test hit
  kLsTol,         // least-squares optimality test hit
  kMaxIter,
  kBreakdown,     // bidiagonalization underflow; iterate is converged
  kZeroRhs,
};

struct SolveReport {
  Vector x;
  std::size_t iterations = 0;
  double relative_residual = 0.0;   // ||b - Ax|| / ||b||
  double relative_ls_error = 0.0;   // ||b - Ax||^2 / ||b||^2
  std::optional<std::vector<double>> residual_history;
  double precond_time = 0.0;        // seconds
  double solve_time = 0.0;          // seconds
  std::optional<double> kappa_B;
  std::optional<std::size_t> effective_rank;  // SVD pipelines only
  StopReason stop_reason = StopReason::kResidualTol;
};

namespace detail {

inline double nrm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace detail

// Paige–Saunders LSQR on the operator B. Starting from a nonzero initial
// iterate solves the shifted problem min ||B d - (b - B x0)|| and returns
// x0 + d. Stopping mirrors the standard two tests with atol = btol = tau:
//   ||r||      <= tau * (||B|| ||x|| + ||b||)      (compatible system)
//   ||B^T r||  <= tau * ||B|| ||r||                (least-squares optimum)
inline SolveReport lsqr(const LinearOperator& B, const Vector& b,
                        const SolveOptions& opts = {}) {
  if (b.size() != B.rows)
    throw std::invalid_argument("lsqr: rhs length mismatch");
  if (!(opts.tau > 0.0)) throw std::invalid_argument("lsqr: tau must be > 0");
  const std::size_t n = B.cols;
  const std::size_t max_iter = opts.max_iter == 0 ? n : opts.max_iter;
  if (max_iter < 1) throw std::invalid_argument("lsqr: max_iter must be >= 1");

  const auto t0 = detail::Clock::now();
  SolveReport rep;
  if (opts.record_history) rep.residual_history.emplace();

  std::vector<double> x(n, 0.0);
  std::vector<double> u(b.data(), b.data() + b.size());
  if (opts.initial) {
    if (opts.initial->size() != n)
      throw std::invalid_argument("lsqr: initial length mismatch");
    x.assign(opts.initial->data(), opts.initial->data() + n);
    const Vector bx0 = B.forward(*opts.initial);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] -= bx0[i];
  }

  const double bnorm = norm2(b);
  auto finish = [&](StopReason why, std::size_t iters) {
    rep.stop_reason = why;
    rep.iterations = iters;
    rep.x = Vector::from_raw(std::move(x));
    const Vector r = B.forward(rep.x);
    double rn = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double d = b[i] - r[i];
      rn += d * d;
    }
    rn = std::sqrt(rn);
    rep.relative_residual = bnorm > 0.0 ? rn / bnorm : 0.0;
    rep.relative_ls_error =
        bnorm > 0.0 ? (rn * rn) / (bnorm * bnorm) : 0.0;
    rep.solve_time = detail::seconds_since(t0);
    return rep;
  };

  double beta = detail::nrm2(u);
  if (beta == 0.0 && !opts.initial) return finish(StopReason::kZeroRhs, 0);
  if (beta == 0.0) return finish(StopReason::kResidualTol, 0);
  for (auto& ui : u) ui /= beta;

  Vector vt = B.adjoint(Vector::from_raw(std::vector<double>(u)));
  std::vector<double> v(vt.data(), vt.data() + vt.size());
  double alpha = detail::nrm2(v);
  if (alpha == 0.0) return finish(StopReason::kBreakdown, 0);
  for (auto& vi : v) vi /= alpha;

  std::vector<double> w = v;
  double phibar = beta;
  double rhobar = alpha;
  double anorm = 0.0;  // running Frobenius-norm estimate of B

  for (std::size_t k = 1; k <= max_iter; ++k) {
    // Bidiagonalization step: next u, beta, then next v, alpha.
    {
      const Vector bv = B.forward(Vector::from_raw(std::vector<double>(v)));
      for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = bv[i] - alpha * u[i];
    }
    const double beta_next = detail::nrm2(u);
    bool breakdown = false;
    if (beta_next > 0.0) {
      for (auto& ui : u) ui /= beta_next;
      anorm = std::sqrt(anorm * anorm + alpha * alpha + beta_next * beta_next);
      const Vector btu =
          B.adjoint(Vector::from_raw(std::vector<double>(u)));
      for (std::size_t j = 0; j < v.size(); ++j)
        v[j] = btu[j] - beta_next * v[j];
      const double alpha_next = detail::nrm2(v);
      if (alpha_next > 0.0) {
        for (auto& vi : v) vi /= alpha_next;
      } else {
        breakdown = true;
      }
      alpha = alpha_next;
    } else {
      breakdown = true;
    }

    // Givens rotation zeroing the new subdiagonal entry.
    const double rho = std::hypot(rhobar, beta_next);
    const double c = rhobar / rho;
    const double s = beta_next / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;

    const double t1 = phi / rho;
    const double t2 = -theta / rho;
    for (std::size_t j = 0; j < n; ++j) {
      x[j] += t1 * w[j];
      w[j] = v[j] + t2 * w[j];
    }

    const double rnorm = phibar;                    // ||b - B x_k|| estimate
    const double arnorm = alpha * std::abs(s * phi);  // ||B^T r_k|| estimate
    if (rep.residual_history) rep.residual_history->push_back(rnorm);

    const double xnorm = detail::nrm2(x);
    if (breakdown) return finish(StopReason::kBreakdown, k);
    if (rnorm <= opts.tau * (bnorm + anorm * xnorm))
      return finish(StopReason::kResidualTol, k);
    if (anorm > 0.0 && rnorm > 0.0 && arnorm <= opts.tau * anorm * rnorm)
      return finish(StopReason::kLsTol, k);
  }
  return finish(StopReason::kMaxIter, max_iter);
}

// Dense Householder-QR least squares; the accuracy oracle for the iterative
// methods at moderate size.
inline SolveReport direct_dense_ls(const CsrMatrix& A, const Vector& b,
                                   double diag_tol = 1e-14) {
  if (b.size() != A.rows)
    throw std::invalid_argument("direct_dense_ls: rhs length mismatch");
  if (A.rows < A.cols)
    throw std::invalid_argument("direct_dense_ls: underdetermined system");
  const auto t0 = detail::Clock::now();
  DenseMatrix Q, R;
  dense_qr(densify(A), Q, R);
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  for (std::size_t i = 0; i < R.cols; ++i) {
    const double d = std::abs(R.at(i, i));
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  if (dmin <= diag_tol * dmax)
    throw RankDeficient("direct_dense_ls: numerically rank-deficient matrix");
  std::vector<double> qtb(A.cols, 0.0);
  for (std::size_t i = 0; i < Q.rows; ++i) {
    const double* row = &Q.a[i * Q.cols];
    for (std::size_t j = 0; j < Q.cols; ++j) qtb[j] += row[j] * b[i];
  }
  SolveReport rep;
  rep.x = Vector::from_raw(solve_upper(R, qtb.data()));
  const Vector ax = spmv(A, rep.x);
  double rn = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double d = b[i] - ax[i];
    rn += d * d;
  }
  const double bn = norm2(b);
  rep.relative_residual = bn > 0.0 ? std::sqrt(rn) / bn : 0.0;
  rep.relative_ls_error = bn > 0.0 ? rn / (bn * bn) : 0.0;
  rep.solve_time = detail::seconds_since(t0);
  return rep;
}

// Minimum iteration count guaranteeing the preconditioned-LSQR error bound
// at tolerance tau under embedding distortion epsilon.
inline std::size_t iteration_bound(double tau, double epsilon) {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("iteration_bound: tau must be in (0,1)");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("iteration_bound: epsilon must be in (0,1)");
  const double k =
      (std::log(2.0) + std::abs(std::log(tau))) / std::abs(std::log(epsilon));
  return static_cast<std::size_t>(std::ceil(k));
}

namespace detail {

inline void check_sketch_pre(const CsrMatrix& A, double gamma) {
  if (A.cols == 0) throw std::invalid_argument("solver: empty matrix");
  if (!(gamma > 1.0))
    throw std::invalid_argument("solver: gamma must be > 1");
  if (static_cast<double>(A.rows) <= gamma * static_cast<double>(A.cols))
    throw std::invalid_argument(
        "solver: need rows > gamma * cols so the sketch shrinks the system");
}

inline std::size_t sketch_rows(const CsrMatrix& A, double gamma) {
  return static_cast<std::size_t>(
      std::ceil(gamma * static_cast<double>(A.cols)));
}

// Shared tail of the four composed methods: run LSQR, map back, re-measure
// the residual against the original system.
template <class Pre>
SolveReport run_composed(const CsrMatrix& A, const Vector& b, const Pre& pre,
                         const LinearOperator& op,
                         const std::optional<DenseMatrix>& B_for_kappa,
                         const SolveOptions& opts, double precond_time,
                         std::optional<Vector> initial) {
  SolveOptions inner = opts;
  inner.initial = std::move(initial);
  if (inner.max_iter == 0) inner.max_iter = op.cols;
  const auto t0 = Clock::now();
  SolveReport rep = lsqr(op, b, inner);
  const Vector y = rep.x;
  rep.x = recover_solution(pre, y);
  rep.solve_time = seconds_since(t0);
  rep.precond_time = precond_time;
  const Vector ax = spmv(A, rep.x);
  double rn = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double d = b[i] - ax[i];
    rn += d * d;
  }
  const double bn = norm2(b);
  rep.relative_residual = bn > 0.0 ? std::sqrt(rn) / bn : 0.0;
  rep.relative_ls_error = bn > 0.0 ? rn / (bn * bn) : 0.0;
  if (opts.compute_kappa_B && B_for_kappa)
    rep.kappa_B = condition_number(*B_for_kappa);
  return rep;
}

}  // namespace detail

// Sketch -> QR -> explicit B = A R^{-1} -> LSQR -> x = R^{-1} y.
inline SolveReport csqrp_lsqr(const CsrMatrix& A, const Vector& b,
                              double gamma, std::uint64_t seed,
                              const SolveOptions& opts = {},
                              double diag_tol = 1e-14) {
  detail::check_sketch_pre(A, gamma);
  const auto t0 = detail::Clock::now();
  const CountSketch S = new_count_sketch(detail::sketch_rows(A, gamma),
                                         A.rows, seed);
  const QrPreconditioner pre = build_qr_precond(apply_left(S, A), diag_tol);
  DenseMatrix B = form_explicit(A, pre);
  const double ptime = detail::seconds_since(t0);
  std::optional<Vector> init;
  if (opts.use_warm_start) init = warm_start(pre, S, b);
  std::optional<DenseMatrix> Bk;
  if (opts.compute_kappa_B) Bk = B;
  const LinearOperator op = operator_from_dense(std::move(B));
  return detail::run_composed(A, b, pre, op, Bk, opts, ptime,
                              std::move(init));
}

// Sketch -> truncated SVD -> explicit B = A P -> LSQR -> x = P y.
inline SolveReport cssvdp_lsqr(const CsrMatrix& A, const Vector& b,
                               double gamma, double rcond, std::uint64_t seed,
                               const SolveOptions& opts = {}) {
  detail::check_sketch_pre(A, gamma);
  const auto t0 = detail::Clock::now();
  const CountSketch S = new_count_sketch(detail::sketch_rows(A, gamma),
                                         A.rows, seed);
  const SvdPreconditioner pre = build_svd_precond(apply_left(S, A), rcond);
  DenseMatrix B = form_explicit(A, pre);
  const double ptime = detail::seconds_since(t0);
  std::optional<DenseMatrix> Bk;
  if (opts.compute_kappa_B) Bk = B;
  const LinearOperator op = operator_from_dense(std::move(B));
  SolveReport rep =
      detail::run_composed(A, b, pre, op, Bk, opts, ptime, std::nullopt);
  rep.effective_rank = pre.effective_rank;
  return rep;
}

// Same pipeline as csqrp_lsqr but LSQR applies A and R^{-1} separately each
// iteration instead of forming B.
inline SolveReport csqr_plsqr(const CsrMatrix& A, const Vector& b,
                              double gamma, std::uint64_t seed,
                              const SolveOptions& opts = {},
                              double diag_tol = 1e-14) {
  detail::check_sketch_pre(A, gamma);
  const auto t0 = detail::Clock::now();
  const CountSketch S = new_count_sketch(detail::sketch_rows(A, gamma),
                                         A.rows, seed);
  auto pre = std::make_shared<QrPreconditioner>(
      build_qr_precond(apply_left(S, A), diag_tol));
  const double ptime = detail::seconds_since(t0);
  std::optional<Vector> init;
  if (opts.use_warm_start) init = warm_start(*pre, S, b);
  auto Ap = std::make_shared<const CsrMatrix>(A);
  const LinearOperator op =
      operator_from_implicit<QrPreconditioner>(Ap, pre);
  std::optional<DenseMatrix> Bk;
  if (opts.compute_kappa_B) Bk = form_explicit(A, *pre);
  return detail::run_composed(A, b, *pre, op, Bk, opts, ptime,
                              std::move(init));
}

inline SolveReport cssvd_plsqr(const CsrMatrix& A, const Vector& b,
                               double gamma, double rcond, std::uint64_t seed,
                               const SolveOptions& opts = {}) {
  detail::check_sketch_pre(A, gamma);
  const auto t0 = detail::Clock::now();
  const CountSketch S = new_count_sketch(detail::sketch_rows(A, gamma),
                                         A.rows, seed);
  auto pre = std::make_shared<SvdPreconditioner>(
      build_svd_precond(apply_left(S, A), rcond));
  const double ptime = detail::seconds_since(t0);
  auto Ap = std::make_shared<const CsrMatrix>(A);
  const LinearOperator op =
      operator_from_implicit<SvdPreconditioner>(Ap, pre);
  std::optional<DenseMatrix> Bk;
  if (opts.compute_kappa_B) Bk = form_explicit(A, *pre);
  SolveReport rep =
      detail::run_composed(A, b, *pre, op, Bk, opts, ptime, std::nullopt);
  rep.effective_rank = pre->effective_rank;
  return rep;
}

}  // namespace cslsq
