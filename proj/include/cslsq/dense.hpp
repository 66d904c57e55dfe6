#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cslsq/csr.hpp"
#include "cslsq/vector.hpp"

namespace cslsq {

// Row-major dense matrix of 64-bit floats.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;  // rows*cols, row-major

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

struct SvdFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using EigenRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const EigenRowMajor> as_eigen(const DenseMatrix& M) {
  return {M.a.data(), static_cast<Eigen::Index>(M.rows),
          static_cast<Eigen::Index>(M.cols)};
}

inline DenseMatrix from_eigen(const Eigen::Ref<const Eigen::MatrixXd>& E) {
  DenseMatrix M(static_cast<std::size_t>(E.rows()),
                static_cast<std::size_t>(E.cols()));
  Eigen::Map<EigenRowMajor>(M.a.data(), E.rows(), E.cols()) = E;
  return M;
}

inline DenseMatrix densify(const CsrMatrix& A) {
  DenseMatrix D(A.rows, A.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p)
      D.at(i, A.col_idx[p]) = A.values[p];
  return D;
}

inline CsrMatrix csr_from_dense(const DenseMatrix& D) {
  CsrBuilder b(D.rows, D.cols);
  std::vector<std::pair<std::size_t, double>> row;
  for (std::size_t i = 0; i < D.rows; ++i) {
    row.clear();
    for (std::size_t j = 0; j < D.cols; ++j)
      if (D.at(i, j) != 0.0) row.emplace_back(j, D.at(i, j));
    b.add_row(row);
  }
  return b.take();
}

// Householder QR with thin Q (rows x cols) and square upper-triangular R.
// Sign convention: diagonal of R nonnegative, so the factorization is unique
// for full-rank input. Rank deficiency shows up as tiny/zero R diagonal and
// is left to the caller.
inline void dense_qr(const DenseMatrix& M, DenseMatrix& Q, DenseMatrix& R) {
  if (M.rows < M.cols) throw std::invalid_argument("dense_qr: rows < cols");
  const auto E = as_eigen(M);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(E);
  const auto n = static_cast<Eigen::Index>(M.cols);
  Eigen::MatrixXd thinQ =
      qr.householderQ() * Eigen::MatrixXd::Identity(E.rows(), n);
  Eigen::MatrixXd r =
      qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) {
      r.row(j) = -r.row(j);
      thinQ.col(j) = -thinQ.col(j);
    }
  }
  Q = from_eigen(thinQ);
  R = from_eigen(r);
}

// Thin SVD, singular values nonincreasing. Throws SvdFailure when the
// iteration does not converge.
inline void dense_svd(const DenseMatrix& M, DenseMatrix& U, Vector& sigma,
                      DenseMatrix& V) {
  if (M.rows < M.cols) throw std::invalid_argument("dense_svd: rows < cols");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(as_eigen(M),
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw SvdFailure("dense_svd: iteration failed to converge");
  U = from_eigen(svd.matrixU());
  V = from_eigen(svd.matrixV());
  const auto& s = svd.singularValues();
  std::vector<double> sv(s.data(), s.data() + s.size());
  sigma = Vector::from_raw(std::move(sv));
}

// sigma_max / sigma_min over singular values; +inf when sigma_min underflows.
inline double condition_number(const DenseMatrix& M) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(as_eigen(M));
  if (svd.info() != Eigen::Success)
    throw SvdFailure("condition_number: svd failed to converge");
  const auto& s = svd.singularValues();
  const double smax = s(0);
  if (!(smax > 1e-300))
    throw std::invalid_argument("condition_number: zero matrix");
  const double smin = s(s.size() - 1);
  if (smin <= 1e-300) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

}  // namespace cslsq
