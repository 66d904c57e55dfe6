#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cslsq/csr.hpp"
#include "cslsq/dense.hpp"
#include "cslsq/rng.hpp"
#include "cslsq/vector.hpp"

namespace cslsq {

// Count sketch S = Phi * D: each of the m input rows is hashed to one of s
// buckets and multiplied by a random sign. S is never materialized; we keep
// the bucket map and the signs and stream over the input.
struct CountSketch {
  std::size_t s = 0;  // sketch rows
  std::size_t m = 0;  // input rows
  std::vector<std::uint32_t> bucket;  // size m, values in [0, s)
  std::vector<std::int8_t> sign;      // size m, +1 or -1
};

// Draw order is part of the reproducibility contract: all m bucket indices
// first (next() % s), then all m signs (top bit of next()).
inline CountSketch new_count_sketch(std::size_t s, std::size_t m,
                                    std::uint64_t seed) {
  if (s < 1 || s > m)
    throw std::invalid_argument("new_count_sketch: need 1 <= s <= m");
  CountSketch S;
  S.s = s;
  S.m = m;
  S.bucket.resize(m);
  S.sign.resize(m);
  Rng rng(seed);
  for (std::size_t i = 0; i < m; ++i)
    S.bucket[i] = static_cast<std::uint32_t>(rng.bounded(s));
  for (std::size_t i = 0; i < m; ++i)
    S.sign[i] = (rng.next() >> 63) ? std::int8_t{-1} : std::int8_t{1};
  return S;
}

// SA in one pass over the nonzeros of A; result is dense s x n. Collisions
// accumulate additively into the bucket row.
inline DenseMatrix apply_left(const CountSketch& S, const CsrMatrix& A) {
  if (A.rows != S.m)
    throw std::invalid_argument("apply_left: sketch built for different m");
  DenseMatrix SA(S.s, A.cols);
  for (std::size_t i = 0; i < A.rows; ++i) {
    const double sg = static_cast<double>(S.sign[i]);
    double* out = &SA.a[static_cast<std::size_t>(S.bucket[i]) * A.cols];
    for (std::size_t p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p)
      out[A.col_idx[p]] += sg * A.values[p];
  }
  return SA;
}

inline Vector apply_to_vector(const CountSketch& S, const Vector& v) {
  if (v.size() != S.m)
    throw std::invalid_argument("apply_to_vector: length mismatch");
  std::vector<double> out(S.s, 0.0);
  for (std::size_t i = 0; i < S.m; ++i)
    out[S.bucket[i]] += static_cast<double>(S.sign[i]) * v[i];
  return Vector::from_raw(std::move(out));
}

// Samples the embedding quality of S on range(A): over `trials` random unit
// directions x, returns the min and max of ||SAx||^2 / ||Ax||^2. Directions
// with Ax = 0 are skipped. Sampling lower-bounds the true sup-distortion.
inline std::pair<double, double> embedding_distortion(const CountSketch& S,
                                                      const CsrMatrix& A,
                                                      std::size_t trials,
                                                      std::uint64_t seed) {
  if (trials < 1)
    throw std::invalid_argument("embedding_distortion: trials < 1");
  const DenseMatrix SA = apply_left(S, A);
  Rng rng(seed);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool any = false;
  std::vector<double> x(A.cols), ax(A.rows);
  for (std::size_t t = 0; t < trials; ++t) {
    double nx = 0.0;
    for (auto& xi : x) {
      xi = rng.normal();
      nx += xi * xi;
    }
    if (nx == 0.0) continue;
    const double inv = 1.0 / std::sqrt(nx);
    for (auto& xi : x) xi *= inv;
    std::fill(ax.begin(), ax.end(), 0.0);
    for (std::size_t i = 0; i < A.rows; ++i)
      for (std::size_t p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p)
        ax[i] += A.values[p] * x[A.col_idx[p]];
    double na = 0.0;
    for (double v : ax) na += v * v;
    if (na == 0.0) continue;  // direction in the null space, ratio undefined
    double ns = 0.0;
    for (std::size_t i = 0; i < SA.rows; ++i) {
      const double* row = &SA.a[i * SA.cols];
      double acc = 0.0;
      for (std::size_t j = 0; j < SA.cols; ++j) acc += row[j] * x[j];
      ns += acc * acc;
    }
    const double ratio = ns / na;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    any = true;
  }
  if (!any)
    throw std::runtime_error(
        "embedding_distortion: every sampled direction was annihilated by A");
  return {lo, hi};
}

// Convenience: one-sided distortion estimate from the sampled ratio range.
inline double distortion_epsilon(double lo, double hi) {
  return std::max(hi - 1.0, 1.0 - lo);
}

}  // namespace cslsq
