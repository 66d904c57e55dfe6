#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cslsq {

// Dense vector of 64-bit floats. Construction from user data rejects
// non-finite entries; internal arithmetic uses the unchecked paths.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n) : v_(n, 0.0) {}

  Vector(std::initializer_list<double> xs) : v_(xs) { reject_nonfinite(); }
  explicit Vector(std::vector<double> xs) : v_(std::move(xs)) {
    reject_nonfinite();
  }

  static Vector from_raw(std::vector<double> xs) {
    Vector v;
    v.v_ = std::move(xs);
    return v;
  }

  std::size_t size() const { return v_.size(); }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  auto begin() { return v_.begin(); }
  auto end() { return v_.end(); }
  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }
  const std::vector<double>& raw() const { return v_; }

  bool operator==(const Vector& o) const { return v_ == o.v_; }

 private:
  void reject_nonfinite() const {
    for (double x : v_)
      if (!std::isfinite(x))
        throw std::invalid_argument("Vector: non-finite entry");
  }

  std::vector<double> v_;
};

inline double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vector& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * a[i];
  return std::sqrt(s);
}

// y += alpha * x
inline void axpy(double alpha, const Vector& x, Vector& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(Vector& x, double alpha) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] *= alpha;
}

}  // namespace cslsq
