#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cslsq/csr.hpp"
#include "cslsq/rng.hpp"
#include "cslsq/vector.hpp"

namespace cslsq {
namespace rfm {

inline constexpr double kPi = 3.14159265358979323846;

struct Rect {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
};

struct Point {
  double x = 0.0, y = 0.0;
};

enum class PouKind { kPsiA, kPsiB };

// --- 1D partition-of-unity pieces -----------------------------------------
//
// psi_a is the indicator of [-1,1]. psi_b is the C^1 sine-blended bump:
// ramps up on [-5/4,-3/4], plateau 1 on [-3/4,3/4], ramps down on [3/4,5/4].
//
// clamp_lo / clamp_hi extend the plateau to 1 on that side; used for
// subdomains on the domain edge, where no neighbor exists to share the unit
// sum. Without this the PoU sums to < 1 near the boundary and the fit
// cannot represent the solution there.

inline double psi_a(double l) { return (l >= -1.0 && l <= 1.0) ? 1.0 : 0.0; }

inline double psi_b(double l, bool clamp_lo = false, bool clamp_hi = false) {
  if (l < -0.75) {
    if (clamp_lo) return 1.0;
    if (l >= -1.25) return 0.5 * (1.0 + std::sin(2.0 * kPi * l));
    return 0.0;
  }
  if (l > 0.75) {
    if (clamp_hi) return 1.0;
    if (l <= 1.25) return 0.5 * (1.0 - std::sin(2.0 * kPi * l));
    return 0.0;
  }
  return 1.0;
}

inline double psi_b_d1(double l, bool clamp_lo = false,
                       bool clamp_hi = false) {
  if (l < -0.75) {
    if (clamp_lo) return 0.0;
    if (l >= -1.25) return kPi * std::cos(2.0 * kPi * l);
    return 0.0;
  }
  if (l > 0.75) {
    if (clamp_hi) return 0.0;
    if (l <= 1.25) return -kPi * std::cos(2.0 * kPi * l);
    return 0.0;
  }
  return 0.0;
}

// Second derivative uses *closed* ramp intervals. psi_b'' jumps at the
// junctions l = ±3/4, ±5/4; when a collocation point lands exactly on a
// junction, adjacent subdomains evaluate complementary one-sided values
// whose sum is 0, matching the plateau value of the PoU sum. Half-open
// intervals would break that cancellation and poison those rows.
inline double psi_b_d2(double l, bool clamp_lo = false,
                       bool clamp_hi = false) {
  if (l >= -1.25 && l <= -0.75) {
    if (clamp_lo) return 0.0;
    return -2.0 * kPi * kPi * std::sin(2.0 * kPi * l);
  }
  if (l >= 0.75 && l <= 1.25) {
    if (clamp_hi) return 0.0;
    return 2.0 * kPi * kPi * std::sin(2.0 * kPi * l);
  }
  return 0.0;
}

// Tensor-product PoU value of the pure (unclamped) 1D pieces.
inline double pou_value(PouKind kind, Point l) {
  if (kind == PouKind::kPsiA) return psi_a(l.x) * psi_a(l.y);
  return psi_b(l.x) * psi_b(l.y);
}

// --- Partition --------------------------------------------------------------

struct Partition {
  Rect domain;
  std::size_t nx = 1, ny = 1;   // grid of subdomains
  PouKind pou = PouKind::kPsiB;
  bool clamp_edges = true;      // psi_b plateau extended at domain edges
  std::vector<Point> centers;   // size nx*ny, row-major (iy*nx + ix)
  std::vector<Point> radii;     // per-subdomain half-widths

  std::size_t count() const { return nx * ny; }
  std::size_t ix_of(std::size_t i) const { return i % nx; }
  std::size_t iy_of(std::size_t i) const { return i / nx; }
};

inline Partition make_partition(Rect domain, std::size_t nx, std::size_t ny,
                                PouKind pou) {
  if (nx == 0 || ny == 0)
    throw std::invalid_argument("make_partition: empty grid");
  if (!(domain.x1 > domain.x0 && domain.y1 > domain.y0))
    throw std::invalid_argument("make_partition: degenerate domain");
  Partition p;
  p.domain = domain;
  p.nx = nx;
  p.ny = ny;
  p.pou = pou;
  const double rx = 0.5 * (domain.x1 - domain.x0) / static_cast<double>(nx);
  const double ry = 0.5 * (domain.y1 - domain.y0) / static_cast<double>(ny);
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix) {
      p.centers.push_back({domain.x0 + (2.0 * ix + 1.0) * rx,
                           domain.y0 + (2.0 * iy + 1.0) * ry});
      p.radii.push_back({rx, ry});
    }
  return p;
}

inline Point normalized_coord(const Partition& p, std::size_t i, Point x) {
  if (i >= p.count())
    throw std::invalid_argument("normalized_coord: bad subdomain index");
  const Point c = p.centers[i];
  const Point r = p.radii[i];
  if (r.x == 0.0 || r.y == 0.0)
    throw std::invalid_argument("normalized_coord: zero radius");
  return {(x.x - c.x) / r.x, (x.y - c.y) / r.y};
}

// Disjoint cell membership for psi_a: half-open cells so gridline points
// belong to exactly one subdomain and the indicator PoU still sums to 1.
inline std::optional<std::size_t> cell_index(const Partition& p, Point x) {
  const Rect& d = p.domain;
  if (x.x < d.x0 || x.x > d.x1 || x.y < d.y0 || x.y > d.y1)
    return std::nullopt;
  const double fx = (x.x - d.x0) / (d.x1 - d.x0) * static_cast<double>(p.nx);
  const double fy = (x.y - d.y0) / (d.y1 - d.y0) * static_cast<double>(p.ny);
  std::size_t ix = static_cast<std::size_t>(fx);
  std::size_t iy = static_cast<std::size_t>(fy);
  if (ix >= p.nx) ix = p.nx - 1;
  if (iy >= p.ny) iy = p.ny - 1;
  return iy * p.nx + ix;
}

// Support test: does subdomain i contribute anything (value or derivative)
// at x? psi_b ramps reach |l| = 5/4 inclusive (psi'' is nonzero there).
inline bool covers(const Partition& p, std::size_t i, Point x) {
  if (p.pou == PouKind::kPsiA) {
    const auto c = cell_index(p, x);
    return c && *c == i;
  }
  const Point l = normalized_coord(p, i, x);
  const bool clo_x = p.clamp_edges && p.ix_of(i) == 0;
  const bool chi_x = p.clamp_edges && p.ix_of(i) == p.nx - 1;
  const bool clo_y = p.clamp_edges && p.iy_of(i) == 0;
  const bool chi_y = p.clamp_edges && p.iy_of(i) == p.ny - 1;
  const bool in_x = (l.x >= -1.25 || clo_x) && (l.x <= 1.25 || chi_x);
  const bool in_y = (l.y >= -1.25 || clo_y) && (l.y <= 1.25 || chi_y);
  return in_x && in_y;
}

// --- Random features --------------------------------------------------------

struct FeatureSet {
  std::size_t jn = 0;        // features per subdomain
  double weight_bound = 1.0; // R: weights and biases uniform on [-R, R]
  std::uint64_t seed = 0;
  // flattened (subdomain i, feature j) -> i*jn + j
  std::vector<double> kx, ky, bias;

  std::size_t total(const Partition& p) const { return p.count() * jn; }
};

// Draw order (the reproducibility contract): for each subdomain, for each
// feature: kx then ky; afterwards all biases in the same (i,j) order.
inline FeatureSet make_features(const Partition& p, std::size_t jn, double R,
                                std::uint64_t seed) {
  if (jn == 0) throw std::invalid_argument("make_features: jn == 0");
  if (!(R > 0.0)) throw std::invalid_argument("make_features: R <= 0");
  FeatureSet f;
  f.jn = jn;
  f.weight_bound = R;
  f.seed = seed;
  const std::size_t n = p.count() * jn;
  f.kx.resize(n);
  f.ky.resize(n);
  f.bias.resize(n);
  Rng rng(seed);
  for (std::size_t t = 0; t < n; ++t) {
    f.kx[t] = rng.uniform(-R, R);
    f.ky[t] = rng.uniform(-R, R);
  }
  for (std::size_t t = 0; t < n; ++t) f.bias[t] = rng.uniform(-R, R);
  return f;
}

enum class Deriv { kValue, kGradX, kGradY, kLaplacian };

namespace detail {

struct Clamps {
  bool lo_x, hi_x, lo_y, hi_y;
};

inline Clamps clamps_of(const Partition& p, std::size_t i) {
  if (p.pou == PouKind::kPsiA || !p.clamp_edges)
    return {false, false, false, false};
  return {p.ix_of(i) == 0, p.ix_of(i) == p.nx - 1, p.iy_of(i) == 0,
          p.iy_of(i) == p.ny - 1};
}

// Raw feature phi = tanh(k·l + b) and derivatives w.r.t. physical x,y
// (chain factor 1/r per derivative order), without the PoU weight.
// `out` receives jn values for subdomain i.
inline void eval_raw(const Partition& p, const FeatureSet& f, std::size_t i,
                     Point at, Deriv d, double* out) {
  const Point l = normalized_coord(p, i, at);
  const Point r = p.radii[i];
  const std::size_t base = i * f.jn;
  for (std::size_t j = 0; j < f.jn; ++j) {
    const double kx = f.kx[base + j], ky = f.ky[base + j];
    const double t = std::tanh(kx * l.x + ky * l.y + f.bias[base + j]);
    const double dt = 1.0 - t * t;
    switch (d) {
      case Deriv::kValue: out[j] = t; break;
      case Deriv::kGradX: out[j] = dt * kx / r.x; break;
      case Deriv::kGradY: out[j] = dt * ky / r.y; break;
      case Deriv::kLaplacian: {
        const double ddt = -2.0 * t * dt;
        const double gx = kx / r.x, gy = ky / r.y;
        out[j] = ddt * (gx * gx + gy * gy);
        break;
      }
    }
  }
}

// PoU-weighted feature block psi_i * phi_ij and derivatives, product rule
// through psi_b. For psi_a the PoU is constant 1 inside the cell, so the
// derivatives are the raw ones. Caller guarantees covers(p, i, at).
inline void eval_weighted(const Partition& p, const FeatureSet& f,
                          std::size_t i, Point at, Deriv d, double* out) {
  if (p.pou == PouKind::kPsiA) {
    eval_raw(p, f, i, at, d, out);
    return;
  }
  const Point l = normalized_coord(p, i, at);
  const Point r = p.radii[i];
  const Clamps c = clamps_of(p, i);
  const double px = psi_b(l.x, c.lo_x, c.hi_x);
  const double py = psi_b(l.y, c.lo_y, c.hi_y);
  const std::size_t base = i * f.jn;
  if (d == Deriv::kValue) {
    const double psi = px * py;
    for (std::size_t j = 0; j < f.jn; ++j)
      out[j] = psi * std::tanh(f.kx[base + j] * l.x + f.ky[base + j] * l.y +
                               f.bias[base + j]);
    return;
  }
  const double pxd1 = psi_b_d1(l.x, c.lo_x, c.hi_x) / r.x;
  const double pyd1 = psi_b_d1(l.y, c.lo_y, c.hi_y) / r.y;
  if (d == Deriv::kGradX || d == Deriv::kGradY) {
    for (std::size_t j = 0; j < f.jn; ++j) {
      const double kx = f.kx[base + j], ky = f.ky[base + j];
      const double t = std::tanh(kx * l.x + ky * l.y + f.bias[base + j]);
      const double dt = 1.0 - t * t;
      if (d == Deriv::kGradX)
        out[j] = pxd1 * py * t + px * py * dt * kx / r.x;
      else
        out[j] = px * pyd1 * t + px * py * dt * ky / r.y;
    }
    return;
  }
  // Laplacian: d2/dx2(psi*phi) = psi_xx phi + 2 psi_x phi_x + psi phi_xx,
  // plus the same in y.
  const double pxd2 = psi_b_d2(l.x, c.lo_x, c.hi_x) / (r.x * r.x);
  const double pyd2 = psi_b_d2(l.y, c.lo_y, c.hi_y) / (r.y * r.y);
  for (std::size_t j = 0; j < f.jn; ++j) {
    const double kx = f.kx[base + j], ky = f.ky[base + j];
    const double t = std::tanh(kx * l.x + ky * l.y + f.bias[base + j]);
    const double dt = 1.0 - t * t;
    const double ddt = -2.0 * t * dt;
    const double gx = kx / r.x, gy = ky / r.y;
    const double phix = dt * gx, phiy = dt * gy;
    const double phixx = ddt * gx * gx, phiyy = ddt * gy * gy;
    out[j] = pxd2 * py * t + 2.0 * pxd1 * py * phix + px * py * phixx +
             px * pyd2 * t + 2.0 * px * pyd1 * phiy + px * py * phiyy;
  }
}

}  // namespace detail

// Dense per-feature evaluation of psi_i(x) phi_ij(x) (or a derivative) over
// all n = M_p * J_n features. Non-covering subdomains contribute zeros.
inline std::vector<double> feature_eval(const FeatureSet& f,
                                        const Partition& p, Point at,
                                        Deriv d) {
  std::vector<double> out(f.total(p), 0.0);
  for (std::size_t i = 0; i < p.count(); ++i)
    if (covers(p, i, at))
      detail::eval_weighted(p, f, i, at, d, out.data() + i * f.jn);
  return out;
}

// --- PDE description --------------------------------------------------------

using ScalarField = std::function<double(double, double)>;

struct PdeSpec {
  enum class Op { kLaplace, kHelmholtz };
  Op op = Op::kLaplace;
  double helmholtz_k = 0.0;  // wave number, >= 0
  Rect domain;
  ScalarField f;      // forcing:   -lap u = f  (laplace)  or
                      //            lap u + k^2 u = f  (helmholtz)
  ScalarField g;      // Dirichlet boundary data
  ScalarField exact;  // optional exact solution for error evaluation
};

// Manufactured problems: build (f, g, exact) from a known solution.
inline PdeSpec manufactured_pde(PdeSpec::Op op, double k, Rect domain,
                                ScalarField u, ScalarField lap_u) {
  PdeSpec pde;
  pde.op = op;
  pde.helmholtz_k = k;
  pde.domain = domain;
  pde.exact = u;
  pde.g = u;
  if (op == PdeSpec::Op::kLaplace) {
    pde.f = [lap_u](double x, double y) { return -lap_u(x, y); };
  } else {
    if (k < 0.0) throw std::invalid_argument("manufactured_pde: k < 0");
    pde.f = [lap_u, u, k](double x, double y) {
      return lap_u(x, y) + k * k * u(x, y);
    };
  }
  return pde;
}

// Named exact solutions for configs and demos.
inline std::pair<ScalarField, ScalarField> exact_solution(
    const std::string& id) {
  if (id == "sin_sin") {
    ScalarField u = [](double x, double y) {
      return std::sin(kPi * x) * std::sin(kPi * y);
    };
    ScalarField lap = [](double x, double y) {
      return -2.0 * kPi * kPi * std::sin(kPi * x) * std::sin(kPi * y);
    };
    return {u, lap};
  }
  if (id == "exp_cos") {
    ScalarField u = [](double x, double y) {
      return std::exp(x) * std::cos(kPi * y);
    };
    ScalarField lap = [](double x, double y) {
      return (1.0 - kPi * kPi) * std::exp(x) * std::cos(kPi * y);
    };
    return {u, lap};
  }
  throw std::invalid_argument("exact_solution: unknown id '" + id + "'");
}

// --- Collocation ------------------------------------------------------------

struct InterfacePoint {
  Point at;
  std::size_t left = 0, right = 0;  // subdomains on either side
  int axis = 0;                     // 0: normal along x, 1: normal along y
};

struct CollocationSet {
  std::vector<Point> interior;
  std::vector<Point> boundary;
  std::vector<InterfacePoint> interface_pts;  // psi_a only
  double lambda_i = 1.0;
  double lambda_b = 0.0;  // <= 0 means auto: m_I / m_B
  double lambda_c = 1.0;
};

// Tensor collocation: q x q cell-centered interior points per subdomain,
// nb midpoint points per domain side (corners excluded), and for psi_a
// partitions q cell-centered points per internal gridline segment. Either
// count may be zero to drop that block, but not both.
inline CollocationSet make_collocation(const Partition& p, std::size_t q,
                                       std::size_t nb) {
  if (q == 0 && nb == 0)
    throw std::invalid_argument("make_collocation: no collocation points");
  CollocationSet c;
  for (std::size_t i = 0; i < p.count(); ++i) {
    const Point ctr = p.centers[i];
    const Point r = p.radii[i];
    for (std::size_t a = 0; a < q; ++a)
      for (std::size_t bb = 0; bb < q; ++bb) {
        const double x =
            ctr.x - r.x + (2.0 * static_cast<double>(bb) + 1.0) * r.x /
                              static_cast<double>(q);
        const double y =
            ctr.y - r.y + (2.0 * static_cast<double>(a) + 1.0) * r.y /
                              static_cast<double>(q);
        c.interior.push_back({x, y});
      }
  }
  const Rect& d = p.domain;
  for (std::size_t t = 0; t < nb; ++t) {
    const double fr = (static_cast<double>(t) + 0.5) / static_cast<double>(nb);
    c.boundary.push_back({d.x0 + fr * (d.x1 - d.x0), d.y0});
    c.boundary.push_back({d.x0 + fr * (d.x1 - d.x0), d.y1});
    c.boundary.push_back({d.x0, d.y0 + fr * (d.y1 - d.y0)});
    c.boundary.push_back({d.x1, d.y0 + fr * (d.y1 - d.y0)});
  }
  if (p.pou == PouKind::kPsiA && p.count() > 1) {
    const double cw = (d.x1 - d.x0) / static_cast<double>(p.nx);
    const double ch = (d.y1 - d.y0) / static_cast<double>(p.ny);
    for (std::size_t gx = 1; gx < p.nx; ++gx) {
      const double x = d.x0 + static_cast<double>(gx) * cw;
      for (std::size_t iy = 0; iy < p.ny; ++iy)
        for (std::size_t t = 0; t < q; ++t) {
          const double y = d.y0 + (static_cast<double>(iy) +
                                   (static_cast<double>(t) + 0.5) /
                                       static_cast<double>(q)) *
                                      ch;
          c.interface_pts.push_back(
              {{x, y}, iy * p.nx + (gx - 1), iy * p.nx + gx, 0});
        }
    }
    for (std::size_t gy = 1; gy < p.ny; ++gy) {
      const double y = d.y0 + static_cast<double>(gy) * ch;
      for (std::size_t ix = 0; ix < p.nx; ++ix)
        for (std::size_t t = 0; t < q; ++t) {
          const double x = d.x0 + (static_cast<double>(ix) +
                                   (static_cast<double>(t) + 0.5) /
                                       static_cast<double>(q)) *
                                      cw;
          c.interface_pts.push_back(
              {{x, y}, (gy - 1) * p.nx + ix, gy * p.nx + ix, 1});
        }
    }
  }
  return c;
}

enum class ContinuityOrder { kC0, kC1 };

namespace detail {

// One jump row: + side-left features, - side-right features (raw, no PoU).
inline void jump_row(const Partition& p, const FeatureSet& f,
                     const InterfacePoint& ip, Deriv d, double w,
                     std::vector<std::pair<std::size_t, double>>& row) {
  row.clear();
  std::vector<double> buf(f.jn);
  eval_raw(p, f, ip.left, ip.at, d, buf.data());
  for (std::size_t j = 0; j < f.jn; ++j)
    row.emplace_back(ip.left * f.jn + j, w * buf[j]);
  eval_raw(p, f, ip.right, ip.at, d, buf.data());
  for (std::size_t j = 0; j < f.jn; ++j)
    row.emplace_back(ip.right * f.jn + j, -w * buf[j]);
  if (ip.right < ip.left)
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
}

}  // namespace detail

// Continuity equations for psi_a partitions: per point a value-jump row
// (C0) and, at order C1, also a normal-derivative-jump row. Zero rhs.
// With psi_b the PoU is already C^1, so this is a no-op (with a warning).
inline std::vector<std::vector<std::pair<std::size_t, double>>> interface_rows(
    const Partition& p, const FeatureSet& f,
    const std::vector<InterfacePoint>& pts, ContinuityOrder order,
    double lambda_c = 1.0) {
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  if (p.pou == PouKind::kPsiB) {
    std::cerr << "interface_rows: psi_b partition is C1 already; no rows "
                 "generated\n";
    return rows;
  }
  const double w = std::sqrt(lambda_c);
  std::vector<std::pair<std::size_t, double>> row;
  for (const InterfacePoint& ip : pts) {
    detail::jump_row(p, f, ip, Deriv::kValue, w, row);
    rows.push_back(row);
    if (order == ContinuityOrder::kC1) {
      detail::jump_row(p, f, ip,
                       ip.axis == 0 ? Deriv::kGradX : Deriv::kGradY, w, row);
      rows.push_back(row);
    }
  }
  return rows;
}

// --- Assembly ---------------------------------------------------------------

// Least-squares system for the PDE: one row per (collocation point,
// equation). Interior rows carry sqrt(lambda_I) * (L applied to each basis
// function), boundary rows sqrt(lambda_B) * (basis value), and for psi_a
// partitions the C0/C1 interface rows weighted by sqrt(lambda_C). Row order
// is interior points, then boundary points, then interface equations.
inline std::pair<CsrMatrix, Vector> assemble(const PdeSpec& pde,
                                             const Partition& p,
                                             const FeatureSet& f,
                                             const CollocationSet& colloc) {
  if (colloc.interior.empty() && colloc.boundary.empty())
    throw std::invalid_argument("assemble: empty collocation set");
  if (f.jn == 0) throw std::invalid_argument("assemble: no features");
  const std::size_t n = f.total(p);
  const double lam_i = colloc.lambda_i;
  const double lam_b =
      colloc.lambda_b > 0.0
          ? colloc.lambda_b
          : (colloc.interior.empty() || colloc.boundary.empty()
                 ? 1.0
                 : static_cast<double>(colloc.interior.size()) /
                       static_cast<double>(colloc.boundary.size()));
  const double wi = std::sqrt(lam_i), wb = std::sqrt(lam_b);
  const bool helm = pde.op == PdeSpec::Op::kHelmholtz;
  const double k2 = pde.helmholtz_k * pde.helmholtz_k;

  std::size_t mrows = colloc.interior.size() + colloc.boundary.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> ifc;
  if (p.pou == PouKind::kPsiA && p.count() > 1 &&
      !colloc.interface_pts.empty()) {
    ifc = interface_rows(p, f, colloc.interface_pts, ContinuityOrder::kC1,
                         colloc.lambda_c);
    mrows += ifc.size();
  }

  CsrBuilder builder(mrows, n);
  std::vector<double> rhs;
  rhs.reserve(mrows);
  std::vector<std::pair<std::size_t, double>> row;
  std::vector<double> lap(f.jn), val(f.jn);

  for (const Point& pt : colloc.interior) {
    row.clear();
    for (std::size_t i = 0; i < p.count(); ++i) {
      if (!covers(p, i, pt)) continue;
      detail::eval_weighted(p, f, i, pt, Deriv::kLaplacian, lap.data());
      if (helm) detail::eval_weighted(p, f, i, pt, Deriv::kValue, val.data());
      for (std::size_t j = 0; j < f.jn; ++j) {
        const double lu = helm ? lap[j] + k2 * val[j] : -lap[j];
        row.emplace_back(i * f.jn + j, wi * lu);
      }
    }
    builder.add_row(row);
    rhs.push_back(wi * pde.f(pt.x, pt.y));
  }
  for (const Point& pt : colloc.boundary) {
    row.clear();
    for (std::size_t i = 0; i < p.count(); ++i) {
      if (!covers(p, i, pt)) continue;
      detail::eval_weighted(p, f, i, pt, Deriv::kValue, val.data());
      for (std::size_t j = 0; j < f.jn; ++j)
        row.emplace_back(i * f.jn + j, wb * val[j]);
    }
    builder.add_row(row);
    rhs.push_back(wb * pde.g(pt.x, pt.y));
  }
  for (const auto& r : ifc) {
    builder.add_row(r);
    rhs.push_back(0.0);
  }
  return {builder.take(), Vector::from_raw(std::move(rhs))};
}

// Evaluate the RFM ansatz with given coefficients at one point.
inline double evaluate(const Partition& p, const FeatureSet& f,
                       const Vector& coef, Point at) {
  if (coef.size() != f.total(p))
    throw std::invalid_argument("evaluate: coefficient length mismatch");
  double u = 0.0;
  std::vector<double> buf(f.jn);
  for (std::size_t i = 0; i < p.count(); ++i) {
    if (!covers(p, i, at)) continue;
    detail::eval_weighted(p, f, i, at, Deriv::kValue, buf.data());
    const double* c = coef.data() + i * f.jn;
    for (std::size_t j = 0; j < f.jn; ++j) u += buf[j] * c[j];
  }
  return u;
}

// Relative discrete L2 error of the ansatz against the exact solution over
// a tensor grid (default 101 x 101) on the partition's domain.
inline double relative_l2_error(const Partition& p, const FeatureSet& f,
                                const Vector& coef, const ScalarField& exact,
                                std::size_t grid_n = 101) {
  if (!exact) throw std::invalid_argument("relative_l2_error: no exact fn");
  if (grid_n < 2) throw std::invalid_argument("relative_l2_error: tiny grid");
  const Rect& d = p.domain;
  double num = 0.0, den = 0.0;
  for (std::size_t a = 0; a < grid_n; ++a)
    for (std::size_t b = 0; b < grid_n; ++b) {
      const double x = d.x0 + (d.x1 - d.x0) * static_cast<double>(b) /
                                  static_cast<double>(grid_n - 1);
      const double y = d.y0 + (d.y1 - d.y0) * static_cast<double>(a) /
                                  static_cast<double>(grid_n - 1);
      const double ue = exact(x, y);
      const double un = evaluate(p, f, coef, {x, y});
      num += (un - ue) * (un - ue);
      den += ue * ue;
    }
  if (den == 0.0)
    throw std::invalid_argument(
        "relative_l2_error: exact solution vanishes on the whole grid");
  return std::sqrt(num / den);
}

}  // namespace rfm
}  // namespace cslsq
