#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cslsq/count_sketch.hpp"
#include "cslsq/csr.hpp"
#include "cslsq/dense.hpp"
#include "cslsq/precond.hpp"

namespace cslsq {

// One benchmark row: timing split into preprocessing (sketch + factorization
// + explicit B), iterative solve, and their total.
struct BenchReport {
  std::string method;
  std::size_t m = 0, n = 0;
  double pcpu_seconds = 0.0;
  double cpu_seconds = 0.0;
  double tcpu_seconds = 0.0;
  std::optional<std::size_t> iterations;  // absent for direct solves
  double rel_ls_error = 0.0;              // ||r||^2 / ||b||^2
  double relative_residual = 0.0;         // ||r|| / ||b||
  std::optional<double> kappa_b;
  std::optional<std::size_t> effective_rank;
  std::optional<double> pde_l2_error;
  std::map<std::string, std::string> config;  // flag/config echo
};

namespace report_detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace report_detail

// Field order is part of the report schema; keep in sync with report_to_csv.
inline nlohmann::ordered_json report_to_json(const BenchReport& r) {
  nlohmann::ordered_json j;
  j["method"] = r.method;
  j["m"] = r.m;
  j["n"] = r.n;
  j["pcpu_seconds"] = r.pcpu_seconds;
  j["cpu_seconds"] = r.cpu_seconds;
  j["tcpu_seconds"] = r.tcpu_seconds;
  if (r.iterations)
    j["iterations"] = *r.iterations;
  else
    j["iterations"] = nullptr;
  j["rel_ls_error"] = r.rel_ls_error;
  j["relative_residual"] = r.relative_residual;
  if (r.kappa_b)
    j["kappa_B"] = *r.kappa_b;
  else
    j["kappa_B"] = nullptr;
  if (r.effective_rank)
    j["effective_rank"] = *r.effective_rank;
  else
    j["effective_rank"] = nullptr;
  if (r.pde_l2_error)
    j["pde_l2_error"] = *r.pde_l2_error;
  else
    j["pde_l2_error"] = nullptr;
  j["config"] = r.config;
  return j;
}

inline std::string report_to_csv(const BenchReport& r) {
  using report_detail::fmt17;
  std::string out =
      "method,m,n,pcpu_seconds,cpu_seconds,tcpu_seconds,iterations,"
      "rel_ls_error,relative_residual,kappa_B,effective_rank,pde_l2_error\n";
  out += r.method + ',' + std::to_string(r.m) + ',' + std::to_string(r.n) +
         ',' + fmt17(r.pcpu_seconds) + ',' + fmt17(r.cpu_seconds) + ',' +
         fmt17(r.tcpu_seconds) + ',';
  out += r.iterations ? std::to_string(*r.iterations) : std::string();
  out += ',' + fmt17(r.rel_ls_error) + ',' + fmt17(r.relative_residual) + ',';
  out += r.kappa_b ? fmt17(*r.kappa_b) : std::string();
  out += ',';
  out += r.effective_rank ? std::to_string(*r.effective_rank) : std::string();
  out += ',';
  out += r.pde_l2_error ? fmt17(*r.pde_l2_error) : std::string();
  out += '\n';
  return out;
}

// format: "json" (default) or "csv"; path "-" writes to stdout.
inline void write_report(const BenchReport& r, const std::string& path,
                         const std::string& format) {
  std::string payload;
  if (format == "json")
    payload = report_to_json(r).dump(2) + "\n";
  else if (format == "csv")
    payload = report_to_csv(r);
  else
    throw std::invalid_argument("write_report: unknown format '" + format +
                                "'");
  if (path == "-") {
    std::cout << payload;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report to " + path);
  out << payload;
}

// Singular-value columns of A, A R^{-1}, and A P for one sketch seed. The
// QR column is left empty when the sketched matrix is rank-deficient; the
// AP column has exactly effective_rank entries.
struct SpectrumData {
  std::vector<double> sigma_a, sigma_ar, sigma_ap;
};

inline SpectrumData compute_spectrum(const CsrMatrix& A, double gamma,
                                     double rcond, std::uint64_t seed) {
  if (static_cast<double>(A.rows) * static_cast<double>(A.cols) > 5e7)
    throw std::invalid_argument(
        "compute_spectrum: matrix too large to densify (m*n > 5e7)");
  if (!(gamma > 1.0))
    throw std::invalid_argument("compute_spectrum: gamma must be > 1");
  SpectrumData sp;
  auto singulars = [](const DenseMatrix& M) {
    DenseMatrix U, V;
    Vector s;
    dense_svd(M, U, s, V);
    return std::vector<double>(s.data(), s.data() + s.size());
  };
  sp.sigma_a = singulars(densify(A));
  const std::size_t s = static_cast<std::size_t>(
      std::ceil(gamma * static_cast<double>(A.cols)));
  const CountSketch S = new_count_sketch(s, A.rows, seed);
  const DenseMatrix SA = apply_left(S, A);
  try {
    const QrPreconditioner qr = build_qr_precond(SA);
    sp.sigma_ar = singulars(form_explicit(A, qr));
  } catch (const RankDeficient&) {
    // leave the AR^{-1} column empty
  }
  const SvdPreconditioner sv = build_svd_precond(SA, rcond);
  sp.sigma_ap = singulars(form_explicit(A, sv));
  return sp;
}

inline void write_spectrum_csv(const SpectrumData& sp,
                               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write spectrum to " + path);
  out << "sigma_A,sigma_ARinv,sigma_AP\n";
  const std::size_t rows =
      std::max({sp.sigma_a.size(), sp.sigma_ar.size(), sp.sigma_ap.size()});
  for (std::size_t i = 0; i < rows; ++i) {
    if (i < sp.sigma_a.size()) out << report_detail::fmt17(sp.sigma_a[i]);
    out << ',';
    if (i < sp.sigma_ar.size()) out << report_detail::fmt17(sp.sigma_ar[i]);
    out << ',';
    if (i < sp.sigma_ap.size()) out << report_detail::fmt17(sp.sigma_ap[i]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace cslsq
