#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "cslsq/csr.hpp"
#include "cslsq/vector.hpp"

namespace cslsq {

struct MatrixMarketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace mm_detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    std::size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i == line.size()) continue;
    if (line[i] == '%') continue;
    return true;
  }
  return false;
}

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace mm_detail

// Coordinate-format Matrix Market reader; real general or real symmetric
// (symmetric files are expanded to the full matrix).
inline CsrMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MatrixMarketError("cannot open " + path);
  std::string header;
  if (!std::getline(in, header))
    throw MatrixMarketError(path + ": empty file");
  std::istringstream hs(header);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || mm_detail::lower(object) != "matrix")
    throw MatrixMarketError(path + ": malformed MatrixMarket header");
  format = mm_detail::lower(format);
  field = mm_detail::lower(field);
  symmetry = mm_detail::lower(symmetry);
  if (format != "coordinate")
    throw MatrixMarketError(path + ": expected coordinate format, got '" +
                            format + "'");
  if (field == "pattern")
    throw MatrixMarketError(path + ": pattern files carry no values");
  if (field != "real")
    throw MatrixMarketError(path + ": unsupported field '" + field + "'");
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general")
    throw MatrixMarketError(path + ": unsupported symmetry '" + symmetry +
                            "'");
  std::string line;
  if (!mm_detail::next_data_line(in, line))
    throw MatrixMarketError(path + ": missing size line");
  std::size_t rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream ls(line);
    if (!(ls >> rows >> cols >> nnz))
      throw MatrixMarketError(path + ": malformed size line");
  }
  std::vector<std::tuple<std::size_t, std::size_t, double>> trips;
  trips.reserve(symmetric ? 2 * nnz : nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    if (!mm_detail::next_data_line(in, line))
      throw MatrixMarketError(path + ": fewer entries than declared");
    std::istringstream ls(line);
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (!(ls >> i >> j >> v))
      throw MatrixMarketError(path + ": malformed entry line '" + line + "'");
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw MatrixMarketError(path + ": index out of bounds in entry " +
                              std::to_string(k + 1));
    trips.emplace_back(i - 1, j - 1, v);
    if (symmetric && i != j) trips.emplace_back(j - 1, i - 1, v);
  }
  return csr_from_triplets(rows, cols, trips);
}

// Writes coordinate real general, values at 17 significant digits so that
// read(write(A)) reproduces A bitwise. Stored explicit zeros are kept.
inline void write_matrix_market(const CsrMatrix& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MatrixMarketError("cannot write " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows << ' ' << A.cols << ' ' << A.nnz() << '\n';
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p)
      out << (i + 1) << ' ' << (A.col_idx[p] + 1) << ' '
          << mm_detail::fmt17(A.values[p]) << '\n';
  if (!out) throw MatrixMarketError("write failed: " + path);
}

// Right-hand-side vector: either a one-column Matrix Market array file or
// plain whitespace-separated numbers.
inline Vector read_rhs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MatrixMarketError("cannot open " + path);
  std::string first;
  if (!std::getline(in, first)) throw MatrixMarketError(path + ": empty file");
  if (first.rfind("%%MatrixMarket", 0) == 0) {
    std::istringstream hs(first);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (mm_detail::lower(format) != "array" ||
        mm_detail::lower(field) != "real")
      throw MatrixMarketError(path + ": rhs must be a real array file");
    std::string line;
    if (!mm_detail::next_data_line(in, line))
      throw MatrixMarketError(path + ": missing size line");
    std::size_t rows = 0, cols = 0;
    {
      std::istringstream ls(line);
      if (!(ls >> rows >> cols) || cols != 1)
        throw MatrixMarketError(path + ": rhs must have exactly one column");
    }
    std::vector<double> v;
    v.reserve(rows);
    for (std::size_t k = 0; k < rows; ++k) {
      if (!mm_detail::next_data_line(in, line))
        throw MatrixMarketError(path + ": fewer values than declared");
      std::istringstream ls(line);
      double x = 0.0;
      if (!(ls >> x))
        throw MatrixMarketError(path + ": malformed value line '" + line +
                                "'");
      v.push_back(x);
    }
    return Vector(std::move(v));
  }
  // plain text: every whitespace-separated token is a value
  std::vector<double> v;
  std::istringstream fs(first);
  double x = 0.0;
  while (fs >> x) v.push_back(x);
  while (in >> x) v.push_back(x);
  if (v.empty()) throw MatrixMarketError(path + ": no numeric data");
  return Vector(std::move(v));
}

inline void write_rhs(const Vector& b, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MatrixMarketError("cannot write " + path);
  out << "%%MatrixMarket matrix array real general\n";
  out << b.size() << " 1\n";
  for (std::size_t i = 0; i < b.size(); ++i)
    out << mm_detail::fmt17(b[i]) << '\n';
  if (!out) throw MatrixMarketError("write failed: " + path);
}

}  // namespace cslsq
