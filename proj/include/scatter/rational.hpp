#ifndef SCATTER_RATIONAL_HPP
#define SCATTER_RATIONAL_HPP

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scatter/error.hpp"

namespace scatter {

using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

/// Parses "p", "-p" or "p/q" (optional surrounding whitespace). Throws
/// MalformedInput on anything else, including a zero denominator.
inline Rational parse_rational(const std::string& text) {
  static const std::regex pattern(R"(^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$)");
  std::smatch match;
  if (!std::regex_match(text, match, pattern)) {
    throw Error(ErrorKind::MalformedInput, "not a rational number: '" + text + "'");
  }
  mpz_class num(match[1].str().front() == '+' ? match[1].str().substr(1) : match[1].str());
  mpz_class den(1);
  if (match[2].matched) {
    den = mpz_class(match[2].str());
    if (den == 0) throw Error(ErrorKind::MalformedInput, "zero denominator in '" + text + "'");
  }
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline Rational make_rational(long num, long den) {
  if (den == 0) throw Error(ErrorKind::MalformedInput, "zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline std::string format_rational(const Rational& q) { return q.get_str(); }

/// Dense row-major matrix over Q.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static RationalMatrix from_rows(const std::vector<RationalVector>& rows) {
    RationalMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < m.rows_; ++i) {
      if (rows[i].size() != m.cols_) throw Error(ErrorKind::MalformedInput, "ragged matrix rows");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  static RationalMatrix identity(std::size_t n) {
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  RationalVector column(std::size_t j) const {
    RationalVector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  RationalVector row(std::size_t i) const {
    return RationalVector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                          data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }

  RationalMatrix transpose() const {
    RationalMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  RationalMatrix select_columns(std::span<const int> cols) const {
    RationalMatrix s(rows_, cols.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols.size(); ++k) s(i, k) = (*this)(i, static_cast<std::size_t>(cols[k]));
    return s;
  }

  RationalMatrix select_rows(std::span<const int> rows) const {
    RationalMatrix s(rows.size(), cols_);
    for (std::size_t k = 0; k < rows.size(); ++k)
      for (std::size_t j = 0; j < cols_; ++j) s(k, j) = (*this)(static_cast<std::size_t>(rows[k]), j);
    return s;
  }

  bool operator==(const RationalMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

/// Reduced row echelon form in place; returns the pivot columns.
inline std::vector<std::size_t> rref_in_place(RationalMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && sgn(m(p, c)) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    const Rational inv = 1 / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || sgn(m(i, c)) == 0) continue;
      const Rational f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::size_t rank(RationalMatrix m) { return rref_in_place(m).size(); }

/// Basis of the right kernel {v : m v = 0}.
inline std::vector<RationalVector> kernel(RationalMatrix m) {
  const auto pivots = rref_in_place(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<RationalVector> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    RationalVector v(m.cols());
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

inline Rational determinant(RationalMatrix m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::InternalInconsistency, "determinant of non-square matrix");
  const std::size_t n = m.rows();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && sgn(m(p, c)) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      det = -det;
    }
    det *= m(c, c);
    const Rational inv = 1 / m(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (sgn(m(i, c)) == 0) continue;
      const Rational f = m(i, c) * inv;
      for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

/// Incremental row echelon basis: vectors are reduced against the stored
/// pivots on insertion. Supports pop() for depth-first subset enumeration.
class EchelonBasis {
 public:
  explicit EchelonBasis(std::size_t dim) : dim_(dim) {}

  std::size_t size() const noexcept { return rows_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  /// Reduces v; returns the residue (all zeros iff v is in the span).
  RationalVector reduce(RationalVector v) const {
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const auto p = pivots_[k];
      if (sgn(v[p]) == 0) continue;
      const Rational f = v[p];
      for (std::size_t j = p; j < dim_; ++j) v[j] -= f * rows_[k][j];
    }
    return v;
  }

  bool contains(const RationalVector& v) const { return first_nonzero(reduce(v)) == dim_; }

  /// Returns true when v was independent (and has been added).
  bool insert(RationalVector v) {
    v = reduce(std::move(v));
    const auto p = first_nonzero(v);
    if (p == dim_) return false;
    const Rational inv = 1 / v[p];
    for (std::size_t j = p; j < dim_; ++j) v[j] *= inv;
    rows_.push_back(std::move(v));
    pivots_.push_back(p);
    return true;
  }

  void pop() {
    rows_.pop_back();
    pivots_.pop_back();
  }

 private:
  std::size_t first_nonzero(const RationalVector& v) const {
    for (std::size_t j = 0; j < dim_; ++j)
      if (sgn(v[j]) != 0) return j;
    return dim_;
  }

  std::size_t dim_;
  std::vector<RationalVector> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace scatter

#endif  // SCATTER_RATIONAL_HPP
