#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "pmod/error.hpp"

namespace pmod {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
      throw Error(ErrorKind::ShapeMismatch, "entry count does not match rows*cols");
  }
  CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw Error(ErrorKind::ShapeMismatch, "ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static CMatrix identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static CMatrix diag(std::span<const cplx> d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
  static CMatrix diag(std::initializer_list<cplx> d) {
    return diag(std::span<const cplx>(d.begin(), d.size()));
  }
  static CMatrix scalar(cplx s) { return CMatrix(1, 1, {s}); }
  static CMatrix column(std::span<const cplx> v) {
    return CMatrix(v.size(), 1, std::vector<cplx>(v.begin(), v.end()));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<cplx> entries() noexcept { return data_; }
  std::span<const cplx> entries() const noexcept { return data_; }

  std::vector<cplx> col(std::size_t j) const {
    std::vector<cplx> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  void set_col(std::size_t j, std::span<const cplx> v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  CMatrix adjoint() const {
    CMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }
  CMatrix transpose() const {
    CMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }
  /// Entrywise complex conjugate.
  CMatrix conj() const {
    CMatrix r = *this;
    for (auto& x : r.data_) x = std::conj(x);
    return r;
  }

  CMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    CMatrix r(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) r(i, j) = (*this)(r0 + i, c0 + j);
    return r;
  }
  void set_block(std::size_t r0, std::size_t c0, const CMatrix& b) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }
  /// Columns [c0, c0+nc).
  CMatrix cols_range(std::size_t c0, std::size_t nc) const { return block(0, c0, rows_, nc); }

  CMatrix& operator+=(const CMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  CMatrix& operator*=(cplx s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
  friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
  friend CMatrix operator-(CMatrix a) { return a *= -1.0; }

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorKind::ShapeMismatch, "matrix product dimensions");
    CMatrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        const cplx* brow = &b.data_[k * b.cols_];
        cplx* rrow = &r.data_[i * b.cols_];
        for (std::size_t j = 0; j < b.cols_; ++j) rrow[j] += aik * brow[j];
      }
    return r;
  }

  friend std::vector<cplx> operator*(const CMatrix& a, std::span<const cplx> v) {
    if (a.cols_ != v.size()) throw Error(ErrorKind::ShapeMismatch, "matrix-vector dimensions");
    std::vector<cplx> r(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      cplx s{};
      for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * v[j];
      r[i] = s;
    }
    return r;
  }
  friend std::vector<cplx> operator*(const CMatrix& a, const std::vector<cplx>& v) {
    return a * std::span<const cplx>(v);
  }

  friend bool operator==(const CMatrix& a, const CMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  void check_same(const CMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw Error(ErrorKind::ShapeMismatch, "elementwise op on unequal shapes");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

inline double frobenius(const CMatrix& m) {
  double s = 0.0;
  for (const auto& x : m.entries()) s += std::norm(x);
  return std::sqrt(s);
}

inline double max_abs(const CMatrix& m) {
  double s = 0.0;
  for (const auto& x : m.entries()) s = std::max(s, std::abs(x));
  return s;
}

inline cplx trace(const CMatrix& m) {
  cplx t{};
  for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i) t += m(i, i);
  return t;
}

inline bool all_finite(const CMatrix& m) {
  return std::all_of(m.entries().begin(), m.entries().end(),
                     [](const cplx& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

/// Kronecker product; (M⊗N)(e_i⊗e_j) = Me_i⊗Ne_j with e_i⊗e_j at flat index i*cols(N)+j.
inline CMatrix kron(const CMatrix& m, const CMatrix& n) {
  CMatrix r(m.rows() * n.rows(), m.cols() * n.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const cplx mij = m(i, j);
      if (mij == cplx{}) continue;
      for (std::size_t k = 0; k < n.rows(); ++k)
        for (std::size_t l = 0; l < n.cols(); ++l) r(i * n.rows() + k, j * n.cols() + l) = mij * n(k, l);
    }
  return r;
}

/// Block-diagonal sum.
inline CMatrix direct_sum(const CMatrix& a, const CMatrix& b) {
  CMatrix r(a.rows() + b.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), a.cols(), b);
  return r;
}

/// Concatenate columns of a and b.
inline CMatrix hcat(const CMatrix& a, const CMatrix& b) {
  if (a.empty() && a.rows() == 0) return b;
  if (a.rows() != b.rows()) throw Error(ErrorKind::ShapeMismatch, "hcat row mismatch");
  CMatrix r(a.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(0, a.cols(), b);
  return r;
}

inline cplx dot(std::span<const cplx> x, std::span<const cplx> y) {
  cplx s{};
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

inline double norm2(std::span<const cplx> x) { return std::sqrt(std::real(dot(x, x))); }

inline double hermitian_defect(const CMatrix& m) { return frobenius(m - m.adjoint()); }

/// Permutation matrix P with P(e_i⊗e_j) = e_j⊗e_i for e_i in C^p, e_j in C^q.
inline CMatrix flip_permutation(std::size_t p, std::size_t q) {
  CMatrix f(p * q, p * q);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) f(j * p + i, i * q + j) = 1.0;
  return f;
}

/// Permutation S: (C^p ⊕ C^q) ⊗ C^r -> (C^p⊗C^r) ⊕ (C^q⊗C^r) on natural bases.
/// With the row-major Kronecker convention this is the identity; kept explicit
/// so both distributive laws are checked through the same interface.
inline CMatrix shuffle_permutation(std::size_t p, std::size_t q, std::size_t r) {
  const std::size_t n = (p + q) * r;
  CMatrix s(n, n);
  for (std::size_t i = 0; i < p + q; ++i)
    for (std::size_t k = 0; k < r; ++k) s(i * r + k, i * r + k) = 1.0;
  return s;
}

/// Permutation S: C^p ⊗ (C^q ⊕ C^r) -> (C^p⊗C^q) ⊕ (C^p⊗C^r) on natural bases.
inline CMatrix shuffle_permutation_left(std::size_t p, std::size_t q, std::size_t r) {
  const std::size_t n = p * (q + r);
  CMatrix s(n, n);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q + r; ++j) {
      const std::size_t from = i * (q + r) + j;
      const std::size_t to = j < q ? i * q + j : p * q + i * r + (j - q);
      s(to, from) = 1.0;
    }
  return s;
}

}  // namespace pmod
