// Copyright 2026 The sigrank authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SIGRANK_MATRIX_HPP
#define SIGRANK_MATRIX_HPP

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "sigrank/errors.hpp"

namespace sigrank {

// Dense row-major matrix of doubles. All internal arithmetic is double even
// when inputs arrive as float32.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const double& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
  const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimMismatchError("matrix multiply: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row_ptr(k);
      double* crow = c.row_ptr(i);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

// Symmetric dense matrix. Construction symmetrizes, element writes keep both
// triangles in sync, so entries(i,j) == entries(j,i) holds exactly.
class SymMatrix {
 public:
  SymMatrix() = default;  // empty placeholder, dim() == 0

  explicit SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {
    if (dim < 1) throw DimMismatchError("SymMatrix: dim must be >= 1");
  }

  static SymMatrix from_matrix(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimMismatchError("SymMatrix: input not square");
    SymMatrix s(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double v = 0.5 * (m(i, j) + m(j, i));
        s.data_[i * s.dim_ + j] = v;
        s.data_[j * s.dim_ + i] = v;
      }
    }
    return s;
  }

  static SymMatrix identity(std::size_t dim) {
    SymMatrix s(dim);
    for (std::size_t i = 0; i < dim; ++i) s.set(i, i, 1.0);
    return s;
  }

  static SymMatrix diagonal(const std::vector<double>& d) {
    SymMatrix s(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) s.set(i, i, d[i]);
    return s;
  }

  std::size_t dim() const { return dim_; }

  const double& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

  void set(std::size_t i, std::size_t j, double v) {
    data_[i * dim_ + j] = v;
    data_[j * dim_ + i] = v;
  }

  void add(std::size_t i, std::size_t j, double v) { set(i, j, (*this)(i, j) + v); }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  // Off-diagonal Frobenius energy, the quantity the SMT greedy loop drives down.
  double offdiag_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i + 1; j < dim_; ++j) s += 2.0 * (*this)(i, j) * (*this)(i, j);
    return std::sqrt(s);
  }

  Matrix to_matrix() const {
    Matrix m(dim_, dim_);
    m.data() = data_;
    return m;
  }

  const std::vector<double>& data() const { return data_; }

  bool operator==(const SymMatrix& o) const { return dim_ == o.dim_ && data_ == o.data_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

inline SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw DimMismatchError("SymMatrix add: dims differ");
  SymMatrix r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j <= i; ++j) r.set(i, j, a(i, j) + b(i, j));
  return r;
}

inline SymMatrix operator*(double c, const SymMatrix& a) {
  SymMatrix r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j <= i; ++j) r.set(i, j, c * a(i, j));
  return r;
}

// Q * diag(lambda) * Q^T, the reconstruction used by every spectral function.
inline SymMatrix congruence_diag(const Matrix& q, const std::vector<double>& lambda) {
  const std::size_t n = q.rows();
  if (q.cols() != lambda.size()) throw DimMismatchError("congruence_diag: size mismatch");
  SymMatrix r(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < lambda.size(); ++k) s += q(i, k) * lambda[k] * q(j, k);
      r.set(i, j, s);
    }
  }
  return r;
}

// M * S * M^T for symmetric S.
inline SymMatrix congruence(const Matrix& m, const SymMatrix& s) {
  if (m.cols() != s.dim()) throw DimMismatchError("congruence: size mismatch");
  Matrix ms = multiply(m, s.to_matrix());
  return SymMatrix::from_matrix(multiply(ms, m.transposed()));
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double l2_norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline std::vector<double> subtract(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

}  // namespace sigrank

#endif  // SIGRANK_MATRIX_HPP
