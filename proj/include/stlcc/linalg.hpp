#pragma once

// Small dense linear algebra over doubles and exact rationals.
//
// Exact routines use fraction-based Gaussian elimination; double routines
// delegate to Eigen (SVD for rank and least squares, self-adjoint solver for
// definiteness).

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "stlcc/rational.hpp"

namespace stlcc {

template <class T>
using Vec = std::vector<T>;

/// Row-major dense matrix; rows are the natural unit for frame vectors.
template <class T>
using Mat = std::vector<std::vector<T>>;

using VecD = Vec<double>;
using MatD = Mat<double>;
using VecQ = Vec<Rational>;
using MatQ = Mat<Rational>;

Eigen::MatrixXd to_eigen(const MatD& m);
MatD from_eigen(const Eigen::MatrixXd& m);
VecD to_double(const VecQ& v);
MatD to_double(const MatQ& m);

/// Rank of the set of row vectors; singular values below
/// rel_tol * sigma_max count as zero.
int numeric_rank(const MatD& rows, double rel_tol);

/// Exact rank of the set of row vectors.
int exact_rank(const MatQ& rows);

/// Least-squares residual ||v - proj_span(rows) v||; the span is computed with
/// a rank-revealing decomposition at rel_tol.
double span_residual(const MatD& rows, const VecD& v, double rel_tol);

/// Exact membership of v in span(rows).
bool in_span_exact(const MatQ& rows, const VecQ& v);

/// Coordinates c with sum_i c_i rows[i] == v, for a square nonsingular frame.
/// nullopt when the frame is singular.
std::optional<VecQ> solve_frame_exact(const MatQ& frame, const VecQ& v);
/// Double version; singular when |det| <= rel_tol * prod ||row_i||.
std::optional<VecD> solve_frame(const MatD& frame, const VecD& v, double rel_tol);

/// A nonzero vector orthogonal to all rows (rows has n-1 independent rows of
/// length n). Exactly computed; nullopt if the rows are dependent.
std::optional<VecQ> normal_vector_exact(const MatQ& rows);

/// Exact null space basis of the symmetric matrix a (a x = 0).
MatQ null_space_exact(const MatQ& a);

double determinant(const MatD& m);
Rational determinant_exact(const MatQ& m);

/// Eigenvalues of a symmetric matrix in ascending order.
VecD symmetric_eigenvalues(const MatD& m);

double max_abs(const MatD& m);
double norm(const VecD& v);

template <class T>
Mat<T> transpose(const Mat<T>& m) {
  if (m.empty()) return {};
  Mat<T> t(m.front().size(), Vec<T>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  }
  return t;
}

template <class T>
Mat<T> multiply(const Mat<T>& a, const Mat<T>& b) {
  std::size_t inner = b.size();
  std::size_t cols = inner == 0 ? 0 : b.front().size();
  Mat<T> c(a.size(), Vec<T>(cols, T(0)));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < inner; ++k) {
      if (a[i][k] == T(0)) continue;
      for (std::size_t j = 0; j < cols; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

template <class T>
Mat<T> identity(std::size_t n) {
  Mat<T> m(n, Vec<T>(n, T(0)));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = T(1);
  return m;
}

/// B A B^T.
template <class T>
Mat<T> congruence(const Mat<T>& b, const Mat<T>& a) {
  return multiply(multiply(b, a), transpose(b));
}

}  // namespace stlcc
