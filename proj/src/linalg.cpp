#include "stlcc/linalg.hpp"

#include <algorithm>

namespace stlcc {

Eigen::MatrixXd to_eigen(const MatD& m) {
  Eigen::Index rows = static_cast<Eigen::Index>(m.size());
  Eigen::Index cols = rows == 0 ? 0 : static_cast<Eigen::Index>(m.front().size());
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = m[i][j];
  }
  return out;
}

MatD from_eigen(const Eigen::MatrixXd& m) {
  MatD out(m.rows(), VecD(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  }
  return out;
}

VecD to_double(const VecQ& v) {
  VecD out;
  out.reserve(v.size());
  for (const Rational& x : v) out.push_back(to_double(x));
  return out;
}

MatD to_double(const MatQ& m) {
  MatD out;
  out.reserve(m.size());
  for (const VecQ& r : m) out.push_back(to_double(r));
  return out;
}

int numeric_rank(const MatD& rows, double rel_tol) {
  if (rows.empty() || rows.front().empty()) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(rows));
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > rel_tol * s(0)) ++r;
  }
  return r;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> row_reduce(MatQ& m) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  std::size_t cols = m.front().size();
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
    std::size_t p = row;
    while (p < m.size() && m[p][col].is_zero()) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[row]);
    Rational inv = Rational(1) / m[row][col];
    for (Rational& x : m[row]) x *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col].is_zero()) continue;
      Rational f = m[r][col];
      for (std::size_t c = col; c < cols; ++c) m[r][c] -= f * m[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

int exact_rank(const MatQ& rows) {
  MatQ m = rows;
  return static_cast<int>(row_reduce(m).size());
}

double span_residual(const MatD& rows, const VecD& v, double rel_tol) {
  Eigen::Map<const Eigen::VectorXd> target(v.data(), static_cast<Eigen::Index>(v.size()));
  if (rows.empty()) return target.norm();
  Eigen::MatrixXd basis = to_eigen(rows).transpose();  // columns span
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::VectorXd residual = target;
  if (s.size() > 0 && s(0) > 0.0) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s(i) <= rel_tol * s(0)) break;
      Eigen::VectorXd u = svd.matrixU().col(i);
      residual -= u * u.dot(target);
    }
  }
  return residual.norm();
}

bool in_span_exact(const MatQ& rows, const VecQ& v) {
  MatQ with = rows;
  with.push_back(v);
  return exact_rank(with) == exact_rank(rows);
}

std::optional<VecQ> solve_frame_exact(const MatQ& frame, const VecQ& v) {
  // Solve frame^T c = v via the augmented system.
  std::size_t n = frame.size();
  if (n == 0 || frame.front().size() != n || v.size() != n) return std::nullopt;
  MatQ aug(n, VecQ(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = frame[j][i];
    aug[i][n] = v[i];
  }
  auto pivots = row_reduce(aug);
  if (pivots.size() != n || pivots.back() != n - 1) return std::nullopt;
  VecQ c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = aug[i][n];
  return c;
}

std::optional<VecD> solve_frame(const MatD& frame, const VecD& v, double rel_tol) {
  std::size_t n = frame.size();
  if (n == 0 || frame.front().size() != n || v.size() != n) return std::nullopt;
  Eigen::MatrixXd f = to_eigen(frame);
  double scale = 1.0;
  for (Eigen::Index i = 0; i < f.rows(); ++i) scale *= f.row(i).norm();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(f.transpose());
  if (scale == 0.0 || std::abs(lu.determinant()) <= rel_tol * scale) return std::nullopt;
  Eigen::Map<const Eigen::VectorXd> rhs(v.data(), static_cast<Eigen::Index>(n));
  Eigen::VectorXd c = lu.solve(rhs);
  return VecD(c.data(), c.data() + c.size());
}

std::optional<VecQ> normal_vector_exact(const MatQ& rows) {
  if (rows.empty()) return std::nullopt;
  std::size_t n = rows.front().size();
  if (rows.size() + 1 != n) return std::nullopt;
  MatQ basis = null_space_exact(rows);
  if (basis.size() != 1) return std::nullopt;
  return basis.front();
}

MatQ null_space_exact(const MatQ& a) {
  if (a.empty()) return {};
  std::size_t cols = a.front().size();
  MatQ m = a;
  auto pivots = row_reduce(m);
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t p : pivots) is_pivot[p] = true;
  MatQ basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    VecQ x(cols, Rational(0));
    x[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = -m[r][free];
    basis.push_back(std::move(x));
  }
  return basis;
}

double determinant(const MatD& m) {
  if (m.empty()) return 1.0;
  return to_eigen(m).fullPivLu().determinant();
}

Rational determinant_exact(const MatQ& m) {
  std::size_t n = m.size();
  MatQ a = m;
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    while (p < n && a[p][col].is_zero()) ++p;
    if (p == n) return 0;
    if (p != col) {
      std::swap(a[p], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (a[r][col].is_zero()) continue;
      Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

VecD symmetric_eigenvalues(const MatD& m) {
  if (m.empty()) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return VecD(ev.data(), ev.data() + ev.size());
}

double max_abs(const MatD& m) {
  double r = 0.0;
  for (const VecD& row : m) {
    for (double x : row) r = std::max(r, std::abs(x));
  }
  return r;
}

double norm(const VecD& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace stlcc
