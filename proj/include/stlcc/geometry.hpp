#pragma once

// Coordinate expressions for the differential-geometric objects of a simple
// mechanical control system: metric, affine connection, vector fields and
// one-forms, and the operators built from them.

#include <optional>
#include <string>
#include <vector>

#include "stlcc/expr.hpp"
#include "stlcc/linalg.hpp"

namespace stlcc {

/// Raised on invalid geometric input (dimension mismatch, singular or
/// indefinite metric, ...).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point in coordinates. Decimal input is kept exactly alongside the double
/// value so evaluation can stay in rational arithmetic.
class Point {
 public:
  Point() = default;
  explicit Point(VecD coords);
  explicit Point(VecQ exact);

  std::size_t dim() const { return coords_.size(); }
  const VecD& coords() const { return coords_; }
  /// Present when constructed from exact values.
  const std::optional<VecQ>& exact() const { return exact_; }

  friend bool operator==(const Point& a, const Point& b) {
    return a.coords_ == b.coords_ && a.exact_ == b.exact_;
  }

 private:
  VecD coords_;
  std::optional<VecQ> exact_;
};

struct VectorField {
  std::vector<Expr> components;

  VectorField() = default;
  explicit VectorField(std::vector<Expr> c) : components(std::move(c)) {}
  static VectorField zero(std::size_t n) { return VectorField(std::vector<Expr>(n, Expr(0))); }

  std::size_t dim() const { return components.size(); }
  const Expr& operator[](std::size_t i) const { return components[i]; }
  bool is_zero() const;

  friend bool operator==(const VectorField& a, const VectorField& b) {
    return a.components == b.components;
  }
};

struct OneForm {
  std::vector<Expr> components;

  std::size_t dim() const { return components.size(); }
  friend bool operator==(const OneForm& a, const OneForm& b) { return a.components == b.components; }
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(const Expr& f, const VectorField& v);
VectorField simplify(const VectorField& v);

/// Sum_k coeffs[k] * fields[k], simplified. Coefficients are exact rationals.
VectorField linear_combination(const VecQ& coeffs, const std::vector<VectorField>& fields);

VecD evaluate(const VectorField& v, const Point& p);
/// nullopt when p has no exact form or v is not a rational function.
std::optional<VecQ> evaluate_exact(const VectorField& v, const Point& p);

/// Symmetric n x n matrix of expressions. Symbolic inverse by adjugate for
/// n <= 5 (or any n when the entries are constant).
class Metric {
 public:
  Metric() = default;
  /// Throws GeometryError if the matrix is not square or not symmetric.
  explicit Metric(std::vector<std::vector<Expr>> entries);

  static Metric euclidean(std::size_t n);

  std::size_t dim() const { return g_.size(); }
  const Expr& operator()(std::size_t a, std::size_t b) const { return g_[a][b]; }
  const std::vector<std::vector<Expr>>& entries() const { return g_; }

  /// g^{ab}; computed lazily and cached.
  const std::vector<std::vector<Expr>>& inverse() const;

  MatD evaluate(const Point& p) const;

  /// Throws GeometryError unless all eigenvalues of g(p) exceed `threshold`.
  void require_positive_definite(const Point& p, double threshold = 1e-9) const;

  friend bool operator==(const Metric& a, const Metric& b) { return a.g_ == b.g_; }

 private:
  std::vector<std::vector<Expr>> g_;
  mutable std::optional<std::vector<std::vector<Expr>>> inverse_;
};

/// Christoffel symbols Gamma^a_{bc}, stored as gamma[a][b][c].
struct Connection {
  std::vector<std::vector<std::vector<Expr>>> gamma;
  bool metric_derived = false;

  static Connection flat(std::size_t n);
  std::size_t dim() const { return gamma.size(); }
  const Expr& operator()(std::size_t a, std::size_t b, std::size_t c) const { return gamma[a][b][c]; }
  bool is_symmetric() const;

  friend bool operator==(const Connection& a, const Connection& b) {
    return a.gamma == b.gamma && a.metric_derived == b.metric_derived;
  }
};

/// Levi-Civita connection of g. Throws GeometryError for a singular metric.
Connection christoffel(const Metric& g);

/// Y^a = g^{ab} F_b.
VectorField sharp(const Metric& g, const OneForm& f);
/// F_a = g_{ab} Y^b.
OneForm flat(const Metric& g, const VectorField& y);

/// X(f) = X^b d_b f.
Expr directional_derivative(const VectorField& x, const Expr& f);

/// (nabla_X Y)^a = X^b d_b Y^a + Gamma^a_{bc} X^b Y^c.
VectorField covariant_derivative(const Connection& conn, const VectorField& x, const VectorField& y);

/// <X:Y> = nabla_X Y + nabla_Y X.
VectorField symmetric_product(const Connection& conn, const VectorField& x, const VectorField& y);

/// [X,Y]^a = X^b d_b Y^a - Y^b d_b X^a.
VectorField lie_bracket(const VectorField& x, const VectorField& y);

}  // namespace stlcc
