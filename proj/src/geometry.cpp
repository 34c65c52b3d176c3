#include "stlcc/geometry.hpp"

#include <map>

namespace stlcc {

Point::Point(VecD coords) : coords_(std::move(coords)) {}

Point::Point(VecQ exact) : coords_(to_double(exact)), exact_(std::move(exact)) {}

bool VectorField::is_zero() const {
  for (const Expr& c : components) {
    if (!c.is_zero()) return false;
  }
  return true;
}

namespace {

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw GeometryError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

VectorField operator+(const VectorField& a, const VectorField& b) {
  require_same_dim(a.dim(), b.dim());
  std::vector<Expr> c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) c[i] = simplify(a[i] + b[i]);
  return VectorField(std::move(c));
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  require_same_dim(a.dim(), b.dim());
  std::vector<Expr> c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) c[i] = simplify(a[i] - b[i]);
  return VectorField(std::move(c));
}

VectorField operator*(const Expr& f, const VectorField& v) {
  std::vector<Expr> c(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) c[i] = simplify(f * v[i]);
  return VectorField(std::move(c));
}

VectorField simplify(const VectorField& v) {
  std::vector<Expr> c;
  c.reserve(v.dim());
  for (const Expr& e : v.components) c.push_back(simplify(e));
  return VectorField(std::move(c));
}

VectorField linear_combination(const VecQ& coeffs, const std::vector<VectorField>& fields) {
  if (coeffs.size() != fields.size()) throw GeometryError("coefficient count mismatch");
  if (fields.empty()) return {};
  std::size_t n = fields.front().dim();
  std::vector<Expr> out(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<Expr> terms;
    for (std::size_t k = 0; k < fields.size(); ++k) {
      require_same_dim(fields[k].dim(), n);
      if (coeffs[k].is_zero()) continue;
      terms.push_back(Expr(coeffs[k]) * fields[k][a]);
    }
    out[a] = simplify(make_sum(std::move(terms)));
  }
  return VectorField(std::move(out));
}

VecD evaluate(const VectorField& v, const Point& p) {
  VecD out;
  out.reserve(v.dim());
  for (const Expr& e : v.components) out.push_back(evaluate(e, p.coords()));
  return out;
}

std::optional<VecQ> evaluate_exact(const VectorField& v, const Point& p) {
  if (!p.exact()) return std::nullopt;
  VecQ out;
  out.reserve(v.dim());
  for (const Expr& e : v.components) {
    auto x = evaluate_exact(e, *p.exact());
    if (!x) return std::nullopt;
    out.push_back(std::move(*x));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metric

Metric::Metric(std::vector<std::vector<Expr>> entries) {
  std::size_t n = entries.size();
  for (const auto& row : entries) {
    if (row.size() != n) throw GeometryError("metric must be a square matrix");
  }
  g_.assign(n, std::vector<Expr>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) g_[a][b] = simplify(entries[a][b]);
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!equivalent(g_[a][b], g_[b][a], static_cast<int>(n))) {
        throw GeometryError("metric is not symmetric (entries " + std::to_string(a + 1) + "," +
                            std::to_string(b + 1) + ")");
      }
      g_[b][a] = g_[a][b];
    }
  }
}

Metric Metric::euclidean(std::size_t n) {
  std::vector<std::vector<Expr>> g(n, std::vector<Expr>(n, Expr(0)));
  for (std::size_t i = 0; i < n; ++i) g[i][i] = Expr(1);
  return Metric(std::move(g));
}

namespace {

// Determinant of the rows [row, n) restricted to the columns in `mask`, by
// Laplace expansion along the first remaining row, memoized on the mask.
Expr minor_determinant(const std::vector<std::vector<Expr>>& m, const std::vector<std::size_t>& rows,
                       std::size_t k, unsigned mask, std::map<unsigned, Expr>& memo) {
  if (k == rows.size()) return Expr(1);
  if (auto it = memo.find(mask); it != memo.end()) return it->second;
  std::vector<Expr> terms;
  int sign = 1;
  for (std::size_t c = 0; c < m.size(); ++c) {
    if (!(mask & (1U << c))) continue;
    const Expr& entry = m[rows[k]][c];
    if (!entry.is_zero()) {
      Expr sub = minor_determinant(m, rows, k + 1, mask & ~(1U << c), memo);
      if (!sub.is_zero()) terms.push_back(make_product({Expr(sign), entry, sub}));
    }
    sign = -sign;
  }
  Expr d = simplify(make_sum(std::move(terms)));
  memo.emplace(mask, d);
  return d;
}

Expr determinant_without(const std::vector<std::vector<Expr>>& m, std::optional<std::size_t> skip_row,
                         std::optional<std::size_t> skip_col) {
  std::size_t n = m.size();
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < n; ++r) {
    if (r != skip_row) rows.push_back(r);
  }
  unsigned mask = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (c != skip_col) mask |= 1U << c;
  }
  std::map<unsigned, Expr> memo;
  return minor_determinant(m, rows, 0, mask, memo);
}

bool all_constant(const std::vector<std::vector<Expr>>& m) {
  for (const auto& row : m) {
    for (const Expr& e : row) {
      if (!e.is_constant()) return false;
    }
  }
  return true;
}

}  // namespace

const std::vector<std::vector<Expr>>& Metric::inverse() const {
  if (inverse_) return *inverse_;
  std::size_t n = g_.size();
  std::vector<std::vector<Expr>> inv(n, std::vector<Expr>(n));
  if (all_constant(g_)) {
    MatQ aug(n, VecQ(2 * n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) aug[i][j] = g_[i][j].value();
      aug[i][n + i] = 1;
    }
    // Gauss-Jordan on [g | I].
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t p = col;
      while (p < n && aug[p][col].is_zero()) ++p;
      if (p == n) throw GeometryError("metric is singular");
      std::swap(aug[p], aug[col]);
      Rational piv = aug[col][col];
      for (Rational& x : aug[col]) x /= piv;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col || aug[r][col].is_zero()) continue;
        Rational f = aug[r][col];
        for (std::size_t c = 0; c < 2 * n; ++c) aug[r][c] -= f * aug[col][c];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) inv[i][j] = Expr(aug[i][n + j]);
    }
  } else {
    if (n > 5) {
      throw GeometryError(
          "symbolic inversion of a non-constant metric is limited to dimension 5; supply Christoffel "
          "symbols and vector-field inputs instead");
    }
    Expr det = determinant_without(g_, std::nullopt, std::nullopt);
    if (det.is_zero()) throw GeometryError("metric is singular");
    Expr inv_det = make_power(det, -1);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        // g^{ab} = C_{ba} / det with C the cofactor matrix.
        Expr cof = determinant_without(g_, b, a);
        if ((a + b) % 2 == 1) cof = -cof;
        inv[a][b] = simplify(cof * inv_det);
        inv[b][a] = inv[a][b];
      }
    }
  }
  inverse_ = std::move(inv);
  return *inverse_;
}

MatD Metric::evaluate(const Point& p) const {
  std::size_t n = g_.size();
  MatD m(n, VecD(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) m[a][b] = stlcc::evaluate(g_[a][b], p.coords());
  }
  return m;
}

void Metric::require_positive_definite(const Point& p, double threshold) const {
  VecD ev = symmetric_eigenvalues(evaluate(p));
  if (ev.empty() || ev.front() <= threshold) {
    throw GeometryError("metric is not positive definite at the base point (smallest eigenvalue " +
                        std::to_string(ev.empty() ? 0.0 : ev.front()) + ")");
  }
}

// ---------------------------------------------------------------------------
// Connection

Connection Connection::flat(std::size_t n) {
  Connection c;
  c.gamma.assign(n, std::vector<std::vector<Expr>>(n, std::vector<Expr>(n, Expr(0))));
  c.metric_derived = true;
  return c;
}

bool Connection::is_symmetric() const {
  std::size_t n = gamma.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = b + 1; c < n; ++c) {
        if (!equivalent(gamma[a][b][c], gamma[a][c][b], static_cast<int>(n))) return false;
      }
    }
  }
  return true;
}

Connection christoffel(const Metric& g) {
  std::size_t n = g.dim();
  const auto& inv = g.inverse();
  // dg[k][a][b] = d_k g_ab
  std::vector<std::vector<std::vector<Expr>>> dg(
      n, std::vector<std::vector<Expr>>(n, std::vector<Expr>(n)));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        dg[k][a][b] = diff(g(a, b), static_cast<int>(k));
        dg[k][b][a] = dg[k][a][b];
      }
    }
  }
  Connection conn = Connection::flat(n);
  conn.metric_derived = true;
  const Expr half(Rational(1, 2));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = b; c < n; ++c) {
        std::vector<Expr> terms;
        for (std::size_t d = 0; d < n; ++d) {
          if (inv[a][d].is_zero()) continue;
          Expr bracket = simplify(dg[b][d][c] + dg[c][b][d] - dg[d][b][c]);
          if (bracket.is_zero()) continue;
          terms.push_back(make_product({half, inv[a][d], bracket}));
        }
        conn.gamma[a][b][c] = simplify(make_sum(std::move(terms)));
        conn.gamma[a][c][b] = conn.gamma[a][b][c];
      }
    }
  }
  return conn;
}

VectorField sharp(const Metric& g, const OneForm& f) {
  require_same_dim(g.dim(), f.dim());
  const auto& inv = g.inverse();
  std::size_t n = g.dim();
  std::vector<Expr> y(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<Expr> terms;
    for (std::size_t b = 0; b < n; ++b) terms.push_back(inv[a][b] * f.components[b]);
    y[a] = simplify(make_sum(std::move(terms)));
  }
  return VectorField(std::move(y));
}

OneForm flat(const Metric& g, const VectorField& y) {
  require_same_dim(g.dim(), y.dim());
  std::size_t n = g.dim();
  OneForm f;
  f.components.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<Expr> terms;
    for (std::size_t b = 0; b < n; ++b) terms.push_back(g(a, b) * y[b]);
    f.components[a] = simplify(make_sum(std::move(terms)));
  }
  return f;
}

Expr directional_derivative(const VectorField& x, const Expr& f) {
  std::vector<Expr> terms;
  for (std::size_t b = 0; b < x.dim(); ++b) {
    if (x[b].is_zero()) continue;
    Expr d = diff(f, static_cast<int>(b));
    if (d.is_zero()) continue;
    terms.push_back(x[b] * d);
  }
  return simplify(make_sum(std::move(terms)));
}

VectorField covariant_derivative(const Connection& conn, const VectorField& x, const VectorField& y) {
  require_same_dim(x.dim(), y.dim());
  require_same_dim(conn.dim(), x.dim());
  std::size_t n = x.dim();
  std::vector<Expr> out(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<Expr> terms{directional_derivative(x, y[a])};
    for (std::size_t b = 0; b < n; ++b) {
      if (x[b].is_zero()) continue;
      for (std::size_t c = 0; c < n; ++c) {
        if (y[c].is_zero() || conn(a, b, c).is_zero()) continue;
        terms.push_back(make_product({conn(a, b, c), x[b], y[c]}));
      }
    }
    out[a] = simplify(make_sum(std::move(terms)));
  }
  return VectorField(std::move(out));
}

VectorField symmetric_product(const Connection& conn, const VectorField& x, const VectorField& y) {
  VectorField xy = covariant_derivative(conn, x, y);
  VectorField yx = covariant_derivative(conn, y, x);
  return xy + yx;
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  require_same_dim(x.dim(), y.dim());
  std::size_t n = x.dim();
  std::vector<Expr> out(n);
  for (std::size_t a = 0; a < n; ++a) {
    out[a] = simplify(directional_derivative(x, y[a]) - directional_derivative(y, x[a]));
  }
  return VectorField(std::move(out));
}

}  // namespace stlcc
