#pragma once

// Shared fixtures and independent oracles for the unit and acceptance tests.
// The oracles avoid the library's symbolic pipeline: finite differences on
// evaluated metric entries, closed-form products for flat linear fields,
// eigenvalue classification, and brute-force isotropic searches.

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stlcc/basis_search.hpp"
#include "stlcc/system_file.hpp"

namespace testing {

using namespace stlcc;

inline std::string fixture_path(const std::string& name) { return std::string(STLCC_FIXTURE_DIR) + "/" + name; }

inline MechanicalSystem fixture(const std::string& name) { return load_system(fixture_path(name)); }

/// System from component strings; metric defaults to Euclidean.
inline MechanicalSystem make_system(const std::vector<std::string>& coords,
                                    const std::vector<std::vector<std::string>>& inputs,
                                    const std::vector<std::vector<std::string>>& metric = {}) {
  MechanicalSystem sys;
  sys.coords = coords;
  std::size_t n = coords.size();
  std::vector<std::vector<Expr>> g(n, std::vector<Expr>(n, Expr(0)));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      g[a][b] = metric.empty() ? Expr(a == b ? 1 : 0) : parse_expr(metric[a][b], coords);
    }
  }
  sys.metric = Metric(g);
  sys.connection = christoffel(*sys.metric);
  for (const auto& f : inputs) {
    std::vector<Expr> comps;
    for (const auto& c : f) comps.push_back(parse_expr(c, coords));
    sys.inputs.push_back(VectorField(comps));
  }
  sys.q0 = Point(VecQ(n, Rational(0)));
  return sys;
}

inline VecD random_point(std::mt19937_64& rng, std::size_t n, double radius) {
  std::uniform_real_distribution<double> d(-radius, radius);
  VecD p(n);
  for (double& x : p) x = d(rng);
  return p;
}

/// Field with components c0 + c1*x_i + c2*x_j*x_k, small integer coefficients.
inline VectorField random_poly_field(std::mt19937_64& rng, const std::vector<std::string>& coords) {
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<std::size_t> var(0, coords.size() - 1);
  std::vector<Expr> comps;
  for (std::size_t a = 0; a < coords.size(); ++a) {
    std::string e = std::to_string(coef(rng)) + " + (" + std::to_string(coef(rng)) + ")*" + coords[var(rng)] +
                    " + (" + std::to_string(coef(rng)) + ")*" + coords[var(rng)] + "*" + coords[var(rng)];
    comps.push_back(parse_expr(e, coords));
  }
  return VectorField(comps);
}

inline Eigen::VectorXd to_vec(const VecD& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// ---- finite-difference geometry ---------------------------------------

inline Eigen::MatrixXd metric_at(const Metric& g, const VecD& p) {
  std::size_t n = g.dim();
  Eigen::MatrixXd m(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) m(a, b) = evaluate(g(a, b), p);
  }
  return m;
}

/// Gamma^a_bc from central differences of the evaluated metric.
inline std::vector<Eigen::MatrixXd> fd_christoffel(const Metric& g, const VecD& p, double h = 1e-5) {
  std::size_t n = g.dim();
  std::vector<Eigen::MatrixXd> dg(n);  // dg[c](a,b) = d_c g_ab
  for (std::size_t c = 0; c < n; ++c) {
    VecD plus = p;
    VecD minus = p;
    plus[c] += h;
    minus[c] -= h;
    dg[c] = (metric_at(g, plus) - metric_at(g, minus)) / (2 * h);
  }
  Eigen::MatrixXd inv = metric_at(g, p).inverse();
  std::vector<Eigen::MatrixXd> gamma(n, Eigen::MatrixXd::Zero(n, n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        double s = 0;
        for (std::size_t d = 0; d < n; ++d) s += inv(a, d) * (dg[b](d, c) + dg[c](b, d) - dg[d](b, c));
        gamma[a](b, c) = 0.5 * s;
      }
    }
  }
  return gamma;
}

inline Eigen::VectorXd field_at(const VectorField& f, const VecD& p) {
  VecD v = evaluate(f, Point(p));
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Jacobian columns d_b Y by central differences.
inline Eigen::MatrixXd fd_jacobian(const VectorField& y, const VecD& p, double h = 1e-6) {
  std::size_t n = p.size();
  Eigen::MatrixXd j(n, n);
  for (std::size_t b = 0; b < n; ++b) {
    VecD plus = p;
    VecD minus = p;
    plus[b] += h;
    minus[b] -= h;
    j.col(static_cast<Eigen::Index>(b)) = (field_at(y, plus) - field_at(y, minus)) / (2 * h);
  }
  return j;
}

/// (nabla_X Y)(p) using a connection given numerically at p.
inline Eigen::VectorXd fd_covariant(const std::vector<Eigen::MatrixXd>& gamma, const VectorField& x,
                                    const VectorField& y, const VecD& p) {
  Eigen::VectorXd xv = field_at(x, p);
  Eigen::VectorXd yv = field_at(y, p);
  Eigen::VectorXd out = fd_jacobian(y, p) * xv;
  for (std::size_t a = 0; a < gamma.size(); ++a) out(static_cast<Eigen::Index>(a)) += xv.dot(gamma[a] * yv);
  return out;
}

inline double rel_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / std::max(1.0, std::max(a.norm(), b.norm()));
}

// ---- quadratic forms ---------------------------------------------------

enum class Inertia { zero, indefinite, definite, semidefinite };

inline Inertia classify_by_eigenvalues(const MatQ& a) {
  std::size_t m = a.size();
  Eigen::MatrixXd e(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) e(i, j) = to_double(a[i][j]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e);
  int pos = 0;
  int neg = 0;
  double cut = 1e-9 * std::max(1.0, e.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double l = es.eigenvalues()(i);
    if (l > cut) ++pos;
    if (l < -cut) ++neg;
  }
  if (pos == 0 && neg == 0) return Inertia::zero;
  if (pos > 0 && neg > 0) return Inertia::indefinite;
  if (pos + neg == static_cast<int>(m)) return Inertia::definite;
  return Inertia::semidefinite;
}

inline MatD to_doubles(const MatQ& a) {
  MatD d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (const auto& x : a[i]) d[i].push_back(to_double(x));
  }
  return d;
}

inline double max_abs_diagonal(const MatD& b, const MatD& a) {
  double s = 0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    double q = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      for (std::size_t l = 0; l < a.size(); ++l) q += b[j][k] * a[k][l] * b[j][l];
    }
    s = std::max(s, std::abs(q));
  }
  return s;
}

inline double det(const MatD& b) {
  std::size_t m = b.size();
  Eigen::MatrixXd e(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) e(i, j) = b[i][j];
  }
  return e.determinant();
}

/// Random symmetric integer matrix with entries in [-r, r].
inline MatQ random_symmetric(std::mt19937_64& rng, std::size_t m, int r) {
  std::uniform_int_distribution<int> d(-r, r);
  MatQ a(m, VecQ(m, Rational(0)));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) a[i][j] = a[j][i] = d(rng);
  }
  return a;
}

/// Sum of `rank` signed outer products v v^T with v in {-1,0,1}^m; kept only
/// when all entries lie in [-3, 3].
inline MatQ random_gram(std::mt19937_64& rng, std::size_t m, std::size_t rank, int sign) {
  std::uniform_int_distribution<int> d(-1, 1);
  while (true) {
    MatQ a(m, VecQ(m, Rational(0)));
    for (std::size_t r = 0; r < rank; ++r) {
      std::vector<int> v(m);
      for (int& x : v) x = d(rng);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) a[i][j] += sign * v[i] * v[j];
      }
    }
    bool ok = true;
    for (const auto& row : a) {
      for (const auto& x : row) ok = ok && abs(x) <= 3;
    }
    if (ok) return a;
  }
}

/// Definite integer form with entries in [-3, 3]: diagonal +-3 dominating
/// off-diagonal entries in {-1, 0, 1} when m <= 3, tridiagonal otherwise.
inline MatQ random_definite(std::mt19937_64& rng, std::size_t m, int sign) {
  std::uniform_int_distribution<int> d(-1, 1);
  MatQ a(m, VecQ(m, Rational(0)));
  for (std::size_t i = 0; i < m; ++i) {
    a[i][i] = 3 * sign;
    for (std::size_t j = i + 1; j < m; ++j) {
      if (m > 3 && j != i + 1) continue;
      a[i][j] = a[j][i] = d(rng);
    }
  }
  return a;
}

// ---- flat linear systems -------------------------------------------------

/// Y_k(x) = c_k + M_k x on flat R^n.
struct LinearSystem {
  std::vector<std::vector<int>> c;
  std::vector<std::vector<std::vector<int>>> M;  // M[k][a][b] = d_b Y_k^a
};

inline LinearSystem random_linear_system(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::uniform_int_distribution<int> dc(-2, 2);
  std::uniform_int_distribution<int> dm(-1, 1);
  LinearSystem s;
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<int> c(n);
    for (int& x : c) x = dc(rng);
    s.c.push_back(c);
    std::vector<std::vector<int>> mk(n, std::vector<int>(n));
    for (auto& row : mk) {
      for (int& x : row) x = dm(rng);
    }
    s.M.push_back(mk);
  }
  return s;
}

inline MechanicalSystem to_mechanical(const LinearSystem& s, const std::vector<std::string>& coords) {
  std::size_t n = coords.size();
  std::vector<std::vector<std::string>> inputs;
  for (std::size_t k = 0; k < s.c.size(); ++k) {
    std::vector<std::string> f;
    for (std::size_t a = 0; a < n; ++a) {
      std::string e = std::to_string(s.c[k][a]);
      for (std::size_t b = 0; b < n; ++b) {
        int v = s.M[k][a][b];
        if (v != 0) e += " + (" + std::to_string(v) + ")*" + coords[b];
      }
      f.push_back(e);
    }
    inputs.push_back(f);
  }
  return make_system(coords, inputs);
}

inline long long int_det(std::vector<std::vector<long long>> a) {
  std::size_t n = a.size();
  if (n == 1) return a[0][0];
  long long s = 0;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<long long>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<long long> row;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != j) row.push_back(a[i][k]);
      }
      minor.push_back(row);
    }
    s += (j % 2 == 0 ? 1 : -1) * a[0][j] * int_det(minor);
  }
  return s;
}

/// Integer quadratic form nu . <Y_k:Y_l>(0) with <Y_k:Y_l>(0) = M_l c_k + M_k c_l
/// and nu the cofactor normal of the c_k. Empty if the c_k are dependent.
inline std::vector<std::vector<long long>> normal_form(const LinearSystem& s) {
  std::size_t m = s.c.size();
  std::size_t n = m + 1;
  std::vector<long long> nu(n);
  bool nonzero = false;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<long long>> minor;
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<long long> row;
      for (std::size_t a = 0; a < n; ++a) {
        if (a != j) row.push_back(s.c[k][a]);
      }
      minor.push_back(row);
    }
    nu[j] = (j % 2 == 0 ? 1 : -1) * int_det(minor);
    nonzero = nonzero || nu[j] != 0;
  }
  if (!nonzero) return {};
  std::vector<std::vector<long long>> f(m, std::vector<long long>(m, 0));
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = 0; l < m; ++l) {
      long long v = 0;
      for (std::size_t a = 0; a < n; ++a) {
        long long p = 0;
        for (std::size_t b = 0; b < n; ++b) p += s.M[l][a][b] * s.c[k][b] + s.M[k][a][b] * s.c[l][b];
        v += nu[a] * p;
      }
      f[k][l] = v;
    }
  }
  return f;
}

/// Searches integer vectors in [-4, 4]^m (exhaustively when the box holds at
/// most `samples` points, otherwise `samples` random draws) for isotropic
/// vectors of f, returning m independent ones if found.
inline std::optional<MatD> isotropic_integer_basis(const std::vector<std::vector<long long>>& f,
                                                   std::mt19937_64& rng, long samples = 100000) {
  std::size_t m = f.size();
  long box = 1;
  for (std::size_t i = 0; i < m; ++i) box *= 9;
  std::vector<std::vector<long long>> found;
  auto consider = [&](const std::vector<long long>& x) {
    long long q = 0;
    bool zero = true;
    for (std::size_t k = 0; k < m; ++k) {
      zero = zero && x[k] == 0;
      for (std::size_t l = 0; l < m; ++l) q += x[k] * f[k][l] * x[l];
    }
    if (!zero && q == 0) found.push_back(x);
  };
  std::vector<long long> x(m);
  if (box <= samples) {
    for (long idx = 0; idx < box; ++idx) {
      long r = idx;
      for (std::size_t k = 0; k < m; ++k) {
        x[k] = r % 9 - 4;
        r /= 9;
      }
      consider(x);
    }
  } else {
    std::uniform_int_distribution<int> d(-4, 4);
    for (long s = 0; s < samples; ++s) {
      for (auto& v : x) v = d(rng);
      consider(x);
    }
  }
  // Greedy independent subset by exact elimination.
  MatQ rows;
  MatD basis;
  for (const auto& v : found) {
    VecQ q;
    for (long long e : v) q.push_back(Rational(e));
    MatQ trial = rows;
    trial.push_back(q);
    if (exact_rank(trial) == static_cast<int>(trial.size())) {
      rows = trial;
      VecD d;
      for (long long e : v) d.push_back(static_cast<double>(e));
      basis.push_back(d);
      if (basis.size() == m) return basis;
    }
  }
  return std::nullopt;
}

}  // namespace testing
