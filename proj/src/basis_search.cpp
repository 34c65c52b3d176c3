#include "stlcc/basis_search.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace stlcc {

namespace {

template <class T>
struct Arith;

template <>
struct Arith<Rational> {
  static constexpr bool exact = true;
  static bool zero(const Rational& x, double) { return x == 0; }
  static double d(const Rational& x) { return to_double(x); }
  static int sgn(const Rational& x) { return x.sign(); }
};

template <>
struct Arith<double> {
  static constexpr bool exact = false;
  static bool zero(double x, double thr) { return std::abs(x) <= thr; }
  static double d(double x) { return x; }
  static int sgn(double x) { return (x > 0) - (x < 0); }
};

template <class T>
T dot(const Vec<T>& a, const Vec<T>& b) {
  T s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <class T>
MatD as_double(const Mat<T>& m) {
  MatD out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (const T& x : m[i]) out[i].push_back(Arith<T>::d(x));
  }
  return out;
}

template <class T>
VecD as_double(const Vec<T>& v) {
  VecD out;
  for (const T& x : v) out.push_back(Arith<T>::d(x));
  return out;
}

double max_abs_vec(const VecD& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

// Unit normal of the span of n-1 independent rows.
VecD unit_normal(const MatD& rows) {
  std::size_t n = rows.front().size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  Eigen::VectorXd v = svd.matrixV().col(static_cast<Eigen::Index>(n) - 1);
  return VecD(v.data(), v.data() + v.size());
}

std::optional<Vec<Rational>> normal_of(const MatQ& rows) { return normal_vector_exact(rows); }
std::optional<VecD> normal_of(const MatD& rows) { return unit_normal(rows); }

std::optional<VecQ> solve_in(const MatQ& frame, const VecQ& v, double) { return solve_frame_exact(frame, v); }
std::optional<VecD> solve_in(const MatD& frame, const VecD& v, double tol) { return solve_frame(frame, v, tol); }

template <class T>
double product_scale(const ProductTable<T>& t) {
  double s = 1.0;
  for (const auto& row : t.products) {
    for (const auto& p : row) s = std::max(s, max_abs_vec(as_double(p)));
  }
  return s;
}

struct Selection {
  bool inside = true;
  int first = 0;
  int second = 0;
  bool substituted = false;
};

template <class T>
Selection select_pair(const ProductTable<T>& t, const Vec<T>& nu, const std::vector<int>& active, double thr) {
  auto escapes = [&](int k, int l) { return !Arith<T>::zero(dot(nu, t.products[k][l]), thr); };
  Selection s;
  if (active.size() == 1) {
    int i = active.front();
    if (escapes(i, i)) s = {false, i, i, false};
    return s;
  }
  for (std::size_t a = 0; a < active.size(); ++a) {
    for (std::size_t b = a + 1; b < active.size(); ++b) {
      if (escapes(active[a], active[b])) return {false, active[a], active[b], false};
    }
  }
  for (std::size_t a = 0; a < active.size(); ++a) {
    if (escapes(active[a], active[a])) {
      int other = active[a == 0 ? 1 : 0];
      return {false, active[a], other, true};
    }
  }
  return s;
}

template <class T>
Mat<T> substitution_matrix(std::size_t m, const Selection& s) {
  Mat<T> b = identity<T>(m);
  b[s.second][s.first] = T(1);
  return b;
}

template <class T>
Mat<T> frame_of(const ProductTable<T>& t, int i, int j) {
  Mat<T> f = t.inputs;
  f.push_back(t.products[i][j]);
  return f;
}

template <class T>
std::pair<CoefficientMatrix, Mat<T>> coefficients_of(const ProductTable<T>& t, const std::vector<int>& active,
                                                     int bi, int bj, const Tolerances& tol) {
  Mat<T> frame = frame_of(t, bi, bj);
  std::size_t k = active.size();
  Mat<T> a(k, Vec<T>(k, T(0)));
  CoefficientMatrix out;
  out.fields = active;
  MatD frame_d = as_double(frame);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      const Vec<T>& p = t.products[active[r]][active[c]];
      auto coords = solve_in(frame, p, tol.rank);
      if (!coords) throw std::runtime_error("frame of inputs and base product is singular at q0");
      a[r][c] = coords->back();
      VecD res = as_double(p);
      for (std::size_t f = 0; f < frame_d.size(); ++f) {
        double cf = Arith<T>::d((*coords)[f]);
        for (std::size_t x = 0; x < res.size(); ++x) res[x] -= cf * frame_d[f][x];
      }
      out.residual = std::max(out.residual, norm(res));
    }
  }
  out.a = as_double(a);
  if constexpr (Arith<T>::exact) out.exact = a;
  return {std::move(out), std::move(a)};
}

template <class T>
std::pair<RadicandSequence, std::vector<Mat<T>>> radicands_of(const Mat<T>& a, double zero_tol) {
  RadicandSequence seq;
  std::vector<Mat<T>> stages;
  std::vector<int> idx(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) idx[i] = static_cast<int>(i);
  Mat<T> cur = a;
  double scale = max_abs(as_double(a));
  int sigma = 1;
  int positive = 0;
  int negative = 0;
  while (!idx.empty()) {
    double thr = zero_tol * scale;
    seq.index_sets.push_back(idx);
    seq.stages.push_back(as_double(cur));
    stages.push_back(cur);
    std::size_t k = idx.size();
    bool all_zero = true;
    for (std::size_t r = 0; r < k && all_zero; ++r) {
      for (std::size_t c = 0; c < k; ++c) {
        if (!Arith<T>::zero(cur[r][c], thr)) {
          all_zero = false;
          break;
        }
      }
    }
    if (all_zero) {
      seq.zero_block = static_cast<int>(k);
      break;
    }
    std::size_t p = k;
    for (std::size_t r = 0; r < k; ++r) {
      if (!Arith<T>::zero(cur[r][r], thr)) {
        p = r;
        break;
      }
    }
    if (p == k) {
      seq.zero_diagonal_stage = true;
      break;
    }
    int s = Arith<T>::sgn(cur[p][p]);
    seq.pivots.push_back(idx[p]);
    seq.pivot_signs.push_back(sigma * s);
    (sigma * s > 0 ? positive : negative)++;
    if (k == 1) break;
    std::vector<int> rest;
    std::vector<std::size_t> pos;
    for (std::size_t r = 0; r < k; ++r) {
      if (r == p) continue;
      rest.push_back(idx[r]);
      pos.push_back(r);
    }
    Mat<T> next(rest.size(), Vec<T>(rest.size(), T(0)));
    for (std::size_t r = 0; r < rest.size(); ++r) {
      for (std::size_t c = 0; c < rest.size(); ++c) {
        next[r][c] = cur[pos[r]][p] * cur[pos[c]][p] - cur[p][p] * cur[pos[r]][pos[c]];
      }
    }
    sigma = -s * sigma;
    scale = scale * scale;
    cur = std::move(next);
    idx = std::move(rest);
  }
  if (seq.pivots.empty() && !seq.zero_diagonal_stage) {
    seq.form = FormClass::zero;
  } else if (seq.zero_diagonal_stage || (positive > 0 && negative > 0)) {
    seq.form = FormClass::indefinite;
  } else if (seq.zero_block > 0) {
    seq.form = FormClass::semidefinite;
  } else {
    seq.form = FormClass::definite;
  }
  if constexpr (Arith<T>::exact) seq.exact_stages = stages;
  return {std::move(seq), std::move(stages)};
}

// Isotropic vectors of an indefinite form by back-substitution through the
// radicand sequence: each pivot coordinate is a root of a quadratic whose
// radicand is the next-stage form evaluated on the remaining coordinates.
class BackSubstitution {
 public:
  BackSubstitution(const RadicandSequence& seq, std::uint64_t seed) : seq_(seq), rng_(seed) {}

  std::optional<VecD> isotropic() { return solve(0, true); }

 private:
  double uniform() { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng_); }

  VecD random_vector(std::size_t k) {
    VecD x(k);
    for (double& v : x) v = uniform();
    return x;
  }

  static double form(const MatD& a, const VecD& x) {
    double s = 0.0;
    for (std::size_t r = 0; r < x.size(); ++r) {
      for (std::size_t c = 0; c < x.size(); ++c) s += a[r][c] * x[r] * x[c];
    }
    return s;
  }

  int pivot_position(std::size_t level) const {
    if (level >= seq_.pivots.size()) return -1;
    const auto& idx = seq_.index_sets[level];
    auto it = std::find(idx.begin(), idx.end(), seq_.pivots[level]);
    return static_cast<int>(it - idx.begin());
  }

  // want_zero: x^T a x = 0 with x != 0; otherwise x^T a x > 0.
  std::optional<VecD> solve(std::size_t level, bool want_zero) {
    const MatD& a = seq_.stages[level];
    std::size_t k = a.size();
    int p = pivot_position(level);
    if (p < 0) {
      if (seq_.zero_block > 0) {
        if (want_zero) return random_vector(k);
        return std::nullopt;
      }
      return zero_diagonal(a, want_zero);
    }
    double c = a[p][p];
    if (k == 1) {
      if (want_zero || c < 0) return std::nullopt;
      return VecD{0.5 + 0.5 * std::abs(uniform())};
    }
    std::optional<VecD> y;
    if (want_zero || c < 0) {
      y = solve(level + 1, false);
      if (!y) return std::nullopt;
    } else {
      y = random_vector(k - 1);
    }
    VecD x(k, 0.0);
    for (std::size_t r = 0, q = 0; r < k; ++r) {
      if (static_cast<int>(r) != p) x[r] = (*y)[q++];
    }
    double lin = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      if (static_cast<int>(r) != p) lin += a[p][r] * x[r];
    }
    double rest = form(a, x);
    double rad = std::max(lin * lin - c * rest, 0.0);
    if (want_zero) {
      double root = uniform() < 0 ? -std::sqrt(rad) : std::sqrt(rad);
      x[p] = (-lin + root) / c;
    } else if (c > 0) {
      double t = std::sqrt(rad) / c + 0.5 + 0.5 * std::abs(uniform());
      x[p] = -lin / c + t;
    } else {
      x[p] = -lin / c;
    }
    return x;
  }

  std::optional<VecD> zero_diagonal(const MatD& a, bool want_zero) {
    std::size_t k = a.size();
    std::size_t p = 0;
    std::size_t q = 0;
    double best = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = r + 1; c < k; ++c) {
        if (std::abs(a[r][c]) > best) {
          best = std::abs(a[r][c]);
          p = r;
          q = c;
        }
      }
    }
    for (int attempt = 0; attempt < 16; ++attempt) {
      VecD x = random_vector(k);
      if (!want_zero) {
        if (form(a, x) > 0) return x;
        continue;
      }
      x[p] = 0.0;
      double lin = 0.0;
      for (std::size_t r = 0; r < k; ++r) lin += 2.0 * a[p][r] * x[r];
      if (std::abs(lin) < 1e-3 * best) continue;
      x[p] = -form(a, x) / lin;
      return x;
    }
    VecD x(k, 0.0);
    x[p] = 1.0;
    if (!want_zero) x[q] = a[p][q] > 0 ? 1.0 : -1.0;
    return x;
  }

  const RadicandSequence& seq_;
  std::mt19937_64 rng_;
};

void normalize_rows(MatD& b) {
  for (auto& row : b) {
    double s = norm(row);
    if (s > 0) {
      for (double& x : row) x /= s;
    }
  }
}

double max_row_norm(const MatD& b) {
  double s = 0.0;
  for (const auto& row : b) s = std::max(s, norm(row));
  return s;
}

double max_diagonal(const MatD& b, const MatD& a) {
  MatD d = congruence(b, a);
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) s = std::max(s, std::abs(d[i][i]));
  return s;
}

bool acceptable(const MatD& b, const MatD& a) {
  return std::abs(determinant(b)) > 1e-10 && max_diagonal(b, a) < 1e-8;
}

// Pairs a positive and a negative eigendirection into isotropic vectors and
// lifts every other eigenvector onto the cone along one of them.
std::optional<MatD> isotropic_from_eigenvectors(const MatD& a) {
  std::size_t k = a.size();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a));
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::Index lo = 0;
  Eigen::Index hi = static_cast<Eigen::Index>(k) - 1;
  double cut = 1e-12 * std::max(std::abs(lambda(lo)), std::abs(lambda(hi)));
  if (!(lambda(lo) < -cut && lambda(hi) > cut)) return std::nullopt;
  Eigen::VectorXd u = v.col(hi) / std::sqrt(lambda(hi));
  Eigen::VectorXd w = v.col(lo) / std::sqrt(-lambda(lo));
  std::vector<Eigen::VectorXd> rows{u + w, u - w};
  for (Eigen::Index i = lo + 1; i < hi; ++i) {
    double l = lambda(i);
    if (l < -cut) {
      rows.push_back(v.col(i) + std::sqrt(-l) * u);
    } else if (l > cut) {
      rows.push_back(v.col(i) + std::sqrt(l) * w);
    } else {
      rows.push_back(v.col(i));
    }
  }
  MatD b;
  for (const auto& r : rows) b.emplace_back(r.data(), r.data() + r.size());
  return b;
}

struct Construction {
  MatD b;
  std::string method;
};

std::optional<Construction> isotropic_basis(const RadicandSequence& seq, const MatD& a) {
  std::size_t k = a.size();
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    BackSubstitution bs(seq, 0x5eed + attempt);
    MatD b;
    for (std::size_t j = 0; j < k; ++j) {
      auto row = bs.isotropic();
      if (!row) break;
      b.push_back(std::move(*row));
    }
    if (b.size() != k) break;
    normalize_rows(b);
    if (acceptable(b, a)) return Construction{std::move(b), "back_substitution"};
  }
  if (auto b = isotropic_from_eigenvectors(a)) {
    normalize_rows(*b);
    if (acceptable(*b, a)) return Construction{std::move(*b), "isotropic_eigenvectors"};
  }
  return std::nullopt;
}

template <class T>
Vec<T> kernel_vector(const RadicandSequence& seq, const std::vector<Mat<T>>& stages, std::size_t k) {
  Vec<T> x(k, T(0));
  x[seq.index_sets.back().front()] = T(1);
  for (std::size_t i = seq.pivots.size(); i-- > 0;) {
    const auto& idx = seq.index_sets[i];
    const Mat<T>& a = stages[i];
    std::size_t p = static_cast<std::size_t>(std::find(idx.begin(), idx.end(), seq.pivots[i]) - idx.begin());
    T s(0);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      if (r != p) s += a[p][r] * x[idx[r]];
    }
    x[idx[p]] = -s / a[p][p];
  }
  return x;
}

template <class T>
bool negligible(const Vec<T>& v) {
  if constexpr (Arith<T>::exact) {
    return std::all_of(v.begin(), v.end(), [](const T& x) { return x == 0; });
  } else {
    return norm(v) < 1e-8;
  }
}

// C followed by an orthogonal completion built from the unit vectors.
template <class T>
Mat<T> complete_basis(const Vec<T>& c) {
  std::size_t k = c.size();
  Mat<T> rows{c};
  for (std::size_t e = 0; e < k && rows.size() < k; ++e) {
    Vec<T> v(k, T(0));
    v[e] = T(1);
    for (const auto& u : rows) {
      T f = dot(v, u) / dot(u, u);
      for (std::size_t i = 0; i < k; ++i) v[i] -= f * u[i];
    }
    if (negligible(v)) continue;
    if constexpr (!Arith<T>::exact) {
      double s = norm(v);
      for (auto& x : v) x /= s;
    }
    rows.push_back(std::move(v));
  }
  return rows;
}

template <class T>
Mat<T> embed(std::size_t m, const std::vector<int>& active, const Mat<T>& local) {
  Mat<T> full = identity<T>(m);
  for (std::size_t r = 0; r < active.size(); ++r) {
    for (std::size_t c = 0; c < active.size(); ++c) full[active[r]][active[c]] = local[r][c];
  }
  return full;
}

template <class T>
Verdict decide_impl(const ProductTable<T>& original, const Tolerances& tol) {
  std::size_t m = original.m();
  std::size_t n = original.n();
  if (m == 0 || n != m + 1) throw std::invalid_argument("decision table needs m = n - 1 inputs");
  auto nu = normal_of(original.inputs);
  if (!nu) throw std::invalid_argument("inputs are linearly dependent at q0");
  double thr = tol.zero * product_scale(original);

  Verdict v;
  v.exact = Arith<T>::exact;
  ProductTable<T> table = original;
  Mat<T> total = identity<T>(m);
  std::vector<int> active(m);
  for (std::size_t i = 0; i < m; ++i) active[i] = static_cast<int>(i);

  VecD unit = as_double(*nu);
  {
    double s = norm(unit);
    for (double& x : unit) x /= s;
  }
  double base_value = 1.0;
  MatD b_local;

  for (int stage = 0;; ++stage) {
    Selection sel = select_pair(table, *nu, active, thr);
    if (sel.inside) {
      b_local = identity<double>(active.size());
      v.kind = VerdictKind::basis_found;
      v.construction = stage == 0 ? "identity" : "kernel_reduction";
      break;
    }
    if (sel.substituted) {
      Mat<T> s = substitution_matrix<T>(m, sel);
      table = transform(s, table);
      total = multiply(s, total);
    }
    StageRecord rec;
    rec.fields = active;
    rec.base.first = sel.first;
    rec.base.second = sel.second;
    rec.base.substituted = sel.substituted;
    rec.base.frame = as_double(frame_of(table, sel.first, sel.second));
    if (stage == 0) base_value = dot(unit, as_double(table.products[sel.first][sel.second]));
    auto [coeffs, a] = coefficients_of(table, active, sel.first, sel.second, tol);
    auto [seq, stages] = radicands_of(a, tol.zero);
    rec.coefficients = coeffs;
    rec.radicands = seq;
    v.stages.push_back(rec);

    if (seq.form == FormClass::indefinite || seq.form == FormClass::zero) {
      auto built = isotropic_basis(seq, coeffs.a);
      if (!built) {
        v.kind = VerdictKind::inconclusive;
        v.reason = "numeric failure: no well-conditioned isotropic basis found for an indefinite form";
        return v;
      }
      b_local = std::move(built->b);
      v.kind = VerdictKind::basis_found;
      v.construction = built->method;
      break;
    }
    if (seq.form == FormClass::definite) {
      Certificate cert;
      cert.stage = stage;
      cert.fields = active;
      cert.matrix = coeffs.a;
      VecD ev = symmetric_eigenvalues(coeffs.a);
      cert.min_eigenvalue = ev.front();
      cert.max_eigenvalue = ev.back();
      v.certificate = cert;
      v.kind = VerdictKind::not_stlcc;
      v.basis = as_double(total);
      return v;
    }
    // Semidefinite and nonzero: settle one kernel direction and continue on
    // the remaining inputs.
    Vec<T> c = kernel_vector(seq, stages, active.size());
    KernelReduction red;
    red.stage = stage;
    red.fields = active;
    red.c = as_double(c);
    if constexpr (Arith<T>::exact) red.exact_c = c;
    {
      double cn = max_abs_vec(red.c);
      VecD ac(a.size(), 0.0);
      for (std::size_t r = 0; r < a.size(); ++r) {
        for (std::size_t q = 0; q < a.size(); ++q) ac[r] += coeffs.a[r][q] * red.c[q] / cn;
      }
      red.residual = max_abs_vec(ac);
    }
    v.reductions.push_back(red);
    if (red.residual >= 1e-8) {
      v.kind = VerdictKind::inconclusive;
      v.reason = "numeric failure: kernel vector residual " + std::to_string(red.residual);
      return v;
    }
    Mat<T> full = embed(m, active, complete_basis(c));
    table = transform(full, table);
    total = multiply(full, total);
    active.erase(active.begin());
  }

  MatD b = multiply(embed(m, active, b_local), as_double(total));
  normalize_rows(b);
  v.basis = b;
  TableCheck check;
  check.determinant = determinant(b);
  MatD orig(m, VecD(m, 0.0));
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = 0; l < m; ++l) orig[k][l] = dot(unit, as_double(original.products[k][l])) / base_value;
  }
  check.max_diagonal = max_diagonal(b, orig);
  check.passed = std::abs(check.determinant) > 1e-10 && check.max_diagonal < 1e-8;
  v.table_check = check;
  return v;
}

VecD unit_normal_of(const TableD& t) { return unit_normal(t.inputs); }

}  // namespace

template <class T>
ProductTable<T> transform(const Mat<T>& b, const ProductTable<T>& table) {
  std::size_t m = table.m();
  std::size_t n = table.n();
  ProductTable<T> out;
  out.inputs = multiply(b, table.inputs);
  out.products.assign(b.size(), std::vector<Vec<T>>(b.size(), Vec<T>(n, T(0))));
  // Half transform first: h[j][l] = sum_k b_jk P_kl.
  std::vector<std::vector<Vec<T>>> h(b.size(), std::vector<Vec<T>>(m, Vec<T>(n, T(0))));
  for (std::size_t j = 0; j < b.size(); ++j) {
    for (std::size_t k = 0; k < m; ++k) {
      if (b[j][k] == T(0)) continue;
      for (std::size_t l = 0; l < m; ++l) {
        for (std::size_t x = 0; x < n; ++x) h[j][l][x] += b[j][k] * table.products[k][l][x];
      }
    }
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      for (std::size_t l = 0; l < m; ++l) {
        if (b[i][l] == T(0)) continue;
        for (std::size_t x = 0; x < n; ++x) out.products[j][i][x] += b[i][l] * h[j][l][x];
      }
    }
  }
  return out;
}

template ProductTable<double> transform(const MatD&, const ProductTable<double>&);
template ProductTable<Rational> transform(const MatQ&, const ProductTable<Rational>&);

SystemTable product_table(const MechanicalSystem& sys, const Point& q0) {
  std::size_t m = sys.input_count();
  std::vector<VectorField> fields = sys.inputs;
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = k; l < m; ++l) fields.push_back(symmetric_product(sys.connection, sys.inputs[k], sys.inputs[l]));
  }
  FieldValues vals = evaluate_fields(fields, q0);
  auto fill = [&](auto& table, const auto& rows) {
    table.inputs.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(m));
    table.products.assign(m, {});
    for (auto& r : table.products) r.resize(m);
    std::size_t at = m;
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t l = k; l < m; ++l) {
        table.products[k][l] = rows[at];
        table.products[l][k] = rows[at];
        ++at;
      }
    }
  };
  SystemTable out;
  fill(out.numeric, vals.values);
  if (vals.exact) {
    TableQ q;
    fill(q, *vals.exact);
    out.exact = std::move(q);
  }
  return out;
}

TableQ table_from_form(const MatQ& a) {
  std::size_t m = a.size();
  TableQ t;
  t.inputs = MatQ(m, VecQ(m + 1, Rational(0)));
  for (std::size_t k = 0; k < m; ++k) t.inputs[k][k] = 1;
  t.products.assign(m, std::vector<VecQ>(m, VecQ(m + 1, Rational(0))));
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = 0; l < m; ++l) t.products[k][l][m] = a[k][l];
  }
  return t;
}

const char* to_string(FormClass c) {
  switch (c) {
    case FormClass::zero: return "zero";
    case FormClass::indefinite: return "indefinite";
    case FormClass::definite: return "definite";
    case FormClass::semidefinite: return "semidefinite";
  }
  return "?";
}

const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::basis_found: return "BasisFound";
    case VerdictKind::not_stlcc: return "NotSTLCC";
    case VerdictKind::inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

template <class T>
std::variant<BasePair, AllInsideDistribution> select_on(const ProductTable<T>& t, const Tolerances& tol) {
  if (t.n() != t.m() + 1) throw std::invalid_argument("base pair selection needs m = n - 1 inputs");
  auto nu = normal_of(t.inputs);
  if (!nu) throw std::invalid_argument("inputs are linearly dependent at q0");
  std::vector<int> active(t.m());
  for (std::size_t i = 0; i < t.m(); ++i) active[i] = static_cast<int>(i);
  Selection s = select_pair(t, *nu, active, tol.zero * product_scale(t));
  if (s.inside) return AllInsideDistribution{};
  BasePair bp;
  bp.first = s.first;
  bp.second = s.second;
  bp.substituted = s.substituted;
  ProductTable<T> used = s.substituted ? transform(substitution_matrix<T>(t.m(), s), t) : t;
  bp.frame = as_double(frame_of(used, s.first, s.second));
  return bp;
}

template <class T>
CoefficientMatrix coefficients_on(const ProductTable<T>& t, const BasePair& bp, const Tolerances& tol) {
  Selection s{false, bp.first, bp.second, bp.substituted};
  ProductTable<T> used = bp.substituted ? transform(substitution_matrix<T>(t.m(), s), t) : t;
  std::vector<int> active(t.m());
  for (std::size_t i = 0; i < t.m(); ++i) active[i] = static_cast<int>(i);
  return coefficients_of(used, active, bp.first, bp.second, tol).first;
}

}  // namespace

std::variant<BasePair, AllInsideDistribution> select_base_pair(const MechanicalSystem& sys, const Point& q0,
                                                               const Tolerances& tol) {
  SystemTable t = product_table(sys, q0);
  return t.exact ? select_on(*t.exact, tol) : select_on(t.numeric, tol);
}

CoefficientMatrix coefficient_matrix(const MechanicalSystem& sys, const Point& q0, const BasePair& bp,
                                     const Tolerances& tol) {
  SystemTable t = product_table(sys, q0);
  return t.exact ? coefficients_on(*t.exact, bp, tol) : coefficients_on(t.numeric, bp, tol);
}

RadicandSequence radicand_recursion(const MatQ& a) { return radicands_of(a, 0.0).first; }

RadicandSequence radicand_recursion(const MatD& a, double zero_tol) { return radicands_of(a, zero_tol).first; }

Verdict decide_table(const TableQ& table, const Tolerances& tol) { return decide_impl(table, tol); }

Verdict decide_table(const TableD& table, const Tolerances& tol) { return decide_impl(table, tol); }

std::optional<OpenCaseCoefficients> open_case_coefficients(const MechanicalSystem& sys, const Point& q0,
                                                           const Tolerances& tol) {
  if (sys.input_count() != 2 || sys.dim() != 4) return std::nullopt;
  SystemTable t = product_table(sys, q0);
  OpenCaseCoefficients out;
  if (t.exact) {
    const TableQ& q = *t.exact;
    MatQ frame{q.inputs[0], q.inputs[1], q.products[0][1], q.products[0][0]};
    auto c = solve_frame_exact(frame, q.products[1][1]);
    if (!c) return std::nullopt;
    out.exact = *c;
    out.a = to_double(*c);
    out.discriminant = to_double((*c)[2] * (*c)[2] + 4 * (*c)[3]);
  } else {
    const TableD& d = t.numeric;
    MatD frame{d.inputs[0], d.inputs[1], d.products[0][1], d.products[0][0]};
    auto c = solve_frame(frame, d.products[1][1], tol.rank);
    if (!c) return std::nullopt;
    out.a = *c;
    out.discriminant = (*c)[2] * (*c)[2] + 4 * (*c)[3];
  }
  return out;
}

VerificationReport verify_basis(const MechanicalSystem& sys, const Point& q0, const MatD& b, const Tolerances& tol,
                                int degree) {
  VerificationReport rep;
  std::size_t m = sys.input_count();
  std::size_t n = sys.dim();
  bool square = b.size() == m && std::all_of(b.begin(), b.end(), [&](const VecD& r) { return r.size() == m; });
  if (!square) {
    rep.failures.push_back("basis matrix must be " + std::to_string(m) + " x " + std::to_string(m));
    return rep;
  }
  rep.determinant = determinant(b);
  double scale = max_row_norm(b);
  rep.determinant_ok = scale > 0 && std::abs(rep.determinant) > 1e-10 * std::pow(scale, static_cast<double>(m));
  if (!rep.determinant_ok) rep.failures.push_back("basis matrix is singular");

  rep.diagonal_ok = true;
  if (m + 1 == n) {
    SystemTable t = product_table(sys, q0);
    VecD unit = unit_normal_of(t.numeric);
    double base = 1.0;
    auto sel = select_on(t.numeric, tol);
    if (auto* bp = std::get_if<BasePair>(&sel)) base = dot(unit, bp->frame.back());
    MatD a(m, VecD(m, 0.0));
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t l = 0; l < m; ++l) a[k][l] = dot(unit, t.numeric.products[k][l]) / base;
    }
    MatD bn = b;
    normalize_rows(bn);
    rep.max_diagonal = max_diagonal(bn, a);
    rep.diagonal_ok = rep.max_diagonal < 1e-8;
    if (!rep.diagonal_ok) rep.failures.push_back("diag(B A B^T) is not zero");
  }

  bool integral = std::all_of(b.begin(), b.end(), [](const VecD& r) {
    return std::all_of(r.begin(), r.end(), [](double x) { return std::floor(x) == x; });
  });
  std::vector<VectorField> fields;
  for (const auto& row : b) {
    VecQ c;
    for (double x : row) c.push_back(rational_from_double(x));
    fields.push_back(linear_combination(c, sys.inputs));
  }
  Point at = integral ? q0 : Point(q0.coords());
  rep.conditions = sufficient_conditions_check(sys.with_inputs(fields), fields, at, degree, tol);
  rep.sufficient_ok = rep.conditions.satisfied;
  if (!rep.sufficient_ok) rep.failures.push_back("a bad product is outside the span of lower-degree good products");
  rep.passed = rep.determinant_ok && rep.diagonal_ok && rep.sufficient_ok;
  return rep;
}

Verdict decide_stlcc(const MechanicalSystem& sys, const Point& q0, const Tolerances& tol) {
  std::size_t m = sys.input_count();
  std::size_t n = sys.dim();
  Verdict v;
  if (m + 1 != n) {
    v.reason = "outside the decidable scope: " + std::to_string(m) + " inputs on a " + std::to_string(n) +
               "-dimensional configuration space (needs m = n - 1)";
    if (m + 2 == n) {
      v.open_case = open_case_coefficients(sys, q0, tol);
      if (v.open_case) v.reason += "; open-case coefficients reported";
    }
    return v;
  }
  SystemTable t = product_table(sys, q0);
  if (numeric_rank(t.numeric.inputs, tol.rank) < static_cast<int>(m)) {
    v.reason = "input vector fields are linearly dependent at q0";
    return v;
  }
  ClosureRank closure = symmetric_closure_rank(sys, q0, tol);
  if (!closure.full) {
    v.closure = closure;
    v.reason = "not configuration accessible at q0 up to degree " + std::to_string(closure.degree_reached) +
               " (rank " + std::to_string(closure.rank) + " < " + std::to_string(n) + ")";
    return v;
  }
  v = t.exact ? decide_table(*t.exact, tol) : decide_table(t.numeric, tol);
  v.closure = closure;
  if (v.kind != VerdictKind::basis_found) return v;
  // Without a degree-two product outside D the degree-two check says nothing
  // about higher-degree bad products.
  bool degree_two_escape = std::any_of(v.stages.begin(), v.stages.end(),
                                       [](const StageRecord& s) { return s.radicands.form != FormClass::zero; });
  if (!degree_two_escape && m == 1) {
    v.kind = VerdictKind::not_stlcc;
    v.reason = "single input on a two-dimensional configuration space";
    return v;
  }
  v.verification = verify_basis(sys, q0, v.basis, tol, degree_two_escape ? 2 : tol.max_degree);
  if (!degree_two_escape && !v.verification->sufficient_ok) {
    v.kind = VerdictKind::inconclusive;
    v.reason = "every degree-two product lies in D at q0 and some higher-degree bad product is outside the span of "
               "lower-degree good ones up to degree " + std::to_string(tol.max_degree);
    return v;
  }
  v.zero_velocity_corollary = v.verification->passed;
  return v;
}

}  // namespace stlcc
