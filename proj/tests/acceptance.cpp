// Acceptance checks; prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>

#include "stlcc/accessibility.hpp"
#include "stlcc/commands.hpp"
#include "stlcc/simulator.hpp"
#include "support.hpp"

using namespace testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

VectorField constant_field(std::initializer_list<int> c) {
  std::vector<Expr> e;
  for (int v : c) e.push_back(Expr(v));
  return VectorField(e);
}

Outcome criterion1() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  MechanicalSystem sys = fixture("planar4.sys");
  const auto& y = sys.inputs;
  VectorField p11 = simplify(symmetric_product(sys.connection, y[0], y[0]));
  VectorField p12 = simplify(symmetric_product(sys.connection, y[0], y[1]));
  VectorField p22 = simplify(symmetric_product(sys.connection, y[1], y[1]));
  o.require(p11 == constant_field({2, 0, 0, 2}), "<Y1:Y1> != 2(dx+dw)");
  o.require(p12 == constant_field({-2, 0, 0, 0}), "<Y1:Y2> != -2dx");
  o.require(p22 == constant_field({0, 0, 0, -2}), "<Y2:Y2> != -2dw");

  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> d(-100, 100);
  std::vector<VecQ> points{VecQ(4, Rational(0))};
  for (int i = 0; i < 10; ++i) {
    VecQ p;
    for (int k = 0; k < 4; ++k) p.push_back(Rational(d(rng), 1000));
    points.push_back(p);
  }
  int low = 4;
  for (const auto& p : points) {
    MatQ rows;
    for (const VectorField* f : std::vector<const VectorField*>{&y[0], &y[1], &p12, &p11}) {
      rows.push_back(*evaluate_exact(*f, Point(p)));
    }
    low = std::min(low, exact_rank(rows));
  }
  o.require(low == 4, "frame rank " + std::to_string(low) + " at a sample point");
  ClosureRank lie = lie_symmetric_closure_rank(sys, sys.q0, sys.tolerances);
  o.require(lie.full, "not configuration accessible");
  double dt = seconds_since(t0);
  o.require(dt < 1.0, "runtime " + fmt(dt) + " s");
  if (o.pass) o.detail = "products exact, rank 4 at 11 points, accessible, " + fmt(dt) + " s";
  return o;
}

Outcome criterion2() {
  Outcome o;
  CommonOptions opt;
  opt.path = fixture_path("planar4.sys");
  CommandResult r = cmd_basis_search(opt);
  o.require(r.exit_code == exit_code::inconclusive, "exit code " + std::to_string(r.exit_code));
  const Json& v = r.report["verdict"];
  o.require(v["kind"] == "Inconclusive", "kind " + v["kind"].dump());
  o.require(v.contains("open_case"), "no open-case coefficients");
  if (v.contains("open_case")) {
    double a4 = v["open_case"]["a_numeric"][3].get<double>();
    double disc = v["open_case"]["a3^2+4a4"].get<double>();
    o.require(a4 == -1.0, "a4 = " + fmt(a4));
    o.require(disc == -3.0, "a3^2+4a4 = " + fmt(disc));
  }
  MechanicalSystem sys = fixture("planar4.sys");
  auto oc = open_case_coefficients(sys, sys.q0);
  o.require(oc && oc->exact && (*oc->exact)[3] == -1, "exact a4 != -1");
  if (oc && oc->exact) {
    const VecQ& a = *oc->exact;
    o.require(a[2] * a[2] + 4 * a[3] == -3, "exact a3^2+4a4 != -3");
  }
  if (o.pass) o.detail = "a4 = -1, a3^2+4a4 = -3, exit code 2";
  return o;
}

Outcome criterion3() {
  Outcome o;
  std::string times;
  for (const std::string name : {"planar4_xyz.sys", "planar4_yzw.sys"}) {
    auto t0 = std::chrono::steady_clock::now();
    CommonOptions opt;
    opt.path = fixture_path(name);
    CommandResult r = cmd_basis_search(opt);
    double dt = seconds_since(t0);
    o.require(r.exit_code == exit_code::verdict, name + " exit code " + std::to_string(r.exit_code));
    o.require(r.report["verdict"]["kind"] == "BasisFound", name + " kind " + r.report["verdict"]["kind"].dump());
    o.require(dt < 1.0, name + " runtime " + fmt(dt) + " s");

    MechanicalSystem sys = fixture(name);
    Verdict v = decide_stlcc(sys, sys.q0);
    if (v.kind != VerdictKind::basis_found) continue;
    std::vector<VectorField> basis;
    for (const auto& row : v.basis) {
      VecQ c;
      for (double x : row) c.push_back(rational_from_double(x));
      basis.push_back(linear_combination(c, sys.inputs));
    }
    Tolerances tol;
    SufficientConditions sc = sufficient_conditions_check(sys, basis, sys.q0, 2, tol);
    o.require(sc.satisfied, name + " basis fails the sufficient conditions");
    times += (times.empty() ? "" : ", ") + fmt(dt) + " s";
  }
  if (o.pass) o.detail = "both projections BasisFound, bases pass the sufficient conditions (" + times + ")";
  return o;
}

struct FormRun {
  MatQ a;
  Inertia inertia;
  Verdict v;
};

std::vector<FormRun> form_runs() {
  std::mt19937_64 rng(2024);
  std::vector<FormRun> runs;
  auto add = [&](MatQ a) {
    Inertia c = classify_by_eigenvalues(a);
    runs.push_back({a, c, decide_table(table_from_form(a))});
  };
  for (std::size_t m = 2; m <= 6; ++m) {
    add(MatQ(m, VecQ(m, Rational(0))));
    for (int i = 0; i < 30; ++i) add(random_symmetric(rng, m, 3));
    for (int i = 0; i < 12; ++i) add(random_definite(rng, m, i % 2 == 0 ? 1 : -1));
    for (int i = 0; i < 16; ++i) add(random_gram(rng, m, 1 + static_cast<std::size_t>(i) % (m - 1), i % 2 == 0 ? 1 : -1));
  }
  return runs;
}

const char* name(Inertia c) {
  switch (c) {
    case Inertia::zero: return "zero";
    case Inertia::indefinite: return "indefinite";
    case Inertia::definite: return "definite";
    case Inertia::semidefinite: return "semidefinite";
  }
  return "?";
}

Outcome criterion4(const std::vector<FormRun>& runs) {
  Outcome o;
  int counts[4] = {0, 0, 0, 0};
  int verified = 0;
  for (const auto& r : runs) {
    counts[static_cast<int>(r.inertia)]++;
    bool isotropic_path = r.v.kind == VerdictKind::basis_found && r.v.reductions.empty();
    bool certificate_path = r.v.kind == VerdictKind::not_stlcc && r.v.reductions.empty() && r.v.certificate;
    bool reduction_path = !r.v.reductions.empty();
    bool ok = false;
    switch (r.inertia) {
      case Inertia::zero:
      case Inertia::indefinite: ok = isotropic_path; break;
      case Inertia::definite: ok = certificate_path; break;
      case Inertia::semidefinite: ok = reduction_path && r.v.kind != VerdictKind::basis_found; break;
    }
    if (!ok) {
      o.require(false, std::string(name(r.inertia)) + " form (m=" + std::to_string(r.a.size()) + ") took " +
                           to_string(r.v.kind) + " with " + std::to_string(r.v.reductions.size()) + " reductions");
      continue;
    }
    if (r.v.kind == VerdictKind::basis_found) {
      double diag = max_abs_diagonal(r.v.basis, to_doubles(r.a));
      double d = std::abs(det(r.v.basis));
      o.require(diag < 1e-8, "max|diag(BAB^T)| = " + fmt(diag));
      o.require(d > 1e-10, "|det B| = " + fmt(d));
      ++verified;
    }
  }
  o.require(runs.size() >= 200, "only " + std::to_string(runs.size()) + " matrices");
  if (o.pass) {
    o.detail = std::to_string(runs.size()) + " matrices (zero " + std::to_string(counts[0]) + ", indefinite " +
               std::to_string(counts[1]) + ", definite " + std::to_string(counts[2]) + ", semidefinite " +
               std::to_string(counts[3]) + "), 100% agreement, " + std::to_string(verified) + " bases checked";
  }
  return o;
}

Outcome criterion5(const std::vector<FormRun>& runs, const std::vector<Verdict>& system_verdicts) {
  Outcome o;
  int n = 0;
  double worst = 0;
  auto check = [&](const Verdict& v) {
    for (const auto& red : v.reductions) {
      const MatD& a = v.stages.at(static_cast<std::size_t>(red.stage)).coefficients.a;
      double cn = 0;
      for (double x : red.c) cn = std::max(cn, std::abs(x));
      double r = 0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        double s = 0;
        for (std::size_t l = 0; l < a.size(); ++l) s += a[k][l] * red.c[l] / cn;
        r = std::max(r, std::abs(s));
      }
      worst = std::max(worst, r);
      o.require(r < 1e-8, "||A C||_inf = " + fmt(r));
      ++n;
    }
  };
  for (const auto& r : runs) check(r.v);
  for (const auto& v : system_verdicts) check(v);
  o.require(n > 0, "no kernel reduction was exercised");
  if (o.pass) o.detail = std::to_string(n) + " reductions, worst ||A C||_inf = " + fmt(worst);
  return o;
}

Outcome criterion6(std::vector<Verdict>& verdicts) {
  Outcome o;
  std::mt19937_64 rng(77);
  int systems = 0;
  int found = 0;
  int not_stlcc = 0;
  int searched_found = 0;
  int attempts = 0;
  while (systems < 60 && attempts < 2000) {
    ++attempts;
    std::size_t n = attempts % 2 == 0 ? 3 : 4;
    std::size_t m = n - 1;
    LinearSystem ls = random_linear_system(rng, n, m);
    auto form = normal_form(ls);
    if (form.empty()) continue;
    std::vector<std::string> coords = n == 3 ? std::vector<std::string>{"x", "y", "z"}
                                             : std::vector<std::string>{"x", "y", "z", "w"};
    MechanicalSystem sys = to_mechanical(ls, coords);
    Verdict v = decide_stlcc(sys, sys.q0);
    if (v.kind == VerdictKind::inconclusive) continue;  // not accessible
    ++systems;
    auto witness = isotropic_integer_basis(form, rng);
    bool search_ok = false;
    if (witness) {
      VerificationReport rep = verify_basis(sys, sys.q0, *witness);
      search_ok = rep.passed;
    }
    if (search_ok) ++searched_found;
    if (v.kind == VerdictKind::basis_found) ++found;
    if (v.kind == VerdictKind::not_stlcc) ++not_stlcc;
    if (search_ok && v.kind != VerdictKind::basis_found) {
      o.require(false, "search found a basis but verdict " + std::string(to_string(v.kind)));
    }
    if (v.kind == VerdictKind::not_stlcc && witness) o.require(false, "NotSTLCC but integer isotropic basis exists");
    if (v.kind == VerdictKind::basis_found && !(v.verification && v.verification->passed)) {
      o.require(false, "BasisFound without passing verification");
    }
    verdicts.push_back(std::move(v));
  }
  o.require(systems >= 50, "only " + std::to_string(systems) + " accessible systems");
  if (o.pass) {
    o.detail = std::to_string(systems) + " systems (BasisFound " + std::to_string(found) + ", NotSTLCC " +
               std::to_string(not_stlcc) + ", search found " + std::to_string(searched_found) + "), 0 contradictions";
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  struct Case {
    const char* file;
    std::size_t n;
    bool stlcc;
  };
  for (const Case& c : {Case{"line_single.sys", 1, true}, Case{"plane_single.sys", 2, false},
                        Case{"space_single.sys", 3, false}}) {
    MechanicalSystem sys = fixture(c.file);
    o.require(sys.dim() == c.n && sys.input_count() == 1, std::string(c.file) + " has wrong shape");
    SingleInputVerdict s = single_input_verdict(sys, sys.q0, sys.tolerances);
    o.require(s.stlcc == c.stlcc, std::string(c.file) + " single-input verdict wrong");
    CommonOptions opt;
    opt.path = fixture_path(c.file);
    CommandResult r = cmd_analyze(opt);
    std::string want = c.stlcc ? "STLCC" : "NotSTLCC";
    o.require(r.report["verdict"]["kind"] == want, std::string(c.file) + " analyze says " + r.report["verdict"]["kind"].dump());
  }
  if (o.pass) o.detail = "n=1 STLCC; n=2,3 NotSTLCC";
  return o;
}

Outcome criterion8() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  MechanicalSystem s6 = fixture("planar4.sys");
  SeriesComparison exact = compare_series_ode(s6, s6.q0, {1.0, 0.0}, 2, 0.5, 1e-3);
  o.require(exact.max_error < 1e-7, "K=2 max error " + fmt(exact.max_error));
  MechanicalSystem curved = fixture("curved_plane.sys");
  VecD u{1.0, 0.0};
  SeriesCoefficients w = series_coefficients(curved, u, 2);
  double zz = norm(evaluate(w.w[1], curved.q0));
  o.require(zz > 1e-6, "<Z:Z>(q0) vanishes on the curved example");
  SeriesComparison k1 = compare_series_ode(curved, curved.q0, u, 1, 0.4, 1e-3);
  o.require(k1.order_measured && k1.order >= 3.0, "K=1 empirical order " + fmt(k1.order));
  double dt = seconds_since(t0);
  o.require(dt < 10.0, "runtime " + fmt(dt) + " s");
  if (o.pass) {
    o.detail = "K=2 max error " + fmt(exact.max_error) + ", curved K=1 order " + fmt(k1.order) + ", " + fmt(dt) + " s";
  }
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::mt19937_64 rng(9);
  int checks = 0;
  const std::vector<std::string> files{"planar4.sys",   "planar4_xyz.sys", "curved_plane.sys", "curved_space.sys",
                                       "line_single.sys", "euclidean_plane.sys", "polar_connection.sys"};
  for (const auto& file : files) {
    MechanicalSystem sys = fixture(file);
    std::size_t n = sys.dim();
    const Connection& conn = sys.connection;
    VecD center = sys.q0.coords();
    for (int trial = 0; trial < 20; ++trial) {
      VecD p = random_point(rng, n, 0.3);
      for (std::size_t a = 0; a < n; ++a) p[a] += center[a];
      Point pt(p);
      std::vector<VectorField> f{random_poly_field(rng, sys.coords), random_poly_field(rng, sys.coords),
                                 random_poly_field(rng, sys.coords)};
      f.push_back(sys.inputs[0]);
      const VectorField& x = f[0];
      const VectorField& y = f[1];
      const VectorField& z = f[2];
      auto at = [&](const VectorField& v) { return to_vec(evaluate(v, pt)); };
      std::string where = file + " point " + std::to_string(trial);

      if (sys.metric) {
        auto gamma = fd_christoffel(*sys.metric, p);
        double worst = 0;
        for (std::size_t a = 0; a < n; ++a) {
          for (std::size_t b = 0; b < n; ++b) {
            for (std::size_t c = 0; c < n; ++c) {
              double s = evaluate(conn(a, b, c), p);
              worst = std::max(worst, std::abs(s - gamma[a](b, c)) / std::max(1.0, std::abs(s)));
            }
          }
        }
        o.require(worst < 1e-6, where + ": Christoffel vs finite differences " + fmt(worst));
        // X g(Y,Z) = g(nabla_X Y, Z) + g(Y, nabla_X Z)
        Eigen::MatrixXd g = metric_at(*sys.metric, p);
        double h = 1e-6;
        auto gyz = [&](const VecD& q) {
          return to_vec(evaluate(y, Point(q))).dot(metric_at(*sys.metric, q) * to_vec(evaluate(z, Point(q))));
        };
        Eigen::VectorXd xv = at(x);
        VecD qp = p;
        VecD qm = p;
        for (std::size_t a = 0; a < n; ++a) {
          qp[a] += h * xv(static_cast<Eigen::Index>(a));
          qm[a] -= h * xv(static_cast<Eigen::Index>(a));
        }
        double lhs = (gyz(qp) - gyz(qm)) / (2 * h);
        double rhs = at(covariant_derivative(conn, x, y)).dot(g * at(z)) + at(y).dot(g * at(covariant_derivative(conn, x, z)));
        o.require(std::abs(lhs - rhs) < 1e-5 * std::max(1.0, std::abs(rhs)), where + ": metric compatibility");
        ++checks;
      }
      if (conn.is_symmetric()) {
        Eigen::VectorXd t = at(covariant_derivative(conn, x, y)) - at(covariant_derivative(conn, y, x)) - at(lie_bracket(x, y));
        o.require(t.norm() < 1e-9 * std::max(1.0, at(lie_bracket(x, y)).norm()), where + ": torsion");
      }
      VectorField sxy = symmetric_product(conn, x, y);
      VectorField syx = symmetric_product(conn, y, x);
      o.require(simplify(sxy) == simplify(syx) || rel_diff(at(sxy), at(syx)) < 1e-12, where + ": <X:Y> != <Y:X>");
      Eigen::VectorXd lin = at(symmetric_product(conn, Expr(2) * x + Expr(-3) * z, y));
      Eigen::VectorXd comb = 2 * at(sxy) - 3 * at(symmetric_product(conn, z, y));
      o.require(rel_diff(lin, comb) < 1e-10, where + ": bilinearity");
      // Independent numeric evaluation of the product with the symbolic
      // connection sampled at p.
      std::vector<Eigen::MatrixXd> gnum(n, Eigen::MatrixXd::Zero(n, n));
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          for (std::size_t c = 0; c < n; ++c) gnum[a](b, c) = evaluate(conn(a, b, c), p);
        }
      }
      Eigen::VectorXd fd = fd_covariant(gnum, x, y, p) + fd_covariant(gnum, y, x, p);
      o.require(rel_diff(at(sxy), fd) < 1e-6, where + ": product vs finite differences");

      Eigen::VectorXd bxy = at(lie_bracket(x, y));
      o.require(rel_diff(bxy, -at(lie_bracket(y, x))) < 1e-12, where + ": bracket antisymmetry");
      Eigen::VectorXd bfd = fd_jacobian(y, p) * at(x) - fd_jacobian(x, p) * at(y);
      o.require(rel_diff(bxy, bfd) < 1e-6, where + ": bracket vs finite differences");
      Eigen::VectorXd jac = at(lie_bracket(x, lie_bracket(y, z))) + at(lie_bracket(y, lie_bracket(z, x))) +
                            at(lie_bracket(z, lie_bracket(x, y)));
      o.require(jac.norm() < 1e-9 * std::max(1.0, at(lie_bracket(x, lie_bracket(y, z))).norm()), where + ": Jacobi");
      checks += 6;
    }
  }
  if (o.pass) o.detail = std::to_string(files.size()) + " fixtures x 20 points, " + std::to_string(checks) + " identity checks";
  return o;
}

}  // namespace

int main() {
  std::vector<FormRun> runs;
  std::vector<Verdict> system_verdicts;
  std::vector<std::pair<int, std::function<Outcome()>>> order{
      {1, criterion1},
      {2, criterion2},
      {3, criterion3},
      {4,
       [&] {
         runs = form_runs();
         return criterion4(runs);
       }},
      {6, [&] { return criterion6(system_verdicts); }},
      {5, [&] { return criterion5(runs, system_verdicts); }},
      {7, criterion7},
      {8, criterion8},
      {9, criterion9},
  };
  std::map<int, Outcome> results;
  for (auto& [k, f] : order) {
    try {
      results[k] = f();
    } catch (const std::exception& e) {
      results[k] = {false, std::string("exception: ") + e.what()};
    }
  }
  bool all = true;
  for (const auto& [k, o] : results) {
    all = all && o.pass;
    std::cout << "CRITERION " << k << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail << "\n";
  }
  return all ? 0 : 1;
}
