#include <doctest.h>

#include <algorithm>

#include "support.hpp"

using namespace testing;

namespace {

MatQ Q(std::initializer_list<std::initializer_list<int>> rows) {
  MatQ m;
  for (auto r : rows) {
    VecQ v;
    for (int x : r) v.push_back(Rational(x));
    m.push_back(v);
  }
  return m;
}

MatD as_doubles(const MatQ& a) { return to_doubles(a); }

}  // namespace

TEST_CASE("base pair selection") {
  MechanicalSystem xyz = fixture("planar4_xyz.sys");
  auto sel = select_base_pair(xyz, xyz.q0);
  REQUIRE(std::holds_alternative<BasePair>(sel));
  BasePair bp = std::get<BasePair>(sel);
  CHECK(bp.first == 0);
  CHECK(bp.second == 1);
  CHECK_FALSE(bp.substituted);
  Eigen::Matrix3d frame;
  frame << 1, 1, 1, 0, 1, -2, -2, 0, 0;
  CHECK(std::abs(frame.determinant()) > 1e-9);
  CHECK(numeric_rank(bp.frame, 1e-9) == 3);

  MechanicalSystem constant = make_system({"x", "y", "z"}, {{"1", "0", "0"}, {"0", "1", "0"}});
  CHECK(std::holds_alternative<AllInsideDistribution>(select_base_pair(constant, constant.q0)));

  MechanicalSystem diagonal = make_system({"x", "y", "z"}, {{"1", "0", "x/2"}, {"0", "1", "0"}});
  auto d = select_base_pair(diagonal, diagonal.q0);
  REQUIRE(std::holds_alternative<BasePair>(d));
  CHECK(std::get<BasePair>(d).substituted);
  CHECK(numeric_rank(std::get<BasePair>(d).frame, 1e-9) == 3);
}

TEST_CASE("coefficient matrix of the (x,y,z) projection") {
  MechanicalSystem sys = fixture("planar4_xyz.sys");
  BasePair bp = std::get<BasePair>(select_base_pair(sys, sys.q0));
  CoefficientMatrix a = coefficient_matrix(sys, sys.q0, bp);
  REQUIRE(a.exact);
  CHECK(*a.exact == Q({{-1, 1}, {1, 0}}));
  CHECK(a.a[0][1] == 1.0);
  CHECK(a.residual < 1e-8);
}

TEST_CASE("radicand recursion") {
  RadicandSequence s = radicand_recursion(Q({{-1, 1}, {1, 0}}));
  REQUIRE_FALSE(s.pivots.empty());
  CHECK(s.pivots[0] == 0);
  REQUIRE(s.exact_stages);
  REQUIRE(s.exact_stages->size() >= 2);
  CHECK((*s.exact_stages)[1] == Q({{1}}));
  CHECK(s.form == FormClass::indefinite);

  RadicandSequence z = radicand_recursion(Q({{0, 0}, {0, 0}}));
  CHECK(z.form == FormClass::zero);
  CHECK(z.pivots.empty());

  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> d(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    MatQ a = random_symmetric(rng, 3, 3);
    for (int i = 0; i < 3; ++i) {
      if (a[i][i] == 0) a[i][i] = 1 + trial % 3;
    }
    RadicandSequence r = radicand_recursion(a);
    REQUIRE(r.exact_stages);
    REQUIRE(r.exact_stages->size() >= 2);
    CHECK((*r.exact_stages)[0] == a);
    MatQ hand(2, VecQ(2));
    for (int k = 1; k < 3; ++k) {
      for (int l = 1; l < 3; ++l) hand[k - 1][l - 1] = a[k][0] * a[l][0] - a[0][0] * a[k][l];
    }
    CHECK((*r.exact_stages)[1] == hand);
    CHECK(hand[0][1] == hand[1][0]);
    CHECK(radicand_recursion(as_doubles(a), 1e-9).form == r.form);
  }
}

TEST_CASE("radicand classification matches eigenvalues") {
  std::mt19937_64 rng(32);
  for (std::size_t m = 2; m <= 6; ++m) {
    for (int trial = 0; trial < 40; ++trial) {
      MatQ a = trial % 4 == 0 ? random_gram(rng, m, 1 + static_cast<std::size_t>(trial) % (m - 1), 1)
                              : (trial % 4 == 1 ? random_definite(rng, m, -1) : random_symmetric(rng, m, 3));
      Inertia want = classify_by_eigenvalues(a);
      FormClass got = radicand_recursion(a).form;
      CHECK(static_cast<int>(got) == static_cast<int>(want));
    }
  }
}

TEST_CASE("verdicts on fixtures") {
  MechanicalSystem xyz = fixture("planar4_xyz.sys");
  Verdict v = decide_stlcc(xyz, xyz.q0);
  CHECK(v.kind == VerdictKind::basis_found);
  REQUIRE(v.verification);
  CHECK(v.verification->passed);
  CHECK(v.zero_velocity_corollary);
  VerificationReport again = verify_basis(xyz, xyz.q0, v.basis);
  CHECK(again.passed);

  MechanicalSystem yzw = fixture("planar4_yzw.sys");
  CHECK(decide_stlcc(yzw, yzw.q0).kind == VerdictKind::basis_found);

  MechanicalSystem definite = fixture("flat_definite.sys");
  Verdict nd = decide_stlcc(definite, definite.q0);
  CHECK(nd.kind == VerdictKind::not_stlcc);
  REQUIRE(nd.certificate);
  CHECK(nd.certificate->min_eigenvalue * nd.certificate->max_eigenvalue > 0);
  CHECK(std::min(std::abs(nd.certificate->min_eigenvalue), std::abs(nd.certificate->max_eigenvalue)) > 1e-9);
  VecD ev = symmetric_eigenvalues(nd.certificate->matrix);
  CHECK(ev.front() * ev.back() > 0);

  MechanicalSystem full = fixture("planar4.sys");
  Verdict inc = decide_stlcc(full, full.q0);
  CHECK(inc.kind == VerdictKind::inconclusive);
  REQUIRE(inc.open_case);
  CHECK(inc.open_case->a[3] == -1.0);
  CHECK(inc.open_case->discriminant == -3.0);
  CHECK(inc.basis.empty());
}

TEST_CASE("a table with coefficient matrix I gives a certificate") {
  Verdict v = decide_table(table_from_form(Q({{1, 0}, {0, 1}})));
  CHECK(v.kind == VerdictKind::not_stlcc);
  REQUIRE(v.certificate);
  CHECK(v.certificate->min_eigenvalue > 1e-9);
}

TEST_CASE("kernel vectors are exact null vectors") {
  std::mt19937_64 rng(33);
  int reductions = 0;
  for (std::size_t m = 2; m <= 6; ++m) {
    for (int trial = 0; trial < 20; ++trial) {
      MatQ a = random_gram(rng, m, 1 + static_cast<std::size_t>(trial) % (m - 1), trial % 2 == 0 ? 1 : -1);
      if (classify_by_eigenvalues(a) != Inertia::semidefinite) continue;
      Verdict v = decide_table(table_from_form(a));
      REQUIRE_FALSE(v.reductions.empty());
      for (const auto& red : v.reductions) {
        const auto& stage = v.stages.at(static_cast<std::size_t>(red.stage));
        REQUIRE(stage.coefficients.exact);
        REQUIRE(red.exact_c);
        const MatQ& sa = *stage.coefficients.exact;
        for (std::size_t k = 0; k < sa.size(); ++k) {
          Rational s = 0;
          for (std::size_t l = 0; l < sa.size(); ++l) s += sa[k][l] * (*red.exact_c)[l];
          CHECK(s == 0);
        }
        CHECK(red.residual < 1e-8);
        ++reductions;
      }
      CHECK(v.kind == VerdictKind::not_stlcc);
    }
  }
  CHECK(reductions > 20);
}

TEST_CASE("floating and exact tables agree") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t m = 2 + static_cast<std::size_t>(trial) % 4;
    MatQ a = random_symmetric(rng, m, 3);
    TableQ tq = table_from_form(a);
    TableD td;
    td.inputs = to_doubles(tq.inputs);
    for (const auto& row : tq.products) {
      std::vector<VecD> r;
      for (const auto& p : row) r.push_back(to_double(p));
      td.products.push_back(r);
    }
    CHECK(decide_table(tq).kind == decide_table(td).kind);
  }
}

TEST_CASE("relabeling the inputs does not change the verdict") {
  std::mt19937_64 rng(35);
  int compared = 0;
  for (int trial = 0; trial < 40 && compared < 15; ++trial) {
    LinearSystem ls = random_linear_system(rng, 3, 2);
    if (normal_form(ls).empty()) continue;
    std::vector<std::string> coords{"x", "y", "z"};
    MechanicalSystem sys = to_mechanical(ls, coords);
    Verdict v = decide_stlcc(sys, sys.q0);
    if (v.kind == VerdictKind::inconclusive) continue;
    MechanicalSystem swapped = sys.with_inputs({sys.inputs[1], sys.inputs[0]});
    Verdict w = decide_stlcc(swapped, swapped.q0);
    CHECK(w.kind == v.kind);
    if (w.kind == VerdictKind::basis_found) {
      MatD back = w.basis;
      for (auto& row : back) std::swap(row[0], row[1]);
      CHECK(verify_basis(sys, sys.q0, back).passed);
    }
    ++compared;
  }
  CHECK(compared >= 10);
}

TEST_CASE("verify_basis edge cases") {
  MechanicalSystem sys = make_system({"x", "y", "z"}, {{"1", "0", "0"}, {"0", "1", "0"}});
  CHECK(verify_basis(sys, sys.q0, {{1, 0}, {0, 1}}).passed);
  VerificationReport r = verify_basis(sys, sys.q0, {{1, 0}, {0, 0}});
  CHECK_FALSE(r.passed);
  CHECK_FALSE(r.determinant_ok);
  MechanicalSystem xyz = fixture("planar4_xyz.sys");
  CHECK_FALSE(verify_basis(xyz, xyz.q0, {{1, 0}, {0, 1}}).passed);
}

TEST_CASE("scope limits") {
  MechanicalSystem plane = fixture("euclidean_plane.sys");
  Verdict v = decide_stlcc(plane, plane.q0);
  CHECK(v.kind == VerdictKind::inconclusive);
  MechanicalSystem single = fixture("plane_single.sys");
  CHECK(decide_stlcc(single, single.q0).kind != VerdictKind::basis_found);
}
