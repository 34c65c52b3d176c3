#include <doctest.h>

#include <random>

#include "stlcc/linalg.hpp"

using namespace stlcc;

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

}  // namespace

TEST_CASE("exact and numeric rank agree on integer matrices") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> d(-2, 2);
  for (int i = 0; i < 200; ++i) {
    std::size_t rows = 1 + i % 5;
    MatQ q(rows, VecQ(4));
    MatD f(rows, VecD(4));
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < 4; ++c) {
        int v = d(rng);
        if (r == rows - 1 && i % 3 == 0 && rows > 1) v = static_cast<int>(to_double(q[0][c] + q[r - 1][c]));
        q[r][c] = v;
        f[r][c] = v;
      }
    }
    CHECK(exact_rank(q) == numeric_rank(f, 1e-9));
  }
}

TEST_CASE("frame solve and span membership") {
  MatQ frame = Q({{1, 1, 1, 1}, {0, 1, -2, -1}, {-2, 0, 0, 0}, {2, 0, 0, 2}});
  VecQ v{Rational(0), Rational(0), Rational(0), Rational(-2)};
  auto c = solve_frame_exact(frame, v);
  REQUIRE(c);
  VecQ back(4, Rational(0));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) back[j] += (*c)[i] * frame[i][j];
  }
  CHECK(back == v);
  CHECK((*c)[3] == -1);
  CHECK_FALSE(in_span_exact(Q({{1, 1, 1, 1}, {0, 1, -2, -1}}), v));
  CHECK(in_span_exact(Q({{1, 0, 0}, {0, 1, 0}}), VecQ{Rational(3), Rational(-1), Rational(0)}));
  CHECK(span_residual({{1, 0, 0}, {0, 1, 0}}, {1, 2, 3}, 1e-9) == doctest::Approx(3.0));
  CHECK_FALSE(solve_frame_exact(Q({{1, 2}, {2, 4}}), VecQ{Rational(1), Rational(0)}));
}

TEST_CASE("normal vectors, null spaces and determinants") {
  MatQ rows = Q({{1, 1, 1}, {0, 1, -2}});
  auto nu = normal_vector_exact(rows);
  REQUIRE(nu);
  for (const auto& r : rows) {
    Rational s = 0;
    for (std::size_t i = 0; i < 3; ++i) s += r[i] * (*nu)[i];
    CHECK(s == 0);
  }
  CHECK_FALSE(normal_vector_exact(Q({{1, 2, 3}, {2, 4, 6}})));
  MatQ ns = null_space_exact(Q({{1, 1}, {1, 1}}));
  REQUIRE(ns.size() == 1);
  CHECK(ns[0][0] + ns[0][1] == 0);
  CHECK(determinant_exact(Q({{2, 1}, {1, 3}})) == 5);
  CHECK(determinant({{2, 1}, {1, 3}}) == doctest::Approx(5.0));
  VecD ev = symmetric_eigenvalues({{2, 1}, {1, 2}});
  CHECK(ev[0] == doctest::Approx(1.0));
  CHECK(ev[1] == doctest::Approx(3.0));
}

TEST_CASE("congruence") {
  MatQ b = Q({{1, 1}, {0, 1}});
  MatQ a = Q({{1, 0}, {0, -1}});
  CHECK(congruence(b, a) == Q({{0, -1}, {-1, -1}}));
}
