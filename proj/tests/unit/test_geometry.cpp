#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "caradory/geometry.hpp"
#include "caradory/random.hpp"

using namespace caradory;
using Catch::Approx;

namespace {

VertexSet make(std::vector<std::vector<double>> rows) { return VertexSet::from_rows(rows); }

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Brute-force minimizer of <v, g> over the unit l_q sphere in R^2 by angle grid.
Vector grid_lmo_2d(double q, const Vector& g, int steps) {
  double best = kInf;
  Vector arg(2);
  for (int s = 0; s < steps; ++s) {
    const double th = 2.0 * std::numbers::pi * s / steps;
    Vector u(2);
    u << std::cos(th), std::sin(th);
    u /= lp_norm(u, q);
    const double val = u.dot(g);
    if (val < best) {
      best = val;
      arg = u;
    }
  }
  return arg;
}

}  // namespace

TEST_CASE("vertex set validates its input", "[geometry]") {
  CHECK_THROWS_AS(make({{1.0, 0.0}, {0.0}}), InputError);
  CHECK_THROWS_AS(make({}), InputError);
  CHECK_THROWS_AS(VertexSet(Matrix(0, 3)), InputError);
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(VertexSet(bad), InputError);
  const VertexSet v = make({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
  CHECK(v.dim() == 2);
  CHECK(v.size() == 3);
  CHECK(v.vertex(1)[1] == 4.0);
}

TEST_CASE("lq ball validates radius and exponent", "[geometry]") {
  CHECK_THROWS_AS(LqBall(Vector::Zero(2), 0.0, 2.0), InputError);
  CHECK_THROWS_AS(LqBall(Vector::Zero(2), 1.0, 1.5), InputError);
  CHECK_THROWS_AS(LqBall(Vector::Zero(2), 1.0, kInf), InputError);
  CHECK_NOTHROW(LqBall(Vector::Zero(2), 1.0, 7.0));
}

TEST_CASE("lmo over vertices", "[geometry][lmo]") {
  const VertexSet two = make({{1, 0}, {0, 1}});
  CHECK(lmo_vertices(two, vec({1, 0})) == 1);
  CHECK(lmo_vertices(two, vec({0, 0})) == 0);
  const VertexSet three = make({{1, 0}, {0, 1}, {-1, -1}});
  CHECK(lmo_vertices(three, vec({1, 1})) == 2);
  CHECK_THROWS_AS(lmo_vertices(two, vec({1, 0, 0})), InputError);
}

TEST_CASE("lmo over vertices certifies optimality on random data", "[geometry][lmo][property]") {
  CounterRng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix m(5, 9);
    for (Index j = 0; j < 9; ++j) m.col(j) = rng.normal_vector(5);
    const VertexSet v(m);
    const Vector g = rng.normal_vector(5);
    const Index out = lmo_vertices(v, g);
    for (Index j = 0; j < v.size(); ++j) CHECK(v.vertex(out).dot(g) <= v.vertex(j).dot(g));
  }
}

TEST_CASE("lmo over l2 and l4 balls", "[geometry][lmo]") {
  const LqBall unit2(Vector::Zero(2), 1.0, 2.0);
  const Vector a = lmo_lq_ball(unit2, vec({3, 4}));
  CHECK(a[0] == Approx(-0.6).margin(1e-15));
  CHECK(a[1] == Approx(-0.8).margin(1e-15));
  const Vector b = lmo_lq_ball(unit2, vec({1, 0}));
  CHECK(b[0] == Approx(-1.0));
  CHECK(b[1] == Approx(0.0).margin(1e-15));
  CHECK_THROWS_AS(lmo_lq_ball(unit2, vec({0, 0})), DegenerateGradient);

  // Frozen against a 2-D angle grid over the l4 sphere.
  const LqBall unit4(Vector::Zero(2), 1.0, 4.0);
  const Vector grid = grid_lmo_2d(4.0, vec({1, 1}), 2000000);
  const double expected = -std::pow(2.0, -0.25);
  CHECK(grid[0] == Approx(expected).margin(1e-5));
  const Vector c = lmo_lq_ball(unit4, vec({1, 1}));
  CHECK(c[0] == Approx(expected).margin(1e-12));
  CHECK(c[1] == Approx(expected).margin(1e-12));
  CHECK(c[0] == Approx(grid[0]).margin(1e-5));
}

TEST_CASE("lmo over lq balls lies on the sphere and beats random boundary points", "[geometry][lmo][property]") {
  CounterRng rng(5);
  for (double q : {2.0, 3.0, 4.0, 9.0}) {
    const Vector center = rng.normal_vector(4);
    const LqBall ball(center, 1.7, q);
    const Vector g = rng.normal_vector(4);
    const Vector v = lmo_lq_ball(ball, g);
    CHECK(lp_norm(v - center, q) == Approx(1.7).margin(1e-10));
    for (int i = 0; i < 1000; ++i) {
      const Vector u = rng.normal_vector(4);
      const Vector w = center + 1.7 * u / lp_norm(u, q);
      CHECK(v.dot(g) <= w.dot(g) + 1e-8);
    }
  }
}

TEST_CASE("nearest extreme point oracle", "[geometry][nep]") {
  const VertexSet two = make({{1, 0}, {0, 1}});
  CHECK(nep_select(two, vec({0, 0}), vec({1, 0}), 1.0) == 0);
  // Brute force: <v,g> + ||v - x||^2 = 2 + 4 for (2,0) and 0 + 1 for (0,1).
  const VertexSet far = make({{2, 0}, {0, 1}});
  CHECK(nep_select(far, vec({1, 0}), vec({0, 0}), 1.0) == 1);
  CHECK_THROWS_AS(nep_select(two, vec({0, 0}), vec({0, 0}), -1.0), InputError);

  CounterRng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix m(3, 7);
    for (Index j = 0; j < 7; ++j) m.col(j) = rng.normal_vector(3);
    const VertexSet v(m);
    const Vector g = rng.normal_vector(3);
    const Vector x = rng.normal_vector(3);
    CHECK(nep_select(v, g, x, 0.0) == lmo_vertices(v, g));
  }
}

TEST_CASE("nep on equal-norm vertices equals a shifted lmo", "[geometry][nep][property]") {
  CounterRng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix m(4, 10);
    for (Index j = 0; j < 10; ++j) {
      const Vector u = rng.normal_vector(4);
      m.col(j) = u / u.norm();
    }
    const VertexSet v(m);
    const Vector g = rng.normal_vector(4);
    const Vector x = rng.normal_vector(4);
    const double lambda = rng.uniform() * 3.0;
    CHECK(nep_select(v, g, x, lambda) == lmo_vertices(v, g - 2.0 * lambda * x));
  }
}

TEST_CASE("diameters", "[geometry][diameter]") {
  CHECK(diameter(make({{0, 0}, {1, 0}}), 2.0) == Approx(1.0));
  CHECK(diameter(make({{0, 0}, {1, 1}}), kInf) == Approx(1.0));
  // Pairs: (1,0)-(0,0) -> 1, (0,1)-(0,0) -> 1, (1,0)-(0,1) -> 2^{1/3}.
  CHECK(diameter(make({{0, 0}, {1, 0}, {0, 1}}), 3.0) == Approx(std::cbrt(2.0)).epsilon(1e-14));
  CHECK(diameter(make({{3, 4}}), 2.0) == 0.0);
  CHECK(diameter(LqBall(Vector::Zero(4), 1.0, 2.0), 2.0) == Approx(2.0));
  CHECK(diameter(LqBall(Vector::Zero(4), 1.0, 2.0), 1.0) == Approx(4.0));  // 2 * 4^{1/2}
}

TEST_CASE("diameter estimate above the exact limit carries slack", "[geometry][diameter]") {
  CounterRng rng(1);
  Matrix m(3, 40);
  for (Index j = 0; j < 40; ++j) m.col(j) = rng.normal_vector(3);
  const FeasibleSet set = VertexSet(m);
  const DiameterEstimate exact = diameter_estimate(set, 2.0);
  const DiameterEstimate approx = diameter_estimate(set, 2.0, 10);
  CHECK(exact.slack == 1.0);
  CHECK(approx.slack == 2.0);
  CHECK(approx.value >= exact.value);
  CHECK(approx.value <= 2.0 * exact.value);
}

TEST_CASE("derived constants are consistent", "[geometry]") {
  CounterRng rng(2);
  Matrix m(6, 12);
  for (Index j = 0; j < 12; ++j) m.col(j) = rng.normal_vector(6);
  const FeasibleSet set = VertexSet(m);
  for (double p : {1.0, 1.5, 2.0, 3.0, kInf}) {
    const DerivedConstants c = derive_constants(set, p);
    CHECK(c.D_p >= 0.0);
    CHECK(c.D_2 >= 0.0);
    CHECK(c.D_p <= lp_over_l2_factor(p, 6) * c.D_2 * (1.0 + 1e-12));
  }
  CHECK(derive_constants(set, 3.0).L == 2.0);
  CHECK(derive_constants(set, 1.0).G_2 == Approx(std::sqrt(6.0)));
  CHECK(derive_constants(set, kInf).G_2 == 1.0);
}

TEST_CASE("combination point", "[geometry]") {
  const VertexSet two = make({{1, 0}, {0, 1}});
  std::vector<double> w1{1.0, 0.0};
  CHECK(combination_point(two, w1) == vec({1, 0}));
  std::vector<double> w2{0.5, 0.5};
  CHECK(combination_point(two, w2) == vec({0.5, 0.5}));
  const VertexSet three = make({{0, 0}, {1, 0}, {0, 1}});
  std::vector<double> w3{0.25, 0.25, 0.5};
  const Vector pt = combination_point(three, w3);
  CHECK(pt[0] == Approx(0.25));
  CHECK(pt[1] == Approx(0.5));
  std::vector<double> neg{1.5, -0.5};
  CHECK_THROWS_AS(combination_point(two, neg), InvariantViolation);
  std::vector<double> off{0.5, 0.49};
  CHECK_THROWS_AS(combination_point(two, off), InvariantViolation);
  std::vector<double> wrong{1.0};
  CHECK_THROWS_AS(combination_point(two, wrong), InputError);
}

TEST_CASE("convex combination check", "[geometry]") {
  const FeasibleSet set = make({{1, 0}, {0, 1}});
  ConvexCombination c;
  c.support = {{0, 0.25}, {1, 0.75}};
  c.point = vec({0.25, 0.75});
  CHECK_NOTHROW(c.check(set));
  CHECK(c.cardinality() == 2);
  c.point[0] += 1e-6;
  CHECK_THROWS_AS(c.check(set), InvariantViolation);
  c.point[0] -= 1e-6;
  c.support[1].weight = 0.7;
  CHECK_THROWS_AS(c.check(set), InvariantViolation);
}
