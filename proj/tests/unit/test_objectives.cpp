#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "caradory/objectives.hpp"
#include "caradory/random.hpp"

using namespace caradory;
using Catch::Approx;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Vector central_difference(const auto& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

// argmin over a 1-D grid of beta |y| + 1/2 (y - x)^2.
double grid_prox_abs(double x, double beta, double lo, double hi, double step) {
  double best = kInf, arg = lo;
  for (double y = lo; y <= hi; y += step) {
    const double v = beta * std::abs(y) + 0.5 * (y - x) * (y - x);
    if (v < best) {
      best = v;
      arg = y;
    }
  }
  return arg;
}

}  // namespace

TEST_CASE("mode follows the exponent", "[objectives]") {
  CHECK(mode_for_exponent(2.0) == Mode::SmoothSquared);
  CHECK(mode_for_exponent(7.0) == Mode::SmoothSquared);
  CHECK(mode_for_exponent(1.0) == Mode::NonsmoothNorm);
  CHECK(mode_for_exponent(1.5) == Mode::NonsmoothNorm);
  CHECK(mode_for_exponent(kInf) == Mode::NonsmoothNorm);
  CHECK_THROWS_AS(mode_for_exponent(0.5), InputError);
  CHECK_THROWS_AS(ObjectiveSpec(vec({std::nan(""), 0.0}), 2.0), InputError);
}

TEST_CASE("squared lp value", "[objectives]") {
  const ObjectiveSpec s2(vec({0, 0}), 2.0);
  CHECK(lp_sq_value(vec({0, 0}), s2) == 0.0);
  CHECK(lp_sq_value(vec({3, 4}), s2) == Approx(12.5));
  const ObjectiveSpec s3(vec({1, 1}), 3.0);
  // |1|^3 + |-2|^3 = 9, so 1/2 * 9^{2/3}.
  CHECK(lp_sq_value(vec({2, -1}), s3) == Approx(0.5 * std::pow(9.0, 2.0 / 3.0)).epsilon(1e-14));
  CHECK(lp_sq_value(vec({2, -1}), s3) == Approx(2.1634).margin(1e-4));
  const ObjectiveSpec s1(vec({0, 0}), 1.0);
  CHECK_THROWS_AS(lp_sq_value(vec({1, 1}), s1), InputError);
  CHECK_THROWS_AS(lp_sq_value(vec({1, 1, 1}), s2), InputError);
}

TEST_CASE("squared lp gradient", "[objectives]") {
  const ObjectiveSpec s2(vec({1, 2}), 2.0);
  CHECK(lp_sq_gradient(vec({4, -1}), s2) == vec({3, -3}));
  for (double p : {2.0, 3.0, 10.0}) {
    const ObjectiveSpec s(vec({0.5, -0.5}), p);
    CHECK(lp_sq_gradient(vec({0.5, -0.5}), s) == vec({0, 0}));
  }
  // Frozen from central differences of the value, h = 1e-6.
  const ObjectiveSpec s3(vec({0, 0}), 3.0);
  const Vector x = vec({1, -2});
  const Vector fd = central_difference([&](const Vector& y) { return lp_sq_value(y, s3); }, x, 1e-6);
  CHECK(fd[0] == Approx(0.4807).margin(1e-4));
  CHECK(fd[1] == Approx(-1.9230).margin(1e-4));
  const Vector g = lp_sq_gradient(x, s3);
  CHECK(g[0] == Approx(fd[0]).margin(1e-5));
  CHECK(g[1] == Approx(fd[1]).margin(1e-5));
  CHECK(g[0] == Approx(std::pow(9.0, -1.0 / 3.0)).epsilon(1e-14));
  CHECK(g[1] == Approx(-4.0 * std::pow(9.0, -1.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("large exponents stay finite", "[objectives]") {
  const ObjectiveSpec s(vec({0, 0, 0}), 400.0);
  const Vector x = vec({1e3, -5e2, 1e-3});
  const double v = lp_sq_value(x, s);
  const Vector g = lp_sq_gradient(x, s);
  CHECK(std::isfinite(v));
  CHECK(g.allFinite());
  CHECK(std::sqrt(2.0 * v) == Approx(1e3).epsilon(1e-2));
  CHECK(lp_norm(g, dual_exponent(400.0)) == Approx(std::sqrt(2.0 * v)).epsilon(1e-9));
}

TEST_CASE("nonsmooth lp value", "[objectives]") {
  const ObjectiveSpec s1(vec({0, 0}), 1.0);
  CHECK(lp_value(vec({0, 0}), s1) == 0.0);
  CHECK(lp_value(vec({1, -2}), s1) == 3.0);
  const ObjectiveSpec sinf(vec({0, 0}), kInf);
  CHECK(lp_value(vec({1, -2}), sinf) == 2.0);
  const ObjectiveSpec s3(vec({0, 0}), 3.0);
  CHECK_THROWS_AS(lp_value(vec({1, 1}), s3), InputError);
}

TEST_CASE("dual ball projection", "[objectives][prox]") {
  CHECK(project_dual_ball(vec({0.2, -0.3}), 1.0, 1.0) == vec({0.2, -0.3}));
  CHECK(project_dual_ball(vec({3, -0.5}), 1.0, 1.0) == vec({1, -0.5}));
  // q = 1: brute-force grid over the l1 ball for argmin ||z - (2,1)||_2.
  {
    double best = kInf;
    Vector arg(2);
    for (int i = -1000; i <= 1000; ++i) {
      for (int j = -1000; j <= 1000; ++j) {
        const Vector z = vec({i / 1000.0, j / 1000.0});
        if (z.cwiseAbs().sum() > 1.0 + 1e-12) continue;
        const double d = (z - vec({2, 1})).squaredNorm();
        if (d < best) {
          best = d;
          arg = z;
        }
      }
    }
    CHECK(arg[0] == Approx(1.0).margin(1e-3));
    CHECK(arg[1] == Approx(0.0).margin(1e-3));
    const Vector z = project_dual_ball(vec({2, 1}), 1.0, kInf);
    CHECK(z[0] == Approx(1.0).margin(1e-15));
    CHECK(z[1] == Approx(0.0).margin(1e-15));
  }
  CHECK_THROWS_AS(project_dual_ball(vec({1, 1}), 0.0, 1.0), InputError);
  CHECK_THROWS_AS(project_dual_ball(vec({1, 1}), 1.0, 3.0), InputError);
}

TEST_CASE("dual ball projection satisfies the variational inequality", "[objectives][prox][property]") {
  CounterRng rng(19);
  for (double p : {1.0, 1.2, 1.5, 1.8, 2.0, kInf}) {
    const double q = dual_exponent(p);
    for (int trial = 0; trial < 50; ++trial) {
      const Vector y = 3.0 * rng.normal_vector(5);
      const double radius = 0.2 + rng.uniform();
      const Vector pr = project_dual_ball(y, radius, p);
      CHECK(lp_norm(pr, q) <= radius * (1.0 + 1e-10));
      for (int k = 0; k < 20; ++k) {
        Vector z = rng.normal_vector(5);
        z *= radius * rng.uniform() / lp_norm(z, q);
        CHECK((y - pr).dot(z - pr) <= 1e-9);
      }
    }
  }
}

TEST_CASE("prox and Moreau envelope examples", "[objectives][prox]") {
  const ObjectiveSpec s1(vec({0, 0}), 1.0);
  const Vector x = vec({3, -0.5});
  // Oracle: per-coordinate grid minimization of |y| + 1/2 (y - x)^2.
  CHECK(grid_prox_abs(3.0, 1.0, -5.0, 5.0, 1e-4) == Approx(2.0).margin(1e-3));
  CHECK(grid_prox_abs(-0.5, 1.0, -5.0, 5.0, 1e-4) == Approx(0.0).margin(1e-3));
  const Vector pr = prox_lp(x, 1.0, s1);
  CHECK(pr[0] == Approx(2.0).margin(1e-14));
  CHECK(pr[1] == Approx(0.0).margin(1e-14));
  const Vector mg = moreau_gradient(x, 1.0, s1);
  CHECK(mg[0] == Approx(1.0).margin(1e-14));
  CHECK(mg[1] == Approx(-0.5).margin(1e-14));
  CHECK(moreau_value(x, 1.0, s1) == Approx(2.625).epsilon(1e-14));

  // Oracle: 2-D grid over [-1,3]^2 of ||y||_inf + 1/2||y - (2,1)||^2.
  const ObjectiveSpec sinf(vec({0, 0}), kInf);
  {
    double best = kInf;
    Vector arg(2);
    for (int i = 0; i <= 4000; ++i) {
      for (int j = 0; j <= 4000; ++j) {
        const Vector yy = vec({-1.0 + i * 1e-3, -1.0 + j * 1e-3});
        const double v = yy.cwiseAbs().maxCoeff() + 0.5 * (yy - vec({2, 1})).squaredNorm();
        if (v < best) {
          best = v;
          arg = yy;
        }
      }
    }
    CHECK(arg[0] == Approx(1.0).margin(2e-3));
    CHECK(arg[1] == Approx(1.0).margin(2e-3));
  }
  const Vector pinf = prox_lp(vec({2, 1}), 1.0, sinf);
  CHECK(pinf[0] == Approx(1.0).margin(1e-14));
  CHECK(pinf[1] == Approx(1.0).margin(1e-14));
  const Vector ginf = moreau_gradient(vec({2, 1}), 1.0, sinf);
  CHECK(ginf[0] == Approx(1.0).margin(1e-14));
  CHECK(ginf[1] == Approx(0.0).margin(1e-14));

  CHECK(prox_lp(vec({0, 0}), 0.7, s1) == vec({0, 0}));
  CHECK(moreau_gradient(vec({0, 0}), 0.7, s1).isZero());
  CHECK(moreau_value(vec({0, 0}), 0.7, s1) == 0.0);
  CHECK_THROWS_AS(prox_lp(x, 0.0, s1), InputError);
  const ObjectiveSpec s3(vec({0, 0}), 3.0);
  CHECK_THROWS_AS(prox_lp(x, 1.0, s3), InputError);
}

TEST_CASE("smoothing schedules", "[objectives]") {
  CHECK(smoothing_beta(DecayingBeta{2.0, 1.0}, 0) == Approx(4.0 / std::sqrt(2.0)));
  CHECK(smoothing_beta(DecayingBeta{2.0, 1.0}, 0) == Approx(2.8284).margin(1e-4));
  CHECK(smoothing_beta(FixedBeta{0.5, 1.0}, 17) == 0.5);
  CHECK(smoothing_beta(FixedBeta{0.5, 2.0}, 0) == 0.125);
}

TEST_CASE("smooth objective certificates", "[objectives][property]") {
  CounterRng rng(23);
  for (double p : {2.0, 2.5, 3.0, 7.0, 13.0}) {
    const ObjectiveSpec s(rng.normal_vector(6), p);
    const double L = p - 1.0;
    for (int i = 0; i < 300; ++i) {
      const Vector x = rng.normal_vector(6);
      const Vector y = rng.normal_vector(6);
      const Vector g = lp_sq_gradient(x, s);
      const double fx = lp_sq_value(x, s), fy = lp_sq_value(y, s);
      CHECK(lp_norm(g, dual_exponent(p)) == Approx(lp_norm(x - s.target, p)).epsilon(1e-9));
      const double dy = lp_norm(y - x, p);
      CHECK(fy <= fx + (y - x).dot(g) + 0.5 * L * dy * dy + 1e-12 * (1.0 + fy));
      CHECK(fy >= fx + (y - x).dot(g) - 1e-12 * (1.0 + fx));
    }
  }
}

TEST_CASE("Moreau envelope certificates", "[objectives][property]") {
  CounterRng rng(29);
  const Index n = 5;
  for (double p : {1.0, 1.3, 1.5, 1.9, kInf}) {
    const ObjectiveSpec s(rng.normal_vector(n), p);
    const double G2 = lp_over_l2_factor(p, n);
    for (int i = 0; i < 200; ++i) {
      const Vector x = s.target + 2.0 * rng.normal_vector(n);
      const double beta = 0.05 + rng.uniform();
      const double fb = moreau_value(x, beta, s), f = lp_value(x, s);
      CHECK(fb <= f + 1e-12);
      CHECK(f <= fb + beta * G2 * G2 / 2.0 + 1e-12);

      const Vector pr = prox_lp(x, beta, s);
      const double base = beta * lp_value(pr, s) + 0.5 * (x - pr).squaredNorm();
      for (int k = 0; k < 5; ++k) {
        const Vector y = pr + 1e-3 * rng.normal_vector(n);
        CHECK(beta * lp_value(y, s) + 0.5 * (x - y).squaredNorm() >= base - 1e-9);
      }

      const Vector g = moreau_gradient(x, beta, s);
      const Vector fd = central_difference([&](const Vector& z) { return moreau_value(z, beta, s); }, x, 1e-6);
      CHECK((g - fd).cwiseAbs().maxCoeff() <= 1e-5);

      const Vector y = s.target + 2.0 * rng.normal_vector(n);
      CHECK(std::abs(lp_value(x, s) - lp_value(y, s)) <= G2 * (x - y).norm() * (1.0 + 1e-12));
    }
  }
}
