#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "caradory/core.hpp"

namespace caradory {

/// SmoothSquared: f(x) = 1/2 ||x - x*||_p^2, p in [2, inf).
/// NonsmoothNorm: f(x) = ||x - x*||_p, p in [1, 2) or p = inf.
enum class Mode { SmoothSquared, NonsmoothNorm };

inline Mode mode_for_exponent(double p) {
  if (std::isnan(p) || p < 1.0) throw InputError("exponent p must lie in [1, inf]");
  if (std::isinf(p) || p < 2.0) return Mode::NonsmoothNorm;
  return Mode::SmoothSquared;
}

inline const char* to_string(Mode m) {
  return m == Mode::SmoothSquared ? "smooth-squared" : "nonsmooth-norm";
}

struct ObjectiveSpec {
  Vector target;
  double p = 2.0;
  Mode mode = Mode::SmoothSquared;

  ObjectiveSpec(Vector x_star, double exponent)
      : target(std::move(x_star)), p(exponent), mode(mode_for_exponent(exponent)) {
    if (target.size() < 1) throw InputError("objective: empty target");
    if (!target.allFinite()) throw InputError("objective: non-finite target");
  }

  Index dim() const { return target.size(); }
};

namespace detail {
inline void require_mode(const ObjectiveSpec& spec, Mode mode, const char* what) {
  if (spec.mode != mode) {
    throw InputError(std::string(what) + " requires " + to_string(mode) + " mode (p = " +
                     format_exponent(spec.p) + ")");
  }
}
inline void require_same_dim(const ObjectiveSpec& spec, const Vector& x, const char* what) {
  if (x.size() != spec.dim()) {
    throw InputError(std::string(what) + ": dimension mismatch (expected " + std::to_string(spec.dim()) +
                     ", got " + std::to_string(x.size()) + ")");
  }
}
}  // namespace detail

inline double lp_sq_value(const Vector& x, const ObjectiveSpec& spec) {
  detail::require_mode(spec, Mode::SmoothSquared, "lp_sq_value");
  detail::require_same_dim(spec, x, "lp_sq_value");
  const double r = lp_norm(x - spec.target, spec.p);
  return 0.5 * r * r;
}

/// grad = ||d||_p^{2-p} sign(d)|d|^{p-1}, d = x - x*, and 0 at d = 0.
/// Evaluated as m S^{2-p} sign(d)(|d|/m)^{p-1} with m = max|d_i| and
/// S = ||d/m||_p in [1, n^{1/p}].
inline Vector lp_sq_gradient(const Vector& x, const ObjectiveSpec& spec) {
  detail::require_mode(spec, Mode::SmoothSquared, "lp_sq_gradient");
  detail::require_same_dim(spec, x, "lp_sq_gradient");
  const Vector d = x - spec.target;
  if (spec.p == 2.0) return d;
  ScaledPower pw = scaled_signed_power(d, spec.p - 1.0);
  if (pw.scale == 0.0) return Vector::Zero(d.size());
  const double s = lp_norm(d / pw.scale, spec.p);
  return (pw.scale * std::pow(s, 2.0 - spec.p)) * pw.direction;
}

inline double lp_value(const Vector& x, const ObjectiveSpec& spec) {
  detail::require_mode(spec, Mode::NonsmoothNorm, "lp_value");
  detail::require_same_dim(spec, x, "lp_value");
  return lp_norm(x - spec.target, spec.p);
}

/// Distance ||x - x*||_p, valid in either mode.
inline double target_distance(const Vector& x, const ObjectiveSpec& spec) {
  detail::require_same_dim(spec, x, "target_distance");
  return lp_norm(x - spec.target, spec.p);
}

namespace detail {

/// Euclidean projection of y >= 0 onto {z >= 0, sum z = radius}.
inline Vector project_simplex(const Vector& y, double radius) {
  std::vector<double> sorted(y.data(), y.data() + y.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  return (y.array() - theta).max(0.0).matrix();
}

/// Root of s + c s^{e} = a on [0, a] for e > 1, c > 0, a > 0. The left side
/// is convex and increasing, so Newton from an upper bound decreases
/// monotonically to the root.
inline double solve_power_shrinkage(double a, double c, double e) {
  double s = std::min(a, std::pow(a / c, 1.0 / e));
  for (int it = 0; it < 200; ++it) {
    const double pe = std::pow(s, e - 1.0);
    const double h = s + c * pe * s - a;
    const double dh = 1.0 + c * e * pe;
    const double next = std::max(0.0, s - h / dh);
    if (!(next < s) || s - next <= 1e-17 * a) return next;
    s = next;
  }
  return s;
}

}  // namespace detail

inline constexpr double kDualBallResidual = 1e-12;
inline constexpr int kDualBallMaxIterations = 200;

/// Euclidean projection of y onto {z : ||z||_q <= radius}, q = p/(p-1) the dual
/// exponent of p. Supports p in [1, 2] and p = inf, i.e. q in [2, inf].
inline Vector project_dual_ball(const Vector& y, double radius, double p) {
  if (!(radius > 0.0)) throw InputError("project_dual_ball: radius must be positive");
  if (!y.allFinite()) throw InputError("project_dual_ball: non-finite input");
  const double q = dual_exponent(p);
  if (std::isinf(q)) return y.cwiseMax(-radius).cwiseMin(radius);
  if (q == 1.0) {
    if (y.cwiseAbs().sum() <= radius) return y;
    const Vector mag = detail::project_simplex(y.cwiseAbs(), radius);
    return mag.cwiseProduct(y.cwiseSign());
  }
  if (q == 2.0) {
    const double nrm = y.norm();
    return nrm <= radius ? y : Vector(y * (radius / nrm));
  }
  if (q < 2.0) throw InputError("project_dual_ball: p must lie in [1, 2] or be inf");

  // Work on the unit ball with a = |y| / radius. KKT: s_i + c s_i^{q-1} = a_i,
  // where c >= 0 is fixed by sum s_i^q = 1. c = ||a||_p is a valid upper bracket.
  const Vector a = y.cwiseAbs() / radius;
  if (lp_norm(a, q) <= 1.0) return y;
  const double e = q - 1.0;
  Vector s(a.size());
  auto residual = [&](double c) {
    double total = 0.0;
    for (Index i = 0; i < a.size(); ++i) {
      s[i] = a[i] == 0.0 ? 0.0 : detail::solve_power_shrinkage(a[i], c, e);
      total += std::pow(s[i], q);
    }
    return total - 1.0;
  };
  double lo = 0.0;
  double hi = lp_norm(a, p);
  double mid = hi;
  double r = residual(hi);
  int it = 0;
  for (; it < kDualBallMaxIterations && std::abs(r) > kDualBallResidual; ++it) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    r = residual(mid);
    (r > 0.0 ? lo : hi) = mid;
  }
  if (std::abs(r) > kDualBallResidual) {
    throw NumericalError("project_dual_ball: multiplier bisection stalled after " + std::to_string(it) +
                         " iterations (q = " + std::to_string(q) + ", residual = " + std::to_string(r) +
                         ", bracket = [" + std::to_string(lo) + ", " + std::to_string(hi) + "])");
  }
  Vector z(a.size());
  for (Index i = 0; i < a.size(); ++i) z[i] = y[i] < 0.0 ? -radius * s[i] : radius * s[i];
  return z;
}

/// prox of beta ||. - x*||_p at x, via Moreau decomposition:
/// x* + d - P_{beta B_q}(d) with d = x - x*.
inline Vector prox_lp(const Vector& x, double beta, const ObjectiveSpec& spec) {
  detail::require_mode(spec, Mode::NonsmoothNorm, "prox_lp");
  detail::require_same_dim(spec, x, "prox_lp");
  if (!(beta > 0.0)) throw InputError("prox_lp: beta must be positive");
  const Vector d = x - spec.target;
  return spec.target + d - project_dual_ball(d, beta, spec.p);
}

/// Gradient of the Moreau envelope f_beta: (x - prox_{beta f}(x)) / beta.
inline Vector moreau_gradient(const Vector& x, double beta, const ObjectiveSpec& spec) {
  return (x - prox_lp(x, beta, spec)) / beta;
}

inline double moreau_value(const Vector& x, double beta, const ObjectiveSpec& spec) {
  const Vector y = prox_lp(x, beta, spec);
  return lp_norm(y - spec.target, spec.p) + (x - y).squaredNorm() / (2.0 * beta);
}

/// beta = epsilon / G_2^2.
struct FixedBeta {
  double epsilon = 0.0;
  double G2 = 1.0;
};

/// beta_t = 2 (D_2 / G_2) / sqrt(t + 2).
struct DecayingBeta {
  double D2 = 0.0;
  double G2 = 1.0;
};

using SmoothingSchedule = std::variant<FixedBeta, DecayingBeta>;

inline double smoothing_beta(const SmoothingSchedule& schedule, std::size_t t) {
  return std::visit(
      [t](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, FixedBeta>) {
          return s.epsilon / (s.G2 * s.G2);
        } else {
          return 2.0 * (s.D2 / s.G2) / std::sqrt(static_cast<double>(t) + 2.0);
        }
      },
      schedule);
}

}  // namespace caradory
