#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "caradory/core.hpp"

namespace caradory {

/// Finite vertex list. Vertices are stored as the columns of an n x m matrix
/// in a fixed index order.
class VertexSet {
 public:
  explicit VertexSet(Matrix vertices) : vertices_(std::move(vertices)) {
    if (vertices_.rows() < 1) throw InputError("vertex set: dimension must be >= 1");
    if (vertices_.cols() < 1) throw InputError("vertex set: needs at least one vertex");
    if (!vertices_.allFinite()) throw InputError("vertex set: non-finite coordinate");
  }

  /// Builds a set from row-major vertex lists, checking rectangularity.
  static VertexSet from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw InputError("vertex set: needs at least one vertex");
    const std::size_t n = rows.front().size();
    Matrix v(static_cast<Index>(n), static_cast<Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (rows[j].size() != n) {
        throw InputError("vertex set: vertex " + std::to_string(j) + " has dimension " +
                         std::to_string(rows[j].size()) + ", expected " + std::to_string(n));
      }
      for (std::size_t i = 0; i < n; ++i) v(static_cast<Index>(i), static_cast<Index>(j)) = rows[j][i];
    }
    return VertexSet(std::move(v));
  }

  Index dim() const { return vertices_.rows(); }
  Index size() const { return vertices_.cols(); }
  auto vertex(Index i) const { return vertices_.col(i); }
  const Matrix& matrix() const { return vertices_; }

 private:
  Matrix vertices_;
};

/// {v : ||v - center||_q <= radius} with q in [2, inf).
struct LqBall {
  Vector center;
  double radius = 1.0;
  double q = 2.0;

  LqBall(Vector c, double r, double exponent) : center(std::move(c)), radius(r), q(exponent) {
    if (center.size() < 1) throw InputError("lq ball: dimension must be >= 1");
    if (!center.allFinite()) throw InputError("lq ball: non-finite center");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("lq ball: radius must be positive");
    if (!(q >= 2.0) || std::isinf(q)) throw InputError("lq ball: q must lie in [2, inf)");
  }

  Index dim() const { return center.size(); }
};

using FeasibleSet = std::variant<VertexSet, LqBall>;

inline Index dimension(const FeasibleSet& set) {
  return std::visit([](const auto& s) { return s.dim(); }, set);
}

namespace detail {
inline void require_dim(Index expected, Index got, const char* what) {
  if (expected != got) {
    throw InputError(std::string(what) + ": dimension mismatch (expected " + std::to_string(expected) +
                     ", got " + std::to_string(got) + ")");
  }
}
}  // namespace detail

/// Index of the vertex minimizing <v, g>; ties go to the smallest index.
inline Index lmo_vertices(const VertexSet& set, const Vector& g) {
  detail::require_dim(set.dim(), g.size(), "lmo_vertices");
  const Vector scores = set.matrix().transpose() * g;
  Index best = 0;
  for (Index i = 1; i < scores.size(); ++i) {
    if (scores[i] < scores[best]) best = i;
  }
  return best;
}

/// Closed-form minimizer of <v, g> over an l_q ball:
/// v = center - radius * sign(g) |g|^{s-1} / ||g||_s^{s-1}, s = q/(q-1).
inline Vector lmo_lq_ball(const LqBall& ball, const Vector& g) {
  detail::require_dim(ball.dim(), g.size(), "lmo_lq_ball");
  if (!g.allFinite()) throw InputError("lmo_lq_ball: non-finite direction");
  const double s = dual_exponent(ball.q);
  const ScaledPower pw = scaled_signed_power(g, s - 1.0);
  if (pw.scale == 0.0) throw DegenerateGradient("lmo_lq_ball: zero direction");
  // |g_i|^{s-1} / ||g||_s^{s-1} is invariant under rescaling of g.
  const double denom = std::pow(lp_norm(g / pw.scale, s), s - 1.0);
  return ball.center - (ball.radius / denom) * pw.direction;
}

/// Nearest-extreme-point selection: argmin_i <v_i, g> + lambda ||v_i - x||_2^2.
inline Index nep_select(const VertexSet& set, const Vector& g, const Vector& x, double lambda) {
  detail::require_dim(set.dim(), g.size(), "nep_select");
  detail::require_dim(set.dim(), x.size(), "nep_select");
  if (!(lambda >= 0.0)) throw InputError("nep_select: lambda must be nonnegative");
  if (lambda == 0.0) return lmo_vertices(set, g);
  const Matrix& v = set.matrix();
  Index best = 0;
  double best_score = kInf;
  for (Index i = 0; i < v.cols(); ++i) {
    const double score = v.col(i).dot(g) + lambda * (v.col(i) - x).squaredNorm();
    if (score < best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

/// Exact l_p diameter by scanning all vertex pairs. O(m^2 n).
inline double diameter(const VertexSet& set, double p) {
  const Matrix& v = set.matrix();
  double best = 0.0;
  for (Index i = 0; i < v.cols(); ++i) {
    for (Index j = i + 1; j < v.cols(); ++j) {
      const double d = (p == 2.0) ? (v.col(i) - v.col(j)).norm() : lp_norm(v.col(i) - v.col(j), p);
      best = std::max(best, d);
    }
  }
  return best;
}

/// Diameter of an l_q ball measured in l_p: 2 r n^{max(0, 1/p - 1/q)}.
inline double diameter(const LqBall& ball, double p) {
  const double n = static_cast<double>(ball.dim());
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  return 2.0 * ball.radius * std::pow(n, std::max(0.0, inv_p - 1.0 / ball.q));
}

/// Diameter used for envelope checks. Above `exact_limit` vertices the value is
/// twice the largest distance to vertex 0 and `slack` is 2.
struct DiameterEstimate {
  double value = 0.0;
  double slack = 1.0;
};

inline DiameterEstimate diameter_estimate(const FeasibleSet& set, double p, Index exact_limit = 5000) {
  if (const auto* ball = std::get_if<LqBall>(&set)) return {diameter(*ball, p), 1.0};
  const auto& vs = std::get<VertexSet>(set);
  if (vs.size() <= exact_limit) return {diameter(vs, p), 1.0};
  double far = 0.0;
  for (Index j = 1; j < vs.size(); ++j) far = std::max(far, lp_norm(vs.vertex(j) - vs.vertex(0), p));
  return {2.0 * far, 2.0};
}

inline constexpr double kWeightSumTolerance = 1e-9;

/// Weighted sum of vertices; the weights must lie on the probability simplex.
inline Vector combination_point(const VertexSet& set, std::span<const double> weights) {
  if (static_cast<Index>(weights.size()) != set.size()) {
    throw InputError("combination_point: expected " + std::to_string(set.size()) + " weights, got " +
                     std::to_string(weights.size()));
  }
  double total = 0.0;
  Vector point = Vector::Zero(set.dim());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) {
      throw InvariantViolation("combination_point: negative weight at index " + std::to_string(i));
    }
    total += weights[i];
    if (weights[i] != 0.0) point += weights[i] * set.vertex(static_cast<Index>(i));
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    throw InvariantViolation("combination_point: weights sum to " + std::to_string(total));
  }
  return point;
}

/// One entry of a sparse convex decomposition.
struct Atom {
  std::size_t index = 0;
  double weight = 0.0;
  bool operator==(const Atom&) const = default;
};

/// Sparse convex decomposition produced by the solvers. For vertex sets the
/// atom indices refer to vertices; for balls they refer to `boundary_points`.
struct ConvexCombination {
  std::vector<Atom> support;
  Vector point;
  std::vector<Vector> boundary_points;

  std::size_t cardinality() const { return support.size(); }

  Vector atom_point(const FeasibleSet& set, std::size_t index) const {
    if (const auto* vs = std::get_if<VertexSet>(&set)) return vs->vertex(static_cast<Index>(index));
    return boundary_points.at(index);
  }

  /// Throws InvariantViolation unless weights are positive, sum to one and
  /// reconstruct `point`.
  void check(const FeasibleSet& set, double tol = 1e-9) const {
    double total = 0.0;
    Vector rebuilt = Vector::Zero(point.size());
    for (const Atom& a : support) {
      if (!(a.weight > 0.0) || a.weight > 1.0 + tol) {
        throw InvariantViolation("convex combination: weight out of (0,1] at atom " + std::to_string(a.index));
      }
      total += a.weight;
      rebuilt += a.weight * atom_point(set, a.index);
    }
    if (std::abs(total - 1.0) > tol) {
      throw InvariantViolation("convex combination: weights sum to " + std::to_string(total));
    }
    if ((rebuilt - point).norm() > tol * (1.0 + point.norm())) {
      throw InvariantViolation("convex combination: point does not match its weights");
    }
  }
};

/// Problem constants derived from the feasible set and the exponent p.
struct DerivedConstants {
  double D_p = 0.0;
  double D_2 = 0.0;
  double L = 0.0;    // smoothness of 1/2||x - x*||_p^2 w.r.t. l_p; 0 outside [2, inf)
  double G_2 = 0.0;  // l_2-Lipschitz constant of ||x - x*||_p
  double slack = 1.0;
};

inline DerivedConstants derive_constants(const FeasibleSet& set, double p) {
  DerivedConstants c;
  const DiameterEstimate dp = diameter_estimate(set, p);
  const DiameterEstimate d2 = p == 2.0 ? dp : diameter_estimate(set, 2.0);
  c.D_p = dp.value;
  c.D_2 = d2.value;
  c.slack = std::max(dp.slack, d2.slack);
  c.L = (p >= 2.0 && std::isfinite(p)) ? p - 1.0 : 0.0;
  c.G_2 = lp_over_l2_factor(p, dimension(set));
  return c;
}

}  // namespace caradory
