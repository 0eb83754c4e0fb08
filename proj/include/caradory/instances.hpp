#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "caradory/core.hpp"
#include "caradory/geometry.hpp"
#include "caradory/objectives.hpp"
#include "caradory/random.hpp"

namespace caradory {

/// A generated or loaded problem: feasible set, target and exponent.
struct Instance {
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
  FeasibleSet set;
  Vector target;
  double p = 2.0;
  std::optional<std::size_t> ground_truth_cardinality;
  /// Weights the target was built from, when known.
  std::vector<Atom> ground_truth;
  /// False for projection instances whose target lies outside the set.
  bool target_inside = true;

  ObjectiveSpec objective() const { return ObjectiveSpec(target, p); }
  ObjectiveSpec objective(double exponent) const { return ObjectiveSpec(target, exponent); }
};

/// m standard Gaussian vertices in R^n; the target is a Dirichlet(1) mix of a
/// uniformly drawn k-subset.
inline Instance gen_random_polytope(Index n, Index m, Index k, std::uint64_t seed, double p = 2.0) {
  if (n < 1 || m < 1) throw InputError("random polytope: n and m must be >= 1");
  if (k < 1 || k > m) throw InputError("random polytope: k must lie in [1, m]");
  CounterRng rng(seed);
  Matrix v(n, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) v(i, j) = rng.normal();
  }
  std::vector<std::size_t> order(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(order.size() - i));
    std::swap(order[i], order[j]);
  }
  std::vector<std::size_t> chosen(order.begin(), order.begin() + k);
  std::sort(chosen.begin(), chosen.end());
  std::vector<double> w(chosen.size());
  double total = 0.0;
  for (double& x : w) total += (x = rng.exponential());
  Instance inst{"random", {{"n", n}, {"m", m}, {"k", k}, {"seed", seed}}, VertexSet(v), Vector::Zero(n), p};
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    w[i] /= total;
    inst.target += w[i] * v.col(static_cast<Index>(chosen[i]));
    inst.ground_truth.push_back({chosen[i], w[i]});
  }
  inst.ground_truth_cardinality = static_cast<std::size_t>(k);
  return inst;
}

using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

inline bool is_power_of_two(Index n) { return n >= 1 && (n & (n - 1)) == 0; }

/// Sylvester Hadamard matrix: H_1 = [1], H_2k = [[H, H], [H, -H]].
inline IntMatrix hadamard(Index n) {
  if (!is_power_of_two(n)) throw InputError("hadamard: n = " + std::to_string(n) + " is not a power of two");
  IntMatrix h(n, n);
  h(0, 0) = 1;
  for (Index k = 1; k < n; k *= 2) {
    h.block(0, k, k, k) = h.block(0, 0, k, k);
    h.block(k, 0, k, k) = h.block(0, 0, k, k);
    h.block(k, k, k, k) = -h.block(0, 0, k, k);
  }
  return h;
}

/// Columns of H_n scaled to unit l_p norm; the target e_1 / n^{1/p} is their
/// uniform combination.
inline Instance hadamard_instance(Index n, double p) {
  if (!(p >= 2.0)) throw InputError("hadamard instance: p must lie in [2, inf]");
  const IntMatrix h = hadamard(n);
  const double scale = std::pow(static_cast<double>(n), -1.0 / p);
  Matrix v = h.cast<double>() * scale;
  Vector target = Vector::Zero(n);
  target[0] = scale;
  Instance inst{"hadamard", {{"n", n}, {"p", p}}, VertexSet(std::move(v)), std::move(target), p};
  for (Index j = 0; j < n; ++j) inst.ground_truth.push_back({static_cast<std::size_t>(j), 1.0 / static_cast<double>(n)});
  inst.ground_truth_cardinality = static_cast<std::size_t>(n);
  return inst;
}

/// l_q ball of the given radius at the origin with target offset * e_1. The
/// target lies outside when offset > radius.
inline Instance ball_instance(Index n, double q, double radius, double offset, double p = 2.0) {
  Instance inst{"ball", {{"n", n}, {"q", q}, {"radius", radius}, {"offset", offset}},
                LqBall(Vector::Zero(n), radius, q), Vector::Zero(n), p};
  inst.target[0] = offset;
  inst.target_inside = std::abs(offset) <= radius;
  return inst;
}

/// dist_p(offset e_1, B_q(0, radius)) = max(0, |offset| - radius) for every p:
/// |d_1| <= ||d||_p and |x_1| <= ||x||_q <= radius.
inline double ball_instance_distance(const Instance& inst) {
  const double offset = inst.params.at("offset").get<double>();
  const double radius = inst.params.at("radius").get<double>();
  return std::max(0.0, std::abs(offset) - radius);
}

/// Vertices e_1..e_N of the standard simplex with the barycenter as target.
/// Its ball inside the affine hull has l_2 radius 1/sqrt(N(N-1)).
inline Instance simplex_barycenter_instance(Index N, double p) {
  if (N < 2) throw InputError("simplex instance: N must be >= 2");
  Instance inst{"simplex", {{"n", N}, {"p", p}}, VertexSet(Matrix::Identity(N, N)),
                Vector::Constant(N, 1.0 / static_cast<double>(N)), p};
  for (Index j = 0; j < N; ++j) inst.ground_truth.push_back({static_cast<std::size_t>(j), 1.0 / static_cast<double>(N)});
  inst.ground_truth_cardinality = static_cast<std::size_t>(N);
  return inst;
}

/// Any point within epsilon of the Hadamard target needs at least
/// 1/(epsilon^2 + 1/n) vertices.
inline double lower_bound_cardinality(Index n, double epsilon) {
  if (!is_power_of_two(n)) throw InputError("lower bound: n must be a power of two");
  if (!(epsilon > 0.0)) throw InputError("lower bound: epsilon must be positive");
  return 1.0 / (epsilon * epsilon + 1.0 / static_cast<double>(n));
}

/// s -> epsilon(s) = sqrt(1/s - 1/n) on [1, n].
struct LowerBoundCurve {
  Index n = 1;

  explicit LowerBoundCurve(Index dim) : n(dim) {
    if (!is_power_of_two(n)) throw InputError("lower bound curve: n must be a power of two");
  }

  double epsilon(double s) const {
    if (!(s >= 1.0) || s > static_cast<double>(n)) throw InputError("lower bound curve: s must lie in [1, n]");
    return std::sqrt(std::max(0.0, 1.0 / s - 1.0 / static_cast<double>(n)));
  }

  std::vector<std::pair<Index, double>> points() const {
    std::vector<std::pair<Index, double>> out;
    for (Index s = 1; s <= n; ++s) out.emplace_back(s, epsilon(static_cast<double>(s)));
    return out;
  }
};

// ---------------------------------------------------------------------------
// Small-instance ground truth

inline constexpr Index kMaxOracleVertices = 12;
inline constexpr double kMembershipTolerance = 1e-9;

struct MinimalCardinality {
  std::size_t cardinality = 0;
  std::vector<Atom> weights;
};

namespace detail {

/// Solves [V_S; 1^T] w = [x*; 1] in the least-squares sense; returns the
/// weights when the residual and the negative part stay within tolerance.
inline std::optional<Vector> hull_weights(const VertexSet& set, const std::vector<Index>& subset, const Vector& x,
                                          double tol) {
  const auto k = static_cast<Index>(subset.size());
  Matrix a(set.dim() + 1, k);
  for (Index j = 0; j < k; ++j) {
    a.block(0, j, set.dim(), 1) = set.vertex(subset[static_cast<std::size_t>(j)]);
    a(set.dim(), j) = 1.0;
  }
  Vector rhs(set.dim() + 1);
  rhs.head(set.dim()) = x;
  rhs[set.dim()] = 1.0;
  const Vector w = a.completeOrthogonalDecomposition().solve(rhs);
  if ((a * w - rhs).norm() > tol) return std::nullopt;
  if (w.minCoeff() < -tol) return std::nullopt;
  return w;
}

/// Calls visit(subset) for every subset of {0..m-1} of size k in
/// lexicographic order; stops when visit returns true.
template <class Visit>
bool for_each_subset(Index m, Index k, Visit visit) {
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    if (visit(idx)) return true;
    Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) return false;
    ++idx[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace detail

/// Smallest number of vertices whose hull contains x, by enumeration of
/// subsets in increasing size. Empty when x is outside conv(V).
inline std::optional<MinimalCardinality> minimal_cardinality(const VertexSet& set, const Vector& x,
                                                             double tol = kMembershipTolerance) {
  if (set.size() > kMaxOracleVertices) {
    throw UnsupportedSize("minimal cardinality: " + std::to_string(set.size()) + " vertices exceeds the limit of " +
                          std::to_string(kMaxOracleVertices));
  }
  detail::require_dim(set.dim(), x.size(), "minimal_cardinality");
  for (Index k = 1; k <= set.size(); ++k) {
    std::optional<MinimalCardinality> found;
    detail::for_each_subset(set.size(), k, [&](const std::vector<Index>& subset) {
      const auto w = detail::hull_weights(set, subset, x, tol);
      if (!w) return false;
      MinimalCardinality mc;
      mc.cardinality = static_cast<std::size_t>(k);
      for (Index j = 0; j < k; ++j) {
        mc.weights.push_back({static_cast<std::size_t>(subset[static_cast<std::size_t>(j)]), std::max(0.0, (*w)[j])});
      }
      found = std::move(mc);
      return true;
    });
    if (found) return found;
  }
  return std::nullopt;
}

struct OracleDistance {
  double distance = 0.0;
  /// Certified lower bound sqrt(2 max(0, F - gap)) from the FW gap.
  double lower = 0.0;
  Vector weights;
  Vector point;
  double fw_gap = 0.0;
  std::size_t iterations = 0;
};

/// dist_p(x, conv V) by accelerated projected gradient on the weight simplex
/// for F(w) = 1/2||V w - x||_p^2, p in (1, inf), with backtracking and
/// adaptive restart. Certified by the FW gap of F.
inline OracleDistance oracle_distance(const VertexSet& set, const Vector& x, double p, double gap_tol = 1e-15,
                                      std::size_t max_iter = 200000) {
  if (!(p > 1.0) || std::isinf(p)) throw InputError("oracle distance: p must lie in (1, inf)");
  detail::require_dim(set.dim(), x.size(), "oracle_distance");
  const Matrix& v = set.matrix();
  const Index m = set.size();

  auto value = [&](const Vector& w) {
    const double r = lp_norm(v * w - x, p);
    return 0.5 * r * r;
  };
  // Gradient of 1/2||d||_p^2 is ||d||_p^{2-p} sign(d)|d|^{p-1}; chained through V^T.
  auto gradient = [&](const Vector& w) -> Vector {
    const Vector d = v * w - x;
    const double nrm = lp_norm(d, p);
    if (nrm == 0.0) return Vector::Zero(m);
    Vector g(d.size());
    for (Index i = 0; i < d.size(); ++i) {
      const double a = std::abs(d[i]) / nrm;
      g[i] = d[i] == 0.0 ? 0.0 : std::copysign(nrm * std::pow(a, p - 1.0), d[i]);
    }
    return v.transpose() * g;
  };
  auto project = [&](const Vector& y) -> Vector {
    Vector s = y;
    std::vector<double> sorted(s.data(), s.data() + m);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      cum += sorted[k];
      const double t = (cum - 1.0) / static_cast<double>(k + 1);
      if (sorted[k] > t) theta = t;
    }
    return (s.array() - theta).max(0.0).matrix();
  };

  OracleDistance out;
  Vector w = Vector::Constant(m, 1.0 / static_cast<double>(m));
  Vector y = w;
  double momentum = 1.0;
  double step = 1.0;
  double fw = value(w);
  std::size_t it = 0;
  double gap = kInf;
  for (; it < max_iter; ++it) {
    const Vector gw = gradient(w);
    gap = w.dot(gw) - gw.minCoeff();
    if (gap <= gap_tol * std::max(1.0, fw)) break;
    const Vector gy = gradient(y);
    const double fy = value(y);
    Vector next;
    double fnext;
    while (true) {
      next = project(y - step * gy);
      fnext = value(next);
      const Vector diff = next - y;
      if (fnext <= fy + gy.dot(diff) + diff.squaredNorm() / (2.0 * step) + 1e-16 * std::abs(fy)) break;
      step *= 0.5;
      if (step < 1e-20) break;
    }
    if (fnext > fw) {
      // Restart the momentum when the objective goes up.
      y = w;
      momentum = 1.0;
      step *= 0.5;
      if (step < 1e-20) break;
      continue;
    }
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    y = next + ((momentum - 1.0) / next_momentum) * (next - w);
    momentum = next_momentum;
    w = std::move(next);
    fw = fnext;
    step *= 1.25;
  }
  out.weights = w;
  out.point = v * w;
  out.distance = std::sqrt(2.0 * fw);
  out.fw_gap = gap;
  out.lower = std::sqrt(2.0 * std::max(0.0, fw - gap));
  out.iterations = it;
  return out;
}

struct SmallOracle {
  double distance = 0.0;
  std::optional<MinimalCardinality> minimal;
};

/// Ground truth for small vertex sets: dist_p(x*, C) and, for m <= 12, the
/// minimal cardinality of a decomposition of x*.
inline SmallOracle exact_small_oracle(const VertexSet& set, const Vector& x, double p) {
  SmallOracle out;
  if (set.size() <= kMaxOracleVertices) out.minimal = minimal_cardinality(set, x);
  if (out.minimal) {
    out.distance = 0.0;
  } else {
    out.distance = oracle_distance(set, x, p).distance;
  }
  return out;
}

/// Constants of the nearest-extreme-point rate, by enumeration (m <= 12):
/// D_* is the smallest l_2 diameter of a vertex subset whose hull contains x,
/// D_0 the l_2 diameter of the vertices no worse than vertex `start`.
struct NepConstants {
  double D_star = 0.0;
  double D_0 = 0.0;
};

inline NepConstants nep_constants(const VertexSet& set, const Vector& x, double p, Index start = 0) {
  if (set.size() > kMaxOracleVertices) {
    throw UnsupportedSize("nep constants: " + std::to_string(set.size()) + " vertices exceeds the limit of " +
                          std::to_string(kMaxOracleVertices));
  }
  auto diam2 = [&](const std::vector<Index>& s) {
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = i + 1; j < s.size(); ++j) d = std::max(d, (set.vertex(s[i]) - set.vertex(s[j])).norm());
    }
    return d;
  };
  NepConstants c;
  c.D_star = kInf;
  for (Index k = 1; k <= set.size(); ++k) {
    detail::for_each_subset(set.size(), k, [&](const std::vector<Index>& subset) {
      if (detail::hull_weights(set, subset, x, kMembershipTolerance)) c.D_star = std::min(c.D_star, diam2(subset));
      return false;
    });
  }
  if (std::isinf(c.D_star)) throw InputError("nep constants: target is outside the hull");
  const double f0 = lp_norm(set.vertex(start) - x, p);
  std::vector<Index> level;
  for (Index j = 0; j < set.size(); ++j) {
    if (lp_norm(set.vertex(j) - x, p) <= f0) level.push_back(j);
  }
  c.D_0 = diam2(level);
  return c;
}

}  // namespace caradory
