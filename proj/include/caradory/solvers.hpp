#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "caradory/core.hpp"
#include "caradory/geometry.hpp"
#include "caradory/objectives.hpp"
#include "caradory/random.hpp"
#include "caradory/trace.hpp"

namespace caradory {

enum class Algorithm { FW, NEP_FW, FCFW, AFW, HCGS, SMOOTHED_FW };
enum class StepRule { OpenLoop, ClosedLoop };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::FW: return "fw";
    case Algorithm::NEP_FW: return "nep-fw";
    case Algorithm::FCFW: return "fcfw";
    case Algorithm::AFW: return "afw";
    case Algorithm::HCGS: return "hcgs";
    case Algorithm::SMOOTHED_FW: return "smoothed-fw";
  }
  return "unknown";
}

struct SolverConfig {
  Algorithm algorithm = Algorithm::FW;
  StepRule step = StepRule::ClosedLoop;
  double epsilon = 1e-2;
  std::size_t max_iter = 10000;
  std::optional<double> L_override;
  std::uint64_t seed = 0;
  /// FCFW correction tolerance; defaults to min(1e-12, (epsilon/10)^2).
  std::optional<double> inner_tolerance;
  /// Draw x0 uniformly from the vertices with `seed` instead of taking vertex 0.
  bool random_start = false;
  /// When false the solver ignores the accuracy target and runs to its cap.
  bool stop_at_target = true;

  double inner_tol() const {
    if (inner_tolerance) return *inner_tolerance;
    return std::min(1e-12, (epsilon / 10.0) * (epsilon / 10.0));
  }
};

/// Throws ConfigError when the configuration cannot be run on this problem.
inline void validate(const SolverConfig& cfg, const ObjectiveSpec& spec, const FeasibleSet& set) {
  if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (cfg.max_iter == 0) throw ConfigError("max_iter must be positive");
  if (dimension(set) != spec.dim()) {
    throw ConfigError("target dimension " + std::to_string(spec.dim()) + " does not match set dimension " +
                      std::to_string(dimension(set)));
  }
  const bool smoothed = cfg.algorithm == Algorithm::HCGS || cfg.algorithm == Algorithm::SMOOTHED_FW;
  if (smoothed && spec.mode != Mode::NonsmoothNorm) {
    throw ConfigError(std::string(to_string(cfg.algorithm)) + " requires p in [1,2) or inf");
  }
  if (!smoothed && spec.mode != Mode::SmoothSquared) {
    throw ConfigError(std::string(to_string(cfg.algorithm)) + " requires p in [2,inf)");
  }
  if (cfg.step == StepRule::ClosedLoop && spec.mode != Mode::SmoothSquared) {
    throw ConfigError("closed-loop steps require p in [2,inf)");
  }
  if (cfg.L_override && !(*cfg.L_override > 0.0)) throw ConfigError("L override must be positive");
  const bool vertex_only = cfg.algorithm == Algorithm::NEP_FW || cfg.algorithm == Algorithm::AFW;
  if (vertex_only && !std::holds_alternative<VertexSet>(set)) {
    throw ConfigError(std::string(to_string(cfg.algorithm)) + " requires a vertex set");
  }
  if (cfg.algorithm == Algorithm::NEP_FW && cfg.step != StepRule::OpenLoop) {
    throw ConfigError("nep-fw uses open-loop steps");
  }
  if (cfg.algorithm == Algorithm::AFW && cfg.step != StepRule::ClosedLoop) {
    throw ConfigError("afw uses closed-loop steps");
  }
}

// ---------------------------------------------------------------------------
// Step sizes

/// 2 / (t + 2).
inline double step_open_loop(std::size_t t) { return 2.0 / (static_cast<double>(t) + 2.0); }

struct ClosedLoopStep {
  double gamma = 0.0;
  /// x == v, or the FW gap is not positive: no descent is possible along v - x.
  bool degenerate = false;
};

/// min{ <x - v, g> / curvature, 1 } with curvature = L ||x - v||^2.
inline ClosedLoopStep step_closed_loop_ratio(double inner, double curvature) {
  if (!(curvature > 0.0)) return {0.0, true};
  if (!(inner > 0.0)) return {0.0, true};
  return {std::min(inner / curvature, 1.0), false};
}

/// Closed-loop step with the squared l_p norm in the denominator, the norm in
/// which L certifies smoothness.
inline ClosedLoopStep step_closed_loop(const Vector& x, const Vector& v, const Vector& g, double L, double p = 2.0) {
  if (!(L > 0.0)) throw InputError("step_closed_loop: L must be positive");
  const Vector u = x - v;
  const double nrm = lp_norm(u, p);
  return step_closed_loop_ratio(u.dot(g), L * nrm * nrm);
}

/// beta_t = 2 (D_2 / G_2) / sqrt(t + 2).
inline double hcgs_beta(double D2, double G2, std::size_t t) { return smoothing_beta(DecayingBeta{D2, G2}, t); }

/// Iteration budget floor(4 G_2^2 D_2^2 / eps^2) of the fixed-beta smoothed FW.
inline std::size_t smoothed_fw_budget(double G2, double D2, double epsilon) {
  const double b = std::floor(4.0 * G2 * G2 * D2 * D2 / (epsilon * epsilon));
  if (b >= 1e15) throw ConfigError("smoothed-fw iteration budget overflows; increase epsilon");
  return static_cast<std::size_t>(b);
}

struct SolveResult {
  ConvexCombination combination;
  RunTrace trace;
};

// ---------------------------------------------------------------------------
// Internal machinery

namespace detail {

inline constexpr double kPruneThreshold = 1e-12;

/// Atom access for a finite vertex set.
class VertexAtoms {
 public:
  explicit VertexAtoms(const VertexSet& set) : set_(set) {}
  Index dim() const { return set_.dim(); }
  std::size_t lmo(const Vector& g) { return static_cast<std::size_t>(lmo_vertices(set_, g)); }
  Vector atom(std::size_t i) const { return set_.vertex(static_cast<Index>(i)); }
  double score(std::size_t i, const Vector& g) const { return set_.vertex(static_cast<Index>(i)).dot(g); }
  bool single_point() const { return set_.size() == 1; }
  std::size_t start(const SolverConfig& cfg) const {
    if (!cfg.random_start) return 0;
    CounterRng rng(cfg.seed);
    return static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(set_.size())));
  }
  std::vector<Vector> exported() const { return {}; }
  const VertexSet& set() const { return set_; }

 private:
  const VertexSet& set_;
};

/// Atom access for an l_q ball. Selected boundary points are stored in order
/// of first selection; identical points share an index.
class BallAtoms {
 public:
  explicit BallAtoms(const LqBall& ball) : ball_(ball) {}
  Index dim() const { return ball_.dim(); }
  std::size_t lmo(const Vector& g) { return intern(lmo_lq_ball(ball_, g)); }
  const Vector& atom(std::size_t i) const { return points_[i]; }
  double score(std::size_t i, const Vector& g) const { return points_[i].dot(g); }
  bool single_point() const { return false; }
  std::size_t start(const SolverConfig& cfg) {
    CounterRng rng(cfg.seed);
    Vector dir = rng.normal_vector(ball_.dim());
    return lmo(dir);
  }
  std::vector<Vector> exported() const { return points_; }

 private:
  std::size_t intern(Vector v) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (points_[i] == v) return i;
    }
    points_.push_back(std::move(v));
    return points_.size() - 1;
  }

  const LqBall& ball_;
  std::vector<Vector> points_;
};

/// Sparse weights over atom indices, kept sorted by index. Mirrors the
/// iterate x = sum w_i a_i.
class ActiveSet {
 public:
  void reset(std::size_t id) {
    ids_ = {id};
    weights_ = {1.0};
  }

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::size_t>& ids() const { return ids_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& weights() { return weights_; }

  std::optional<std::size_t> position(std::size_t id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - ids_.begin());
  }

  double weight_of(std::size_t id) const {
    auto pos = position(id);
    return pos ? weights_[*pos] : 0.0;
  }

  /// Inserts `id` with weight 0 if absent; returns its position.
  std::size_t ensure(std::size_t id) {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    const auto pos = static_cast<std::size_t>(it - ids_.begin());
    if (it == ids_.end() || *it != id) {
      ids_.insert(it, id);
      weights_.insert(weights_.begin() + static_cast<std::ptrdiff_t>(pos), 0.0);
    }
    return pos;
  }

  /// w <- (1 - gamma) w + gamma e_id.
  void toward(std::size_t id, double gamma) {
    const std::size_t pos = ensure(id);
    if (gamma >= 1.0) {
      ids_ = {id};
      weights_ = {1.0};
      return;
    }
    for (double& w : weights_) w *= (1.0 - gamma);
    weights_[pos] += gamma;
  }

  /// w <- (1 + gamma) w - gamma e_id; a drop step removes `id` exactly.
  void away(std::size_t id, double gamma, bool drop) {
    const auto pos = position(id);
    if (!pos) throw InvariantViolation("away step from an inactive atom");
    for (double& w : weights_) w *= (1.0 + gamma);
    if (drop) {
      ids_.erase(ids_.begin() + static_cast<std::ptrdiff_t>(*pos));
      weights_.erase(weights_.begin() + static_cast<std::ptrdiff_t>(*pos));
    } else {
      weights_[*pos] -= gamma;
    }
  }

  /// Removes weights below the prune threshold and renormalizes. Returns true
  /// when the weights changed.
  bool prune() {
    bool removed = false;
    std::size_t out = 0;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (weights_[i] < kPruneThreshold) {
        removed = true;
        continue;
      }
      ids_[out] = ids_[i];
      weights_[out] = weights_[i];
      ++out;
    }
    ids_.resize(out);
    weights_.resize(out);
    if (ids_.empty()) throw InvariantViolation("active set emptied by pruning");
    double total = 0.0;
    for (double w : weights_) total += w;
    if (removed || std::abs(total - 1.0) > 1e-13) {
      for (double& w : weights_) w /= total;
      return true;
    }
    return false;
  }

  template <class Atoms>
  Vector point(const Atoms& atoms) const {
    Vector x = Vector::Zero(atoms.dim());
    for (std::size_t i = 0; i < ids_.size(); ++i) x += weights_[i] * atoms.atom(ids_[i]);
    return x;
  }

  std::vector<Atom> support() const {
    std::vector<Atom> out;
    out.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) out.push_back({ids_[i], weights_[i]});
    return out;
  }

 private:
  std::vector<std::size_t> ids_;
  std::vector<double> weights_;
};

/// Collects iteration records and keeps the best iterate seen.
class Recorder {
 public:
  Recorder(std::string algorithm, std::optional<double> reference) : start_(std::chrono::steady_clock::now()) {
    trace_.algorithm = std::move(algorithm);
    trace_.reference_value = reference;
  }

  IterationRecord& record(std::size_t t, double f, std::size_t cardinality) {
    IterationRecord r;
    r.t = t;
    r.f_value = f;
    r.primal_gap = trace_.reference_value ? f - *trace_.reference_value : 0.0;
    r.cardinality = cardinality;
    r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    trace_.records.push_back(r);
    return trace_.records.back();
  }

  IterationRecord& current() { return trace_.records.back(); }

  bool improves(double f) {
    if (f < best_f_) {
      best_f_ = f;
      return true;
    }
    return false;
  }

  RunTrace finish(Status status) {
    trace_.status = status;
    if (!trace_.reference_value) {
      double best = kInf;
      for (auto& r : trace_.records) {
        best = std::min(best, r.f_value);
      }
      for (auto& r : trace_.records) r.primal_gap = r.f_value - best;
    }
    return std::move(trace_);
  }

  void flag_inner_cap() { trace_.inner_cap_hit = true; }

 private:
  std::chrono::steady_clock::time_point start_;
  RunTrace trace_;
  double best_f_ = kInf;
};

/// Objective tracked in the trace: 1/2||x - x*||_p^2 or ||x - x*||_p.
inline double tracked_value(const Vector& x, const ObjectiveSpec& spec) {
  return spec.mode == Mode::SmoothSquared ? lp_sq_value(x, spec) : lp_value(x, spec);
}

/// Primal-gap threshold: eps^2 / 2 in squared mode, eps in norm mode.
inline double gap_threshold(const ObjectiveSpec& spec, double epsilon) {
  return spec.mode == Mode::SmoothSquared ? 0.5 * epsilon * epsilon : epsilon;
}

struct Snapshot {
  ActiveSet active;
  Vector x;
};

template <class Atoms>
ConvexCombination export_combination(const Atoms& atoms, const ActiveSet& active, const Vector& x) {
  ConvexCombination c;
  c.support = active.support();
  c.point = x;
  c.boundary_points = atoms.exported();
  return c;
}

/// Exact minimizer of phi(g) = f(y + g d) over [0, gmax] for the squared l_p
/// objective. Closed form for p = 2, otherwise bisection on phi'. The result
/// never increases f.
inline double exact_line_search(const Vector& y, const Vector& d, double gmax, const ObjectiveSpec& spec) {
  const Vector r = y - spec.target;
  if (spec.p == 2.0) {
    const double dd = d.squaredNorm();
    if (!(dd > 0.0)) return 0.0;
    return std::clamp(-r.dot(d) / dd, 0.0, gmax);
  }
  auto slope = [&](double g) { return lp_sq_gradient(y + g * d, spec).dot(d); };
  const double s0 = slope(0.0);
  if (!(s0 < 0.0)) return 0.0;
  double hi = gmax;
  double shi = 0.0;
  if (!std::isfinite(hi)) {
    hi = 1.0;
    while ((shi = slope(hi)) < 0.0 && hi < 1e12) hi *= 2.0;
    if (shi < 0.0) return hi;
  } else if ((shi = slope(hi)) <= 0.0) {
    return hi;
  }
  // Illinois variant of regula falsi on the monotone slope.
  double lo = 0.0, slo = s0;
  int side = 0;
  for (int it = 0; it < 100 && hi - lo > 1e-16 * hi; ++it) {
    double mid = hi - shi * (hi - lo) / (shi - slo);
    if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
    const double sm = slope(mid);
    if (std::abs(sm) <= 1e-15 * std::abs(s0)) return mid;
    if (sm < 0.0) {
      lo = mid;
      slo = sm;
      if (side == -1) shi *= 0.5;
      side = -1;
    } else {
      hi = mid;
      shi = sm;
      if (side == 1) slo *= 0.5;
      side = 1;
    }
  }
  return lo;
}

struct CorrectionOutcome {
  Vector weights;
  double fw_gap = 0.0;
  std::size_t iterations = 0;
  bool capped = false;
};

/// Away-step FW over the weight simplex of the columns of `atoms`, minimizing
/// 1/2||A w - x*||_p^2 with exact line search. When `first_toward` is set the
/// first iteration is a FW step towards that column.
inline CorrectionOutcome simplex_correction(const Matrix& atoms, Vector w, const ObjectiveSpec& spec, double tol,
                                            std::size_t cap, std::optional<Index> first_toward = std::nullopt) {
  const Index k = atoms.cols();
  Vector y = atoms * w;
  CorrectionOutcome out;
  for (std::size_t it = 0;; ++it) {
    const Vector g = lp_sq_gradient(y, spec);
    const Vector s = atoms.transpose() * g;
    double wg = 0.0;
    double magnitude = 0.0;
    Index fw = 0;
    Index aw = -1;
    for (Index i = 0; i < k; ++i) {
      wg += w[i] * s[i];
      magnitude += w[i] * std::abs(s[i]);
      if (s[i] < s[fw]) fw = i;
      if (w[i] > 0.0 && (aw < 0 || s[i] > s[aw])) aw = i;
    }
    out.fw_gap = wg - s[fw];
    out.iterations = it;
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (magnitude + std::abs(s[fw]));
    if (out.fw_gap <= std::max(tol, noise)) break;
    if (it >= cap) {
      out.capped = true;
      break;
    }
    const double away_gap = s[aw] - wg;
    bool toward = out.fw_gap >= away_gap;
    if (it == 0 && first_toward) {
      toward = true;
      fw = *first_toward;
    }
    Vector d;
    double gmax = 1.0;
    if (toward) {
      d = atoms.col(fw) - y;
    } else {
      const double alpha = w[aw];
      d = y - atoms.col(aw);
      gmax = alpha / (1.0 - alpha);
    }
    const double gamma = exact_line_search(y, d, gmax, spec);
    if (!(gamma > 0.0)) break;
    if (toward) {
      w *= (1.0 - gamma);
      w[fw] += gamma;
    } else {
      w *= (1.0 + gamma);
      if (gamma >= gmax) {
        w[aw] = 0.0;
      } else {
        w[aw] -= gamma;
      }
    }
    if ((it + 1) % 64 == 0) {
      y = atoms * w;
    } else {
      y += gamma * d;
    }
  }
  for (Index i = 0; i < k; ++i) {
    if (w[i] < kPruneThreshold) w[i] = 0.0;
  }
  w /= w.sum();
  out.weights = std::move(w);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// FW-type loop shared by FW, NEP-FW, HCGS and smoothed FW: one atom per step.

namespace detail {

struct LoopSetup {
  std::string name;
  std::optional<double> reference;
  double threshold = 0.0;
  std::size_t max_iter = 0;
  bool stop_at_target = true;
  /// With no reference, stop once the FW gap of the squared objective falls
  /// below the threshold.
  bool fw_gap_stop = false;
  /// Status to report when the cap is reached without a reference value.
  Status cap_status_without_reference = Status::IterCap;
};

/// `direction(x, t)` returns {gradient for the oracle, optional beta};
/// `select(atoms, g, x, t)` picks the atom; `step(x, v, g, t)` returns the
/// step size or nothing when no descent is possible.
template <class Atoms, class Direction, class Select, class Step>
SolveResult fw_loop(Atoms& atoms, const ObjectiveSpec& spec, const SolverConfig& cfg, const LoopSetup& setup,
                    Direction direction, Select select, Step step) {
  Recorder rec(setup.name, setup.reference);
  ActiveSet active;
  active.reset(atoms.start(cfg));
  Vector x = atoms.atom(active.ids().front());
  Snapshot best{active, x};
  Status status = Status::IterCap;

  for (std::size_t t = 0;; ++t) {
    const double f = tracked_value(x, spec);
    rec.record(t, f, active.size());
    if (rec.improves(f)) best = {active, x};
    if (setup.reference && setup.stop_at_target && f - *setup.reference <= setup.threshold) {
      status = Status::Converged;
      break;
    }
    if (t >= setup.max_iter) {
      status = setup.reference ? Status::IterCap : setup.cap_status_without_reference;
      break;
    }
    if (atoms.single_point()) {
      status = Status::Degenerate;
      break;
    }
    auto [g, beta] = direction(x, t);
    std::size_t v_id;
    try {
      v_id = select(atoms, g, x, t);
    } catch (const DegenerateGradient&) {
      status = Status::Degenerate;
      break;
    }
    const Vector v = atoms.atom(v_id);
    if (setup.fw_gap_stop && !setup.reference && setup.stop_at_target && (x - v).dot(g) <= setup.threshold) {
      status = Status::Converged;
      break;
    }
    const std::optional<double> gamma = step(x, v, g, t);
    if (!gamma) {
      status = Status::Degenerate;
      break;
    }
    IterationRecord& r = rec.current();
    r.gamma = *gamma;
    r.beta = beta;
    r.vertex_index = v_id;
    x += *gamma * (v - x);
    active.toward(v_id, *gamma);
    if (active.prune()) x = active.point(atoms);
  }
  RunTrace trace = rec.finish(status);
  if (status == Status::IterCap) return {export_combination(atoms, best.active, best.x), std::move(trace)};
  return {export_combination(atoms, active, x), std::move(trace)};
}

inline double smoothness(const SolverConfig& cfg, const ObjectiveSpec& spec) {
  return cfg.L_override ? *cfg.L_override : spec.p - 1.0;
}

inline std::optional<double> closed_or_open(const Vector& x, const Vector& v, const Vector& g, std::size_t t,
                                            StepRule rule, double L, double p) {
  if (rule == StepRule::OpenLoop) return step_open_loop(t);
  const ClosedLoopStep s = step_closed_loop(x, v, g, L, p);
  if (s.degenerate) return std::nullopt;
  return s.gamma;
}

template <class F>
decltype(auto) with_atoms(const FeasibleSet& set, F&& f) {
  if (const auto* vs = std::get_if<VertexSet>(&set)) {
    VertexAtoms atoms(*vs);
    return f(atoms);
  }
  BallAtoms atoms(std::get<LqBall>(set));
  return f(atoms);
}

inline LoopSetup squared_setup(const char* name, const ObjectiveSpec& spec, const SolverConfig& cfg,
                               std::optional<double> reference) {
  LoopSetup s;
  s.name = name;
  s.reference = reference;
  s.threshold = gap_threshold(spec, cfg.epsilon);
  s.max_iter = cfg.max_iter;
  s.stop_at_target = cfg.stop_at_target;
  s.fw_gap_stop = true;
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Solvers. `reference` is min_C f when known (0 when x* lies in C); leaving it
// empty switches to FW-gap stopping and best-running-value gaps.

/// Frank-Wolfe on 1/2||x - x*||_p^2 with open- or closed-loop steps.
inline SolveResult fw_solve(const FeasibleSet& set, const ObjectiveSpec& spec, const SolverConfig& cfg,
                            std::optional<double> reference = 0.0) {
  SolverConfig c = cfg;
  c.algorithm = Algorithm::FW;
  validate(c, spec, set);
  const double L = detail::smoothness(c, spec);
  const char* name = c.step == StepRule::OpenLoop ? "fw-open" : "fw";
  return detail::with_atoms(set, [&](auto& atoms) {
    return detail::fw_loop(
        atoms, spec, c, detail::squared_setup(name, spec, c, reference),
        [&](const Vector& x, std::size_t) { return std::pair{lp_sq_gradient(x, spec), std::optional<double>{}}; },
        [](auto& a, const Vector& g, const Vector&, std::size_t) { return a.lmo(g); },
        [&](const Vector& x, const Vector& v, const Vector& g, std::size_t t) {
          return detail::closed_or_open(x, v, g, t, c.step, L, spec.p);
        });
  });
}

/// lambda_t = L gamma_t / 2 with gamma_t = 2/(t+2) and L the l_2 smoothness
/// constant p - 1.
inline double nep_lambda(double L, std::size_t t) { return 0.5 * L * step_open_loop(t); }

/// FW with the nearest-extreme-point oracle, open-loop steps.
inline SolveResult nep_fw_solve(const FeasibleSet& set, const ObjectiveSpec& spec, const SolverConfig& cfg,
                                std::optional<double> reference = 0.0) {
  SolverConfig c = cfg;
  c.algorithm = Algorithm::NEP_FW;
  c.step = StepRule::OpenLoop;
  validate(c, spec, set);
  const double L = detail::smoothness(c, spec);
  const auto& vs = std::get<VertexSet>(set);
  detail::VertexAtoms atoms(vs);
  return detail::fw_loop(
      atoms, spec, c, detail::squared_setup("nep-fw", spec, c, reference),
      [&](const Vector& x, std::size_t) { return std::pair{lp_sq_gradient(x, spec), std::optional<double>{}}; },
      [&](auto&, const Vector& g, const Vector& x, std::size_t t) {
        return static_cast<std::size_t>(nep_select(vs, g, x, nep_lambda(L, t)));
      },
      [](const Vector&, const Vector&, const Vector&, std::size_t t) {
        return std::optional<double>(step_open_loop(t));
      });
}

/// Hybrid conditional gradient-smoothing: FW steps on the Moreau envelope
/// with beta_t = 2 (D_2/G_2)/sqrt(t+2) and gamma_t = 2/(t+2).
inline SolveResult hcgs_solve(const FeasibleSet& set, const ObjectiveSpec& spec, const SolverConfig& cfg,
                              std::optional<double> reference = 0.0) {
  SolverConfig c = cfg;
  c.algorithm = Algorithm::HCGS;
  c.step = StepRule::OpenLoop;
  validate(c, spec, set);
  const DerivedConstants k = derive_constants(set, spec.p);
  detail::LoopSetup setup;
  setup.name = "hcgs";
  setup.reference = reference;
  setup.threshold = detail::gap_threshold(spec, c.epsilon);
  setup.max_iter = c.max_iter;
  setup.stop_at_target = c.stop_at_target;
  // A single point has D_2 = 0; any positive beta gives the same (unique) oracle answer.
  const double D2 = k.D_2 > 0.0 ? k.D_2 : 1.0;
  return detail::with_atoms(set, [&](auto& atoms) {
    return detail::fw_loop(
        atoms, spec, c, setup,
        [&](const Vector& x, std::size_t t) {
          const double beta = hcgs_beta(D2, k.G_2, t);
          return std::pair{moreau_gradient(x, beta, spec), std::optional<double>(beta)};
        },
        [](auto& a, const Vector& g, const Vector&, std::size_t) { return a.lmo(g); },
        [](const Vector&, const Vector&, const Vector&, std::size_t t) {
          return std::optional<double>(step_open_loop(t));
        });
  });
}

/// Open-loop FW on the fixed envelope f_beta, beta = eps / G_2^2, for
/// floor(4 G_2^2 D_2^2 / eps^2) iterations. `cfg.max_iter` is not used.
inline SolveResult smoothed_fw_solve(const FeasibleSet& set, const ObjectiveSpec& spec, const SolverConfig& cfg,
                                     std::optional<double> reference = 0.0) {
  SolverConfig c = cfg;
  c.algorithm = Algorithm::SMOOTHED_FW;
  c.step = StepRule::OpenLoop;
  validate(c, spec, set);
  const DerivedConstants k = derive_constants(set, spec.p);
  const double beta = smoothing_beta(FixedBeta{c.epsilon, k.G_2}, 0);
  detail::LoopSetup setup;
  setup.name = "smoothed-fw";
  setup.reference = reference;
  setup.threshold = detail::gap_threshold(spec, c.epsilon);
  setup.max_iter = smoothed_fw_budget(k.G_2, k.D_2, c.epsilon);
  setup.stop_at_target = c.stop_at_target;
  setup.cap_status_without_reference = Status::Converged;
  return detail::with_atoms(set, [&](auto& atoms) {
    SolveResult r = detail::fw_loop(
        atoms, spec, c, setup,
        [&](const Vector& x, std::size_t) {
          return std::pair{moreau_gradient(x, beta, spec), std::optional<double>(beta)};
        },
        [](auto& a, const Vector& g, const Vector&, std::size_t) { return a.lmo(g); },
        [](const Vector&, const Vector&, const Vector&, std::size_t t) {
          return std::optional<double>(step_open_loop(t));
        });
    // The budget certifies eps-accuracy once exhausted.
    if (r.trace.status == Status::IterCap && r.trace.last().primal_gap <= setup.threshold) {
      r.trace.status = Status::Converged;
    }
    return r;
  });
}

struct CorrectionResult {
  /// One weight per active column; dropped columns carry weight 0.
  Vector weights;
  /// Columns that kept a positive weight.
  std::vector<Index> kept;
  double fw_gap = 0.0;
  std::size_t iterations = 0;
  /// Inner iteration cap (10 |active|^2) reached before the tolerance.
  bool capped = false;
};

/// Minimizes 1/2||x - x*||_p^2 over the convex hull of the columns of
/// `active`, certified by the FW gap over the active columns. Starts from
/// column 0 unless `warm_start` weights are given.
inline CorrectionResult fcfw_correction(const Matrix& active, const ObjectiveSpec& spec, double tol,
                                        std::optional<Vector> warm_start = std::nullopt) {
  detail::require_mode(spec, Mode::SmoothSquared, "fcfw_correction");
  if (active.cols() < 1) throw InputError("fcfw_correction: empty active set");
  if (active.rows() != spec.dim()) throw InputError("fcfw_correction: dimension mismatch");
  if (!(tol > 0.0)) throw InputError("fcfw_correction: tolerance must be positive");
  Vector w = Vector::Zero(active.cols());
  if (warm_start) {
    if (warm_start->size() != active.cols()) throw InputError("fcfw_correction: warm start size mismatch");
    w = *warm_start;
  } else {
    w[0] = 1.0;
  }
  const auto k = static_cast<std::size_t>(active.cols());
  detail::CorrectionOutcome o = detail::simplex_correction(active, std::move(w), spec, tol, 10 * k * k);
  CorrectionResult r;
  r.weights = std::move(o.weights);
  for (Index i = 0; i < r.weights.size(); ++i) {
    if (r.weights[i] > 0.0) r.kept.push_back(i);
  }
  r.fw_gap = o.fw_gap;
  r.iterations = o.iterations;
  r.capped = o.capped;
  return r;
}

/// Fully-corrective FW: after each oracle call the iterate is re-optimized
/// over the hull of all active atoms.
inline SolveResult fcfw_solve(const FeasibleSet& set, const ObjectiveSpec& spec, const SolverConfig& cfg,
                              std::optional<double> reference = 0.0) {
  SolverConfig c = cfg;
  c.algorithm = Algorithm::FCFW;
  validate(c, spec, set);
  const double threshold = detail::gap_threshold(spec, c.epsilon);
  const double tol = c.inner_tol();
  return detail::with_atoms(set, [&](auto& atoms) {
    detail::Recorder rec("fcfw", reference);
    detail::ActiveSet active;
    active.reset(atoms.start(c));
    Vector x = atoms.atom(active.ids().front());
    Status status = Status::IterCap;
    for (std::size_t t = 0;; ++t) {
      const double f = detail::tracked_value(x, spec);
      rec.record(t, f, active.size());
      if (reference && c.stop_at_target && f - *reference <= threshold) {
        status = Status::Converged;
        break;
      }
      if (t >= c.max_iter) break;
      if (atoms.single_point()) {
        status = Status::Degenerate;
        break;
      }
      const Vector g = lp_sq_gradient(x, spec);
      std::size_t v_id;
      try {
        v_id = atoms.lmo(g);
      } catch (const DegenerateGradient&) {
        status = Status::Degenerate;
        break;
      }
      const double fw_gap = (x - atoms.atom(v_id)).dot(g);
      if (!reference && c.stop_at_target && fw_gap <= threshold) {
        status = Status::Converged;
        break;
      }
      if (!(fw_gap > 0.0)) {
        status = Status::Degenerate;
        break;
      }
      const std::size_t pos = active.ensure(v_id);
      const auto k = static_cast<Index>(active.size());
      Matrix cols(atoms.dim(), k);
      Vector w(k);
      for (Index i = 0; i < k; ++i) {
        cols.col(i) = atoms.atom(active.ids()[static_cast<std::size_t>(i)]);
        w[i] = active.weights()[static_cast<std::size_t>(i)];
      }
      const auto ks = static_cast<std::size_t>(k);
      detail::CorrectionOutcome o =
          detail::simplex_correction(cols, std::move(w), spec, tol, 10 * ks * ks, static_cast<Index>(pos));
      if (o.capped) rec.flag_inner_cap();
      for (std::size_t i = 0; i < ks; ++i) active.weights()[i] = o.weights[static_cast<Index>(i)];
      active.prune();
      x = active.point(atoms);
      rec.current().vertex_index = v_id;
    }
    RunTrace trace = rec.finish(status);
    return SolveResult{detail::export_combination(atoms, active, x), std::move(trace)};
  });
}

/// Away-step FW with closed-loop steps (L = p - 1, l_p norm in the
/// denominator). Away steps are capped at w_a / (1 - w_a); a step that hits
/// the cap drops the atom.
inline SolveResult afw_solve(const FeasibleSet& set, const ObjectiveSpec& spec, const SolverConfig& cfg,
                             std::optional<double> reference = 0.0) {
  SolverConfig c = cfg;
  c.algorithm = Algorithm::AFW;
  c.step = StepRule::ClosedLoop;
  validate(c, spec, set);
  const double L = detail::smoothness(c, spec);
  const double threshold = detail::gap_threshold(spec, c.epsilon);
  detail::VertexAtoms atoms(std::get<VertexSet>(set));
  detail::Recorder rec("afw", reference);
  detail::ActiveSet active;
  active.reset(atoms.start(c));
  Vector x = atoms.atom(active.ids().front());
  Status status = Status::IterCap;
  for (std::size_t t = 0;; ++t) {
    const double f = detail::tracked_value(x, spec);
    rec.record(t, f, active.size());
    if (reference && c.stop_at_target && f - *reference <= threshold) {
      status = Status::Converged;
      break;
    }
    if (t >= c.max_iter) break;
    if (atoms.single_point()) {
      status = Status::Degenerate;
      break;
    }
    const Vector g = lp_sq_gradient(x, spec);
    const std::size_t v_id = atoms.lmo(g);
    const Vector v = atoms.atom(v_id);
    const double xg = x.dot(g);
    const double fw_gap = xg - v.dot(g);
    if (!reference && c.stop_at_target && fw_gap <= threshold) {
      status = Status::Converged;
      break;
    }
    std::size_t a_id = active.ids().front();
    double a_score = -kInf;
    for (std::size_t id : active.ids()) {
      const double sc = atoms.score(id, g);
      if (sc > a_score) {
        a_score = sc;
        a_id = id;
      }
    }
    const double away_gap = a_score - xg;
    const bool toward = fw_gap >= away_gap;
    Vector d;
    double gmax = 1.0;
    double alpha = 0.0;
    if (toward) {
      d = v - x;
    } else {
      alpha = active.weight_of(a_id);
      d = x - atoms.atom(a_id);
      gmax = alpha / (1.0 - alpha);
    }
    const double nrm = lp_norm(d, spec.p);
    const ClosedLoopStep s = step_closed_loop_ratio(-d.dot(g), L * nrm * nrm);
    if (s.degenerate) {
      status = Status::Degenerate;
      break;
    }
    // The unclipped ratio is recomputed because away steps may exceed 1.
    const double ratio = -d.dot(g) / (L * nrm * nrm);
    const double gamma = std::min(ratio, gmax);
    IterationRecord& r = rec.current();
    r.gamma = gamma;
    r.vertex_index = toward ? v_id : a_id;
    if (toward) {
      x += gamma * d;
      active.toward(v_id, gamma);
    } else {
      const bool drop = gamma >= gmax;
      x += gamma * d;
      active.away(a_id, gamma, drop);
    }
    if (active.prune()) x = active.point(atoms);
  }
  RunTrace trace = rec.finish(status);
  return {detail::export_combination(atoms, active, x), std::move(trace)};
}

/// Runs the solver selected by `cfg.algorithm`.
inline SolveResult solve(const FeasibleSet& set, const ObjectiveSpec& spec, const SolverConfig& cfg,
                         std::optional<double> reference = 0.0) {
  switch (cfg.algorithm) {
    case Algorithm::FW: return fw_solve(set, spec, cfg, reference);
    case Algorithm::NEP_FW: return nep_fw_solve(set, spec, cfg, reference);
    case Algorithm::FCFW: return fcfw_solve(set, spec, cfg, reference);
    case Algorithm::AFW: return afw_solve(set, spec, cfg, reference);
    case Algorithm::HCGS: return hcgs_solve(set, spec, cfg, reference);
    case Algorithm::SMOOTHED_FW: return smoothed_fw_solve(set, spec, cfg, reference);
  }
  throw ConfigError("unknown algorithm");
}

// ---------------------------------------------------------------------------
// Projection mode: x* may lie outside C.

/// Known distance dist_p(x*, C) and, optionally, the Euclidean projection.
struct ProjectionReference {
  double distance = 0.0;
  std::optional<Vector> proj2;
};

struct GapReport {
  double distance = 0.0;                     // ||x - x*||_p
  std::optional<double> reference_distance;  // dist_p(x*, C)
  /// ||x - x*||_p^2 - dist^2 (squared mode) or ||x - x*||_p - dist (norm mode).
  std::optional<double> accuracy_gap;
  /// ||x - proj_2(x*, C)||_2 for p = 2.
  std::optional<double> proj2_distance;
};

struct ProjectionResult {
  SolveResult result;
  GapReport report;
};

inline ProjectionResult projection_solve(const FeasibleSet& set, const ObjectiveSpec& spec, const SolverConfig& cfg,
                                         const std::optional<ProjectionReference>& ref = std::nullopt) {
  std::optional<double> reference;
  if (ref) {
    reference = spec.mode == Mode::SmoothSquared ? 0.5 * ref->distance * ref->distance : ref->distance;
  }
  ProjectionResult out{solve(set, spec, cfg, reference), {}};
  const Vector& x = out.result.combination.point;
  out.report.distance = target_distance(x, spec);
  if (ref) {
    out.report.reference_distance = ref->distance;
    out.report.accuracy_gap = spec.mode == Mode::SmoothSquared
                                  ? out.report.distance * out.report.distance - ref->distance * ref->distance
                                  : out.report.distance - ref->distance;
    if (spec.p == 2.0 && ref->proj2) out.report.proj2_distance = (x - *ref->proj2).norm();
  }
  return out;
}

}  // namespace caradory
