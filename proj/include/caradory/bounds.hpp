#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "caradory/core.hpp"
#include "caradory/trace.hpp"

namespace caradory {

/// Constants consumed by the convergence envelopes. Only the fields a bound
/// needs have to be set.
struct TheoryBounds {
  std::optional<double> L;        // smoothness
  std::optional<double> D;        // diameter in the smoothness norm
  std::optional<double> mu;       // gradient domination
  std::optional<double> sigma;    // sharpness
  std::optional<double> r;        // interior radius
  std::optional<double> c;        // min_C ||grad f||_*
  std::optional<double> alpha;    // set (uniform) convexity
  std::optional<double> q_uc;     // uniform convexity exponent
  std::optional<double> D_star;   // l2 diameter of the smallest vertex subset holding the solution
  std::optional<double> D_0;      // l2 diameter of the start level set over vertices
  std::optional<double> G2;       // l2-Lipschitz constant
  std::optional<double> D2;       // l2 diameter
  std::optional<double> epsilon;  // target accuracy of the fixed-beta smoothing
};

enum class BoundId {
  Lemma2,     // f(x_1) gap <= L D^2 / 2
  Thm1Closed, // 4 L D^2 / (t + 2)
  Thm1Open,   // 2 L D^2 / (t + 2)
  Thm2,       // interior: L D^2/2 (1 - mu/L (r/D)^2)^{t-1}
  Thm3,       // exterior, strongly convex set: L D^2/2 (1 - min{1/2, alpha c/(4L)})^{t-1}
  Thm4,       // strongly convex set + gradient domination: max{9/2 L D^2, 144 (L/alpha)^2/mu} / (t+2)^2
  Thm5,       // uniformly convex set, exterior
  Thm6,       // uniformly convex set, sharp objective
  Nep,        // 2 L (D_*^2 + D_0^2) / (t + 2)
  Thm7,       // 4 G_2 D_2 / sqrt(t + 1)
  Thm8,       // 2 G_2^2 D_2^2 / (eps (t + 2)) + eps / 2
};

inline const char* to_string(BoundId id) {
  switch (id) {
    case BoundId::Lemma2: return "lemma2";
    case BoundId::Thm1Closed: return "thm1-closed";
    case BoundId::Thm1Open: return "thm1-open";
    case BoundId::Thm2: return "thm2";
    case BoundId::Thm3: return "thm3";
    case BoundId::Thm4: return "thm4";
    case BoundId::Thm5: return "thm5";
    case BoundId::Thm6: return "thm6";
    case BoundId::Nep: return "nep";
    case BoundId::Thm7: return "thm7";
    case BoundId::Thm8: return "thm8";
  }
  return "unknown";
}

/// Rate constants of the uniformly convex exterior case, exponent e = (q-2)/q.
inline double uc_exterior_beta1(double q) {
  const double a = std::pow(2.0, (q - 2.0) / q);
  return (2.0 - a) / (a - 1.0);
}
inline double uc_exterior_beta2(double q) {
  return (q - 2.0) / q - (2.0 / q) * (std::pow(2.0, (q - 2.0) / q) - 1.0);
}

/// Rate constants of the uniformly convex sharp case, exponent e = (q-1)/q.
inline double uc_sharp_beta1(double q) {
  const double a = std::pow(2.0, (q - 1.0) / q);
  return (2.0 - a) / (a - 1.0);
}
inline double uc_sharp_beta2(double q) {
  return (q - 1.0) / q - (1.0 / q) * (std::pow(2.0, (q - 1.0) / q) - 1.0);
}

namespace detail {
inline double need(const std::optional<double>& v, const char* field, BoundId id) {
  if (!v) throw ConfigError(std::string("bound ") + to_string(id) + " needs constant '" + field + "'");
  if (!(*v > 0.0) || !std::isfinite(*v)) {
    throw ConfigError(std::string("bound ") + to_string(id) + ": constant '" + field + "' must be positive");
  }
  return *v;
}
}  // namespace detail

/// Right-hand side of the selected bound at iteration t. Returns +inf where
/// the bound makes no claim (t = 0, or t < 2 for the HCGS rate; Lemma2 only
/// speaks about t = 1).
inline double bound_value(const TheoryBounds& b, BoundId id, std::size_t t) {
  using detail::need;
  const double tt = static_cast<double>(t);
  switch (id) {
    case BoundId::Lemma2: {
      const double L = need(b.L, "L", id), D = need(b.D, "D", id);
      return t == 1 ? L * D * D / 2.0 : kInf;
    }
    case BoundId::Thm1Closed: {
      const double L = need(b.L, "L", id), D = need(b.D, "D", id);
      return t >= 1 ? 4.0 * L * D * D / (tt + 2.0) : kInf;
    }
    case BoundId::Thm1Open: {
      const double L = need(b.L, "L", id), D = need(b.D, "D", id);
      return t >= 1 ? 2.0 * L * D * D / (tt + 2.0) : kInf;
    }
    case BoundId::Thm2: {
      const double L = need(b.L, "L", id), D = need(b.D, "D", id);
      const double mu = need(b.mu, "mu", id), r = need(b.r, "r", id);
      if (r > D / 2.0) throw ConfigError("bound thm2: r must lie in (0, D/2]");
      return t >= 1 ? L * D * D / 2.0 * std::pow(1.0 - mu / L * (r / D) * (r / D), tt - 1.0) : kInf;
    }
    case BoundId::Thm3: {
      const double L = need(b.L, "L", id), D = need(b.D, "D", id);
      const double alpha = need(b.alpha, "alpha", id), c = need(b.c, "c", id);
      const double rate = 1.0 - std::min(0.5, alpha * c / (4.0 * L));
      return t >= 1 ? L * D * D / 2.0 * std::pow(rate, tt - 1.0) : kInf;
    }
    case BoundId::Thm4: {
      const double L = need(b.L, "L", id), D = need(b.D, "D", id);
      const double alpha = need(b.alpha, "alpha", id), mu = need(b.mu, "mu", id);
      const double num = std::max(4.5 * L * D * D, 144.0 * (L / alpha) * (L / alpha) / mu);
      return t >= 1 ? num / ((tt + 2.0) * (tt + 2.0)) : kInf;
    }
    case BoundId::Thm5: {
      const double L = need(b.L, "L", id), D = need(b.D, "D", id);
      const double alpha = need(b.alpha, "alpha", id), c = need(b.c, "c", id), q = need(b.q_uc, "q_uc", id);
      if (!(q > 2.0)) throw ConfigError("bound thm5: q_uc must exceed 2");
      const double b1 = uc_exterior_beta1(q), b2 = uc_exterior_beta2(q);
      const double e = q / (q - 2.0);
      const double num = std::max(L * D * D / 2.0 * std::pow(1.0 + b1, e),
                                  4.0 * std::pow(L / b2, e) * std::pow(4.0 / (alpha * c), 2.0 / (q - 2.0)));
      return t >= 1 ? num / std::pow(tt + b1, e) : kInf;
    }
    case BoundId::Thm6: {
      const double L = need(b.L, "L", id), D = need(b.D, "D", id);
      const double alpha = need(b.alpha, "alpha", id), sigma = need(b.sigma, "sigma", id);
      const double q = need(b.q_uc, "q_uc", id);
      if (!(q >= 2.0)) throw ConfigError("bound thm6: q_uc must be at least 2");
      const double b1 = uc_sharp_beta1(q), b2 = uc_sharp_beta2(q);
      const double e = q / (q - 1.0);
      const double num = std::max(L * D * D / 2.0 * std::pow(1.0 + b1, e),
                                  2.0 * std::pow(L / b2, e) * std::pow(sigma / alpha, 2.0 / (q - 1.0)));
      return t >= 1 ? num / std::pow(tt + b1, e) : kInf;
    }
    case BoundId::Nep: {
      const double L = need(b.L, "L", id);
      if (!b.D_star || *b.D_star < 0.0) throw ConfigError("bound nep needs constant 'D_star'");
      if (!b.D_0 || *b.D_0 < 0.0) throw ConfigError("bound nep needs constant 'D_0'");
      return t >= 1 ? 2.0 * L * (*b.D_star * *b.D_star + *b.D_0 * *b.D_0) / (tt + 2.0) : kInf;
    }
    case BoundId::Thm7: {
      const double G2 = need(b.G2, "G2", id), D2 = need(b.D2, "D2", id);
      return t >= 2 ? 4.0 * G2 * D2 / std::sqrt(tt + 1.0) : kInf;
    }
    case BoundId::Thm8: {
      const double G2 = need(b.G2, "G2", id), D2 = need(b.D2, "D2", id), eps = need(b.epsilon, "epsilon", id);
      return t >= 1 ? 2.0 * G2 * G2 * D2 * D2 / (eps * (tt + 2.0)) + eps / 2.0 : kInf;
    }
  }
  throw ConfigError("unknown bound");
}

/// Bound values aligned with the trace records.
inline std::vector<double> evaluate_bound(const RunTrace& trace, const TheoryBounds& b, BoundId id) {
  std::vector<double> out;
  out.reserve(trace.records.size());
  for (const auto& r : trace.records) out.push_back(bound_value(b, id, r.t));
  return out;
}

/// First record whose primal gap exceeds its bound, if any.
inline std::optional<std::size_t> first_violation(const RunTrace& trace, const std::vector<double>& bound) {
  for (std::size_t i = 0; i < trace.records.size() && i < bound.size(); ++i) {
    if (trace.records[i].primal_gap > bound[i]) return i;
  }
  return std::nullopt;
}

}  // namespace caradory
