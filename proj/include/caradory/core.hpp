#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace caradory {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (dimension mismatch, bad parameter).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Invalid solver configuration or a bound constant that was not supplied.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An inner numerical routine failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A data-structure invariant does not hold (weights not on the simplex, ...).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// The linear oracle received a zero direction; callers treat it as converged.
class DegenerateGradient : public Error {
 public:
  using Error::Error;
};

/// Exhaustive search requested on an instance that is too large.
class UnsupportedSize : public Error {
 public:
  using Error::Error;
};

/// Hoelder conjugate of p, with 1 <-> inf.
inline double dual_exponent(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

/// r^e for r >= 0; integral exponents up to 64 by repeated squaring.
inline double nonneg_pow(double r, double e) {
  if (e >= 0.0 && e <= 64.0 && e == std::floor(e)) {
    auto k = static_cast<unsigned>(e);
    double acc = 1.0;
    for (double b = r; k; k >>= 1, b *= b) {
      if (k & 1U) acc *= b;
    }
    return acc;
  }
  return std::pow(r, e);
}

/// l_p norm for p in [1, inf]. Entries are divided by max|d_i| before being
/// raised to the power p, so the sum never overflows.
inline double lp_norm(const Vector& d, double p) {
  if (d.size() == 0) return 0.0;
  const double scale = d.cwiseAbs().maxCoeff();
  if (scale == 0.0 || std::isinf(p)) return scale;
  if (p == 1.0) return d.cwiseAbs().sum();
  if (p == 2.0) return d.norm();
  double sum = 0.0;
  for (Index i = 0; i < d.size(); ++i) sum += nonneg_pow(std::abs(d[i]) / scale, p);
  return scale * std::pow(sum, 1.0 / p);
}

/// sign(d_i) |d_i|^(power) computed relative to max|d_i|: returns the vector
/// sign(d_i) (|d_i|/m)^power together with m.
struct ScaledPower {
  Vector direction;
  double scale = 0.0;
};

inline ScaledPower scaled_signed_power(const Vector& d, double power) {
  ScaledPower out{Vector::Zero(d.size()), d.size() ? d.cwiseAbs().maxCoeff() : 0.0};
  if (out.scale == 0.0) return out;
  for (Index i = 0; i < d.size(); ++i) {
    const double r = std::abs(d[i]) / out.scale;
    if (r == 0.0) continue;
    const double mag = nonneg_pow(r, power);
    out.direction[i] = d[i] < 0.0 ? -mag : mag;
  }
  return out;
}

/// Constant G such that ||.||_p <= G ||.||_2 on R^n: n^{max(0, 1/p - 1/2)}.
inline double lp_over_l2_factor(double p, Index n) {
  if (std::isinf(p) || p >= 2.0) return 1.0;
  return std::pow(static_cast<double>(n), 1.0 / p - 0.5);
}

inline std::string format_exponent(double p) {
  if (std::isinf(p)) return "inf";
  std::string s = std::to_string(p);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace caradory
