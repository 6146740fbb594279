#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace skm {

/// min{1, 1/sqrt(pi*y)} with the y=0 limit pinned to 1. Throws on y < 0.
double sigma_fn(double y);

/// Stepsize sequence alpha_n together with lazily cached derived scalars:
///   tau_n      = sum_{k<=n} alpha_k (1 - alpha_k)          (tau_0 = 0)
///   delta_n^2  = sum_{k<=n} (pi_k^n)^2, via the recursion
///                delta_n^2 = (1-alpha_n)^2 delta_{n-1}^2 + alpha_n^2
/// where pi_k^n = alpha_k prod_{i=k+1}^n (1 - alpha_i).
///
/// alpha(n) is a pure function and safe to call concurrently. The tau /
/// delta caches are single-writer: call reserve(n) before sharing a
/// schedule across threads, after which the _at accessors are read-only.
class StepsizeSchedule {
 public:
  enum class Kind { power, constant };

  /// alpha_n = (n+1)^{-a}, a in [1/2, 1].
  static StepsizeSchedule power(double a);
  /// alpha_n = alpha, alpha in (0, 1).
  static StepsizeSchedule constant(double alpha);

  Kind kind() const { return kind_; }
  bool is_power() const { return kind_ == Kind::power; }
  /// Exponent a; only meaningful for power schedules.
  double exponent() const { return a_; }
  /// Constant value; only meaningful for constant schedules.
  double constant_value() const { return alpha_; }

  /// alpha_n, n >= 1.
  double alpha(std::size_t n) const;

  /// Extends the caches so tau_at/delta_sq_at are valid through n.
  void reserve(std::size_t n);

  /// tau_n, extending the cache on demand.
  double tau(std::size_t n);
  /// delta_n^2, extending the cache on demand.
  double delta_sq(std::size_t n);

  /// Cached read; requires a prior reserve(n).
  double tau_at(std::size_t n) const;
  double delta_sq_at(std::size_t n) const;

  /// All pi_k^n for k = 1..n (index k-1 in the result). O(n).
  std::vector<double> pi_weights(std::size_t n) const;

 private:
  StepsizeSchedule(Kind k, double a, double alpha);

  Kind kind_;
  double a_ = 0.0;
  double alpha_ = 0.0;
  std::vector<double> tau_;       // tau_[n] = tau_n
  std::vector<double> delta_sq_;  // delta_sq_[n] = delta_n^2
};

/// Noise second-moment sequence theta_n^2 = E||U_n||_2^2, either a uniform
/// bound sigma^2 or an explicit sequence.
class VarianceSchedule {
 public:
  static VarianceSchedule bounded(double sigma);
  static VarianceSchedule sequence(std::function<double(std::size_t)> theta);

  bool is_bounded() const { return bounded_; }
  /// Uniform bound sigma; only for bounded schedules.
  double sigma() const { return sigma_; }
  /// theta_n (not squared), n >= 1.
  double theta(std::size_t n) const;

 private:
  bool bounded_ = true;
  double sigma_ = 0.0;
  std::function<double(std::size_t)> theta_fn_;
};

/// nu_n = sqrt(sum_{k<=n} (pi_k^n)^2 theta_k^2) via the forward recursion
/// s_n = (1-alpha_n)^2 s_{n-1} + alpha_n^2 theta_n^2. For bounded variance
/// this reduces to sigma * delta_n. nu_0 = 0.
class NuSequence {
 public:
  NuSequence(StepsizeSchedule& schedule, VarianceSchedule variance);
  double nu(std::size_t n);

 private:
  StepsizeSchedule& schedule_;
  VarianceSchedule variance_;
  std::vector<double> sq_;  // sq_[n] = nu_n^2, kept only for sequence mode
};

/// Scalar constants attached to the power schedule alpha_n = (n+1)^{-a}.
/// Fields without a value are undefined for that exponent:
///   b, lambda   : a < 1 only
///   d           : a in (2/3, 1]
///   omega       : a = 1 only
struct PowerConstants {
  double a = 0.0;
  std::optional<double> b;       // a / (2(1-a))
  std::optional<double> lambda;  // (3^{a/2} - 3^{-a/2})^{2(1-a)/a} - (1-a) tau_2
  double gamma = 0.0;            // sup_{k>=2} alpha_k(1-alpha_k) / alpha_{k+1}(1-alpha_{k+1})
  std::size_t gamma_argmax_k = 0;
  std::optional<double> d;
  std::optional<double> omega;   // (sqrt(3)/2) e^{17/72}
};

/// Computes the constants for a in [1/2, 1]. gamma is found by scanning
/// k = 2..10^4 and asserting the ratio decreases monotonically past its
/// peak (the peak index moves with a, so no closed form is assumed).
PowerConstants power_constants(double a);

}  // namespace skm
