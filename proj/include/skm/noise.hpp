#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "skm/rng.hpp"
#include "skm/sequences.hpp"

namespace skm {

enum class NoiseKind { none, iid, scheduled_iid, vanishing };
enum class BaseDist { gaussian, rademacher, uniform };

/// Additive noise on the operator evaluation. `scale` is the full-vector L2
/// scale: coordinates are drawn so that E||U||_2^2 = scale^2 (each
/// coordinate gets scale/sqrt(d) std for gaussian/rademacher, matched
/// variance for uniform). All base distributions are mean zero per
/// coordinate.
class NoiseModel {
 public:
  static NoiseModel none(std::size_t dim);
  static NoiseModel iid(std::size_t dim, BaseDist base, double scale);
  /// Per-step scale theta(n) in place of a constant.
  static NoiseModel scheduled_iid(std::size_t dim, BaseDist base,
                                  std::function<double(std::size_t)> theta);
  /// U_n = decay(n) * D_n with D_n a unit-scale iid draw; decay must be
  /// nonnegative and summable against the stepsizes for the mean-ergodic
  /// hypotheses to hold (checked empirically in tests, not here).
  static NoiseModel vanishing(std::size_t dim, BaseDist base,
                              std::function<double(std::size_t)> decay);

  NoiseKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  bool is_none() const { return kind_ == NoiseKind::none; }

  /// Draws U_n into out. n >= 1.
  void sample(std::size_t n, Rng& rng, std::span<double> out) const;

  /// E||U_n||_2^2, exact per model definition.
  double variance_at(std::size_t n) const;

  /// Pathwise bound on ||U_n||_2, +inf for gaussian coordinates.
  double l2_sup(std::size_t n) const;
  /// sup_n l2_sup(n); finite only for bounded base distributions with
  /// non-increasing scale. Used by horizon certificates.
  double l2_sup_all(std::size_t horizon) const;

  /// View as a second-moment schedule (theta_n = sqrt(variance_at(n))).
  VarianceSchedule variance_schedule() const;

 private:
  NoiseKind kind_ = NoiseKind::none;
  BaseDist base_ = BaseDist::gaussian;
  std::size_t dim_ = 0;
  double scale_ = 0.0;
  std::function<double(std::size_t)> scale_fn_;  // theta or decay

  double scale_at(std::size_t n) const;
};

}  // namespace skm
