#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skm/norms.hpp"

namespace skm {

/// Ball certified to contain the operator's range: ||T x - center|| <= radius
/// for all x, in the operator's own norm. Lets callers turn a bounded range
/// into a displacement constant via the triangle inequality.
struct RangeBall {
  std::vector<double> center;
  double radius = 0.0;
};

/// A map R^d -> R^d declared nonexpansive in a stated norm, with optional
/// metadata (a known fixed point, a certified range ball). The declaration
/// is the caller's responsibility; check_nonexpansive provides a sampled
/// falsification test, not a proof.
class NonexpansiveOperator {
 public:
  using Fn = std::function<void(std::span<const double>, std::span<double>)>;

  NonexpansiveOperator(std::string name, std::size_t dim, NormSpec norm, Fn fn)
      : name_(std::move(name)), dim_(dim), norm_(norm), fn_(std::move(fn)) {}

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  NormSpec norm() const { return norm_; }

  const std::optional<std::vector<double>>& fixed_point() const { return fixed_point_; }
  const std::optional<RangeBall>& range_ball() const { return range_ball_; }
  void set_fixed_point(std::vector<double> p);
  void set_range_ball(RangeBall b);

  /// y = T x. Throws on dimension mismatch.
  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply(std::span<const double> x) const;

  /// ||x - T x|| in the operator's norm.
  double residual(std::span<const double> x) const;

 private:
  std::string name_;
  std::size_t dim_;
  NormSpec norm_;
  Fn fn_;
  std::optional<std::vector<double>> fixed_point_;
  std::optional<RangeBall> range_ball_;
};

struct NonexpansiveCheck {
  std::size_t pairs = 0;
  std::size_t violations = 0;   // pairs with ratio > 1 + 1e-9
  double max_ratio = 0.0;
};

/// Samples random pairs at several length scales and reports the largest
/// ||Tx - Ty|| / ||x - y|| seen.
NonexpansiveCheck check_nonexpansive(const NonexpansiveOperator& op, std::size_t n_pairs,
                                     std::uint64_t seed);

/// Gradient half-step for f(x) = x' diag(eigs) x / 2 with 0 <= eigs <= L:
/// T x = x - (2/L) diag(eigs) x. Nonexpansive in l2; fixed point 0 when all
/// eigenvalues are positive.
NonexpansiveOperator make_sgd_quadratic(std::vector<double> eigenvalues, double L);

/// Rotation by `angle` applied to each consecutive coordinate pair; an odd
/// trailing coordinate is negated. An l2 isometry with Fix = {0} whenever
/// angle is not a multiple of 2*pi.
NonexpansiveOperator make_planar_rotation(double angle, std::size_t dim);

/// clamp(c + S(x - c)) onto the box [-halfwidth, halfwidth]^d, where S is a
/// 0.9-scaled pairwise rotation. Range is the box (certified ball), the
/// unique fixed point is c (which must lie inside the box).
NonexpansiveOperator make_box_affine(std::size_t dim, double halfwidth, double angle,
                                     std::vector<double> center);

}  // namespace skm
