#include "skm/operators.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "skm/rng.hpp"

namespace skm {

void NonexpansiveOperator::set_fixed_point(std::vector<double> p) {
  if (p.size() != dim_) throw std::invalid_argument("fixed point dimension mismatch");
  fixed_point_ = std::move(p);
}

void NonexpansiveOperator::set_range_ball(RangeBall b) {
  if (b.center.size() != dim_) throw std::invalid_argument("range ball dimension mismatch");
  if (!(b.radius >= 0.0)) throw std::invalid_argument("range ball radius must be >= 0");
  range_ball_ = std::move(b);
}

void NonexpansiveOperator::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != dim_ || y.size() != dim_) {
    throw std::invalid_argument("NonexpansiveOperator::apply: dimension mismatch on '" + name_ +
                                "' (dim " + std::to_string(dim_) + ", got " +
                                std::to_string(x.size()) + ")");
  }
  fn_(x, y);
}

std::vector<double> NonexpansiveOperator::apply(std::span<const double> x) const {
  std::vector<double> y(dim_);
  apply(x, y);
  return y;
}

double NonexpansiveOperator::residual(std::span<const double> x) const {
  std::vector<double> y = apply(x);
  for (std::size_t i = 0; i < dim_; ++i) y[i] = x[i] - y[i];
  return norm_value(norm_, y);
}

NonexpansiveCheck check_nonexpansive(const NonexpansiveOperator& op, std::size_t n_pairs,
                                     std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t d = op.dim();
  std::vector<double> x(d), y(d), tx(d), ty(d), diff(d);
  NonexpansiveCheck out;
  const double scales[] = {0.1, 1.0, 10.0};
  for (std::size_t p = 0; p < n_pairs; ++p) {
    double s = scales[p % 3];
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = s * rng.gaussian();
      y[i] = s * rng.gaussian();
    }
    for (std::size_t i = 0; i < d; ++i) diff[i] = x[i] - y[i];
    double den = norm_value(op.norm(), diff);
    if (den < 1e-14) continue;
    op.apply(x, tx);
    op.apply(y, ty);
    for (std::size_t i = 0; i < d; ++i) diff[i] = tx[i] - ty[i];
    double num = norm_value(op.norm(), diff);
    double ratio = num / den;
    out.pairs += 1;
    out.max_ratio = std::max(out.max_ratio, ratio);
    if (ratio > 1.0 + 1e-9) out.violations += 1;
  }
  return out;
}

NonexpansiveOperator make_sgd_quadratic(std::vector<double> eigenvalues, double L) {
  if (eigenvalues.empty()) throw std::invalid_argument("make_sgd_quadratic: empty spectrum");
  if (!(L > 0.0)) throw std::invalid_argument("make_sgd_quadratic: L must be > 0");
  bool positive = true;
  for (double e : eigenvalues) {
    if (!(e >= 0.0 && e <= L)) {
      throw std::invalid_argument("make_sgd_quadratic: eigenvalues must lie in [0, L]");
    }
    if (e == 0.0) positive = false;
  }
  std::size_t d = eigenvalues.size();
  auto eigs = std::make_shared<std::vector<double>>(std::move(eigenvalues));
  NonexpansiveOperator op(
      "sgd-quadratic", d, NormSpec{Norm::l2},
      [eigs, L](std::span<const double> x, std::span<double> y) {
        for (std::size_t i = 0; i < x.size(); ++i) {
          y[i] = x[i] - (2.0 / L) * (*eigs)[i] * x[i];
        }
      });
  if (positive) op.set_fixed_point(std::vector<double>(d, 0.0));
  return op;
}

NonexpansiveOperator make_planar_rotation(double angle, std::size_t dim) {
  if (dim < 2) throw std::invalid_argument("make_planar_rotation: dim must be >= 2");
  double c = std::cos(angle);
  double s = std::sin(angle);
  NonexpansiveOperator op(
      "rotation", dim, NormSpec{Norm::l2},
      [c, s](std::span<const double> x, std::span<double> y) {
        std::size_t d = x.size();
        for (std::size_t i = 0; i + 1 < d; i += 2) {
          double a = x[i];
          double b = x[i + 1];
          y[i] = c * a - s * b;
          y[i + 1] = s * a + c * b;
        }
        if (d % 2 == 1) y[d - 1] = -x[d - 1];
      });
  op.set_fixed_point(std::vector<double>(dim, 0.0));
  return op;
}

NonexpansiveOperator make_box_affine(std::size_t dim, double halfwidth, double angle,
                                     std::vector<double> center) {
  if (dim < 2) throw std::invalid_argument("make_box_affine: dim must be >= 2");
  if (!(halfwidth > 0.0)) throw std::invalid_argument("make_box_affine: halfwidth must be > 0");
  if (center.size() != dim) throw std::invalid_argument("make_box_affine: center dim mismatch");
  for (double v : center) {
    if (std::abs(v) > halfwidth) {
      throw std::invalid_argument("make_box_affine: center must lie inside the box");
    }
  }
  double c = 0.9 * std::cos(angle);
  double s = 0.9 * std::sin(angle);
  auto ctr = std::make_shared<std::vector<double>>(center);
  double B = halfwidth;
  NonexpansiveOperator op(
      "box-affine", dim, NormSpec{Norm::l2},
      [c, s, ctr, B](std::span<const double> x, std::span<double> y) {
        std::size_t d = x.size();
        const std::vector<double>& cc = *ctr;
        // y = center + 0.9 R (x - center), then clamp to the box.
        for (std::size_t i = 0; i + 1 < d; i += 2) {
          double a = x[i] - cc[i];
          double b = x[i + 1] - cc[i + 1];
          y[i] = cc[i] + c * a - s * b;
          y[i + 1] = cc[i + 1] + s * a + c * b;
        }
        if (d % 2 == 1) y[d - 1] = cc[d - 1] - 0.9 * (x[d - 1] - cc[d - 1]);
        for (std::size_t i = 0; i < d; ++i) y[i] = std::clamp(y[i], -B, B);
      });
  op.set_fixed_point(center);
  RangeBall ball;
  ball.center.assign(dim, 0.0);
  ball.radius = halfwidth * std::sqrt(static_cast<double>(dim));  // box inside this l2 ball
  op.set_range_ball(std::move(ball));
  return op;
}

}  // namespace skm
