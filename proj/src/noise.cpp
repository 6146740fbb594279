#include "skm/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace skm {

NoiseModel NoiseModel::none(std::size_t dim) {
  NoiseModel m;
  m.kind_ = NoiseKind::none;
  m.dim_ = dim;
  return m;
}

NoiseModel NoiseModel::iid(std::size_t dim, BaseDist base, double scale) {
  if (dim == 0) throw std::invalid_argument("NoiseModel: dim must be >= 1");
  if (!(scale >= 0.0)) throw std::invalid_argument("NoiseModel: scale must be >= 0");
  NoiseModel m;
  m.kind_ = NoiseKind::iid;
  m.base_ = base;
  m.dim_ = dim;
  m.scale_ = scale;
  return m;
}

NoiseModel NoiseModel::scheduled_iid(std::size_t dim, BaseDist base,
                                     std::function<double(std::size_t)> theta) {
  if (dim == 0) throw std::invalid_argument("NoiseModel: dim must be >= 1");
  if (!theta) throw std::invalid_argument("NoiseModel: empty schedule");
  NoiseModel m;
  m.kind_ = NoiseKind::scheduled_iid;
  m.base_ = base;
  m.dim_ = dim;
  m.scale_fn_ = std::move(theta);
  return m;
}

NoiseModel NoiseModel::vanishing(std::size_t dim, BaseDist base,
                                 std::function<double(std::size_t)> decay) {
  if (dim == 0) throw std::invalid_argument("NoiseModel: dim must be >= 1");
  if (!decay) throw std::invalid_argument("NoiseModel: empty decay");
  NoiseModel m;
  m.kind_ = NoiseKind::vanishing;
  m.base_ = base;
  m.dim_ = dim;
  m.scale_fn_ = std::move(decay);
  return m;
}

double NoiseModel::scale_at(std::size_t n) const {
  switch (kind_) {
    case NoiseKind::none:
      return 0.0;
    case NoiseKind::iid:
      return scale_;
    case NoiseKind::scheduled_iid:
    case NoiseKind::vanishing: {
      double s = scale_fn_(n);
      if (!(s >= 0.0)) {
        throw std::domain_error("NoiseModel: negative scale at n=" + std::to_string(n));
      }
      return s;
    }
  }
  return 0.0;
}

void NoiseModel::sample(std::size_t n, Rng& rng, std::span<double> out) const {
  if (out.size() != dim_) throw std::invalid_argument("NoiseModel::sample: dimension mismatch");
  if (kind_ == NoiseKind::none) {
    for (double& v : out) v = 0.0;
    return;
  }
  double s = scale_at(n);
  double root_d = std::sqrt(static_cast<double>(dim_));
  switch (base_) {
    case BaseDist::gaussian: {
      double c = s / root_d;
      for (double& v : out) v = c * rng.gaussian();
      break;
    }
    case BaseDist::rademacher: {
      double c = s / root_d;
      for (double& v : out) v = c * rng.rademacher();
      break;
    }
    case BaseDist::uniform: {
      // Var per coordinate = (s/sqrt(d))^2 needs halfwidth s*sqrt(3/d).
      double c = s * std::sqrt(3.0) / root_d;
      for (double& v : out) v = c * rng.uniform_sym();
      break;
    }
  }
}

double NoiseModel::variance_at(std::size_t n) const {
  double s = scale_at(n);
  return s * s;
}

double NoiseModel::l2_sup(std::size_t n) const {
  double s = scale_at(n);
  switch (kind_ == NoiseKind::none ? BaseDist::rademacher : base_) {
    case BaseDist::gaussian:
      return s == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    case BaseDist::rademacher:
      return s;  // every coordinate at exactly s/sqrt(d)
    case BaseDist::uniform:
      return s * std::sqrt(3.0);
  }
  return 0.0;
}

double NoiseModel::l2_sup_all(std::size_t horizon) const {
  double m = 0.0;
  if (kind_ == NoiseKind::none) return 0.0;
  if (kind_ == NoiseKind::iid) return l2_sup(1);
  for (std::size_t n = 1; n <= horizon; ++n) m = std::max(m, l2_sup(n));
  return m;
}

VarianceSchedule NoiseModel::variance_schedule() const {
  switch (kind_) {
    case NoiseKind::none:
      return VarianceSchedule::bounded(0.0);
    case NoiseKind::iid:
      return VarianceSchedule::bounded(scale_);
    default: {
      auto fn = scale_fn_;
      return VarianceSchedule::sequence([fn](std::size_t n) { return fn(n); });
    }
  }
}

}  // namespace skm
