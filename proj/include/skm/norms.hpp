#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace skm {

enum class Norm { l2, l1, linf };

struct NormSpec {
  Norm kind = Norm::l2;

  /// Equivalence factor mu with ||x|| <= mu ||x||_2 for this norm in
  /// dimension d: 1 for l2 and linf, sqrt(d) for l1.
  double mu(std::size_t dim) const {
    switch (kind) {
      case Norm::l1:
        return std::sqrt(static_cast<double>(dim));
      default:
        return 1.0;
    }
  }
};

inline double norm_value(NormSpec spec, std::span<const double> x) {
  switch (spec.kind) {
    case Norm::l2: {
      double s = 0.0;
      for (double v : x) s += v * v;
      return std::sqrt(s);
    }
    case Norm::l1: {
      double s = 0.0;
      for (double v : x) s += std::abs(v);
      return s;
    }
    case Norm::linf: {
      double m = 0.0;
      for (double v : x) m = std::max(m, std::abs(v));
      return m;
    }
  }
  throw std::logic_error("norm_value: bad norm kind");
}

inline double l2_norm(std::span<const double> x) {
  return norm_value(NormSpec{Norm::l2}, x);
}

}  // namespace skm
