#pragma once

#include <functional>

namespace skm {

/// Adaptive Gauss-Kronrod (7-15) integration of f over [a, b]. Panels are
/// bisected until the embedded error estimate meets rel_tol against the
/// running total (with abs_tol as a floor for near-zero integrals). Throws
/// if the subdivision limit is hit before the tolerance.
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 double abs_tol = 0.0, int max_depth = 60);

}  // namespace skm
