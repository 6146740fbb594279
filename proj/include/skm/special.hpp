#pragma once

#include <cstddef>

namespace skm {

/// Gamma function for positive arguments (reflection handles x < 1/2),
/// Lanczos g=7 approximation, relative error well under 1e-12 on the
/// ranges used here.
double gamma_fn(double x);

/// 2F1(b, 1/2; 3/2; z) for b > 0, z in [0, 1), computed from the integral
/// representation (1/2) Int_0^1 y^{-1/2} (1 - z y)^{-b} dy after the
/// substitution y = t^2 removes the endpoint singularity:
/// Int_0^1 (1 - z t^2)^{-b} dt, adaptive quadrature.
double hyp2f1_half(double b, double z);

/// Dawson integral D+(x) = e^{-x^2} Int_0^x e^{y^2} dy for x >= 0.
/// Power series (positive-term form) for x <= 6; for larger x a Lentz
/// evaluation of the continued fraction attached to the large-x expansion.
/// The crossover sits where the continued fraction's intrinsic ~e^{-x^2}
/// accuracy floor drops below 1e-12 (near x = 5.8), not at the series
/// convergence limit.
double dawson(double x);

namespace oracle {

/// Reference 2F1(b, 1/2; 3/2; z) by direct power series
/// sum_m (b)_m z^m / ((2m+1) m!) in extended precision, up to 10^4 terms.
/// Independent of the quadrature path above.
double hyp2f1_series(double b, double z);

/// Reference Dawson value by adaptive quadrature of e^{y^2 - x^2} on [0, x].
/// Independent of both series and continued fraction.
double dawson_quadrature(double x);

}  // namespace oracle

}  // namespace skm
