#pragma once

#include <cstddef>
#include <functional>

#include "skm/sequences.hpp"

namespace skm {

/// Shared inputs for the expectation bounds: the displacement constant
/// kappa_bar, the norm equivalence factor mu (>= 1), the stepsize schedule
/// (borrowed; its caches are extended by bound evaluation, so share one
/// instance per thread), and the noise second-moment schedule.
struct BoundParams {
  double kappa_bar = 0.0;
  double mu = 1.0;
  StepsizeSchedule* schedule = nullptr;
  VarianceSchedule variance = VarianceSchedule::bounded(0.0);
};

/// kappa_bar sigma(tau_n)
///   + 2 mu sum_{k=2..n} alpha_k sigma(tau_n - tau_k) nu_{k-1}
///   + 4 mu nu_n.
/// Valid for any schedule/variance pair. O(n).
double bound_general(const BoundParams& p, std::size_t n);

/// Trailing-term handling for bound_convolution: `exact_nu` keeps
/// 2 mu alpha_n nu_{n-1} + 4 mu nu_n; `majorized_sqrt_alpha` substitutes
/// the envelope nu ~ sigma sqrt(alpha_n) on both, giving
/// 2 mu sigma (alpha_n + 2) sqrt(alpha_n), which is what the closed-form
/// power-schedule bounds use (required for route-consistency comparisons).
enum class ConvolutionTail { exact_nu, majorized_sqrt_alpha };

/// kappa_bar / sqrt(pi tau_n)
///   + (2 mu gamma / sqrt(pi)) Int_{tau_1}^{tau_n} h(x)/sqrt(tau_n - x) dx
///   + trailing terms per `tail`.
/// h must majorize the noise profile: nu_{k-1} <= (1-alpha_k) h(tau_k) and
/// alpha_k(1-alpha_k) <= gamma alpha_{k+1}(1-alpha_{k+1}) are validated
/// numerically for k <= n when `validate` is set (the first offending k is
/// reported). Decreasing convexity of h is the caller's obligation. The
/// integral is evaluated after u = sqrt(tau_n - x), which removes the
/// endpoint singularity; quadrature relative tolerance 1e-9.
double bound_convolution(const BoundParams& p, const std::function<double(double)>& h,
                         double gamma, std::size_t n,
                         ConvolutionTail tail = ConvolutionTail::exact_nu, bool validate = true);

/// Constant stepsize alpha, beta = 1 - alpha:
/// kappa_bar / sqrt(pi alpha beta n)
///   + (2 mu sigma sqrt(alpha)/sqrt(1+beta)) (2 sqrt(alpha n/(pi beta)) + alpha + 2).
double bound_constant(double kappa_bar, double mu, double sigma, double alpha, std::size_t n);

/// Horizon-tuned constant stepsize alpha = 1/(6 n0^{2/3}):
/// 2 (kappa_bar + mu sigma) / n0^{1/6}.
double fixed_horizon_rate(std::size_t n0, double kappa_bar, double mu_sigma);

/// Closed-form bound for the power schedule alpha_n = (n+1)^{-a}. Branch
/// dispatch is on exact equality of a: generic a in [1/2,1) uses the
/// hypergeometric form, a == 2/3 the logarithmic form, a == 1 the Dawson
/// form. Requires a power schedule and bounded variance.
double bound_power(const BoundParams& p, std::size_t n);

/// Leading-order behavior of bound_power for large n; four branches
/// (a < 2/3 polynomial, a = 2/3 log-corrected, a in (2/3,1) polynomial with
/// kappa_bar entering, a = 1 logarithmic). Requires n >= 2 when a = 1.
double asymptote_power(const BoundParams& p, std::size_t n);

/// Displacement constant from a certified range bound: returns r.
double kappa_bar_range(double r);

/// Displacement constant 2 dist0 + mu (sum_{k=2..n_max} alpha_k nu_{k-1} + tail)
/// for power schedules with a > 2/3 and variance bounded by sigma; the tail
/// uses nu_{k-1} <= sigma sqrt(alpha_k) and
/// sum_{k>N} k^{-3a/2} <= N^{1-3a/2}/(3a/2 - 1), so the result is a valid
/// upper bound for any n_max (larger n_max tightens it).
double kappa_bar_fixdist(double dist0, StepsizeSchedule& schedule, double sigma, double mu,
                         std::size_t n_max);

/// Hilbert-space randomized-iterate bound:
/// sqrt((R^2 + mu^2 sum_{k<=n} alpha_k^2 theta_k^2) / tau_n).
double bound_euclidean(double R, double mu, StepsizeSchedule& schedule,
                       const VarianceSchedule& variance, std::size_t n);

/// Specialization at constant alpha = 1/sqrt(n0+1):
/// sqrt(R^2 + mu^2 sigma^2) / (sqrt(tau_1(1/2)) n0^{1/4}).
double euclidean_constant_rate(std::size_t n0, double R, double mu, double sigma);

/// Power-schedule specializations (three branches: a = 1/2 log-corrected,
/// a in (1/2,1), a = 1).
double euclidean_power_rate(double a, std::size_t n, double R, double mu, double sigma);

/// Markov: a residual bound b_n in expectation gives b_n / p at failure
/// probability p in (0, 1].
double high_prob_bound(double b_n, double p);

}  // namespace skm
