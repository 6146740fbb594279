#include "skm/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "skm/quadrature.hpp"
#include "skm/special.hpp"

namespace skm {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void check_params(const BoundParams& p) {
  if (p.schedule == nullptr) throw std::invalid_argument("bounds: schedule is null");
  if (!(p.kappa_bar >= 0.0)) throw std::invalid_argument("bounds: kappa_bar must be >= 0");
  if (!(p.mu >= 1.0)) throw std::invalid_argument("bounds: mu must be >= 1");
}

/// 2 mu sigma (alpha_n + 2) sqrt(alpha_n): the trailing noise terms after
/// the nu <= sigma sqrt(alpha_n) envelope. Shared by every closed-form
/// power bound.
double majorized_tail(double mu, double sigma, double alpha_n) {
  return 2.0 * mu * sigma * (alpha_n + 2.0) * std::sqrt(alpha_n);
}

}  // namespace

double bound_general(const BoundParams& p, std::size_t n) {
  check_params(p);
  if (n < 1) throw std::invalid_argument("bound_general: n must be >= 1");
  StepsizeSchedule& s = *p.schedule;
  s.reserve(n);
  NuSequence nu(s, p.variance);
  nu.nu(n);  // fill
  double tn = s.tau_at(n);
  double b = p.kappa_bar * sigma_fn(tn);
  for (std::size_t k = 2; k <= n; ++k) {
    b += 2.0 * p.mu * s.alpha(k) * sigma_fn(tn - s.tau_at(k)) * nu.nu(k - 1);
  }
  return b + 4.0 * p.mu * nu.nu(n);
}

double bound_convolution(const BoundParams& p, const std::function<double(double)>& h,
                         double gamma, std::size_t n, ConvolutionTail tail, bool validate) {
  check_params(p);
  if (!h) throw std::invalid_argument("bound_convolution: h is empty");
  if (!(gamma >= 1.0)) throw std::invalid_argument("bound_convolution: gamma must be >= 1");
  if (n < 1) throw std::invalid_argument("bound_convolution: n must be >= 1");
  StepsizeSchedule& s = *p.schedule;
  s.reserve(n + 1);
  NuSequence nu(s, p.variance);

  if (validate) {
    constexpr double slack = 1e-12;
    for (std::size_t k = 2; k <= n; ++k) {
      double lhs = nu.nu(k - 1);
      double rhs = (1.0 - s.alpha(k)) * h(s.tau_at(k));
      if (lhs > rhs * (1.0 + slack) + slack) {
        throw std::invalid_argument(
            "bound_convolution: nu_{k-1} <= (1-alpha_k) h(tau_k) fails first at k=" +
            std::to_string(k) + " (" + std::to_string(lhs) + " > " + std::to_string(rhs) + ")");
      }
    }
    for (std::size_t k = 1; k <= n; ++k) {
      double lhs = s.alpha(k) * (1.0 - s.alpha(k));
      double rhs = gamma * s.alpha(k + 1) * (1.0 - s.alpha(k + 1));
      if (lhs > rhs * (1.0 + slack)) {
        throw std::invalid_argument(
            "bound_convolution: alpha_k(1-alpha_k) <= gamma alpha_{k+1}(1-alpha_{k+1}) fails "
            "first at k=" +
            std::to_string(k));
      }
    }
  }

  double tn = s.tau_at(n);
  double t1 = s.tau_at(1);
  double head = p.kappa_bar / std::sqrt(kPi * tn);
  double mid = 0.0;
  if (n > 1) {
    // u = sqrt(tau_n - x):  Int h(x)/sqrt(tau_n-x) dx = Int 2 h(tau_n - u^2) du.
    double umax = std::sqrt(tn - t1);
    double integral =
        integrate([&h, tn](double u) { return 2.0 * h(tn - u * u); }, 0.0, umax, 1e-9, 0.0);
    mid = (2.0 * p.mu * gamma / std::sqrt(kPi)) * integral;
  }
  double trail;
  if (tail == ConvolutionTail::exact_nu) {
    trail = 2.0 * p.mu * s.alpha(n) * nu.nu(n - 1) + 4.0 * p.mu * nu.nu(n);
  } else {
    if (!p.variance.is_bounded()) {
      throw std::invalid_argument(
          "bound_convolution: majorized tail requires bounded variance");
    }
    trail = majorized_tail(p.mu, p.variance.sigma(), s.alpha(n));
  }
  return head + mid + trail;
}

double bound_constant(double kappa_bar, double mu, double sigma, double alpha, std::size_t n) {
  if (!(kappa_bar >= 0.0)) throw std::invalid_argument("bound_constant: kappa_bar must be >= 0");
  if (!(mu >= 1.0)) throw std::invalid_argument("bound_constant: mu must be >= 1");
  if (!(sigma >= 0.0)) throw std::invalid_argument("bound_constant: sigma must be >= 0");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("bound_constant: alpha must lie in (0, 1)");
  }
  if (n < 1) throw std::invalid_argument("bound_constant: n must be >= 1");
  double beta = 1.0 - alpha;
  double nn = static_cast<double>(n);
  double head = kappa_bar / std::sqrt(kPi * alpha * beta * nn);
  double noise = (2.0 * mu * sigma * std::sqrt(alpha) / std::sqrt(1.0 + beta)) *
                 (2.0 * std::sqrt(alpha * nn / (kPi * beta)) + alpha + 2.0);
  return head + noise;
}

double fixed_horizon_rate(std::size_t n0, double kappa_bar, double mu_sigma) {
  if (n0 < 1) throw std::invalid_argument("fixed_horizon_rate: n0 must be >= 1");
  if (!(kappa_bar >= 0.0) || !(mu_sigma >= 0.0)) {
    throw std::invalid_argument("fixed_horizon_rate: constants must be >= 0");
  }
  return 2.0 * (kappa_bar + mu_sigma) / std::pow(static_cast<double>(n0), 1.0 / 6.0);
}

double bound_power(const BoundParams& p, std::size_t n) {
  check_params(p);
  if (n < 1) throw std::invalid_argument("bound_power: n must be >= 1");
  if (!p.schedule->is_power()) {
    throw std::invalid_argument("bound_power: schedule must be the power family");
  }
  if (!p.variance.is_bounded()) {
    throw std::invalid_argument("bound_power: requires bounded variance");
  }
  StepsizeSchedule& s = *p.schedule;
  const double a = s.exponent();
  const double sigma = p.variance.sigma();
  const double mu = p.mu;
  s.reserve(n);
  double tn = s.tau_at(n);
  double t1 = s.tau_at(1);
  double an = s.alpha(n);
  double head = p.kappa_bar / std::sqrt(kPi * tn);
  double tail = majorized_tail(mu, sigma, an);

  PowerConstants pc = power_constants(a);
  double mid;
  if (a == 1.0) {
    mid = (2.0 * std::sqrt(2.0) * mu * sigma * *pc.d / std::sqrt(kPi)) *
          dawson(std::sqrt((tn - 0.25) / 2.0));
  } else if (a == 2.0 / 3.0) {
    double c = 3.0 * *pc.lambda;
    double dt = tn - t1;
    double arg = 1.0 + 2.0 * (dt + std::sqrt((c + tn) * dt)) / (c + t1);
    mid = (6.0 * mu * sigma * pc.gamma / (std::sqrt(kPi) * std::sqrt(c + tn))) * std::log(arg);
  } else {
    double b = *pc.b;
    double lam = *pc.lambda;
    double den = lam + (1.0 - a) * tn;
    double z = (1.0 - a) * (tn - t1) / den;
    mid = (4.0 * mu * sigma / std::sqrt(kPi)) * pc.gamma * std::sqrt(tn - t1) /
          std::pow(den, b) * hyp2f1_half(b, z);
  }
  return head + mid + tail;
}

double asymptote_power(const BoundParams& p, std::size_t n) {
  check_params(p);
  if (n < 1) throw std::invalid_argument("asymptote_power: n must be >= 1");
  if (!p.schedule->is_power()) {
    throw std::invalid_argument("asymptote_power: schedule must be the power family");
  }
  if (!p.variance.is_bounded()) {
    throw std::invalid_argument("asymptote_power: requires bounded variance");
  }
  const double a = p.schedule->exponent();
  const double sigma = p.variance.sigma();
  const double mu = p.mu;
  const double nn = static_cast<double>(n);
  PowerConstants pc = power_constants(a);
  if (a == 1.0) {
    if (n < 2) throw std::invalid_argument("asymptote_power: a = 1 needs n >= 2");
    return (p.kappa_bar + 2.0 * mu * sigma * *pc.d) / std::sqrt(kPi * std::log(nn));
  }
  if (a == 2.0 / 3.0) {
    return (2.0 * mu * sigma * pc.gamma / std::sqrt(3.0 * kPi)) * std::log(nn) /
           std::pow(nn, 1.0 / 6.0);
  }
  if (a < 2.0 / 3.0) {
    double b = *pc.b;
    double ratio = gamma_fn(1.0 - b) / gamma_fn(1.5 - b);
    return (2.0 * mu * sigma * pc.gamma / std::sqrt(1.0 - a)) * ratio *
           std::pow(nn, -(a - 0.5));
  }
  return (p.kappa_bar + 2.0 * mu * sigma * *pc.d) * std::sqrt(1.0 - a) / std::sqrt(kPi) *
         std::pow(nn, -(1.0 - a) / 2.0);
}

double kappa_bar_range(double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("kappa_bar_range: r must be >= 0");
  return r;
}

double kappa_bar_fixdist(double dist0, StepsizeSchedule& schedule, double sigma, double mu,
                         std::size_t n_max) {
  if (!(dist0 >= 0.0)) throw std::invalid_argument("kappa_bar_fixdist: dist0 must be >= 0");
  if (!(sigma >= 0.0)) throw std::invalid_argument("kappa_bar_fixdist: sigma must be >= 0");
  if (!(mu >= 1.0)) throw std::invalid_argument("kappa_bar_fixdist: mu must be >= 1");
  if (n_max < 2) throw std::invalid_argument("kappa_bar_fixdist: n_max must be >= 2");
  if (!schedule.is_power() || !(schedule.exponent() > 2.0 / 3.0)) {
    throw std::invalid_argument(
        "kappa_bar_fixdist: needs a power schedule with a > 2/3 (the stepsize-noise series "
        "diverges otherwise)");
  }
  const double a = schedule.exponent();
  schedule.reserve(n_max);
  double partial = 0.0;
  for (std::size_t k = 2; k <= n_max; ++k) {
    partial += schedule.alpha(k) * sigma * std::sqrt(schedule.delta_sq_at(k - 1));
  }
  double e = 1.5 * a;  // sum_{k>N} k^{-e} <= N^{1-e}/(e-1)
  double tail = sigma * std::pow(static_cast<double>(n_max), 1.0 - e) / (e - 1.0);
  return 2.0 * dist0 + mu * (partial + tail);
}

double bound_euclidean(double R, double mu, StepsizeSchedule& schedule,
                       const VarianceSchedule& variance, std::size_t n) {
  if (!(R >= 0.0)) throw std::invalid_argument("bound_euclidean: R must be >= 0");
  if (!(mu >= 1.0)) throw std::invalid_argument("bound_euclidean: mu must be >= 1");
  if (n < 1) throw std::invalid_argument("bound_euclidean: n must be >= 1");
  schedule.reserve(n);
  double sum = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    double ak = schedule.alpha(k);
    double th = variance.theta(k);
    sum += ak * ak * th * th;
  }
  double tn = schedule.tau_at(n);
  return std::sqrt((R * R + mu * mu * sum) / tn);
}

namespace {
double tau1_power(double a) {
  double a1 = std::pow(2.0, -a);
  return a1 * (1.0 - a1);
}
}  // namespace

double euclidean_constant_rate(std::size_t n0, double R, double mu, double sigma) {
  if (n0 < 1) throw std::invalid_argument("euclidean_constant_rate: n0 must be >= 1");
  double num = std::sqrt(R * R + mu * mu * sigma * sigma);
  return num / (std::sqrt(tau1_power(0.5)) * std::pow(static_cast<double>(n0), 0.25));
}

double euclidean_power_rate(double a, std::size_t n, double R, double mu, double sigma) {
  if (!(a >= 0.5 && a <= 1.0)) {
    throw std::invalid_argument("euclidean_power_rate: a must lie in [1/2, 1]");
  }
  if (n < 1) throw std::invalid_argument("euclidean_power_rate: n must be >= 1");
  double nn = static_cast<double>(n);
  double ms = mu * sigma;
  if (a == 0.5) {
    return std::sqrt(R * R + ms * ms * std::log(nn + 1.0)) /
           (std::sqrt(tau1_power(0.5)) * std::pow(nn, 0.25));
  }
  if (a == 1.0) {
    return 2.0 * std::sqrt(std::log(2.0)) * std::sqrt(R * R + ms * ms) /
           std::sqrt(std::log(nn + 1.0));
  }
  return std::sqrt(R * R + ms * ms / (2.0 * a - 1.0)) /
         (std::sqrt(tau1_power(a)) * std::pow(nn, (1.0 - a) / 2.0));
}

double high_prob_bound(double b_n, double p) {
  if (!(b_n >= 0.0)) throw std::invalid_argument("high_prob_bound: bound must be >= 0");
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("high_prob_bound: p must lie in (0, 1]");
  }
  return b_n / p;
}

}  // namespace skm
