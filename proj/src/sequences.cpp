#include "skm/sequences.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace skm {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

double sigma_fn(double y) {
  if (y < 0.0) {
    throw std::domain_error("sigma_fn: negative argument " + std::to_string(y));
  }
  if (y == 0.0) return 1.0;
  double v = 1.0 / std::sqrt(kPi * y);
  return v < 1.0 ? v : 1.0;
}

StepsizeSchedule::StepsizeSchedule(Kind k, double a, double alpha)
    : kind_(k), a_(a), alpha_(alpha) {
  tau_.push_back(0.0);
  delta_sq_.push_back(0.0);
}

StepsizeSchedule StepsizeSchedule::power(double a) {
  if (!(a >= 0.5 && a <= 1.0)) {
    throw std::invalid_argument("StepsizeSchedule::power: a must lie in [1/2, 1], got " +
                                std::to_string(a));
  }
  return StepsizeSchedule(Kind::power, a, 0.0);
}

StepsizeSchedule StepsizeSchedule::constant(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("StepsizeSchedule::constant: alpha must lie in (0, 1), got " +
                                std::to_string(alpha));
  }
  return StepsizeSchedule(Kind::constant, 0.0, alpha);
}

double StepsizeSchedule::alpha(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("StepsizeSchedule::alpha: n must be >= 1");
  if (kind_ == Kind::constant) return alpha_;
  return std::pow(static_cast<double>(n) + 1.0, -a_);
}

void StepsizeSchedule::reserve(std::size_t n) {
  while (tau_.size() <= n) {
    std::size_t k = tau_.size();
    double ak = alpha(k);
    tau_.push_back(tau_.back() + ak * (1.0 - ak));
    double om = 1.0 - ak;
    delta_sq_.push_back(om * om * delta_sq_.back() + ak * ak);
  }
}

double StepsizeSchedule::tau(std::size_t n) {
  reserve(n);
  return tau_[n];
}

double StepsizeSchedule::delta_sq(std::size_t n) {
  reserve(n);
  return delta_sq_[n];
}

double StepsizeSchedule::tau_at(std::size_t n) const {
  if (n >= tau_.size()) throw std::logic_error("StepsizeSchedule::tau_at: not reserved");
  return tau_[n];
}

double StepsizeSchedule::delta_sq_at(std::size_t n) const {
  if (n >= delta_sq_.size()) throw std::logic_error("StepsizeSchedule::delta_sq_at: not reserved");
  return delta_sq_[n];
}

std::vector<double> StepsizeSchedule::pi_weights(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("StepsizeSchedule::pi_weights: n must be >= 1");
  std::vector<double> w(n);
  // Backward sweep: suffix = prod_{i=k+1}^n (1 - alpha_i).
  double suffix = 1.0;
  for (std::size_t k = n; k >= 1; --k) {
    w[k - 1] = alpha(k) * suffix;
    suffix *= 1.0 - alpha(k);
  }
  return w;
}

VarianceSchedule VarianceSchedule::bounded(double sigma) {
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("VarianceSchedule::bounded: sigma must be >= 0");
  }
  VarianceSchedule v;
  v.bounded_ = true;
  v.sigma_ = sigma;
  return v;
}

VarianceSchedule VarianceSchedule::sequence(std::function<double(std::size_t)> theta) {
  if (!theta) throw std::invalid_argument("VarianceSchedule::sequence: empty function");
  VarianceSchedule v;
  v.bounded_ = false;
  v.theta_fn_ = std::move(theta);
  return v;
}

double VarianceSchedule::theta(std::size_t n) const {
  if (bounded_) return sigma_;
  double t = theta_fn_(n);
  if (!(t >= 0.0)) {
    throw std::domain_error("VarianceSchedule: theta_" + std::to_string(n) + " is negative");
  }
  return t;
}

NuSequence::NuSequence(StepsizeSchedule& schedule, VarianceSchedule variance)
    : schedule_(schedule), variance_(std::move(variance)) {
  sq_.push_back(0.0);
}

double NuSequence::nu(std::size_t n) {
  if (variance_.is_bounded()) {
    return variance_.sigma() * std::sqrt(schedule_.delta_sq(n));
  }
  while (sq_.size() <= n) {
    std::size_t k = sq_.size();
    double ak = schedule_.alpha(k);
    double th = variance_.theta(k);
    double om = 1.0 - ak;
    sq_.push_back(om * om * sq_.back() + ak * ak * th * th);
  }
  return std::sqrt(sq_[n]);
}

PowerConstants power_constants(double a) {
  if (!(a >= 0.5 && a <= 1.0)) {
    throw std::invalid_argument("power_constants: a must lie in [1/2, 1]");
  }
  PowerConstants c;
  c.a = a;
  StepsizeSchedule s = StepsizeSchedule::power(a);

  // gamma = sup_{k>=2} of r_k = alpha_k(1-alpha_k) / alpha_{k+1}(1-alpha_{k+1}).
  // The peak index depends on a (k=2 only for large a), hence the scan.
  constexpr std::size_t kScanMax = 10000;
  std::vector<double> ratios;
  ratios.reserve(kScanMax - 1);
  for (std::size_t k = 2; k <= kScanMax; ++k) {
    double ak = s.alpha(k);
    double ak1 = s.alpha(k + 1);
    ratios.push_back((ak * (1.0 - ak)) / (ak1 * (1.0 - ak1)));
  }
  std::size_t peak = 0;
  for (std::size_t i = 1; i < ratios.size(); ++i) {
    if (ratios[i] > ratios[peak]) peak = i;
  }
  for (std::size_t i = peak + 1; i < ratios.size(); ++i) {
    if (ratios[i] > ratios[i - 1] + 1e-12) {
      throw std::logic_error("power_constants: ratio not monotone past its peak at k=" +
                             std::to_string(i + 2));
    }
  }
  c.gamma = ratios[peak];
  c.gamma_argmax_k = peak + 2;

  if (a < 1.0) {
    c.b = a / (2.0 * (1.0 - a));
    double t2 = s.tau(2);
    double root3 = std::sqrt(3.0);
    double base = std::pow(root3, a) - std::pow(root3, -a);
    c.lambda = std::pow(base, 2.0 * (1.0 - a) / a) - (1.0 - a) * t2;
    if (a > 2.0 / 3.0) {
      double t1 = s.tau(1);
      c.d = (2.0 * c.gamma / (3.0 * a - 2.0)) *
            std::pow(*c.lambda + (1.0 - a) * t1, 1.0 - *c.b);
    }
  } else {
    // a = 1 closed forms.
    c.d = std::sqrt(3.0) * std::exp(1.0 / 9.0) * 32.0 / 27.0;
    c.omega = 0.5 * std::sqrt(3.0) * std::exp(17.0 / 72.0);
  }
  return c;
}

}  // namespace skm
