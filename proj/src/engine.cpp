#include "skm/engine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace skm {

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

const EngineCheckpoint& Trajectory::at(std::size_t n) const {
  // Stored indices are 0, stride, 2*stride, ..., final_n.
  if (n % stride == 0) {
    std::size_t idx = n / stride;
    if (idx < checkpoints.size() && checkpoints[idx].n == n) return checkpoints[idx];
  }
  for (const auto& c : checkpoints) {
    if (c.n == n) return c;
  }
  throw std::out_of_range("Trajectory::at: no checkpoint at n=" + std::to_string(n));
}

Trajectory run_skm(const NonexpansiveOperator& op, StepsizeSchedule& schedule,
                   const NoiseModel& noise, std::span<const double> x0, std::size_t n_steps,
                   std::size_t stride, std::uint64_t seed) {
  const std::size_t d = op.dim();
  if (x0.size() != d) throw std::invalid_argument("run_skm: x0 dimension mismatch");
  if (!noise.is_none() && noise.dim() != d) {
    throw std::invalid_argument("run_skm: noise dimension mismatch");
  }
  if (stride == 0) throw std::invalid_argument("run_skm: stride must be >= 1");
  if (!all_finite(x0)) throw std::invalid_argument("run_skm: x0 not finite");

  Trajectory t;
  t.dim = d;
  t.final_n = n_steps;
  t.stride = stride;
  t.seed = seed;
  t.norm = op.norm();
  t.residual.reserve(n_steps + 1);
  t.ubar_norm.reserve(n_steps + 1);

  Rng rng(seed);
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> ubar(d, 0.0);
  std::vector<double> tx(d), u(d), diff(d);

  auto store = [&](std::size_t n) {
    t.checkpoints.push_back({n, x, ubar});
  };
  store(0);
  t.ubar_norm.push_back(0.0);

  for (std::size_t n = 1; n <= n_steps; ++n) {
    double a = schedule.alpha(n);
    op.apply(x, tx);
    for (std::size_t i = 0; i < d; ++i) diff[i] = x[i] - tx[i];
    t.residual.push_back(norm_value(t.norm, diff));  // residual at n-1

    if (noise.is_none()) {
      for (std::size_t i = 0; i < d; ++i) u[i] = 0.0;
    } else {
      noise.sample(n, rng, u);
    }
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = (1.0 - a) * x[i] + a * (tx[i] + u[i]);
      ubar[i] = (1.0 - a) * ubar[i] + a * u[i];
    }
    if (!all_finite(x)) {
      throw std::runtime_error("run_skm: non-finite iterate at step " + std::to_string(n));
    }
    t.ubar_norm.push_back(norm_value(t.norm, ubar));
    if (n % stride == 0 || n == n_steps) store(n);
  }

  // Residual at the final iterate needs one more evaluation.
  op.apply(x, tx);
  for (std::size_t i = 0; i < d; ++i) diff[i] = x[i] - tx[i];
  t.residual.push_back(norm_value(t.norm, diff));
  return t;
}

double pathwise_certificate_at(const Trajectory& t, StepsizeSchedule& schedule, double kappa,
                               std::size_t n) {
  if (t.stride != 1) throw std::invalid_argument("pathwise_certificate: trajectory stride must be 1");
  if (n < 1 || n > t.final_n) throw std::invalid_argument("pathwise_certificate: n out of range");
  if (!(kappa >= 0.0)) throw std::invalid_argument("pathwise_certificate: kappa must be >= 0");
  schedule.reserve(n);
  double tn = schedule.tau_at(n);
  double b = kappa * sigma_fn(tn);
  for (std::size_t k = 2; k <= n; ++k) {
    b += 2.0 * schedule.alpha(k) * sigma_fn(tn - schedule.tau_at(k)) * t.ubar_norm[k - 1];
  }
  return b + 4.0 * t.ubar_norm[n];
}

std::vector<double> pathwise_certificate(const Trajectory& t, StepsizeSchedule& schedule,
                                         double kappa) {
  if (t.final_n > 10000) {
    throw std::invalid_argument(
        "pathwise_certificate: full curve is O(n^2) and limited to n <= 10^4; "
        "use pathwise_certificate_at for single indices");
  }
  std::vector<double> out;
  out.reserve(t.final_n);
  for (std::size_t n = 1; n <= t.final_n; ++n) {
    out.push_back(pathwise_certificate_at(t, schedule, kappa, n));
  }
  return out;
}

std::pair<std::size_t, std::vector<double>> sample_random_iterate(const Trajectory& t,
                                                                  StepsizeSchedule& schedule,
                                                                  std::size_t n, Rng& rng) {
  if (t.stride != 1) throw std::invalid_argument("sample_random_iterate: stride must be 1");
  if (n < 1 || n > t.final_n) throw std::invalid_argument("sample_random_iterate: n out of range");
  schedule.reserve(n);
  double tn = schedule.tau_at(n);
  if (!(tn > 0.0)) throw std::domain_error("sample_random_iterate: tau_n must be positive");
  double u = rng.uniform01() * tn;
  // Inverse CDF over p_k = alpha_k (1 - alpha_k) / tau_n: find the first k
  // with cumulative tau_k >= u. The last index absorbs rounding.
  std::size_t k = n;
  for (std::size_t j = 1; j <= n; ++j) {
    if (schedule.tau_at(j) >= u) {
      k = j;
      break;
    }
  }
  return {k, t.at(k - 1).x};
}

}  // namespace skm
