// Acceptance gate: ten end-to-end checks, one printed line each. Tolerances
// and seeds are pinned here so a rerun is bit-reproducible.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"
#include "skm/bounds.hpp"
#include "skm/engine.hpp"
#include "skm/harness.hpp"
#include "skm/mdp.hpp"
#include "skm/verify.hpp"

using namespace skm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return std::string(buf);
}

bool report(int idx, const char* label, bool pass, const std::string& detail) {
  std::printf("%s  [%2d] %s (%s)\n", pass ? "PASS" : "FAIL", idx, label, detail.c_str());
  std::fflush(stdout);
  return pass;
}

NonexpansiveOperator gate_sgd() {
  std::vector<double> eigs(10);
  for (std::size_t i = 0; i < 10; ++i) eigs[i] = static_cast<double>(i + 1);
  return make_sgd_quadratic(std::move(eigs), 10.0);
}

std::vector<double> unit_x0(std::size_t d) {
  return std::vector<double>(d, 1.0 / std::sqrt(static_cast<double>(d)));
}

const SummaryRow& row_at(const Summary& s, std::size_t n) {
  for (const auto& r : s.rows) {
    if (r.n == n) return r;
  }
  throw std::out_of_range("no summary row at n=" + std::to_string(n));
}

}  // namespace

TEST_CASE("gate 1: exact average-reward solve") {
  auto t0 = Clock::now();
  Mdp m = Mdp::duff();
  ExactSolution sol = solve_exact(m);
  QTable qs = sol.q_of(m, Stabilizer::max_entry());
  double r_err = std::abs(sol.r_bar - 8.875);
  const double expect[4] = {53.0 / 8.0, -1.0 / 8.0, 17.0 / 8.0, 71.0 / 8.0};
  double q_err = 0.0;
  for (int k = 0; k < 4; ++k) q_err = std::max(q_err, std::abs(qs[k] - expect[k]));
  double elapsed = seconds_since(t0);
  bool pass = r_err <= 1e-8 && q_err <= 1e-8 && elapsed < 1.0;
  CHECK(report(1, "exact average-reward solve",
               pass,
               fmt("gain err %.2e, table err %.2e, %.3f s", r_err, q_err, elapsed)));
}

TEST_CASE("gate 2: stabilized Q-iteration statistics") {
  auto t0 = Clock::now();
  ExperimentConfig cfg;
  cfg.name = "duff";
  cfg.scenario = RviQScenario{Mdp::duff(), 1.0, Stabilizer::max_entry(), QTable(4, 0.0)};
  cfg.n_steps = 10000;
  cfg.stride = 100;
  cfg.replications = 100;
  cfg.master_seed = 20260822;
  Summary s = run_experiment(cfg);

  const SummaryRow& r2 = row_at(s, 100);
  const SummaryRow& r3 = row_at(s, 1000);
  const SummaryRow& r4 = row_at(s, 10000);
  double anchor_err = std::abs(r4.fq_mean - 8.875);
  bool decades_down = r2.mean_residual > r3.mean_residual && r3.mean_residual > r4.mean_residual;

  double band_lo = r3.rescaled_residual, band_hi = band_lo;
  for (const auto& row : s.rows) {
    if (row.n < 1000 || row.n > 10000) continue;
    band_lo = std::min(band_lo, row.rescaled_residual);
    band_hi = std::max(band_hi, row.rescaled_residual);
  }
  double band_ratio = band_hi / band_lo;
  double elapsed = seconds_since(t0);
  bool pass = anchor_err <= 0.5 && decades_down && band_ratio <= 3.0 && elapsed < 120.0;
  CHECK(report(2, "stabilized Q-iteration statistics", pass,
               fmt("anchor err %.3f, residuals %.3f/%.3f/%.4f, band x%.2f, %.1f s", anchor_err,
                   r2.mean_residual, r3.mean_residual, r4.mean_residual, band_ratio, elapsed)));
}

TEST_CASE("gate 3: horizon-tuned constant-stepsize bound") {
  auto t0 = Clock::now();
  NonexpansiveOperator op = gate_sgd();
  std::vector<double> x0 = unit_x0(10);
  bool pass = true;
  double min_margin = 1e300;
  std::string parts;
  for (std::size_t n0 : {std::size_t(100), std::size_t(1000), std::size_t(10000)}) {
    double alpha = 1.0 / (6.0 * std::pow(static_cast<double>(n0), 2.0 / 3.0));
    StepsizeSchedule sched = StepsizeSchedule::constant(alpha);
    NoiseModel noise = NoiseModel::iid(10, BaseDist::rademacher, 1.0);
    double kappa = kappa_bar_horizon(op, x0, sched, noise, n0);
    double rate = fixed_horizon_rate(n0, kappa, 1.0);

    ExperimentConfig cfg;
    cfg.name = "sgd-constant";
    cfg.scenario = SkmScenario{op, sched, noise, x0};
    cfg.n_steps = n0;
    cfg.stride = n0;
    cfg.replications = 200;
    cfg.master_seed = 101;
    Summary s = run_experiment(cfg);
    const SummaryRow& row = row_at(s, n0);

    bool holds = row.mean_residual - 3.0 * row.std_error <= rate;
    double margin = rate / row.mean_residual;
    min_margin = std::min(min_margin, margin);
    pass = pass && holds && margin >= 2.0;
    parts += fmt("%sn0=%zu x%.1f", parts.empty() ? "" : ", ", n0, margin);
  }
  double elapsed = seconds_since(t0);
  pass = pass && elapsed < 120.0;
  CHECK(report(3, "horizon-tuned constant-stepsize bound", pass,
               fmt("margins %s, %.1f s", parts.c_str(), elapsed)));
}

TEST_CASE("gate 4: power-stepsize bound holds across exponents") {
  auto t0 = Clock::now();
  NonexpansiveOperator op = gate_sgd();
  std::vector<double> x0 = unit_x0(10);
  NoiseModel noise = NoiseModel::iid(10, BaseDist::rademacher, 1.0);
  const std::size_t n = 10000;
  bool pass = true;
  std::string parts;
  for (double a : {0.55, 2.0 / 3.0, 0.8, 1.0}) {
    StepsizeSchedule sched = StepsizeSchedule::power(a);
    double kappa;
    if (a > 2.0 / 3.0) {
      kappa = kappa_bar_fixdist(1.0, sched, 1.0, 1.0, 100000);
    } else {
      kappa = kappa_bar_horizon(op, x0, sched, noise, n);
    }

    ExperimentConfig cfg;
    cfg.name = "sgd-power";
    cfg.scenario = SkmScenario{op, sched, noise, x0};
    cfg.n_steps = n;
    cfg.stride = n;
    cfg.replications = 200;
    cfg.master_seed = 404;
    cfg.bounds.push_back({"power", [kappa, a](std::size_t k) {
                            StepsizeSchedule s = StepsizeSchedule::power(a);
                            BoundParams p{kappa, 1.0, &s, VarianceSchedule::bounded(1.0)};
                            return bound_power(p, k);
                          }});
    Summary s = run_experiment(cfg);
    BoundComparison cmp = compare_to_bound(s, "power");
    pass = pass && cmp.violations == 0 && cmp.rows_checked > 0;
    parts += fmt("%sa=%.3g ratio %.3f", parts.empty() ? "" : ", ", a, cmp.max_ratio);
  }
  double elapsed = seconds_since(t0);
  pass = pass && elapsed < 300.0;
  CHECK(report(4, "power-stepsize bound holds across exponents", pass,
               fmt("%s, %.1f s", parts.c_str(), elapsed)));
}

TEST_CASE("gate 5: stepsize scalar inequalities over the exponent grid") {
  auto t0 = Clock::now();
  std::vector<CheckResult> results = verify_appendix_b(false);
  double elapsed = seconds_since(t0);
  bool pass = all_pass(results) && elapsed < 30.0;
  std::string fail_name;
  for (const auto& r : results) {
    if (!r.pass && fail_name.empty()) fail_name = r.name + ": " + r.detail;
  }
  CHECK(report(5, "stepsize scalar inequalities over the exponent grid", pass,
               pass ? fmt("%zu checks, %.1f s", results.size(), elapsed)
                    : fmt("first failure %s, %.1f s", fail_name.c_str(), elapsed)));
}

TEST_CASE("gate 6: special functions against independent oracles") {
  auto t0 = Clock::now();
  std::vector<CheckResult> results = verify_specfun(20260822, false);
  double elapsed = seconds_since(t0);
  bool pass = all_pass(results) && elapsed < 10.0;
  std::string fail_name;
  for (const auto& r : results) {
    if (!r.pass && fail_name.empty()) fail_name = r.name + ": " + r.detail;
  }
  CHECK(report(6, "special functions against independent oracles", pass,
               pass ? fmt("%zu checks, %.1f s", results.size(), elapsed)
                    : fmt("first failure %s, %.1f s", fail_name.c_str(), elapsed)));
}

TEST_CASE("gate 7: closed forms equal the numeric convolution route") {
  auto t0 = Clock::now();
  const std::size_t n = 10000;
  bool pass = true;
  double worst = 0.0;
  for (double a : {0.55, 2.0 / 3.0, 0.8, 1.0}) {
    StepsizeSchedule sched = StepsizeSchedule::power(a);
    BoundParams p{2.0, 1.0, &sched, VarianceSchedule::bounded(1.0)};
    PowerConstants pc = power_constants(a);
    std::function<double(double)> h;
    if (a == 1.0) {
      double om = *pc.omega;
      h = [om](double x) { return om * std::exp(-x / 2.0); };
    } else {
      double lam = *pc.lambda;
      double b = *pc.b;
      h = [lam, b, a](double x) { return std::pow(lam + (1.0 - a) * x, -b); };
    }
    double closed = bound_power(p, n);
    double numeric =
        bound_convolution(p, h, pc.gamma, n, ConvolutionTail::majorized_sqrt_alpha, true);
    double rel = std::abs(closed - numeric) / closed;
    worst = std::max(worst, rel);
    pass = pass && rel <= 1e-6;
  }
  double elapsed = seconds_since(t0);
  CHECK(report(7, "closed forms equal the numeric convolution route", pass,
               fmt("max rel diff %.2e, %.1f s", worst, elapsed)));
}

TEST_CASE("gate 8: noise-free iteration under the deterministic envelope") {
  auto t0 = Clock::now();
  NonexpansiveOperator op = make_planar_rotation(3.14159265358979323846 / 4.0, 10);
  std::vector<double> x0 = unit_x0(10);
  StepsizeSchedule sched = StepsizeSchedule::power(1.0);
  NoiseModel noise = NoiseModel::none(10);
  const std::size_t n = 10000;
  Trajectory t = run_skm(op, sched, noise, x0, n, n, 1);
  sched.reserve(n);
  double kappa = 2.0 * l2_norm(x0);
  bool under_envelope = true;
  bool monotone = true;
  for (std::size_t k = 1; k <= n; ++k) {
    if (t.residual[k] > kappa * sigma_fn(sched.tau_at(k)) * (1.0 + 1e-12) + 1e-12) {
      under_envelope = false;
    }
    if (t.residual[k] > t.residual[k - 1] + 1e-14) monotone = false;
  }
  double elapsed = seconds_since(t0);
  bool pass = under_envelope && monotone;
  CHECK(report(8, "noise-free iteration under the deterministic envelope", pass,
               fmt("envelope %s, monotone %s, final residual %.2e, %.1f s",
                   under_envelope ? "ok" : "broken", monotone ? "ok" : "broken",
                   t.residual[n], elapsed)));
}

TEST_CASE("gate 9: randomized-iterate squared-residual bound") {
  auto t0 = Clock::now();
  NonexpansiveOperator op = gate_sgd();
  std::vector<double> x0 = unit_x0(10);
  const std::size_t n0 = 10000;
  const double alpha = 1.0 / std::sqrt(static_cast<double>(n0) + 1.0);
  NoiseModel noise = NoiseModel::iid(10, BaseDist::gaussian, 1.0);
  const double R = l2_norm(x0);

  double mean = 0.0, m2 = 0.0;
  std::size_t count = 0;
  for (std::size_t rep = 0; rep < 200; ++rep) {
    StepsizeSchedule sched = StepsizeSchedule::constant(alpha);
    Trajectory t = run_skm(op, sched, noise, x0, n0, 1, derive_stream(909, rep));
    Rng draw(derive_stream(910, rep));
    for (int d = 0; d < 10; ++d) {
      auto [k, xhat] = sample_random_iterate(t, sched, n0, draw);
      (void)k;
      double r = op.residual(xhat);
      double sq = r * r;
      ++count;
      double delta = sq - mean;
      mean += delta / static_cast<double>(count);
      m2 += delta * (sq - mean);
    }
  }
  double se = std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count));

  StepsizeSchedule sched = StepsizeSchedule::constant(alpha);
  VarianceSchedule var = VarianceSchedule::bounded(1.0);
  double b = bound_euclidean(R, 1.0, sched, var, n0);
  double b_sq = b * b;
  bool holds = mean - 3.0 * se <= b_sq;
  double closed = euclidean_constant_rate(n0, R, 1.0, 1.0);
  bool closed_dominates = closed >= b * (1.0 - 1e-12);
  double elapsed = seconds_since(t0);
  bool pass = holds && closed_dominates && elapsed < 120.0;
  CHECK(report(9, "randomized-iterate squared-residual bound", pass,
               fmt("mean %.4f (se %.4f) vs %.4f, closed %.4f >= %.4f, %.1f s", mean, se, b_sq,
                   closed, b, elapsed)));
}

TEST_CASE("gate 10: anchored and live runs stay a constant apart") {
  auto t0 = Clock::now();
  Mdp m = Mdp::duff();
  QTable q0(4, 0.0);
  const std::size_t n = 1000;
  const std::uint64_t seed = 77;
  Stabilizer f = Stabilizer::max_entry();
  QTrajectory live = run_rvi_q(m, 1.0, f, q0, n, 1, seed);
  QTrajectory bench = benchmark_rbar_iteration(m, 1.0, q0, n, 1, seed);
  double r_bar = bench.r_bar;

  double c = 0.0;
  double worst = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    double al = std::pow(static_cast<double>(k) + 1.0, -1.0);
    c = (1.0 - al) * c + al * (r_bar - f(m, bench.at(k - 1).q));
    const QTable& ql = live.at(k).q;
    const QTable& qb = bench.at(k).q;
    for (std::size_t e = 0; e < 4; ++e) {
      worst = std::max(worst, std::abs((ql[e] - qb[e]) - c));
    }
  }
  double elapsed = seconds_since(t0);
  bool pass = worst <= 1e-9;
  CHECK(report(10, "anchored and live runs stay a constant apart", pass,
               fmt("max deviation %.2e, %.2f s", worst, elapsed)));
}
