#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "skm/bounds.hpp"
#include "skm/sequences.hpp"

using namespace skm;

namespace {

constexpr double kPi = 3.14159265358979323846;

BoundParams params(StepsizeSchedule& s, double kappa_bar, double mu, double sigma) {
  BoundParams p;
  p.kappa_bar = kappa_bar;
  p.mu = mu;
  p.schedule = &s;
  p.variance = VarianceSchedule::bounded(sigma);
  return p;
}

// Noise profile h used by the closed-form power bounds.
std::function<double(double)> power_profile(double a, double sigma) {
  PowerConstants pc = power_constants(a);
  if (a == 1.0) {
    double om = *pc.omega;
    return [sigma, om](double x) { return sigma * om * std::exp(-x / 2.0); };
  }
  double lam = *pc.lambda;
  double b = *pc.b;
  return [sigma, lam, b, a](double x) { return sigma * std::pow(lam + (1.0 - a) * x, -b); };
}

}  // namespace

TEST_CASE("general bound at n = 1 reduces to kappa sigma(tau_1) + 4 mu nu_1") {
  StepsizeSchedule s = StepsizeSchedule::power(0.5);
  BoundParams p = params(s, 3.0, 2.0, 1.5);
  double a1 = s.alpha(1);
  double expect = 3.0 * sigma_fn(a1 * (1.0 - a1)) + 4.0 * 2.0 * 1.5 * a1;
  CHECK(bound_general(p, 1) == doctest::Approx(expect).epsilon(1e-14));
  CHECK_THROWS_AS(bound_general(p, 0), std::invalid_argument);
}

TEST_CASE("closed-form constant-stepsize bound dominates the exact sum") {
  for (double alpha : {0.1, 0.5}) {
    StepsizeSchedule s = StepsizeSchedule::constant(alpha);
    BoundParams p = params(s, 2.0, 1.0, 1.0);
    for (std::size_t n : {std::size_t(1), std::size_t(2), std::size_t(5), std::size_t(10),
                          std::size_t(100), std::size_t(1000)}) {
      double exact = bound_general(p, n);
      double closed = bound_constant(2.0, 1.0, 1.0, alpha, n);
      CHECK(exact <= closed * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("closed-form power bound dominates the exact sum on every branch") {
  for (double a : {0.55, 2.0 / 3.0, 0.8, 1.0}) {
    StepsizeSchedule s = StepsizeSchedule::power(a);
    BoundParams p = params(s, 2.0, 1.0, 1.0);
    for (std::size_t n : {std::size_t(1), std::size_t(2), std::size_t(10), std::size_t(100),
                          std::size_t(2000)}) {
      double exact = bound_general(p, n);
      double closed = bound_power(p, n);
      CHECK(exact <= closed * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("closed-form power bound equals the numeric convolution route") {
  for (double a : {0.55, 2.0 / 3.0, 0.8, 1.0}) {
    StepsizeSchedule s = StepsizeSchedule::power(a);
    BoundParams p = params(s, 2.0, 1.0, 1.0);
    PowerConstants pc = power_constants(a);
    auto h = power_profile(a, 1.0);
    for (std::size_t n : {std::size_t(10), std::size_t(1000)}) {
      double closed = bound_power(p, n);
      double numeric =
          bound_convolution(p, h, pc.gamma, n, ConvolutionTail::majorized_sqrt_alpha, true);
      CHECK(closed == doctest::Approx(numeric).epsilon(1e-6));
    }
  }
}

TEST_CASE("convolution validation reports the first offending index") {
  StepsizeSchedule s = StepsizeSchedule::power(0.8);
  BoundParams p = params(s, 1.0, 1.0, 1.0);
  // A profile far below the noise level must be rejected, naming k.
  auto tiny = [](double) { return 1e-9; };
  try {
    bound_convolution(p, tiny, 2.0, 50);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("fails first at k=2") != std::string::npos);
  }

  // gamma = 1 understates the stepsize ratio once alpha_k (1-alpha_k) decays.
  auto h = power_profile(0.8, 1.0);
  CHECK_THROWS_AS(bound_convolution(p, h, 1.0, 50), std::invalid_argument);
  // With validation off the same call goes through.
  CHECK(bound_convolution(p, h, 1.0, 50, ConvolutionTail::exact_nu, false) > 0.0);
}

TEST_CASE("exact trailing terms never exceed the majorized form") {
  for (double a : {0.55, 0.8, 1.0}) {
    StepsizeSchedule s = StepsizeSchedule::power(a);
    BoundParams p = params(s, 1.0, 1.0, 1.0);
    PowerConstants pc = power_constants(a);
    auto h = power_profile(a, 1.0);
    for (std::size_t n : {std::size_t(5), std::size_t(200)}) {
      double exact = bound_convolution(p, h, pc.gamma, n, ConvolutionTail::exact_nu);
      double major = bound_convolution(p, h, pc.gamma, n, ConvolutionTail::majorized_sqrt_alpha);
      CHECK(exact <= major * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("horizon-tuned constant rate has the advertised closed form") {
  CHECK(fixed_horizon_rate(1000000, 1.0, 1.0) == doctest::Approx(0.4).epsilon(1e-14));
  // It dominates the full constant bound it compresses.
  std::size_t n0 = 10000;
  double alpha = 1.0 / (6.0 * std::pow(double(n0), 2.0 / 3.0));
  CHECK(bound_constant(1.0, 1.0, 1.0, alpha, n0) <=
        fixed_horizon_rate(n0, 1.0, 1.0) * (1.0 + 1e-12));
}

TEST_CASE("large-n asymptote tracks the full bound") {
  for (double a : {0.55, 2.0 / 3.0, 0.8, 1.0}) {
    StepsizeSchedule s = StepsizeSchedule::power(a);
    BoundParams p = params(s, 1.0, 1.0, 1.0);
    double full = bound_power(p, 1000000);
    double asym = asymptote_power(p, 1000000);
    CHECK(full / asym > 0.5);
    CHECK(full / asym < 2.0);
  }
  StepsizeSchedule s1 = StepsizeSchedule::power(1.0);
  BoundParams p1 = params(s1, 1.0, 1.0, 1.0);
  CHECK_THROWS_AS(asymptote_power(p1, 1), std::invalid_argument);
}

TEST_CASE("displacement constant from the stepsize-noise series") {
  StepsizeSchedule s = StepsizeSchedule::power(0.8);
  double k3 = kappa_bar_fixdist(1.0, s, 1.0, 1.0, 1000);
  double k4 = kappa_bar_fixdist(1.0, s, 1.0, 1.0, 10000);
  double k5 = kappa_bar_fixdist(1.0, s, 1.0, 1.0, 100000);
  CHECK(k3 == doctest::Approx(5.6870795569009314).epsilon(1e-12));
  CHECK(k4 == doctest::Approx(5.5659561231804897).epsilon(1e-12));
  CHECK(k5 == doctest::Approx(5.4859515738969469).epsilon(1e-12));
  // Larger truncation tightens; everything stays above the series limit.
  CHECK(k4 < k3);
  CHECK(k5 < k4);
  CHECK(k5 > 2.0 + 3.2018211849790843 - 1e-9);

  StepsizeSchedule flat = StepsizeSchedule::constant(0.1);
  CHECK_THROWS_AS(kappa_bar_fixdist(1.0, flat, 1.0, 1.0, 100), std::invalid_argument);
  StepsizeSchedule border = StepsizeSchedule::power(2.0 / 3.0);
  CHECK_THROWS_AS(kappa_bar_fixdist(1.0, border, 1.0, 1.0, 100), std::invalid_argument);
  CHECK_THROWS_AS(kappa_bar_fixdist(1.0, s, 1.0, 1.0, 1), std::invalid_argument);

  CHECK(kappa_bar_range(2.5) == 2.5);
  CHECK_THROWS_AS(kappa_bar_range(-1.0), std::invalid_argument);
}

TEST_CASE("randomized-iterate bound and its closed-form rates") {
  // Constant alpha = 1/sqrt(n0+1): the exact expression is available.
  for (std::size_t n0 : {std::size_t(100), std::size_t(10000), std::size_t(1000000)}) {
    double alpha = 1.0 / std::sqrt(double(n0) + 1.0);
    StepsizeSchedule s = StepsizeSchedule::constant(alpha);
    VarianceSchedule v = VarianceSchedule::bounded(1.0);
    double exact = bound_euclidean(1.0, 1.0, s, v, n0);
    double manual = std::sqrt((1.0 + alpha * alpha * double(n0)) /
                              (alpha * (1.0 - alpha) * double(n0)));
    CHECK(exact == doctest::Approx(manual).epsilon(1e-12));
    CHECK(exact <= euclidean_constant_rate(n0, 1.0, 1.0, 1.0) * (1.0 + 1e-12));
  }

  // Power-schedule rates dominate the exact bound on all three branches.
  for (double a : {0.5, 0.75, 1.0}) {
    StepsizeSchedule s = StepsizeSchedule::power(a);
    VarianceSchedule v = VarianceSchedule::bounded(1.0);
    for (std::size_t n : {std::size_t(10), std::size_t(10000)}) {
      double exact = bound_euclidean(2.0, 1.0, s, v, n);
      double rate = euclidean_power_rate(a, n, 2.0, 1.0, 1.0);
      CHECK(exact <= rate * (1.0 + 1e-12));
    }
  }

  CHECK_THROWS_AS(euclidean_power_rate(0.4, 10, 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(euclidean_power_rate(1.1, 10, 1.0, 1.0, 1.0), std::invalid_argument);
  StepsizeSchedule s = StepsizeSchedule::power(0.5);
  VarianceSchedule v = VarianceSchedule::bounded(1.0);
  CHECK_THROWS_AS(bound_euclidean(-1.0, 1.0, s, v, 10), std::invalid_argument);
  CHECK_THROWS_AS(bound_euclidean(1.0, 1.0, s, v, 0), std::invalid_argument);
}

TEST_CASE("failure-probability inflation and parameter validation") {
  CHECK(high_prob_bound(0.5, 0.1) == doctest::Approx(5.0));
  CHECK(high_prob_bound(0.5, 1.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(high_prob_bound(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(high_prob_bound(0.5, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(high_prob_bound(-0.1, 0.5), std::invalid_argument);

  StepsizeSchedule flat = StepsizeSchedule::constant(0.3);
  BoundParams pc = params(flat, 1.0, 1.0, 1.0);
  CHECK_THROWS_AS(bound_power(pc, 10), std::invalid_argument);
  CHECK_THROWS_AS(asymptote_power(pc, 10), std::invalid_argument);

  StepsizeSchedule pw = StepsizeSchedule::power(0.8);
  BoundParams seqvar = params(pw, 1.0, 1.0, 1.0);
  seqvar.variance = VarianceSchedule::sequence([](std::size_t n) { return 1.0 / double(n); });
  CHECK_THROWS_AS(bound_power(seqvar, 10), std::invalid_argument);
  CHECK(bound_general(seqvar, 10) > 0.0);  // general route accepts sequences

  BoundParams bad = params(pw, 1.0, 0.5, 1.0);  // mu < 1
  CHECK_THROWS_AS(bound_general(bad, 10), std::invalid_argument);
  BoundParams null_sched;
  CHECK_THROWS_AS(bound_general(null_sched, 10), std::invalid_argument);
}
