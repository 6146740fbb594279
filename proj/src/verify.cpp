#include "skm/verify.hpp"

#include <cmath>
#include <sstream>

#include "skm/bounds.hpp"
#include "skm/mdp.hpp"
#include "skm/rng.hpp"
#include "skm/sequences.hpp"
#include "skm/special.hpp"

namespace skm {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Tolerant comparison for analytic inequalities lhs <= rhs evaluated in
/// floating point: only counts a violation beyond 1e-12 relative slack.
bool leq(double lhs, double rhs) {
  return lhs <= rhs + 1e-12 * std::max(1.0, std::abs(rhs));
}

struct Violation {
  bool seen = false;
  double a = 0.0;
  std::size_t n = 0;
  double lhs = 0.0, rhs = 0.0;

  void note(double a_, std::size_t n_, double lhs_, double rhs_) {
    if (seen) return;
    seen = true;
    a = a_;
    n = n_;
    lhs = lhs_;
    rhs = rhs_;
  }

  CheckResult result(const std::string& name, std::size_t points) const {
    if (!seen) {
      return {name, true, "0 violations over " + std::to_string(points) + " points"};
    }
    return {name, false,
            "first violation at a=" + fmt(a) + ", n=" + std::to_string(n) + ": " + fmt(lhs) +
                " > " + fmt(rhs)};
  }
};

}  // namespace

std::vector<CheckResult> verify_appendix_b(bool fast) {
  const std::size_t N = fast ? 10000 : 100000;
  Violation sandwich, envelope_a, xi_mono, envelope_1, tau_floor;
  std::size_t pts_sandwich = 0, pts_env_a = 0, pts_xi = 0, pts_env_1 = 0, pts_tau = 0;

  for (int k = 0; k <= 20; ++k) {
    double a = 0.5 + 0.025 * k;
    StepsizeSchedule s = StepsizeSchedule::power(a);
    s.reserve(N + 1);
    PowerConstants pc = power_constants(a);
    double tau1 = s.tau_at(1);
    double xi_prev = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
      double an = s.alpha(n);
      double an1 = s.alpha(n + 1);
      double d2 = s.delta_sq_at(n);
      double tn = s.tau_at(n);
      ++pts_sandwich;
      if (!(leq(0.5 * an, d2) && leq(d2, an1) && leq(an1, an))) {
        sandwich.note(a, n, 0.5 * an, d2);
      }
      double lhs = std::sqrt(an) / (1.0 - an);
      if (a < 1.0) {
        if (n >= 2) {
          ++pts_env_a;
          double rhs = std::pow(*pc.lambda + (1.0 - a) * tn, -*pc.b);
          if (!leq(lhs, rhs)) envelope_a.note(a, n, lhs, rhs);

          double xi = std::pow((1.0 - an) / std::sqrt(an), 2.0 * (1.0 - a) / a) -
                      (1.0 - a) * tn;
          if (n >= 3) {
            ++pts_xi;
            if (!leq(xi_prev, xi)) xi_mono.note(a, n, xi_prev, xi);
          }
          xi_prev = xi;
        }
        ++pts_tau;
        double floor = tau1 * std::pow(static_cast<double>(n), 1.0 - a);
        if (!leq(floor, tn)) tau_floor.note(a, n, floor, tn);
      } else {
        if (n >= 2) {
          ++pts_env_1;
          double rhs = *pc.omega * std::exp(-0.5 * tn);
          if (!leq(lhs, rhs)) envelope_1.note(a, n, lhs, rhs);
        }
        ++pts_tau;
        double floor = std::log(static_cast<double>(n) + 1.0) / (4.0 * std::log(2.0));
        if (!leq(floor, tn)) tau_floor.note(a, n, floor, tn);
      }
    }
  }

  return {
      sandwich.result("delta-squared sandwich alpha_n/2 <= delta_n^2 <= alpha_{n+1} <= alpha_n",
                      pts_sandwich),
      envelope_a.result("sqrt(alpha_n)/(1-alpha_n) <= (lambda + (1-a)tau_n)^{-b}, a < 1",
                        pts_env_a),
      xi_mono.result("xi_n nondecreasing from n = 2, a < 1", pts_xi),
      envelope_1.result("sqrt(alpha_n)/(1-alpha_n) <= omega exp(-tau_n/2), a = 1", pts_env_1),
      tau_floor.result("tau growth floor (power law for a < 1, log for a = 1)", pts_tau),
  };
}

std::vector<CheckResult> verify_specfun(std::uint64_t seed, bool fast) {
  std::vector<CheckResult> out;
  const std::size_t n_pairs = fast ? 25 : 100;
  const std::size_t n_dawson = fast ? 25 : 100;

  {
    Rng rng(seed);
    double worst = 0.0;
    double worst_b = 0.0, worst_z = 0.0;
    for (std::size_t i = 0; i < n_pairs; ++i) {
      double b = 0.5 + 9.5 * rng.uniform01();
      double z = 0.99 * rng.uniform01();
      double impl = hyp2f1_half(b, z);
      double ref = oracle::hyp2f1_series(b, z);
      double err = std::abs(impl - ref) / std::abs(ref);
      if (err > worst) {
        worst = err;
        worst_b = b;
        worst_z = z;
      }
    }
    bool ok = worst <= 1e-10;
    out.push_back({"hypergeometric kernel vs series oracle (rel err <= 1e-10)", ok,
                   "worst rel err " + fmt(worst) + " at b=" + fmt(worst_b) +
                       ", z=" + fmt(worst_z)});
  }

  {
    double worst = 0.0, worst_x = 0.0;
    for (std::size_t i = 0; i < n_dawson; ++i) {
      double x = 20.0 * static_cast<double>(i) / static_cast<double>(n_dawson - 1);
      double impl = dawson(x);
      double ref = oracle::dawson_quadrature(x);
      double err = std::abs(impl - ref) / std::max(1.0, std::abs(ref));
      if (err > worst) {
        worst = err;
        worst_x = x;
      }
    }
    bool ok = worst <= 1e-12;
    out.push_back({"dawson vs quadrature oracle (err <= 1e-12)", ok,
                   "worst err " + fmt(worst) + " at x=" + fmt(worst_x)});
  }

  {
    // b = 1 reduces the kernel to atanh(sqrt(z))/sqrt(z).
    double worst = 0.0, worst_z = 0.0;
    for (int i = 1; i <= 19; ++i) {
      double z = 0.05 * i;
      double impl = hyp2f1_half(1.0, z);
      double ref = std::atanh(std::sqrt(z)) / std::sqrt(z);
      double err = std::abs(impl - ref) / std::abs(ref);
      if (err > worst) {
        worst = err;
        worst_z = z;
      }
    }
    bool ok = worst <= 1e-12 && hyp2f1_half(1.0, 0.0) == 1.0;
    out.push_back({"b = 1 logarithmic closed form (rel err <= 1e-12)", ok,
                   "worst rel err " + fmt(worst) + " at z=" + fmt(worst_z)});
  }

  return out;
}

std::vector<CheckResult> verify_coupling(bool fast) {
  std::vector<CheckResult> out;
  const std::size_t n = fast ? 300 : 1000;
  const std::uint64_t seed = 12345;
  Mdp m = Mdp::duff();
  QTable q0(m.n_states * m.n_actions, 0.0);
  Stabilizer f = Stabilizer::max_entry();
  QTrajectory live = run_rvi_q(m, 1.0, f, q0, n, 1, seed);
  QTrajectory bench = benchmark_rbar_iteration(m, 1.0, q0, n, 1, seed);

  double worst_span = 0.0;
  std::size_t worst_span_n = 0;
  double worst_rec = 0.0;
  std::size_t worst_rec_n = 0;
  double c_prev = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const QTable& ql = live.at(k).q;
    const QTable& qb = bench.at(k).q;
    double lo = ql[0] - qb[0], hi = lo;
    double mean = 0.0;
    for (std::size_t j = 0; j < ql.size(); ++j) {
      double d = ql[j] - qb[j];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      mean += d / static_cast<double>(ql.size());
    }
    if (hi - lo > worst_span) {
      worst_span = hi - lo;
      worst_span_n = k;
    }
    // c_k = (1 - alpha_k) c_{k-1} + alpha_k (r_bar - f(Q^anchor_{k-1})).
    double ak = std::pow(static_cast<double>(k) + 1.0, -1.0);
    double fb = f(m, bench.at(k - 1).q);
    double c_pred = (1.0 - ak) * c_prev + ak * (bench.r_bar - fb);
    double rec_err = std::abs(mean - c_pred);
    if (rec_err > worst_rec) {
      worst_rec = rec_err;
      worst_rec_n = k;
    }
    c_prev = mean;
  }

  out.push_back({"difference of coupled runs is a multiple of the all-ones table",
                 worst_span <= 1e-9,
                 "max span " + fmt(worst_span) + " at n=" + std::to_string(worst_span_n)});
  out.push_back({"offset follows its scalar recursion", worst_rec <= 1e-9,
                 "max recursion error " + fmt(worst_rec) + " at n=" +
                     std::to_string(worst_rec_n)});
  return out;
}

std::vector<CheckResult> verify_bounds(bool fast) {
  std::vector<CheckResult> out;

  {
    // The closed power-stepsize forms must agree with the numeric
    // convolution route they were derived from.
    const double as[] = {0.55, 2.0 / 3.0, 0.8, 1.0};
    std::vector<std::size_t> ns = {10, 100, 1000};
    if (!fast) ns.push_back(10000);
    double worst = 0.0, worst_a = 0.0;
    std::size_t worst_n = 0;
    for (double a : as) {
      StepsizeSchedule s = StepsizeSchedule::power(a);
      PowerConstants pc = power_constants(a);
      BoundParams p;
      p.kappa_bar = 2.0;
      p.mu = 1.0;
      p.schedule = &s;
      p.variance = VarianceSchedule::bounded(1.0);
      double sig = 1.0;
      std::function<double(double)> h;
      if (a < 1.0) {
        double lam = *pc.lambda, b = *pc.b;
        h = [sig, lam, a, b](double x) { return sig * std::pow(lam + (1.0 - a) * x, -b); };
      } else {
        double om = *pc.omega;
        h = [sig, om](double x) { return sig * om * std::exp(-0.5 * x); };
      }
      for (std::size_t n : ns) {
        double direct = bound_power(p, n);
        double conv =
            bound_convolution(p, h, pc.gamma, n, ConvolutionTail::majorized_sqrt_alpha);
        double err = std::abs(direct - conv) / direct;
        if (err > worst) {
          worst = err;
          worst_a = a;
          worst_n = n;
        }
      }
    }
    out.push_back({"power bound equals convolution route (rel err <= 1e-6)", worst <= 1e-6,
                   "worst rel err " + fmt(worst) + " at a=" + fmt(worst_a) +
                       ", n=" + std::to_string(worst_n)});
  }

  {
    double v = fixed_horizon_rate(1000000, 1.0, 1.0);
    bool ok = std::abs(v - 0.4) <= 1e-12;
    out.push_back(
        {"horizon-tuned constant stepsize value at n0=1e6", ok, "value " + fmt(v)});
  }

  {
    StepsizeSchedule s = StepsizeSchedule::power(0.8);
    BoundParams p;
    p.kappa_bar = 1.0;
    p.mu = 1.0;
    p.schedule = &s;
    p.variance = VarianceSchedule::bounded(1.0);
    std::size_t n = fast ? 100000 : 1000000;
    double full = bound_power(p, n);
    double asym = asymptote_power(p, n);
    double ratio = full / asym;
    bool ok = ratio >= 0.5 && ratio <= 2.0;
    out.push_back({"asymptote tracks the full bound at large n (ratio in [1/2, 2])", ok,
                   "ratio " + fmt(ratio) + " at n=" + std::to_string(n)});
  }

  {
    std::size_t n0 = 10000;
    double R = 1.0, mu = 1.0, sig = 1.0;
    double alpha = 1.0 / std::sqrt(static_cast<double>(n0) + 1.0);
    StepsizeSchedule s = StepsizeSchedule::constant(alpha);
    double direct = bound_euclidean(R, mu, s, VarianceSchedule::bounded(sig), n0);
    double special = euclidean_constant_rate(n0, R, mu, sig);
    bool ok = special >= direct * (1.0 - 1e-12);
    out.push_back({"randomized-iterate specialization majorizes the direct value", ok,
                   "specialized " + fmt(special) + " vs direct " + fmt(direct)});
  }

  return out;
}

bool all_pass(const std::vector<CheckResult>& results) {
  for (const auto& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

}  // namespace skm
