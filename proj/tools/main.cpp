#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "skm/bounds.hpp"
#include "skm/harness.hpp"
#include "skm/mdp.hpp"
#include "skm/verify.hpp"

namespace {

using namespace skm;

constexpr double kPi = 3.14159265358979323846264338327950288;

/// Accepts the exact tokens "2/3" and "1" (so the closed-form dispatch
/// branches are reachable) alongside plain decimals.
double parse_exponent(const std::string& tok) {
  if (tok == "2/3") return 2.0 / 3.0;
  if (tok == "1") return 1.0;
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') {
    throw std::invalid_argument("--a: cannot parse '" + tok + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& tok, const char* flag) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || !(v >= 1.0) || v != std::floor(v) || v > 1e15) {
    throw std::invalid_argument(std::string(flag) + ": '" + tok +
                                "' is not a positive integer");
  }
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> parse_n_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t pos = s.find(',', start);
    std::string tok =
        pos == std::string::npos ? s.substr(start) : s.substr(start, pos - start);
    if (!tok.empty()) out.push_back(parse_count(tok, "--n-list"));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (out.empty()) throw std::invalid_argument("--n-list: no values");
  return out;
}

NoiseModel parse_noise(const std::string& spec, std::size_t dim) {
  if (spec == "none") return NoiseModel::none(dim);
  std::size_t pos = spec.find(':');
  std::string kind = spec.substr(0, pos);
  double scale = 1.0;
  if (pos != std::string::npos) {
    char* end = nullptr;
    std::string num = spec.substr(pos + 1);
    scale = std::strtod(num.c_str(), &end);
    if (end == num.c_str() || *end != '\0' || !(scale >= 0.0)) {
      throw std::invalid_argument("--noise: bad scale in '" + spec + "'");
    }
  }
  BaseDist base;
  if (kind == "gaussian") {
    base = BaseDist::gaussian;
  } else if (kind == "rademacher") {
    base = BaseDist::rademacher;
  } else if (kind == "uniform") {
    base = BaseDist::uniform;
  } else {
    throw std::invalid_argument("--noise: unknown kind '" + kind +
                                "' (use none | gaussian:s | rademacher:s | uniform:s)");
  }
  return NoiseModel::iid(dim, base, scale);
}

NonexpansiveOperator make_cli_operator(const std::string& name, std::size_t dim) {
  if (name == "sgd-quadratic") {
    std::size_t d = dim ? dim : 10;
    std::vector<double> eigs(d);
    for (std::size_t i = 0; i < d; ++i) eigs[i] = static_cast<double>(i + 1);
    return make_sgd_quadratic(std::move(eigs), static_cast<double>(d));
  }
  if (name == "rotation") {
    std::size_t d = dim ? dim : 10;
    return make_planar_rotation(kPi / 4.0, d);
  }
  if (name == "box") {
    std::size_t d = dim ? dim : 4;
    return make_box_affine(d, 1.0, kPi / 6.0, std::vector<double>(d, 0.25));
  }
  throw std::invalid_argument("--operator: unknown '" + name +
                              "' (use sgd-quadratic | rotation | box)");
}

std::vector<double> default_x0(const NonexpansiveOperator& op) {
  if (op.name() == "box-affine") return std::vector<double>(op.dim(), 0.0);
  double c = 1.0 / std::sqrt(static_cast<double>(op.dim()));
  return std::vector<double>(op.dim(), c);
}

std::size_t parse_index(const std::string& tok) {
  char* end = nullptr;
  unsigned long v = std::strtoul(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0') {
    throw std::invalid_argument("--f: '" + tok + "' is not a 0-based index");
  }
  return static_cast<std::size_t>(v);
}

Stabilizer parse_stabilizer(const std::string& spec) {
  if (spec == "max") return Stabilizer::max_entry();
  if (spec == "mean") return Stabilizer::mean_entry();
  if (spec.rfind("component:", 0) == 0) {
    std::string rest = spec.substr(10);
    std::size_t comma = rest.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("--f: component needs 'component:i,u'");
    }
    return Stabilizer::component(parse_index(rest.substr(0, comma)),
                                 parse_index(rest.substr(comma + 1)));
  }
  throw std::invalid_argument("--f: unknown stabilizer '" + spec +
                              "' (use max | mean | component:i,u)");
}

void write_summary(const Summary& s, const std::string& out_path) {
  if (out_path.empty()) {
    emit_csv(s, std::cout);
  } else {
    emit_csv_file(s, out_path);
  }
}

struct SimulateArgs {
  std::string op_name = "sgd-quadratic";
  std::size_t dim = 0;
  std::string noise = "gaussian:1.0";
  std::string a_tok;
  std::string alpha_tok;
  std::size_t n = 0;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  std::size_t stride = 0;
  double kappa = -1.0;
  std::string out;
};

StepsizeSchedule schedule_from_tokens(const std::string& a_tok, const std::string& alpha_tok,
                                      std::size_t n_for_auto) {
  if (!a_tok.empty() && !alpha_tok.empty()) {
    throw std::invalid_argument("give either --a or --alpha, not both");
  }
  if (!a_tok.empty()) return StepsizeSchedule::power(parse_exponent(a_tok));
  if (alpha_tok.empty()) throw std::invalid_argument("one of --a / --alpha is required");
  if (alpha_tok == "auto") {
    double al = 1.0 / (6.0 * std::pow(static_cast<double>(n_for_auto), 2.0 / 3.0));
    return StepsizeSchedule::constant(al);
  }
  char* end = nullptr;
  double al = std::strtod(alpha_tok.c_str(), &end);
  if (end == alpha_tok.c_str() || *end != '\0') {
    throw std::invalid_argument("--alpha: cannot parse '" + alpha_tok + "'");
  }
  return StepsizeSchedule::constant(al);
}

int run_simulate(const SimulateArgs& args) {
  NonexpansiveOperator op = make_cli_operator(args.op_name, args.dim);
  NoiseModel noise = parse_noise(args.noise, op.dim());
  StepsizeSchedule schedule = schedule_from_tokens(args.a_tok, args.alpha_tok, args.n);

  ExperimentConfig cfg;
  cfg.name = op.name();
  cfg.n_steps = args.n;
  cfg.stride = args.stride ? args.stride : std::max<std::size_t>(1, args.n / 20);
  cfg.replications = args.reps;
  cfg.master_seed = args.seed;

  if (args.kappa >= 0.0) {
    if (noise.kind() != NoiseKind::none && noise.kind() != NoiseKind::iid) {
      throw std::invalid_argument("--kappa bound columns need iid or no noise");
    }
    double sig = noise.is_none() ? 0.0 : std::sqrt(noise.variance_at(1));
    double kap = args.kappa;
    double mu = op.norm().mu(op.dim());
    if (schedule.is_power()) {
      double a = schedule.exponent();
      cfg.bounds.push_back(
          {"power", [kap, mu, sig, a](std::size_t n) {
             StepsizeSchedule s = StepsizeSchedule::power(a);
             BoundParams p{kap, mu, &s, VarianceSchedule::bounded(sig)};
             return bound_power(p, n);
           }});
    } else {
      double al = schedule.constant_value();
      cfg.bounds.push_back({"constant", [kap, mu, sig, al](std::size_t n) {
                              return bound_constant(kap, mu, sig, al, n);
                            }});
    }
  }

  cfg.scenario = SkmScenario{op, schedule, noise, default_x0(op)};
  Summary s = run_experiment(cfg);
  write_summary(s, args.out);
  return 0;
}

struct QlearnArgs {
  std::string mdp = "duff";
  std::string a_tok;
  std::string f = "max";
  std::size_t n = 0;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  std::size_t stride = 0;
  std::string out;
};

int run_qlearn(const QlearnArgs& args) {
  Mdp m = args.mdp == "duff" ? Mdp::duff() : Mdp::load_file(args.mdp);
  double a = parse_exponent(args.a_tok);
  RviQScenario sc;
  sc.mdp = std::move(m);
  sc.a = a;
  sc.f = parse_stabilizer(args.f);
  sc.q0.assign(sc.mdp.n_states * sc.mdp.n_actions, 0.0);

  ExperimentConfig cfg;
  cfg.name = args.mdp == "duff" ? "duff" : "mdp";
  cfg.scenario = std::move(sc);
  cfg.n_steps = args.n;
  cfg.stride = args.stride ? args.stride : std::max<std::size_t>(1, args.n / 20);
  cfg.replications = args.reps;
  cfg.master_seed = args.seed;
  Summary s = run_experiment(cfg);
  write_summary(s, args.out);
  return 0;
}

struct BoundArgs {
  std::string family;
  double kappa = 1.0;
  double mu = 1.0;
  double sigma = 1.0;
  std::string a_tok;
  std::string alpha_tok;
  std::string n_list;
};

int run_bound(const BoundArgs& args) {
  std::vector<std::size_t> ns = parse_n_list(args.n_list);
  std::printf("n,bound\n");
  for (std::size_t n : ns) {
    double v = 0.0;
    if (args.family == "general") {
      StepsizeSchedule s = schedule_from_tokens(args.a_tok, args.alpha_tok, n);
      BoundParams p{args.kappa, args.mu, &s, VarianceSchedule::bounded(args.sigma)};
      v = bound_general(p, n);
    } else if (args.family == "constant") {
      if (args.alpha_tok == "auto") {
        v = fixed_horizon_rate(n, args.kappa, args.mu * args.sigma);
      } else {
        StepsizeSchedule s = schedule_from_tokens("", args.alpha_tok, n);
        v = bound_constant(args.kappa, args.mu, args.sigma, s.constant_value(), n);
      }
    } else if (args.family == "power" || args.family == "asymptote") {
      if (args.a_tok.empty()) throw std::invalid_argument("--family power needs --a");
      StepsizeSchedule s = StepsizeSchedule::power(parse_exponent(args.a_tok));
      BoundParams p{args.kappa, args.mu, &s, VarianceSchedule::bounded(args.sigma)};
      v = args.family == "power" ? bound_power(p, n) : asymptote_power(p, n);
    } else if (args.family == "euclidean") {
      // --kappa doubles as the initial distance R here.
      if (!args.a_tok.empty()) {
        v = euclidean_power_rate(parse_exponent(args.a_tok), n, args.kappa, args.mu,
                                 args.sigma);
      } else if (args.alpha_tok == "auto") {
        v = euclidean_constant_rate(n, args.kappa, args.mu, args.sigma);
      } else {
        StepsizeSchedule s = schedule_from_tokens("", args.alpha_tok, n);
        v = bound_euclidean(args.kappa, args.mu, s, VarianceSchedule::bounded(args.sigma), n);
      }
    } else {
      throw std::invalid_argument("--family: unknown '" + args.family + "'");
    }
    std::printf("%zu,%.17g\n", n, v);
  }
  return 0;
}

int run_verify(const std::string& suite, bool fast, std::uint64_t seed) {
  std::vector<CheckResult> results;
  if (suite == "appendixB") {
    results = verify_appendix_b(fast);
  } else if (suite == "specfun") {
    results = verify_specfun(seed, fast);
  } else if (suite == "coupling") {
    results = verify_coupling(fast);
  } else if (suite == "bounds") {
    results = verify_bounds(fast);
  } else {
    throw std::invalid_argument("--suite: unknown '" + suite +
                                "' (use appendixB | specfun | coupling | bounds)");
  }
  for (const auto& r : results) {
    std::printf("%s  %s (%s)\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
  }
  return all_pass(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic fixed-point iteration toolkit: simulation, error bounds, "
               "average-reward Q-learning, and verification suites"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* c_sim = app.add_subcommand("simulate", "Run a seeded operator-iteration experiment");
  c_sim->add_option("--operator", sim.op_name, "sgd-quadratic | rotation | box");
  c_sim->add_option("--dim", sim.dim, "Override the operator dimension");
  c_sim->add_option("--noise", sim.noise, "none | gaussian:s | rademacher:s | uniform:s");
  c_sim->add_option("--a", sim.a_tok, "Power stepsize exponent (accepts 2/3 and 1)");
  c_sim->add_option("--alpha", sim.alpha_tok, "Constant stepsize, or 'auto'");
  c_sim->add_option("--n", sim.n, "Number of steps")->required();
  c_sim->add_option("--reps", sim.reps, "Replications");
  c_sim->add_option("--seed", sim.seed, "Master seed");
  c_sim->add_option("--stride", sim.stride, "Row spacing (default n/20)");
  c_sim->add_option("--kappa", sim.kappa, "Displacement constant; adds a bound column");
  c_sim->add_option("--out", sim.out, "Output CSV path (default stdout)");

  QlearnArgs ql;
  CLI::App* c_ql = app.add_subcommand("qlearn", "Run the stabilized Q-iteration experiment");
  c_ql->add_option("--mdp", ql.mdp, "'duff' or a model file path");
  c_ql->add_option("--a", ql.a_tok, "Stepsize exponent in (1/2, 1]")->required();
  c_ql->add_option("--f", ql.f, "max | mean | component:i,u");
  c_ql->add_option("--n", ql.n, "Number of steps")->required();
  c_ql->add_option("--reps", ql.reps, "Replications");
  c_ql->add_option("--seed", ql.seed, "Master seed");
  c_ql->add_option("--stride", ql.stride, "Row spacing (default n/20)");
  c_ql->add_option("--out", ql.out, "Output CSV path (default stdout)");

  BoundArgs bd;
  CLI::App* c_bd = app.add_subcommand("bound", "Print n,bound rows for a bound family");
  c_bd->add_option("--family", bd.family, "general | constant | power | asymptote | euclidean")
      ->required();
  c_bd->add_option("--kappa", bd.kappa, "Displacement constant (R for euclidean)");
  c_bd->add_option("--mu", bd.mu, "Norm equivalence factor");
  c_bd->add_option("--sigma", bd.sigma, "Noise scale");
  c_bd->add_option("--a", bd.a_tok, "Power stepsize exponent");
  c_bd->add_option("--alpha", bd.alpha_tok, "Constant stepsize, or 'auto'");
  c_bd->add_option("--n-list", bd.n_list, "Comma-separated step counts")->required();

  std::string suite;
  bool fast = false;
  std::uint64_t vseed = 20260822;
  CLI::App* c_vf = app.add_subcommand("verify", "Run a property suite");
  c_vf->add_option("--suite", suite, "appendixB | specfun | coupling | bounds")->required();
  c_vf->add_flag("--fast", fast, "Smaller sweeps");
  c_vf->add_option("--seed", vseed, "Seed for randomized checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_sim->parsed()) return run_simulate(sim);
    if (c_ql->parsed()) return run_qlearn(ql);
    if (c_bd->parsed()) return run_bound(bd);
    return run_verify(suite, fast, vseed);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
