#include "skm/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "skm/rng.hpp"

namespace skm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t harness_threads() {
  const char* env = std::getenv("SKM_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  unsigned long v = std::strtoul(env, &end, 10);
  if (end == env || *end != '\0' || v == 0) {
    throw std::invalid_argument("SKM_THREADS must be a positive integer, got '" +
                                std::string(env) + "'");
  }
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> checkpoint_grid(std::size_t n_steps, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("ExperimentConfig: stride must be >= 1");
  std::vector<std::size_t> grid;
  for (std::size_t n = stride; n < n_steps; n += stride) grid.push_back(n);
  grid.push_back(n_steps);
  return grid;
}

struct RepCurve {
  std::vector<double> residual;
  std::vector<double> fq;  // empty for operator scenarios
};

RepCurve run_skm_rep(const SkmScenario& sc, const std::vector<std::size_t>& grid,
                     std::size_t n_steps, std::uint64_t seed) {
  StepsizeSchedule schedule = sc.schedule;  // private cache per replication
  Trajectory t = run_skm(sc.op, schedule, sc.noise, sc.x0, n_steps, n_steps, seed);
  RepCurve out;
  out.residual.reserve(grid.size());
  for (std::size_t n : grid) out.residual.push_back(t.residual[n]);
  return out;
}

RepCurve run_rvi_rep(const RviQScenario& sc, const std::vector<std::size_t>& grid,
                     std::size_t n_steps, std::size_t stride, std::uint64_t seed) {
  QTrajectory t = run_rvi_q(sc.mdp, sc.a, sc.f, sc.q0, n_steps, stride, seed);
  RepCurve out;
  out.residual.reserve(grid.size());
  out.fq.reserve(grid.size());
  for (std::size_t n : grid) {
    const QCheckpoint& c = t.at(n);
    out.residual.push_back(c.residual);
    out.fq.push_back(c.f_value);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, const char* what) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw std::invalid_argument(std::string("load_csv: bad ") + what + " value '" + s + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
  char* end = nullptr;
  unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') {
    throw std::invalid_argument(std::string("load_csv: bad ") + what + " value '" + s + "'");
  }
  return v;
}

}  // namespace

double rescale_factor(const ExperimentConfig& cfg, std::size_t n) {
  if (std::holds_alternative<std::monostate>(cfg.scenario)) {
    throw std::invalid_argument("rescale_factor: config has no scenario");
  }
  if (n == 0) return kNaN;
  double dn = static_cast<double>(n);
  if (std::holds_alternative<RviQScenario>(cfg.scenario)) {
    StepsizeSchedule s = StepsizeSchedule::power(std::get<RviQScenario>(cfg.scenario).a);
    return std::sqrt(s.tau(n));
  }
  const SkmScenario& sc = std::get<SkmScenario>(cfg.scenario);
  if (!sc.schedule.is_power()) {
    double al = sc.schedule.constant_value();
    return std::sqrt(al * (1.0 - al) * dn);
  }
  double a = sc.schedule.exponent();
  if (a == 0.5) return 1.0;
  if (a < 2.0 / 3.0) return std::pow(dn, a - 0.5);
  if (a == 2.0 / 3.0) return n < 2 ? kNaN : std::pow(dn, 1.0 / 6.0) / std::log(dn);
  if (a < 1.0) return std::pow(dn, (1.0 - a) / 2.0);
  return n < 2 ? kNaN : std::sqrt(std::log(dn));
}

Summary run_experiment(const ExperimentConfig& cfg) {
  if (std::holds_alternative<std::monostate>(cfg.scenario)) {
    throw std::invalid_argument("run_experiment: config has no scenario");
  }
  if (cfg.n_steps == 0) throw std::invalid_argument("run_experiment: n_steps must be >= 1");
  if (cfg.replications == 0) {
    throw std::invalid_argument("run_experiment: replications must be >= 1");
  }
  double total = static_cast<double>(cfg.n_steps) * static_cast<double>(cfg.replications);
  if (total > static_cast<double>(cfg.step_budget)) {
    throw std::invalid_argument(
        "run_experiment: " + std::to_string(cfg.n_steps) + " steps x " +
        std::to_string(cfg.replications) + " replications = " + format_double(total) +
        " total steps exceeds the budget of " + std::to_string(cfg.step_budget) +
        "; raise step_budget explicitly to proceed");
  }
  if (const auto* sc = std::get_if<SkmScenario>(&cfg.scenario)) {
    if (sc->x0.size() != sc->op.dim()) {
      throw std::invalid_argument("run_experiment: x0 dimension mismatch");
    }
    if (!sc->noise.is_none() && sc->noise.dim() != sc->op.dim()) {
      throw std::invalid_argument("run_experiment: noise dimension mismatch");
    }
  }

  std::vector<std::size_t> grid = checkpoint_grid(cfg.n_steps, cfg.stride);
  const std::size_t reps = cfg.replications;
  std::vector<RepCurve> slots(reps);

  auto run_one = [&](std::size_t r) {
    std::uint64_t seed = derive_stream(cfg.master_seed, r);
    if (const auto* sc = std::get_if<SkmScenario>(&cfg.scenario)) {
      slots[r] = run_skm_rep(*sc, grid, cfg.n_steps, seed);
    } else {
      slots[r] = run_rvi_rep(std::get<RviQScenario>(cfg.scenario), grid, cfg.n_steps,
                             cfg.stride, seed);
    }
  };

  std::size_t n_threads = std::min(harness_threads(), reps);
  if (n_threads <= 1) {
    for (std::size_t r = 0; r < reps; ++r) run_one(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
      while (true) {
        std::size_t r = next.fetch_add(1);
        if (r >= reps) return;
        try {
          run_one(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  Summary s;
  s.scenario_name = cfg.name;
  s.master_seed = cfg.master_seed;
  s.has_fq = std::holds_alternative<RviQScenario>(cfg.scenario);
  if (s.has_fq) {
    s.a_or_alpha = std::get<RviQScenario>(cfg.scenario).a;
  } else {
    const auto& sched = std::get<SkmScenario>(cfg.scenario).schedule;
    s.a_or_alpha = sched.is_power() ? sched.exponent() : sched.constant_value();
  }
  for (const auto& b : cfg.bounds) s.bound_names.push_back(b.name);

  s.rows.reserve(grid.size());
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    SummaryRow row;
    row.n = grid[gi];
    row.replications = reps;
    // Welford pass in replication-index order; the merge order is fixed so
    // the result is independent of which thread ran which slot.
    double mean = 0.0, m2 = 0.0;
    double fq_mean = 0.0;
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < reps; ++r) {
      double v = slots[r].residual[gi];
      double delta = v - mean;
      mean += delta / static_cast<double>(r + 1);
      m2 += delta * (v - mean);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
      if (s.has_fq) fq_mean += (slots[r].fq[gi] - fq_mean) / static_cast<double>(r + 1);
    }
    row.mean_residual = mean;
    row.std_error =
        reps > 1 ? std::sqrt(m2 / static_cast<double>(reps - 1) / static_cast<double>(reps))
                 : 0.0;
    row.min_residual = mn;
    row.max_residual = mx;
    row.fq_mean = s.has_fq ? fq_mean : kNaN;
    for (const auto& b : cfg.bounds) row.bounds.push_back(b.value(row.n));
    row.rescaled_residual = row.mean_residual * rescale_factor(cfg, row.n);
    s.rows.push_back(std::move(row));
  }
  return s;
}

BoundComparison compare_to_bound(const Summary& s, const std::string& bound_name) {
  std::size_t idx = s.bound_names.size();
  for (std::size_t i = 0; i < s.bound_names.size(); ++i) {
    if (s.bound_names[i] == bound_name) {
      idx = i;
      break;
    }
  }
  if (idx == s.bound_names.size()) {
    throw std::invalid_argument("compare_to_bound: no bound column named '" + bound_name + "'");
  }
  BoundComparison rep;
  for (const auto& row : s.rows) {
    double bound = row.bounds[idx];
    if (!std::isfinite(bound)) continue;
    ++rep.rows_checked;
    double slack_mean = row.mean_residual - 3.0 * row.std_error;
    if (slack_mean > bound) ++rep.violations;
    double ratio = bound > 0.0 ? row.mean_residual / bound
                               : std::numeric_limits<double>::infinity();
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.worst_n = row.n;
    }
  }
  return rep;
}

void emit_csv(const Summary& s, std::ostream& out) {
  if (s.scenario_name.find_first_of(",\n\r\"") != std::string::npos) {
    throw std::invalid_argument("emit_csv: scenario name must not contain commas or quotes");
  }
  for (const auto& name : s.bound_names) {
    if (name.empty() || name.find_first_of(",\n\r\"") != std::string::npos) {
      throw std::invalid_argument("emit_csv: bound name '" + name +
                                  "' is empty or contains commas or quotes");
    }
  }
  out << "scenario,a_or_alpha,n,replications,mean_residual,stderr,min,max";
  for (const auto& name : s.bound_names) out << ",bound_" << name;
  if (s.has_fq) out << ",fq_mean";
  out << ",rescaled_residual,master_seed\n";
  for (const auto& row : s.rows) {
    out << s.scenario_name << ',' << format_double(s.a_or_alpha) << ',' << row.n << ','
        << row.replications << ',' << format_double(row.mean_residual) << ','
        << format_double(row.std_error) << ',' << format_double(row.min_residual) << ','
        << format_double(row.max_residual);
    for (double b : row.bounds) out << ',' << format_double(b);
    if (s.has_fq) out << ',' << format_double(row.fq_mean);
    out << ',' << format_double(row.rescaled_residual) << ',' << s.master_seed << '\n';
  }
  if (!out) throw std::runtime_error("emit_csv: stream write failed");
}

void emit_csv_file(const Summary& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("emit_csv_file: cannot open " + path);
  emit_csv(s, f);
  f.flush();
  if (!f) throw std::runtime_error("emit_csv_file: write failed for " + path);
}

Summary load_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("load_csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cols = split_csv_line(line);
  const char* prefix[] = {"scenario",      "a_or_alpha", "n",   "replications",
                          "mean_residual", "stderr",     "min", "max"};
  if (cols.size() < 10) throw std::invalid_argument("load_csv: truncated header");
  for (std::size_t i = 0; i < 8; ++i) {
    if (cols[i] != prefix[i]) {
      throw std::invalid_argument("load_csv: header column " + std::to_string(i) + " is '" +
                                  cols[i] + "', expected '" + prefix[i] + "'");
    }
  }
  Summary s;
  std::size_t i = 8;
  while (i < cols.size() && cols[i].rfind("bound_", 0) == 0) {
    s.bound_names.push_back(cols[i].substr(6));
    ++i;
  }
  if (i < cols.size() && cols[i] == "fq_mean") {
    s.has_fq = true;
    ++i;
  }
  if (i + 2 != cols.size() || cols[i] != "rescaled_residual" || cols[i + 1] != "master_seed") {
    throw std::invalid_argument("load_csv: header must end with rescaled_residual,master_seed");
  }
  const std::size_t want = cols.size();
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != want) {
      throw std::invalid_argument("load_csv: row has " + std::to_string(f.size()) +
                                  " fields, expected " + std::to_string(want));
    }
    if (first) {
      s.scenario_name = f[0];
      s.a_or_alpha = parse_double(f[1], "a_or_alpha");
      s.master_seed = parse_u64(f[want - 1], "master_seed");
      first = false;
    }
    SummaryRow row;
    row.n = static_cast<std::size_t>(parse_u64(f[2], "n"));
    row.replications = static_cast<std::size_t>(parse_u64(f[3], "replications"));
    row.mean_residual = parse_double(f[4], "mean_residual");
    row.std_error = parse_double(f[5], "stderr");
    row.min_residual = parse_double(f[6], "min");
    row.max_residual = parse_double(f[7], "max");
    std::size_t c = 8;
    for (std::size_t b = 0; b < s.bound_names.size(); ++b) {
      row.bounds.push_back(parse_double(f[c++], "bound"));
    }
    row.fq_mean = s.has_fq ? parse_double(f[c++], "fq_mean") : kNaN;
    row.rescaled_residual = parse_double(f[c], "rescaled_residual");
    s.rows.push_back(std::move(row));
  }
  return s;
}

Summary load_csv_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_csv_file: cannot open " + path);
  return load_csv(f);
}

double kappa_bar_horizon(const NonexpansiveOperator& op, std::span<const double> x0,
                         StepsizeSchedule& schedule, const NoiseModel& noise,
                         std::size_t horizon) {
  if (!op.fixed_point()) {
    throw std::invalid_argument("kappa_bar_horizon: operator has no known fixed point");
  }
  if (x0.size() != op.dim()) throw std::invalid_argument("kappa_bar_horizon: x0 dimension");
  if (horizon == 0) throw std::invalid_argument("kappa_bar_horizon: horizon must be >= 1");
  const std::vector<double>& fix = *op.fixed_point();
  std::vector<double> diff(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) diff[i] = x0[i] - fix[i];
  double dist0 = norm_value(op.norm(), diff);
  double sup = noise.l2_sup_all(horizon);
  if (!std::isfinite(sup)) {
    throw std::invalid_argument(
        "kappa_bar_horizon: noise has no finite pathwise bound (use a bounded base "
        "distribution)");
  }
  double alpha_sum = 0.0;
  for (std::size_t k = 1; k <= horizon; ++k) alpha_sum += schedule.alpha(k);
  return 2.0 * dist0 + op.norm().mu(op.dim()) * sup * alpha_sum;
}

}  // namespace skm
