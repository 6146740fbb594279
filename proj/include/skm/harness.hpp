#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "skm/engine.hpp"
#include "skm/mdp.hpp"

namespace skm {

/// Operator iteration scenario: schedule and noise are copied per
/// replication, so the config stays immutable during a run.
struct SkmScenario {
  NonexpansiveOperator op;
  StepsizeSchedule schedule;
  NoiseModel noise;
  std::vector<double> x0;
};

/// Stabilized Q-iteration scenario on a finite MDP.
struct RviQScenario {
  Mdp mdp;
  double a = 1.0;
  Stabilizer f;
  QTable q0;
};

/// Named bound curve; evaluated once per output row.
struct BoundColumn {
  std::string name;
  std::function<double(std::size_t)> value;
};

struct ExperimentConfig {
  std::string name;
  std::variant<std::monostate, SkmScenario, RviQScenario> scenario;
  std::size_t n_steps = 0;
  /// Rows are emitted at multiples of stride plus the final step.
  std::size_t stride = 1;
  std::size_t replications = 1;
  std::uint64_t master_seed = 0;
  std::vector<BoundColumn> bounds;
  /// run_experiment refuses when n_steps * replications exceeds this.
  std::size_t step_budget = 1000000000;
};

struct SummaryRow {
  std::size_t n = 0;
  std::size_t replications = 0;
  double mean_residual = 0.0;
  double std_error = 0.0;
  double min_residual = 0.0;
  double max_residual = 0.0;
  std::vector<double> bounds;  // parallel to Summary::bound_names
  double fq_mean = 0.0;        // anchor-value mean; meaningful when has_fq
  double rescaled_residual = 0.0;
};

struct Summary {
  std::string scenario_name;
  double a_or_alpha = 0.0;
  std::uint64_t master_seed = 0;
  bool has_fq = false;
  std::vector<std::string> bound_names;
  std::vector<SummaryRow> rows;  // sorted by n
};

/// Runs the replications (replication r is seeded by
/// derive_stream(master_seed, r)) and aggregates per-replication results in
/// replication-index order, so the summary does not depend on execution
/// interleaving. Thread count comes from the SKM_THREADS environment
/// variable (default 1).
Summary run_experiment(const ExperimentConfig& cfg);

struct BoundComparison {
  std::size_t rows_checked = 0;
  std::size_t violations = 0;
  /// max over rows of mean_residual / bound (no stderr slack).
  double max_ratio = 0.0;
  std::size_t worst_n = 0;
};

/// A row violates when mean_residual - 3 * std_error > bound. Rows whose
/// bound value is not finite are skipped.
BoundComparison compare_to_bound(const Summary& s, const std::string& bound_name);

/// CSV with columns
///   scenario,a_or_alpha,n,replications,mean_residual,stderr,min,max,
///   bound_<name>...[,fq_mean],rescaled_residual,master_seed
/// floats at 17 significant digits. Byte-identical for identical configs.
void emit_csv(const Summary& s, std::ostream& out);
void emit_csv_file(const Summary& s, const std::string& path);
Summary load_csv(std::istream& in);
Summary load_csv_file(const std::string& path);

/// Displacement constant certified over a finite horizon:
///   2 dist(x0, fix) + mu * sup_n ||U_n||_2 * sum_{k<=horizon} alpha_k.
/// Valid for rows n <= horizon. Requires a known fixed point and a bounded
/// noise model (throws otherwise).
double kappa_bar_horizon(const NonexpansiveOperator& op, std::span<const double> x0,
                         StepsizeSchedule& schedule, const NoiseModel& noise,
                         std::size_t horizon);

/// The factor applied to mean_residual in the rescaled column: sqrt(tau_n)
/// for the Q-iteration and constant stepsizes, the reciprocal of the
/// theoretical decay shape for power stepsizes (NaN where the shape needs
/// n >= 2).
double rescale_factor(const ExperimentConfig& cfg, std::size_t n);

}  // namespace skm
