#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "skm/operators.hpp"

namespace skm {

/// Finite MDP with transition tensor p(j|i,u) and rewards g(i,u,j), both
/// dense row-major [i][u][j]. Rewards must be nonnegative (shift them if
/// not); g_max is their maximum. States and actions are 0-based.
struct Mdp {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<double> p;
  std::vector<double> g;
  double g_max = 0.0;

  double p_at(std::size_t i, std::size_t u, std::size_t j) const {
    return p[(i * n_actions + u) * n_states + j];
  }
  double g_at(std::size_t i, std::size_t u, std::size_t j) const {
    return g[(i * n_actions + u) * n_states + j];
  }

  /// Validates shapes, nonnegativity, and per-(i,u) probability sums
  /// (tolerance 1e-9); throws listing the offending pair.
  void validate() const;

  /// Two-state, two-action average-reward example: entering state 0 pays 1,
  /// entering state 1 pays 10; action 0 mixes 0.3/0.7, action 1 0.9/0.1.
  /// Optimal average reward 71/8.
  static Mdp duff();

  /// Text format:  a `states=<S> actions=<A>` header, then lines
  /// `p <i> <u> <j> <prob>` and `g <i> <u> <j> <reward>` (0-based indices,
  /// unspecified entries are 0, `#` starts a comment). Parse errors carry
  /// line numbers.
  static Mdp load(std::istream& in);
  static Mdp load_file(const std::string& path);
};

/// Q-tables are dense row-major [i][u].
using QTable = std::vector<double>;

/// f(Q) used to anchor the iteration; satisfies f(Q + c e) = f(Q) + c.
struct Stabilizer {
  enum class Kind { max, mean, component };
  Kind kind = Kind::max;
  std::size_t i0 = 0, u0 = 0;  // component mode only

  double operator()(const Mdp& m, const QTable& q) const;
  std::string label() const;

  static Stabilizer max_entry() { return {Kind::max, 0, 0}; }
  static Stabilizer mean_entry() { return {Kind::mean, 0, 0}; }
  static Stabilizer component(std::size_t i0, std::size_t u0) {
    return {Kind::component, i0, u0};
  }
};

/// M(Q)(i,u) = sum_j p(j|i,u) (g(i,u,j) + max_{u'} Q(j,u')).
QTable apply_m(const Mdp& m, const QTable& q);

/// H(Q) = M(Q) - r_bar e. Nonexpansive in the sup norm.
QTable bellman_h(const Mdp& m, const QTable& q, double r_bar);

/// ||Q - H(Q)||_inf.
double residual_inf(const Mdp& m, const QTable& q, double r_bar);

/// H(.) wrapped as a sup-norm operator on R^{S*A} for use with the generic
/// iteration machinery.
NonexpansiveOperator bellman_h_operator(const Mdp& m, double r_bar);

struct ExactSolution {
  double r_bar = 0.0;
  QTable q_star_raw;        // one solution of Q = H(Q); shift-normalize via q_of
  std::size_t iterations = 0;

  /// The fixed point with f(Q) = r_bar for the given stabilizer.
  QTable q_of(const Mdp& m, const Stabilizer& f) const;
};

/// Relative value iteration with the aperiodicity transformation
/// (h <- (1-rho) h + rho L h, rho = 1/2, re-centered each sweep); stops when
/// the undamped one-step residual has span <= tol, so r_bar is accurate to
/// tol. Throws with a unichain diagnostic if the cap is hit.
ExactSolution solve_exact(const Mdp& m, double tol = 1e-10, std::size_t max_iter = 1000000);

struct QCheckpoint {
  std::size_t n = 0;
  QTable q;
  double f_value = 0.0;   // f(Q_n) for the live run, r_bar for the benchmark
  double residual = 0.0;  // ||Q_n - H(Q_n)||_inf with the solver's r_bar
};

struct QTrajectory {
  double a = 1.0;
  std::uint64_t seed = 0;
  std::size_t final_n = 0;
  std::size_t stride = 1;
  double r_bar = 0.0;
  /// Set when the exponent lies in the range the convergence-rate guarantee
  /// covers (a in (4/5, 1]); runs outside it are produced but flagged.
  bool in_theorem_range = true;
  std::vector<QCheckpoint> checkpoints;

  const QCheckpoint& at(std::size_t n) const;
};

/// Asynchronous-sampled fixed-point iteration
///   Q_n(i,u) = (1-alpha_n) Q_{n-1}(i,u)
///            + alpha_n [ g(i,u,xi) + max_{u'} Q_{n-1}(xi,u') - f(Q_{n-1}) ],
/// alpha_n = (n+1)^{-a}, one independent next-state draw per (i,u) per step
/// taken from a counter-based stream keyed by (seed, step, i, u). Accepts
/// a in (1/2, 1]; checkpoints record Q, f(Q), and the exact sup-norm
/// residual.
QTrajectory run_rvi_q(const Mdp& m, double a, const Stabilizer& f, const QTable& q0,
                      std::size_t n_steps, std::size_t stride, std::uint64_t seed);

/// Same recursion with the known r_bar in place of f(Q_{n-1}), consuming the
/// identical sample stream, so the two runs couple: Q_n - Q_n^{r_bar} stays
/// a multiple of the all-ones vector.
QTrajectory benchmark_rbar_iteration(const Mdp& m, double a, const QTable& q0,
                                     std::size_t n_steps, std::size_t stride,
                                     std::uint64_t seed);

}  // namespace skm
