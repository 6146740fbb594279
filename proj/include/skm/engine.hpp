#pragma once

#include <cstdint>
#include <vector>

#include "skm/noise.hpp"
#include "skm/operators.hpp"
#include "skm/rng.hpp"
#include "skm/sequences.hpp"

namespace skm {

/// Full state stored at a checkpoint index.
struct EngineCheckpoint {
  std::size_t n = 0;
  std::vector<double> x;
  std::vector<double> ubar;
};

/// One run of x_n = (1-alpha_n) x_{n-1} + alpha_n (T x_{n-1} + U_n) with the
/// averaged noise recursion ubar_n = (1-alpha_n) ubar_{n-1} + alpha_n U_n.
/// Scalars (residual, ||ubar||) are kept for every step; full vectors only
/// at multiples of `stride` plus the endpoints.
struct Trajectory {
  std::size_t dim = 0;
  std::size_t final_n = 0;
  std::size_t stride = 1;
  std::uint64_t seed = 0;
  NormSpec norm;
  std::vector<double> residual;   // residual[k] = ||x_k - T x_k||, k = 0..final_n
  std::vector<double> ubar_norm;  // ||ubar_k||, k = 0..final_n (index 0 is 0)
  std::vector<EngineCheckpoint> checkpoints;

  /// Checkpoint lookup; throws if index n was not stored.
  const EngineCheckpoint& at(std::size_t n) const;
};

/// Runs n_steps iterations from x0. Deterministic in (seed, inputs): the
/// same call produces a bit-identical trajectory. Throws if any iterate or
/// noise draw turns non-finite (reported with its step index).
Trajectory run_skm(const NonexpansiveOperator& op, StepsizeSchedule& schedule,
                   const NoiseModel& noise, std::span<const double> x0, std::size_t n_steps,
                   std::size_t stride, std::uint64_t seed);

/// Anytime certificate evaluated from recorded scalars:
///   kappa*sigma(tau_n) + sum_{k=2..n} 2 alpha_k sigma(tau_n - tau_k) ||ubar_{k-1}||
///   + 4 ||ubar_n||.
/// Requires stride 1. O(n) for one index.
double pathwise_certificate_at(const Trajectory& t, StepsizeSchedule& schedule, double kappa,
                               std::size_t n);

/// Whole curve for n = 1..final_n. O(final_n^2); refused above n = 10^4.
std::vector<double> pathwise_certificate(const Trajectory& t, StepsizeSchedule& schedule,
                                         double kappa);

/// Draws index k in {1..n} with probability alpha_k (1 - alpha_k) / tau_n
/// and returns (k, x_{k-1}). Requires checkpoints at every index up to n-1
/// (stride 1). Uniform over k when the schedule is constant.
std::pair<std::size_t, std::vector<double>> sample_random_iterate(const Trajectory& t,
                                                                  StepsizeSchedule& schedule,
                                                                  std::size_t n, Rng& rng);

}  // namespace skm
