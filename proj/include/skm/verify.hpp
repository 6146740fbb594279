#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace skm {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Stepsize-sequence inequalities swept over a 21-point exponent grid in
/// [1/2, 1] and n up to 1e5 (1e4 when fast): the delta^2 sandwich, the
/// stepsize-vs-tau envelopes for a < 1 and a = 1, monotonicity of the
/// shifted-clock sequence xi_n, and the tau growth floors.
std::vector<CheckResult> verify_appendix_b(bool fast = false);

/// Special-function cross-checks against independent oracles: the
/// hypergeometric kernel vs its power series, the Dawson function vs direct
/// quadrature, and the b = 1 closed-form identity.
std::vector<CheckResult> verify_specfun(std::uint64_t seed = 20260822, bool fast = false);

/// Stabilized vs anchored Q-iterations on the built-in two-state MDP share
/// one sample stream; their difference must stay a multiple of the all-ones
/// table, with the multiplier following its scalar recursion.
std::vector<CheckResult> verify_coupling(bool fast = false);

/// Bound-module consistency: the closed-form power-stepsize bound against
/// the generic convolution route, the horizon-tuned constant-stepsize
/// value, asymptote agreement at large n, and the randomized-iterate
/// specialization ordering.
std::vector<CheckResult> verify_bounds(bool fast = false);

bool all_pass(const std::vector<CheckResult>& results);

}  // namespace skm
