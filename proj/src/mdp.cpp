#include "skm/mdp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "skm/rng.hpp"

namespace skm {

void Mdp::validate() const {
  if (n_states == 0 || n_actions == 0) throw std::invalid_argument("Mdp: empty state/action set");
  std::size_t want = n_states * n_actions * n_states;
  if (p.size() != want || g.size() != want) throw std::invalid_argument("Mdp: tensor size mismatch");
  double gm = 0.0;
  for (std::size_t i = 0; i < n_states; ++i) {
    for (std::size_t u = 0; u < n_actions; ++u) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n_states; ++j) {
        double pj = p_at(i, u, j);
        if (!(pj >= 0.0 && pj <= 1.0)) {
          throw std::invalid_argument("Mdp: p(" + std::to_string(j) + "|" + std::to_string(i) +
                                      "," + std::to_string(u) + ") outside [0,1]");
        }
        double gj = g_at(i, u, j);
        if (!(gj >= 0.0)) {
          throw std::invalid_argument("Mdp: negative reward at (i,u,j)=(" + std::to_string(i) +
                                      "," + std::to_string(u) + "," + std::to_string(j) +
                                      "); shift rewards to be nonnegative");
        }
        gm = std::max(gm, gj);
        sum += pj;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("Mdp: probabilities for (i,u)=(" + std::to_string(i) + "," +
                                    std::to_string(u) + ") sum to " + std::to_string(sum));
      }
    }
  }
  if (std::abs(gm - g_max) > 1e-12) {
    throw std::invalid_argument("Mdp: g_max does not match the reward tensor");
  }
}

Mdp Mdp::duff() {
  Mdp m;
  m.n_states = 2;
  m.n_actions = 2;
  m.p.assign(8, 0.0);
  m.g.assign(8, 0.0);
  auto set_p = [&m](std::size_t i, std::size_t u, std::size_t j, double v) {
    m.p[(i * 2 + u) * 2 + j] = v;
  };
  // Action 0 mixes strongly, action 1 mostly stays.
  set_p(0, 0, 0, 0.3);
  set_p(0, 0, 1, 0.7);
  set_p(1, 0, 0, 0.7);
  set_p(1, 0, 1, 0.3);
  set_p(0, 1, 0, 0.9);
  set_p(0, 1, 1, 0.1);
  set_p(1, 1, 0, 0.1);
  set_p(1, 1, 1, 0.9);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t u = 0; u < 2; ++u) {
      m.g[(i * 2 + u) * 2 + 0] = 1.0;
      m.g[(i * 2 + u) * 2 + 1] = 10.0;
    }
  }
  m.g_max = 10.0;
  m.validate();
  return m;
}

Mdp Mdp::load(std::istream& in) {
  Mdp m;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  auto fail = [&lineno](const std::string& what) {
    throw std::invalid_argument("Mdp::load: line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank
    if (!have_header) {
      // Expect: states=<S> actions=<A>
      std::string tok2;
      if (!(ls >> tok2) || tok.rfind("states=", 0) != 0 || tok2.rfind("actions=", 0) != 0) {
        fail("expected header 'states=<int> actions=<int>'");
      }
      try {
        m.n_states = std::stoul(tok.substr(7));
        m.n_actions = std::stoul(tok2.substr(8));
      } catch (const std::exception&) {
        fail("bad integer in header");
      }
      if (m.n_states == 0 || m.n_actions == 0) fail("states/actions must be positive");
      m.p.assign(m.n_states * m.n_actions * m.n_states, 0.0);
      m.g.assign(m.n_states * m.n_actions * m.n_states, 0.0);
      have_header = true;
      continue;
    }
    if (tok != "p" && tok != "g") fail("expected row tag 'p' or 'g', got '" + tok + "'");
    long long i, u, j;
    double v;
    if (!(ls >> i >> u >> j >> v)) fail("expected '<i> <u> <j> <value>'");
    std::string extra;
    if (ls >> extra) fail("trailing token '" + extra + "'");
    if (i < 0 || static_cast<std::size_t>(i) >= m.n_states || j < 0 ||
        static_cast<std::size_t>(j) >= m.n_states || u < 0 ||
        static_cast<std::size_t>(u) >= m.n_actions) {
      fail("index out of range (0-based)");
    }
    std::size_t idx =
        (static_cast<std::size_t>(i) * m.n_actions + static_cast<std::size_t>(u)) * m.n_states +
        static_cast<std::size_t>(j);
    (tok == "p" ? m.p : m.g)[idx] = v;
  }
  if (!have_header) {
    lineno = 0;
    fail("missing 'states= actions=' header");
  }
  double gm = 0.0;
  for (double v : m.g) gm = std::max(gm, v);
  m.g_max = gm;
  m.validate();
  return m;
}

Mdp Mdp::load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("Mdp::load_file: cannot open " + path);
  return load(f);
}

double Stabilizer::operator()(const Mdp& m, const QTable& q) const {
  if (q.size() != m.n_states * m.n_actions) {
    throw std::invalid_argument("Stabilizer: Q-table size mismatch");
  }
  switch (kind) {
    case Kind::max:
      return *std::max_element(q.begin(), q.end());
    case Kind::mean: {
      double s = 0.0;
      for (double v : q) s += v;
      return s / static_cast<double>(q.size());
    }
    case Kind::component:
      if (i0 >= m.n_states || u0 >= m.n_actions) {
        throw std::invalid_argument("Stabilizer: component index out of range");
      }
      return q[i0 * m.n_actions + u0];
  }
  throw std::logic_error("Stabilizer: bad kind");
}

std::string Stabilizer::label() const {
  switch (kind) {
    case Kind::max:
      return "max";
    case Kind::mean:
      return "mean";
    case Kind::component:
      return "component:" + std::to_string(i0) + "," + std::to_string(u0);
  }
  return "?";
}

namespace {

/// max_{u'} Q(j, u'), ties resolved to the lowest action index by the
/// strict inequality.
double row_max(const QTable& q, std::size_t j, std::size_t n_actions) {
  double best = q[j * n_actions];
  for (std::size_t u = 1; u < n_actions; ++u) {
    double v = q[j * n_actions + u];
    if (v > best) best = v;
  }
  return best;
}

}  // namespace

QTable apply_m(const Mdp& m, const QTable& q) {
  if (q.size() != m.n_states * m.n_actions) throw std::invalid_argument("apply_m: size mismatch");
  QTable out(q.size(), 0.0);
  for (std::size_t i = 0; i < m.n_states; ++i) {
    for (std::size_t u = 0; u < m.n_actions; ++u) {
      double s = 0.0;
      for (std::size_t j = 0; j < m.n_states; ++j) {
        double pj = m.p_at(i, u, j);
        if (pj != 0.0) s += pj * (m.g_at(i, u, j) + row_max(q, j, m.n_actions));
      }
      out[i * m.n_actions + u] = s;
    }
  }
  return out;
}

QTable bellman_h(const Mdp& m, const QTable& q, double r_bar) {
  QTable out = apply_m(m, q);
  for (double& v : out) v -= r_bar;
  return out;
}

double residual_inf(const Mdp& m, const QTable& q, double r_bar) {
  QTable h = bellman_h(m, q, r_bar);
  double r = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) r = std::max(r, std::abs(q[k] - h[k]));
  return r;
}

NonexpansiveOperator bellman_h_operator(const Mdp& m, double r_bar) {
  auto mm = std::make_shared<Mdp>(m);
  std::size_t dim = m.n_states * m.n_actions;
  return NonexpansiveOperator(
      "bellman-h", dim, NormSpec{Norm::linf},
      [mm, r_bar](std::span<const double> x, std::span<double> y) {
        QTable q(x.begin(), x.end());
        QTable h = bellman_h(*mm, q, r_bar);
        std::copy(h.begin(), h.end(), y.begin());
      });
}

QTable ExactSolution::q_of(const Mdp& m, const Stabilizer& f) const {
  QTable q = q_star_raw;
  double shift = r_bar - f(m, q);
  for (double& v : q) v += shift;
  return q;
}

ExactSolution solve_exact(const Mdp& m, double tol, std::size_t max_iter) {
  m.validate();
  const std::size_t S = m.n_states;
  const std::size_t A = m.n_actions;
  std::vector<double> h(S, 0.0);
  // Damped Bellman sweep: the rho-average makes every policy's chain
  // aperiodic without moving the fixed point.
  const double rho = 0.5;
  double lo = 0.0, hi = 0.0;
  std::size_t it = 0;
  for (; it < max_iter; ++it) {
    std::vector<double> lh(S, 0.0);
    for (std::size_t i = 0; i < S; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t u = 0; u < A; ++u) {
        double s = 0.0;
        for (std::size_t j = 0; j < S; ++j) {
          double pj = m.p_at(i, u, j);
          if (pj != 0.0) s += pj * (m.g_at(i, u, j) + h[j]);
        }
        if (s > best) best = s;
      }
      lh[i] = best;
    }
    lo = lh[0] - h[0];
    hi = lo;
    for (std::size_t i = 1; i < S; ++i) {
      double w = lh[i] - h[i];
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    if (hi - lo <= tol) {
      h = lh;  // keep the swept bias for the Q extraction below
      break;
    }
    double base = (1.0 - rho) * h[0] + rho * lh[0];
    for (std::size_t i = 0; i < S; ++i) h[i] = (1.0 - rho) * h[i] + rho * lh[i] - base;
  }
  if (hi - lo > tol) {
    throw std::runtime_error(
        "solve_exact: span residual " + std::to_string(hi - lo) + " after " +
        std::to_string(max_iter) +
        " sweeps; the chain may violate the unichain assumption (no single recurrent class)");
  }
  ExactSolution sol;
  sol.r_bar = 0.5 * (lo + hi);
  sol.iterations = it + 1;
  QTable q(S * A, 0.0);
  for (std::size_t i = 0; i < S; ++i) {
    for (std::size_t u = 0; u < A; ++u) {
      double s = 0.0;
      for (std::size_t j = 0; j < S; ++j) {
        double pj = m.p_at(i, u, j);
        if (pj != 0.0) s += pj * (m.g_at(i, u, j) + h[j]);
      }
      q[i * A + u] = s - sol.r_bar;
    }
  }
  sol.q_star_raw = std::move(q);
  return sol;
}

const QCheckpoint& QTrajectory::at(std::size_t n) const {
  for (const auto& c : checkpoints) {
    if (c.n == n) return c;
  }
  throw std::out_of_range("QTrajectory::at: no checkpoint at n=" + std::to_string(n));
}

namespace {

/// Categorical draw of the next state for (i,u) at the given step, from the
/// shared counter stream.
std::size_t draw_next_state(const Mdp& m, const CounterRng& crng, std::size_t step,
                            std::size_t i, std::size_t u) {
  double x = crng.unit(step, i, u);
  double cum = 0.0;
  for (std::size_t j = 0; j < m.n_states; ++j) {
    cum += m.p_at(i, u, j);
    if (x <= cum) return j;
  }
  return m.n_states - 1;  // absorbs rounding in the cumulative sum
}

QTrajectory run_q_iteration(const Mdp& m, double a, const Stabilizer* f, double r_bar_anchor,
                            double solver_r_bar, const QTable& q0, std::size_t n_steps,
                            std::size_t stride, std::uint64_t seed) {
  const std::size_t S = m.n_states;
  const std::size_t A = m.n_actions;
  if (q0.size() != S * A) throw std::invalid_argument("q iteration: q0 size mismatch");
  if (stride == 0) throw std::invalid_argument("q iteration: stride must be >= 1");
  if (!(a > 0.5 && a <= 1.0)) {
    throw std::invalid_argument("q iteration: a must lie in (1/2, 1]");
  }

  QTrajectory t;
  t.a = a;
  t.seed = seed;
  t.final_n = n_steps;
  t.stride = stride;
  t.r_bar = solver_r_bar;
  t.in_theorem_range = a > 0.8;

  CounterRng crng(seed);
  QTable q = q0;
  QTable next(S * A, 0.0);

  auto record = [&](std::size_t n) {
    double fv = f ? (*f)(m, q) : r_bar_anchor;
    t.checkpoints.push_back({n, q, fv, residual_inf(m, q, solver_r_bar)});
  };
  record(0);

  for (std::size_t n = 1; n <= n_steps; ++n) {
    double al = std::pow(static_cast<double>(n) + 1.0, -a);
    double anchor = f ? (*f)(m, q) : r_bar_anchor;
    for (std::size_t i = 0; i < S; ++i) {
      for (std::size_t u = 0; u < A; ++u) {
        std::size_t j = draw_next_state(m, crng, n, i, u);
        double z = m.g_at(i, u, j) + row_max(q, j, A) - anchor;
        next[i * A + u] = (1.0 - al) * q[i * A + u] + al * z;
      }
    }
#ifndef NDEBUG
    if (!f) {
      // Effective-noise envelope ||U_n||_inf <= g_max + 2||Q_{n-1}||_inf for
      // the anchored benchmark; checked in debug builds only.
      QTable mq = apply_m(m, q);
      double qn = 0.0;
      for (double v : q) qn = std::max(qn, std::abs(v));
      for (std::size_t i = 0; i < S; ++i) {
        for (std::size_t u = 0; u < A; ++u) {
          std::size_t j = draw_next_state(m, crng, n, i, u);
          double z = m.g_at(i, u, j) + row_max(q, j, A);
          assert(std::abs(z - mq[i * A + u]) <= m.g_max + 2.0 * qn + 1e-9);
        }
      }
    }
#endif
    q.swap(next);
    for (double v : q) {
      if (!std::isfinite(v)) {
        throw std::runtime_error("q iteration: non-finite entry at step " + std::to_string(n));
      }
    }
    if (n % stride == 0 || n == n_steps) record(n);
  }
  return t;
}

}  // namespace

QTrajectory run_rvi_q(const Mdp& m, double a, const Stabilizer& f, const QTable& q0,
                      std::size_t n_steps, std::size_t stride, std::uint64_t seed) {
  ExactSolution sol = solve_exact(m);
  return run_q_iteration(m, a, &f, 0.0, sol.r_bar, q0, n_steps, stride, seed);
}

QTrajectory benchmark_rbar_iteration(const Mdp& m, double a, const QTable& q0,
                                     std::size_t n_steps, std::size_t stride,
                                     std::uint64_t seed) {
  ExactSolution sol = solve_exact(m);
  return run_q_iteration(m, a, nullptr, sol.r_bar, sol.r_bar, q0, n_steps, stride, seed);
}

}  // namespace skm
