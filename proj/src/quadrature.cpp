#include "skm/quadrature.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace skm {

namespace {

// 15-point Kronrod nodes on [-1, 1] (symmetric; nonnegative half listed)
// with the embedded 7-point Gauss rule on the odd-indexed nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double integral;
  double error;
  int depth;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b, int depth) {
  double c = 0.5 * (a + b);
  double h = 0.5 * (b - a);
  double fc = f(c);
  double result_g = fc * kWg[3];
  double result_k = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    double x = h * kXgk[j];
    double fsum = f(c - x) + f(c + x);
    result_k += kWgk[j] * fsum;
    if (j % 2 == 1) result_g += kWg[j / 2] * fsum;
  }
  return {a, b, result_k * h, std::abs((result_k - result_g) * h), depth};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 double abs_tol, int max_depth) {
  if (!(rel_tol > 0.0) && !(abs_tol > 0.0)) {
    throw std::invalid_argument("integrate: need a positive tolerance");
  }
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::priority_queue<Panel> panels;
  Panel whole = gk15(f, a, b, 0);
  double total = whole.integral;
  double err = whole.error;
  panels.push(whole);
  // Split the worst panel until the summed error estimate meets the target.
  constexpr std::size_t kMaxPanels = 200000;
  std::size_t splits = 0;
  while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (panels.empty() || ++splits > kMaxPanels) {
      throw std::runtime_error("integrate: panel limit reached before tolerance");
    }
    Panel worst = panels.top();
    panels.pop();
    if (worst.depth >= max_depth) {
      throw std::runtime_error("integrate: subdivision limit reached before tolerance");
    }
    double m = 0.5 * (worst.a + worst.b);
    Panel left = gk15(f, worst.a, m, worst.depth + 1);
    Panel right = gk15(f, m, worst.b, worst.depth + 1);
    total += left.integral + right.integral - worst.integral;
    err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  // Re-sum from the panels for a cancellation-free total.
  double final_total = 0.0;
  std::vector<Panel> rest;
  rest.reserve(panels.size());
  while (!panels.empty()) {
    rest.push_back(panels.top());
    panels.pop();
  }
  for (const Panel& p : rest) final_total += p.integral;
  return sign * final_total;
}

}  // namespace skm
