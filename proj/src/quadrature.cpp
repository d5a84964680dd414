#include "fbpml/quadrature.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace fbpml {

AngleBracket bruns_bracket(int n, int j) {
  const double denom = 2.0 * n + 1.0;
  return {(2.0 * j - 1.0) * pi / denom, 2.0 * j * pi / denom};
}

LegendreValue legendre(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double p0 = 1.0;
  double p1 = x;
  for (int l = 2; l <= n; ++l) {
    const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
    p0 = p1;
    p1 = p2;
  }
  // P_n' from (1 - x^2) P_n' = n (P_{n-1} - x P_n); nodes never hit x = +-1.
  const double dp = n * (p0 - x * p1) / (1.0 - x * x);
  return {p1, dp};
}

namespace {

double bracketed_root(int n, double a, double b) {
  double pa = legendre(n, a).p;
  double x = 0.5 * (a + b);
  constexpr int max_iter = 200;
  for (int it = 0; it < max_iter; ++it) {
    const auto [p, dp] = legendre(n, x);
    if (p == 0.0) return x;
    if ((p > 0.0) == (pa > 0.0)) {
      a = x;
      pa = p;
    } else {
      b = x;
    }
    double next = x - p / dp;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    const double step = std::abs(next - x);
    x = next;
    if (step <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
      return x;
    }
  }
  throw QuadratureError("Legendre node iteration did not converge for N = " + std::to_string(n));
}

}  // namespace

GaussRule legendre_rule(int n) {
  if (n < 1 || n > max_legendre_order) {
    throw std::invalid_argument("Gauss-Legendre order must lie in [1, " +
                                std::to_string(max_legendre_order) + "]");
  }
  GaussRule rule;
  rule.order = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int j = 1; j <= n; ++j) {
    const auto [lo, hi] = bruns_bracket(n, j);
    // theta increasing means x = cos(theta) decreasing: d_{N+1-j} = cos(theta_j).
    const double x = bracketed_root(n, std::cos(hi), std::cos(lo));
    const double dp = legendre(n, x).dp;
    rule.nodes[n - j] = x;
    rule.weights[n - j] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

FloquetGrid floquet_grid(const Wavenumber& k, int n) { return floquet_grid(k, legendre_rule(n)); }

FloquetGrid floquet_grid(const Wavenumber& k, const GaussRule& rule) {
  if (!k.exceptional) throw NonExceptionalWavenumber(k.k);
  FloquetGrid grid;
  grid.center = k.critical_center;
  grid.n = rule.order;
  grid.samples.reserve(2 * rule.order);
  const double scale = 2.0 * std::sqrt(2.0);
  for (int side : {+1, -1}) {
    for (int j = 0; j < rule.order; ++j) {
      const double t = (rule.nodes[j] + 1.0) / scale;
      const double weight = rule.weights[j] * (rule.nodes[j] + 1.0) / 4.0;
      grid.samples.push_back({grid.center + side * t * t, weight, side});
    }
  }
  return grid;
}

double distance_to_integers(double alpha) { return std::abs(alpha - std::round(alpha)); }

cplx synthesize(const FloquetGrid& grid, std::span<const cplx> values, double x1) {
  if (values.size() != grid.samples.size()) {
    throw std::invalid_argument("synthesize: " + std::to_string(values.size()) +
                                " cell values for " + std::to_string(grid.samples.size()) +
                                " Floquet samples");
  }
  cplx sum = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const auto& s = grid.samples[j];
    sum += s.weight * std::polar(1.0, s.alpha * x1) * values[j];
  }
  return sum;
}

}  // namespace fbpml
