#include "fbpml/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fbpml/bloch.hpp"
#include "fbpml/quadrature.hpp"
#include "fbpml/spectral.hpp"

namespace fbpml {

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

}  // namespace

CheckResult check_gauss_rules(int max_n) {
  CheckResult r{"gauss-legendre rules N=1.." + std::to_string(max_n), true, ""};
  double worst_sum = 0.0, worst_exact = 0.0;
  int bracket_fail = 0, bound_fail = 0;
  for (int n = 1; n <= max_n; ++n) {
    const GaussRule g = legendre_rule(n);
    double sum = 0.0;
    for (double w : g.weights) {
      sum += w;
      if (!(w > 0.0)) ++bound_fail;
    }
    worst_sum = std::max(worst_sum, std::abs(sum - 2.0));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double q = 0.0;
      for (int i = 0; i < n; ++i) q += g.weights[i] * std::pow(g.nodes[i], p);
      const double exact = (p % 2 == 0) ? 2.0 / (p + 1) : 0.0;
      worst_exact = std::max(worst_exact, std::abs(q - exact));
    }
    // d_{N+1-j} = cos(theta_j), theta_j increasing.
    for (int j = 1; j <= n; ++j) {
      const double theta = std::acos(g.nodes[n - j]);
      const AngleBracket b = bruns_bracket(n, j);
      if (!(theta > b.lo && theta < b.hi)) ++bracket_fail;
    }
    for (int j = 1; j <= n / 2; ++j) {
      const double d1 = g.nodes[j - 1] + 1.0;
      const double lo = j * j / (3.0 * n * n), hi = 5.0 * j * j / (double(n) * n);
      if (!(d1 > lo && d1 < hi)) ++bound_fail;
    }
  }
  r.passed = worst_sum <= 1e-12 && worst_exact <= 1e-12 && bracket_fail == 0 && bound_fail == 0;
  r.detail = "max|sum-2|=" + fmt(worst_sum) + " max exactness err=" + fmt(worst_exact) +
             " bracket violations=" + std::to_string(bracket_fail) +
             " bound violations=" + std::to_string(bound_fail);
  return r;
}

CheckResult check_floquet_separation(const std::vector<double>& ks, int max_n) {
  CheckResult r{"floquet grid separation", true, ""};
  int violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (double k : ks) {
    const Wavenumber wn = Wavenumber::from(k);
    for (int n = 1; n <= max_n; ++n) {
      const FloquetGrid grid = floquet_grid(wn, n);
      const double bound = 1.0 / (72.0 * std::pow(n, 4));
      for (const auto& s : grid.samples) {
        const double d = distance_to_integers(s.alpha);
        if (!(d >= bound)) ++violations;
        worst_margin = std::min(worst_margin, d / bound);
      }
    }
  }
  r.passed = violations == 0;
  r.detail = "violations=" + std::to_string(violations) +
             " min dist/(1/(72N^4))=" + fmt(worst_margin);
  return r;
}

CheckResult check_gap_certificate(int draws, std::uint64_t seed) {
  CheckResult r{"pml gap certificate", true, ""};
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int violations = 0;
  double worst_ratio = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double k = 0.25 + 6.0 * unit(gen);
    const double delta = k * (0.01 + 0.98 * unit(gen));
    const cplx sigma(0.1 + 9.9 * unit(gen), 0.1 + 9.9 * unit(gen));
    // z either inside [0, k - delta] or in [k + delta, 3k + delta], sign random.
    double z = unit(gen) < 0.5 ? (k - delta) * unit(gen) : k + delta + 2.0 * k * unit(gen);
    if (unit(gen) < 0.5) z = -z;
    const double gap = std::abs(pml_coeff(k, z, 0, sigma) - branch_sqrt(k, z));
    const double bound = pml_gap_bound(k, delta, sigma);
    if (!(gap <= bound)) ++violations;
    worst_ratio = std::max(worst_ratio, gap / bound);
  }
  r.passed = violations == 0;
  r.detail = std::to_string(draws) + " draws, violations=" + std::to_string(violations) +
             " max gap/bound=" + fmt(worst_ratio);
  return r;
}

CheckResult check_bloch_roundtrip(double tolerance) {
  CheckResult r{"bloch transform roundtrip", true, ""};
  // Smooth bump supported in x1 in (-7, 9): spans cells -1, 0, 1.
  auto phi = [](double x1, double x2) -> cplx {
    const double t = (x1 - 1.0) / 8.0;
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t)) * cplx(std::cos(x2), std::sin(2.0 * x1 + x2));
  };
  std::vector<double> x1, x2;
  for (int i = 0; i <= 32; ++i) x1.push_back(-pi + 2.0 * pi * i / 32);
  for (int i = 0; i <= 4; ++i) x2.push_back(1.0 + 0.25 * i);
  const CompactField field = CompactField::sample(phi, -1, 1, x1, x2);

  const GaussRule g = legendre_rule(64);
  std::vector<double> alphas, weights;
  std::vector<PeriodicCellFunction> transforms;
  for (int m = 0; m < g.order; ++m) {
    alphas.push_back(0.5 * g.nodes[m]);
    weights.push_back(0.5 * g.weights[m]);
    transforms.push_back(bloch_transform(field, alphas.back()));
  }
  double worst = 0.0;
  for (int cell = -2; cell <= 2; ++cell) {
    const auto back = inverse_bloch_transform(transforms, alphas, weights, cell);
    for (std::size_t i1 = 0; i1 < x1.size(); ++i1) {
      for (std::size_t i2 = 0; i2 < x2.size(); ++i2) {
        worst = std::max(worst, std::abs(back[i1 * x2.size() + i2] - field.at(cell, i1, i2)));
      }
    }
  }
  r.passed = worst <= tolerance;
  r.detail = "max error=" + fmt(worst);
  return r;
}

std::vector<CheckResult> run_selftests() {
  return {check_gauss_rules(), check_floquet_separation({1.0, 1.5, 2.5, 5.0}),
          check_gap_certificate(), check_bloch_roundtrip()};
}

}  // namespace fbpml
