#include <cmath>

#include "doctest.h"
#include "fbpml/bloch.hpp"
#include "fbpml/quadrature.hpp"
#include "fbpml/selftest.hpp"

using namespace fbpml;

TEST_CASE("small gauss rules in closed form") {
  const GaussRule g1 = legendre_rule(1);
  CHECK(g1.nodes[0] == doctest::Approx(0.0));
  CHECK(g1.weights[0] == doctest::Approx(2.0));

  const GaussRule g2 = legendre_rule(2);
  CHECK(g2.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(g2.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(g2.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g2.weights[1] == doctest::Approx(1.0).epsilon(1e-15));

  const GaussRule g3 = legendre_rule(3);
  CHECK(g3.nodes[0] == doctest::Approx(-std::sqrt(0.6)).epsilon(1e-15));
  CHECK(std::abs(g3.nodes[1]) < 1e-15);
  CHECK(g3.nodes[2] == doctest::Approx(std::sqrt(0.6)).epsilon(1e-15));
  CHECK(g3.weights[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
  CHECK(g3.weights[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
  CHECK(g3.weights[2] == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("N = 16 integrates x^28") {
  const GaussRule g = legendre_rule(16);
  double q = 0.0;
  for (int i = 0; i < 16; ++i) q += g.weights[i] * std::pow(g.nodes[i], 28);
  CHECK(std::abs(q - 2.0 / 29.0) < 1e-13);
}

TEST_CASE("gauss rule invariants for N = 1..64") {
  const CheckResult r = check_gauss_rules(64);
  INFO(r.detail);
  CHECK(r.passed);
  for (int n = 1; n <= 64; ++n) {
    const GaussRule g = legendre_rule(n);
    REQUIRE(g.order == n);
    for (int j = 0; j < n; ++j) {
      CHECK(std::abs(g.nodes[j] + g.nodes[n - 1 - j]) <= 1e-13);
      if (j > 0) CHECK(g.nodes[j] > g.nodes[j - 1]);
    }
  }
}

TEST_CASE("large orders and argument checks") {
  const GaussRule g = legendre_rule(max_legendre_order);
  double sum = 0.0;
  for (double w : g.weights) sum += w;
  CHECK(std::abs(sum - 2.0) < 1e-12);
  CHECK_THROWS_AS(legendre_rule(0), std::invalid_argument);
  CHECK_THROWS_AS(legendre_rule(max_legendre_order + 1), std::invalid_argument);
}

TEST_CASE("geometric convergence for an analytic integrand") {
  // 1 / (t^2 + 1/4) on [-1, 1]; poles at +-i/2.
  const double exact = 4.0 * std::atan(2.0);
  double e[25] = {};
  for (int n = 4; n <= 24; ++n) {
    const GaussRule g = legendre_rule(n);
    double q = 0.0;
    for (int i = 0; i < n; ++i) q += g.weights[i] / (g.nodes[i] * g.nodes[i] + 0.25);
    e[n] = std::abs(q - exact);
  }
  for (int n = 4; n < 24; ++n) {
    INFO("N = " << n);
    CHECK(e[n + 1] / e[n] < 0.7);
  }
}

TEST_CASE("floquet grid examples") {
  const FloquetGrid g1 = floquet_grid(Wavenumber::from(1.0), 1);
  REQUIRE(g1.size() == 2);
  CHECK(g1.center == 0.0);
  CHECK(g1.samples[0].alpha == doctest::Approx(0.125));
  CHECK(g1.samples[1].alpha == doctest::Approx(-0.125));
  CHECK(g1.samples[0].weight == doctest::Approx(0.5));
  CHECK(g1.samples[1].weight == doctest::Approx(0.5));
  CHECK(g1.samples[0].side == 1);
  CHECK(g1.samples[1].side == -1);

  const FloquetGrid g15 = floquet_grid(Wavenumber::from(1.5), 1);
  CHECK(g15.center == 0.5);
  CHECK(g15.samples[0].alpha == doctest::Approx(0.625));
  CHECK(g15.samples[1].alpha == doctest::Approx(0.375));

  const FloquetGrid g2 = floquet_grid(Wavenumber::from(1.0), 2);
  REQUIRE(g2.size() == 4);
  const double lo = std::pow((1.0 - 1.0 / std::sqrt(3.0)) / (2.0 * std::sqrt(2.0)), 2);
  const double hi = std::pow((1.0 + 1.0 / std::sqrt(3.0)) / (2.0 * std::sqrt(2.0)), 2);
  CHECK(lo == doctest::Approx(0.0223291).epsilon(1e-6));
  CHECK(hi == doctest::Approx(0.3110042).epsilon(1e-6));
  CHECK(g2.samples[0].alpha == doctest::Approx(lo).epsilon(1e-14));
  CHECK(g2.samples[1].alpha == doctest::Approx(hi).epsilon(1e-14));
  CHECK(g2.samples[2].alpha == doctest::Approx(-lo).epsilon(1e-14));
  CHECK(g2.samples[3].alpha == doctest::Approx(-hi).epsilon(1e-14));
}

TEST_CASE("floquet grid invariants") {
  for (double k : {0.5, 1.0, 1.5, 2.0, 2.5, 5.0}) {
    const Wavenumber wn = Wavenumber::from(k);
    for (int n = 1; n <= 64; ++n) {
      const FloquetGrid g = floquet_grid(wn, n);
      REQUIRE(g.size() == static_cast<std::size_t>(2 * n));
      double total = 0.0;
      for (const auto& s : g.samples) {
        CHECK(s.weight > 0.0);
        CHECK(s.alpha != g.center);
        CHECK(s.alpha > g.center - 0.5);
        CHECK(s.alpha < g.center + 0.5);
        CHECK((s.alpha - g.center) * s.side > 0.0);
        total += s.weight;
      }
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
  }
  const CheckResult r = check_floquet_separation({1.0, 1.5, 2.5, 5.0}, 64);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("floquet grid rejects non-exceptional k") {
  CHECK_THROWS_AS(floquet_grid(Wavenumber::from(1.3), 4), NonExceptionalWavenumber);
  try {
    floquet_grid(Wavenumber::from(0.7), 2);
  } catch (const NonExceptionalWavenumber& e) {
    CHECK(e.k() == 0.7);
  }
}

TEST_CASE("discrete synthesis") {
  const FloquetGrid g = floquet_grid(Wavenumber::from(1.0), 4);
  std::vector<cplx> zeros(g.size(), 0.0);
  CHECK(synthesize(g, zeros, 0.7) == cplx(0.0));

  // One-sided single sample with w == 1.
  FloquetGrid one;
  one.center = 0.0;
  one.n = 1;
  one.samples = {{0.125, 0.5, 1}};
  const std::vector<cplx> ones{1.0};
  for (double x : {-3.0, 0.0, 2.0, 9.0}) {
    CHECK(std::abs(synthesize(one, ones, x) - 0.5 * std::polar(1.0, 0.125 * x)) < 1e-15);
  }
  CHECK_THROWS_AS(synthesize(g, ones, 0.0), std::invalid_argument);
}

TEST_CASE("synthesis converges geometrically against a dense rule") {
  // sqrt|alpha| / (1 + alpha^2) has a branch point at the center; after the
  // t^2 substitution it is analytic, so the sum converges geometrically.
  const Wavenumber wn = Wavenumber::from(1.0);
  auto sum_at = [&](int n, double x1) {
    const FloquetGrid g = floquet_grid(wn, n);
    std::vector<cplx> v;
    for (const auto& s : g.samples) v.push_back(std::sqrt(std::abs(s.alpha)) / (1.0 + s.alpha * s.alpha));
    return synthesize(g, v, x1);
  };
  const double x1 = 1.3;
  const cplx dense = sum_at(512, x1);
  double prev = 1.0;
  for (int n : {2, 4, 8, 16}) {
    const double err = std::abs(sum_at(n, x1) - dense);
    INFO("N = " << n << " err = " << err);
    CHECK(err < 0.2 * prev);
    prev = err;
  }
  CHECK(prev < 1e-10);
}

TEST_CASE("bloch transform single cell and periodization") {
  std::vector<double> x1, x2{0.5, 1.0};
  for (int i = 0; i <= 16; ++i) x1.push_back(-pi + 2.0 * pi * i / 16);
  auto phi = [](double a, double b) -> cplx { return cplx(std::cos(a) + b, a * b); };
  const CompactField one = CompactField::sample(phi, 0, 0, x1, x2);
  const double alpha = 0.3;
  const PeriodicCellFunction t = bloch_transform(one, alpha);
  for (std::size_t i = 0; i < x1.size(); ++i) {
    for (std::size_t j = 0; j < x2.size(); ++j) {
      CHECK(std::abs(t.at(i, j) - phi(x1[i], x2[j]) * std::polar(1.0, -alpha * x1[i])) < 1e-14);
    }
  }

  const CompactField three = CompactField::sample(phi, -1, 1, x1, x2);
  const PeriodicCellFunction p = bloch_transform(three, 0.0);
  for (std::size_t i = 0; i < x1.size(); ++i) {
    const cplx expected = phi(x1[i] - 2 * pi, 1.0) + phi(x1[i], 1.0) + phi(x1[i] + 2 * pi, 1.0);
    CHECK(std::abs(p.at(i, 1) - expected) < 1e-13);
  }
}

TEST_CASE("bloch transform is periodic in x1") {
  // Smooth field supported on x1 in (-6, 6).
  auto phi = [](double a, double b) -> cplx {
    const double t = a / 6.0;
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t)) * cplx(b, std::sin(a));
  };
  std::vector<double> x1, x2{1.0, 2.0};
  for (int i = 0; i <= 20; ++i) x1.push_back(-pi + 2.0 * pi * i / 20);
  const CompactField f = CompactField::sample(phi, -1, 1, x1, x2);
  for (double alpha : {-0.4, 0.0, 0.1, 0.37}) {
    const PeriodicCellFunction t = bloch_transform(f, alpha);
    for (std::size_t j = 0; j < x2.size(); ++j) {
      CHECK(std::abs(t.at(0, j) - t.at(x1.size() - 1, j)) <= 1e-13);
    }
  }
}

TEST_CASE("bloch roundtrip") {
  const CheckResult r = check_bloch_roundtrip(1e-6);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("compact field is zero outside its cells") {
  const CompactField f = CompactField::sample([](double, double) { return cplx(1.0); }, 0, 1,
                                              {0.0, 1.0}, {0.0});
  CHECK(f.at(2, 0, 0) == cplx(0.0));
  CHECK(f.at(-1, 1, 0) == cplx(0.0));
  CHECK(f.at(1, 1, 0) == cplx(1.0));
}
