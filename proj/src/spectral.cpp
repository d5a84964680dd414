#include "fbpml/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fbpml {

NonExceptionalWavenumber::NonExceptionalWavenumber(double k)
    : std::invalid_argument("wave number k = " + std::to_string(k) +
                            " is not exceptional (2k must be an integer)"),
      k_(k) {}

Wavenumber Wavenumber::from(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument("wave number must be positive and finite");
  }
  Wavenumber w;
  w.k = k;
  const double nearest = std::round(k);
  w.kappa = std::abs(k - nearest);
  const double twice = 2.0 * k;
  w.exceptional = twice == std::round(twice);
  if (w.exceptional) {
    // kappa is exactly 0 or 1/2 here; both are representable.
    w.kappa = (std::round(twice) == 2.0 * nearest) ? 0.0 : 0.5;
    w.critical_center = w.kappa;
  }
  // For k above its nearest integer the pair satisfies kappa + j+ = k; below
  // it, the cutoff at -kappa carries j+ instead.
  const double up = k - w.kappa;
  w.j_plus = static_cast<int>(std::round(up == std::round(up) ? up : k + w.kappa));
  w.j_minus = -w.j_plus;
  return w;
}

void PmlSpec::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("PML thickness must be positive");
  if (!(rho >= 0.0)) throw std::invalid_argument("PML strength must be nonnegative");
  if (m < 1) throw std::invalid_argument("PML exponent must be a positive integer");
  if (!(chi.real() > 0.0) || !(chi.imag() > 0.0)) {
    throw std::invalid_argument("PML coefficient must have positive real and imaginary parts");
  }
}

cplx PmlSpec::sigma() const { return lambda * (1.0 + rho * chi / static_cast<double>(m + 1)); }

cplx PmlSpec::stretch(double x2) const {
  if (x2 > H + lambda) throw std::invalid_argument("x2 lies above the PML top");
  if (x2 < H) return 1.0;
  return 1.0 + rho * chi * std::pow((x2 - H) / lambda, m);
}

cplx branch_sqrt(double k, double z) {
  const double d = (k - z) * (k + z);
  if (d >= 0.0) return {std::sqrt(d), 0.0};
  return {0.0, std::sqrt(-d)};
}

cplx dtn_coeff(double k, double alpha, int j) { return branch_sqrt(k, alpha + j); }

namespace detail {

cplx pml_symbol_direct(cplx beta, cplx sigma) {
  const cplx z = cplx(0.0, -1.0) * beta * sigma;
  // coth with the exponential taken on the decaying side.
  if (z.real() >= 0.0) {
    const cplx e = std::exp(-2.0 * z);
    return beta * (1.0 + e) / (1.0 - e);
  }
  const cplx e = std::exp(2.0 * z);
  return -beta * (1.0 + e) / (1.0 - e);
}

cplx pml_symbol_series(cplx beta, cplx sigma) {
  const cplx i(0.0, 1.0);
  const cplx b2 = beta * beta;
  return i / sigma - i * b2 * sigma / 3.0 - i * b2 * b2 * sigma * sigma * sigma / 45.0;
}

}  // namespace detail

cplx pml_symbol(cplx beta, cplx sigma) {
  if (sigma == cplx(0.0, 0.0)) throw std::invalid_argument("sigma must be nonzero");
  if (std::abs(beta * sigma) < pml_series_threshold) return detail::pml_symbol_series(beta, sigma);
  return detail::pml_symbol_direct(beta, sigma);
}

cplx pml_coeff(double k, double alpha, int j, cplx sigma) {
  return pml_symbol(branch_sqrt(k, alpha + j), sigma);
}

namespace {

void check_gap_args(double k, double delta, cplx sigma) {
  if (!(delta > 0.0) || !(delta < k)) throw std::invalid_argument("delta must lie in (0, k)");
  if (!(sigma.real() > 0.0) || !(sigma.imag() > 0.0)) {
    throw std::invalid_argument("sigma must have positive real and imaginary parts");
  }
}

}  // namespace

double pml_gap_bound_propagating(double k, double delta, cplx sigma) {
  check_gap_args(k, delta, sigma);
  const double s2 = sigma.imag();
  return 2.0 * std::sqrt(2.0) / s2 * std::exp(-std::sqrt(k * delta) * s2);
}

double pml_gap_bound_evanescent(double k, double delta, cplx sigma) {
  check_gap_args(k, delta, sigma);
  const double s1 = sigma.real();
  return std::sqrt(6.0) / s1 * std::exp(-std::sqrt(2.0 * k * delta) * s1);
}

double pml_gap_bound(double k, double delta, cplx sigma) {
  return std::max(pml_gap_bound_propagating(k, delta, sigma),
                  pml_gap_bound_evanescent(k, delta, sigma));
}

}  // namespace fbpml
