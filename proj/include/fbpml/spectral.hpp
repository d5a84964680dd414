#pragma once

// Closed-form scalar kernels: branch square roots, transparent-boundary mode
// symbols with and without an absorbing layer, the layer stretching profile,
// and explicit decay bounds for the layer-induced symbol perturbation.

#include <complex>
#include <stdexcept>

namespace fbpml {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// Thrown when a Floquet grid is requested for a wave number with 2k not an
// integer. That regime has no coinciding cutoffs and is handled elsewhere.
class NonExceptionalWavenumber : public std::invalid_argument {
 public:
  explicit NonExceptionalWavenumber(double k);
  double k() const { return k_; }

 private:
  double k_;
};

// Wave number together with its cutoff data. kappa is the distance from k to
// the nearest integer; the cutoffs in one Floquet period sit at +-kappa.
struct Wavenumber {
  double k = 1.0;
  double kappa = 0.0;
  // 0 for integer k, 1/2 for 2k odd. Only meaningful when exceptional.
  double critical_center = 0.0;
  int j_plus = 0;
  int j_minus = 0;
  bool exceptional = false;

  // Throws std::invalid_argument unless k > 0 and finite.
  static Wavenumber from(double k);
};

// Absorbing layer of thickness lambda sitting on top of the line x2 = H with
// stretching s(x2) = 1 + rho * chi * ((x2 - H) / lambda)^m.
struct PmlSpec {
  double lambda = 1.0;
  double rho = 0.0;
  int m = 1;
  cplx chi{1.0, 1.0};
  double H = 0.0;

  // Throws std::invalid_argument on lambda <= 0, rho < 0, m < 1, or chi not
  // strictly inside the first quadrant.
  void validate() const;

  // Integrated stretching over the layer, lambda * (1 + rho * chi / (m + 1)).
  cplx sigma() const;

  // s(x2); 1 below H. Rejects x2 above the layer top.
  cplx stretch(double x2) const;
};

// sqrt(k^2 - z^2) with the branch that is nonnegative real for |z| <= k and
// positive imaginary for |z| > k.
cplx branch_sqrt(double k, double z);

// beta_j(alpha) = sqrt(k^2 - (alpha + j)^2); the exact transparent condition
// multiplies mode j by i * beta_j.
cplx dtn_coeff(double k, double alpha, int j);

// Below this |beta * sigma| the layer symbol is evaluated by its Laurent series.
inline constexpr double pml_series_threshold = 1e-4;

// beta * coth(-i * beta * sigma), continuous through beta = 0 where it equals
// i / sigma. Throws std::invalid_argument for sigma == 0.
cplx pml_symbol(cplx beta, cplx sigma);

namespace detail {
// The two evaluation paths of pml_symbol, exposed for continuity checks.
cplx pml_symbol_direct(cplx beta, cplx sigma);
cplx pml_symbol_series(cplx beta, cplx sigma);
}  // namespace detail

// h(alpha, sigma, j): layer-modified symbol of mode j.
cplx pml_coeff(double k, double alpha, int j, cplx sigma);

// Upper bound on |h - beta| valid for every real z with |z -+ k| >= delta.
// Returns the larger of the propagating-side bound
// (2 sqrt2 / Im sigma) exp(-sqrt(k delta) Im sigma) and the evanescent-side
// bound (sqrt6 / Re sigma) exp(-sqrt(2 k delta) Re sigma).
double pml_gap_bound(double k, double delta, cplx sigma);

// The two one-sided bounds separately.
double pml_gap_bound_propagating(double k, double delta, cplx sigma);
double pml_gap_bound_evanescent(double k, double delta, cplx sigma);

}  // namespace fbpml
