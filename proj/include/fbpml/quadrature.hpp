#pragma once

// Gauss-Legendre rules and the Floquet-parameter grid used to discretise the
// inverse Bloch integral in the exceptional case.

#include <span>
#include <stdexcept>
#include <vector>

#include "fbpml/spectral.hpp"

namespace fbpml {

inline constexpr int max_legendre_order = 512;

struct GaussRule {
  int order = 0;
  std::vector<double> nodes;    // increasing, in (-1, 1)
  std::vector<double> weights;  // positive, sum to 2
};

// Angular bracket ((2j-1) pi / (2N+1), 2j pi / (2N+1)) for the j-th zero of
// P_N(cos theta), j = 1..N in increasing theta.
struct AngleBracket {
  double lo;
  double hi;
};
AngleBracket bruns_bracket(int n, int j);

// Legendre polynomial value and derivative by three-term recurrence.
struct LegendreValue {
  double p;
  double dp;
};
LegendreValue legendre(int n, double x);

// Thrown when the bracketed Newton iteration fails; indicates a bug.
class QuadratureError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// N-point rule. Each node is found by Newton's method confined to its Bruns
// bracket, with bisection whenever a step would leave the bracket.
// Requires 1 <= n <= max_legendre_order.
GaussRule legendre_rule(int n);

struct FloquetSample {
  double alpha;
  double weight;
  int side;  // +1: alpha above the critical center, -1: below
};

// 2N Floquet parameters alpha = c +- ((d_j + 1) / (2 sqrt2))^2 with weights
// s_j (d_j + 1) / 4. Samples 0..N-1 are the + side in increasing j, samples
// N..2N-1 the - side.
struct FloquetGrid {
  double center = 0.0;
  int n = 0;
  std::vector<FloquetSample> samples;

  std::size_t size() const { return samples.size(); }
};

// Throws NonExceptionalWavenumber when 2k is not an integer.
FloquetGrid floquet_grid(const Wavenumber& k, int n);
FloquetGrid floquet_grid(const Wavenumber& k, const GaussRule& rule);

// Distance from alpha to the nearest integer.
double distance_to_integers(double alpha);

// Discrete inverse Bloch sum at one point: sum_j weight_j e^{i alpha_j x1}
// values[j], with values[j] = w(alpha_j, x_reduced) and x1 the unreduced
// abscissa. Summed in ascending sample order.
cplx synthesize(const FloquetGrid& grid, std::span<const cplx> values, double x1);

}  // namespace fbpml
