#pragma once

// Floquet-Bloch transform of fields with compact support in x1, sampled on a
// fixed rectangular grid that is repeated in every period cell.

#include <functional>
#include <span>
#include <vector>

#include "fbpml/spectral.hpp"

namespace fbpml {

// Values of a field on cells cell_lo..cell_hi (inclusive). Cell j covers
// x1 in [-pi + 2 pi j, pi + 2 pi j]; x1 holds the reduced abscissae in
// [-pi, pi]. The field is zero on every other cell.
struct CompactField {
  int cell_lo = 0;
  int cell_hi = 0;
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<cplx> values;  // [cell][i1][i2], row-major

  static CompactField sample(const std::function<cplx(double, double)>& phi, int cell_lo,
                             int cell_hi, std::vector<double> x1, std::vector<double> x2);

  int cell_count() const { return cell_hi - cell_lo + 1; }
  // Zero outside [cell_lo, cell_hi].
  cplx at(int cell, std::size_t i1, std::size_t i2) const;
};

// 2 pi-periodic function of x1 sampled on the reduced grid.
struct PeriodicCellFunction {
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<cplx> values;  // [i1][i2]

  cplx at(std::size_t i1, std::size_t i2) const { return values[i1 * x2.size() + i2]; }
};

// (F phi)(alpha, x) = sum_j phi(x1 + 2 pi j, x2) e^{-i alpha (x1 + 2 pi j)}.
PeriodicCellFunction bloch_transform(const CompactField& phi, double alpha);

// Quadrature inverse on cell `cell`: sum_m weights[m] e^{i alpha_m (x1 + 2 pi cell)}
// transforms[m](x). With alphas/weights a rule on a unit-length alpha
// interval this recovers phi on that cell. Returns values as [i1][i2].
std::vector<cplx> inverse_bloch_transform(std::span<const PeriodicCellFunction> transforms,
                                          std::span<const double> alphas,
                                          std::span<const double> weights, int cell);

}  // namespace fbpml
