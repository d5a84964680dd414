#include "fbpml/bloch.hpp"

#include <stdexcept>

namespace fbpml {

CompactField CompactField::sample(const std::function<cplx(double, double)>& phi, int cell_lo,
                                  int cell_hi, std::vector<double> x1, std::vector<double> x2) {
  if (cell_hi < cell_lo) throw std::invalid_argument("empty cell range");
  CompactField f;
  f.cell_lo = cell_lo;
  f.cell_hi = cell_hi;
  f.x1 = std::move(x1);
  f.x2 = std::move(x2);
  f.values.reserve(static_cast<std::size_t>(f.cell_count()) * f.x1.size() * f.x2.size());
  for (int c = cell_lo; c <= cell_hi; ++c) {
    for (double a : f.x1) {
      for (double b : f.x2) f.values.push_back(phi(a + 2.0 * pi * c, b));
    }
  }
  return f;
}

cplx CompactField::at(int cell, std::size_t i1, std::size_t i2) const {
  if (cell < cell_lo || cell > cell_hi) return 0.0;
  const std::size_t per_cell = x1.size() * x2.size();
  return values[static_cast<std::size_t>(cell - cell_lo) * per_cell + i1 * x2.size() + i2];
}

PeriodicCellFunction bloch_transform(const CompactField& phi, double alpha) {
  PeriodicCellFunction out{phi.x1, phi.x2, std::vector<cplx>(phi.x1.size() * phi.x2.size())};
  for (std::size_t i1 = 0; i1 < phi.x1.size(); ++i1) {
    for (int c = phi.cell_lo; c <= phi.cell_hi; ++c) {
      const cplx phase = std::polar(1.0, -alpha * (phi.x1[i1] + 2.0 * pi * c));
      for (std::size_t i2 = 0; i2 < phi.x2.size(); ++i2) {
        out.values[i1 * phi.x2.size() + i2] += phi.at(c, i1, i2) * phase;
      }
    }
  }
  return out;
}

std::vector<cplx> inverse_bloch_transform(std::span<const PeriodicCellFunction> transforms,
                                          std::span<const double> alphas,
                                          std::span<const double> weights, int cell) {
  if (transforms.size() != alphas.size() || alphas.size() != weights.size() || transforms.empty()) {
    throw std::invalid_argument("inverse_bloch_transform: mismatched quadrature data");
  }
  const auto& x1 = transforms.front().x1;
  const std::size_t n2 = transforms.front().x2.size();
  std::vector<cplx> out(x1.size() * n2);
  for (std::size_t m = 0; m < transforms.size(); ++m) {
    for (std::size_t i1 = 0; i1 < x1.size(); ++i1) {
      const cplx phase = weights[m] * std::polar(1.0, alphas[m] * (x1[i1] + 2.0 * pi * cell));
      for (std::size_t i2 = 0; i2 < n2; ++i2) {
        out[i1 * n2 + i2] += phase * transforms[m].at(i1, i2);
      }
    }
  }
  return out;
}

}  // namespace fbpml
