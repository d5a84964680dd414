#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

namespace fbpml {

// Periodic surface x2 = zeta(x1) with period 2 pi, and the height H of the
// line where the transparent boundary condition is imposed.
struct SurfaceProfile {
  std::function<double(double)> zeta;
  double zeta_min = 0.0;
  double zeta_max = 0.0;
  double H = 1.0;

  // zeta = mean + sum_n sin_coeffs[n-1] sin(n x1) + sum_n cos_coeffs[n-1] cos(n x1).
  static SurfaceProfile fourier(double mean, std::vector<double> sin_coeffs,
                                std::vector<double> cos_coeffs, double H);
  static SurfaceProfile flat(double height, double H);
  // Samples an arbitrary profile to fill zeta_min / zeta_max and validates it.
  static SurfaceProfile from_function(std::function<double(double)> zeta, double H);

  // Throws std::invalid_argument if zeta is not periodic or H <= zeta_max.
  void validate() const;
};

struct Vec2 {
  double x1;
  double x2;
};

// Structured triangulation of one period cell between the surface and a
// horizontal top line. Vertices form (rows + 1) x (n1 + 1) in row-major order;
// column n1 duplicates column 0 shifted by 2 pi. Row 0 lies on the surface.
struct CellMesh {
  int n1 = 0;
  int rows = 0;
  // Rows 0..interface_row are surface-fitted; rows above it are flat layers.
  int interface_row = 0;
  double h = 0.0;
  double top = 0.0;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<std::pair<int, int>> periodic_pairs;  // (left, right)
  std::vector<int> bottom;    // on the surface
  std::vector<int> top_edge;  // on the top line, increasing x1, both ends included

  int vertex(int row, int col) const { return row * (n1 + 1) + col; }
  // Row of layer cells that triangle t belongs to.
  int triangle_row(int t) const { return t / (2 * n1); }
  double spacing() const;  // horizontal spacing 2 pi / n1
  double triangle_area(int t) const;
  double min_angle_degrees() const;
};

inline constexpr double min_mesh_angle_degrees = 20.0;

// Layered mapped mesh: an n1 x n2 grid on [-pi, pi] x [0, 1] mapped by
// (x1, (1 - s) zeta(x1) + s top), each quad cut along the diagonal with the
// larger minimum angle. n2 = ceil((top - zeta_min) / h); n1 starts at
// ceil(2 pi / h) and grows until every angle is at least
// min_mesh_angle_degrees. Throws std::invalid_argument if top <= zeta_max,
// h <= 0, n2 < 2, or the angle bound needs more than 4x the base columns.
CellMesh build_cell_mesh(const SurfaceProfile& surface, double top, double h);

// build_cell_mesh(surface, interface, h) with ceil((top - interface) / h)
// flat layers stacked on top, so the part below `interface` is identical.
CellMesh build_layered_mesh(const SurfaceProfile& surface, double interface, double top, double h);

// Plain-text dump: a header line, then "v index x1 x2" and "t index a b c".
void write_mesh(std::ostream& out, const CellMesh& mesh);

}  // namespace fbpml
