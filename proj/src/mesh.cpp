#include "fbpml/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "fbpml/spectral.hpp"

namespace fbpml {

namespace {

constexpr int surface_samples = 4096;

void fill_extrema(SurfaceProfile& s) {
  s.zeta_min = s.zeta_max = s.zeta(-pi);
  for (int i = 1; i < surface_samples; ++i) {
    const double z = s.zeta(-pi + 2.0 * pi * i / surface_samples);
    s.zeta_min = std::min(s.zeta_min, z);
    s.zeta_max = std::max(s.zeta_max, z);
  }
}

double angle_at(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double ux = b.x1 - a.x1, uy = b.x2 - a.x2;
  const double vx = c.x1 - a.x1, vy = c.x2 - a.x2;
  return std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
}

double min_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
  return std::min({angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)});
}

}  // namespace

SurfaceProfile SurfaceProfile::fourier(double mean, std::vector<double> sin_coeffs,
                                       std::vector<double> cos_coeffs, double H) {
  auto zeta = [mean, sc = std::move(sin_coeffs), cc = std::move(cos_coeffs)](double x) {
    double z = mean;
    for (std::size_t n = 0; n < sc.size(); ++n) z += sc[n] * std::sin((n + 1.0) * x);
    for (std::size_t n = 0; n < cc.size(); ++n) z += cc[n] * std::cos((n + 1.0) * x);
    return z;
  };
  return from_function(std::move(zeta), H);
}

SurfaceProfile SurfaceProfile::flat(double height, double H) {
  return from_function([height](double) { return height; }, H);
}

SurfaceProfile SurfaceProfile::from_function(std::function<double(double)> zeta, double H) {
  SurfaceProfile s;
  s.zeta = std::move(zeta);
  s.H = H;
  fill_extrema(s);
  s.validate();
  return s;
}

void SurfaceProfile::validate() const {
  if (!zeta) throw std::invalid_argument("surface profile has no height function");
  if (std::abs(zeta(-pi) - zeta(pi)) > 1e-12) {
    throw std::invalid_argument("surface profile is not 2 pi-periodic");
  }
  if (!(H > zeta_max)) throw std::invalid_argument("H must lie above the surface");
}

double CellMesh::spacing() const { return 2.0 * pi / n1; }

double CellMesh::triangle_area(int t) const {
  const auto& [a, b, c] = triangles[t];
  const Vec2 &p = vertices[a], &q = vertices[b], &r = vertices[c];
  return 0.5 * ((q.x1 - p.x1) * (r.x2 - p.x2) - (r.x1 - p.x1) * (q.x2 - p.x2));
}

double CellMesh::min_angle_degrees() const {
  double m = pi;
  for (const auto& [a, b, c] : triangles) {
    m = std::min(m, min_angle(vertices[a], vertices[b], vertices[c]));
  }
  return m * 180.0 / pi;
}

namespace {

CellMesh make_grid(const SurfaceProfile& surface, double interface, double top, double h,
                   bool layered, int n1) {
  CellMesh mesh;
  mesh.h = h;
  mesh.top = top;
  mesh.n1 = n1;
  const int n2 = static_cast<int>(std::ceil((interface - surface.zeta_min) / h));
  if (n2 < 2) throw std::invalid_argument("mesh too coarse: fewer than two layers");
  const int extra = layered ? static_cast<int>(std::ceil((top - interface) / h)) : 0;
  if (layered && extra < 1) throw std::invalid_argument("layer above interface is empty");
  mesh.interface_row = n2;
  mesh.rows = n2 + extra;

  const int cols = mesh.n1 + 1;
  const double dx = mesh.spacing();
  mesh.vertices.resize(static_cast<std::size_t>(mesh.rows + 1) * cols);
  for (int i = 0; i < cols; ++i) {
    // Column n1 is placed at exactly pi so the periodic offset is exact.
    const double x1 = (i == mesh.n1) ? pi : -pi + i * dx;
    const double z = surface.zeta(i == mesh.n1 ? -pi : x1);
    for (int r = 0; r <= mesh.rows; ++r) {
      double x2;
      if (r <= n2) {
        const double s = static_cast<double>(r) / n2;
        x2 = (r == n2) ? interface : (1.0 - s) * z + s * interface;
      } else {
        x2 = (r == mesh.rows) ? top : interface + (top - interface) * (r - n2) / extra;
      }
      mesh.vertices[mesh.vertex(r, i)] = {x1, x2};
    }
  }

  mesh.triangles.reserve(static_cast<std::size_t>(2) * mesh.n1 * mesh.rows);
  for (int r = 0; r < mesh.rows; ++r) {
    for (int i = 0; i < mesh.n1; ++i) {
      const int a = mesh.vertex(r, i), b = mesh.vertex(r, i + 1);
      const int c = mesh.vertex(r + 1, i + 1), d = mesh.vertex(r + 1, i);
      const auto& v = mesh.vertices;
      // Split a-b-c-d along whichever diagonal gives the larger minimum angle.
      const double ac = std::min(min_angle(v[a], v[b], v[c]), min_angle(v[a], v[c], v[d]));
      const double bd = std::min(min_angle(v[a], v[b], v[d]), min_angle(v[b], v[c], v[d]));
      if (ac >= bd) {
        mesh.triangles.push_back({a, b, c});
        mesh.triangles.push_back({a, c, d});
      } else {
        mesh.triangles.push_back({a, b, d});
        mesh.triangles.push_back({b, c, d});
      }
    }
  }

  for (int r = 0; r <= mesh.rows; ++r) {
    mesh.periodic_pairs.emplace_back(mesh.vertex(r, 0), mesh.vertex(r, mesh.n1));
  }
  for (int i = 0; i < cols; ++i) {
    mesh.bottom.push_back(mesh.vertex(0, i));
    mesh.top_edge.push_back(mesh.vertex(mesh.rows, i));
  }
  return mesh;
}

CellMesh make_mesh(const SurfaceProfile& surface, double interface, double top, double h,
                   bool layered) {
  if (!(h > 0.0)) throw std::invalid_argument("mesh size must be positive");
  if (!(interface > surface.zeta_max)) {
    throw std::invalid_argument("mesh top must lie above the surface maximum");
  }
  // Thin columns above surface crests get squat cells; extra columns restore
  // the angle bound.
  const int base = static_cast<int>(std::ceil(2.0 * pi / h));
  for (int n1 = base; n1 <= 4 * base; ++n1) {
    CellMesh mesh = make_grid(surface, interface, top, h, layered, n1);
    if (mesh.min_angle_degrees() >= min_mesh_angle_degrees) return mesh;
  }
  throw std::invalid_argument("surface too steep for the layered mesh angle bound");
}

}  // namespace

CellMesh build_cell_mesh(const SurfaceProfile& surface, double top, double h) {
  return make_mesh(surface, top, top, h, false);
}

CellMesh build_layered_mesh(const SurfaceProfile& surface, double interface, double top,
                            double h) {
  if (!(top > interface)) throw std::invalid_argument("layer top must lie above the interface");
  return make_mesh(surface, interface, top, h, true);
}

void write_mesh(std::ostream& out, const CellMesh& mesh) {
  out << "# fbpml mesh: " << mesh.vertices.size() << " vertices, " << mesh.triangles.size()
      << " triangles\n";
  out.precision(17);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    out << "v " << i << ' ' << mesh.vertices[i].x1 << ' ' << mesh.vertices[i].x2 << '\n';
  }
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& [a, b, c] = mesh.triangles[t];
    out << "t " << t << ' ' << a << ' ' << b << ' ' << c << '\n';
  }
}

}  // namespace fbpml
