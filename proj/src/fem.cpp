#include "fbpml/fem.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace fbpml {

namespace {

constexpr double residual_tolerance = 1e-10;
const cplx I(0.0, 1.0);

// Degree-2 interior rule on the reference triangle, barycentric coordinates.
constexpr std::array<std::array<double, 3>, 3> quad_points{{
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
    {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
}};

struct Element {
  std::array<int, 3> v;
  double area;
  std::array<double, 3> g1;  // d lambda_a / d x1
  std::array<double, 3> g2;  // d lambda_a / d x2
  std::array<Vec2, 3> q;     // quadrature points
};

Element element(const CellMesh& mesh, int t) {
  Element e;
  e.v = mesh.triangles[t];
  const Vec2& p0 = mesh.vertices[e.v[0]];
  const Vec2& p1 = mesh.vertices[e.v[1]];
  const Vec2& p2 = mesh.vertices[e.v[2]];
  const std::array<Vec2, 3> p{p0, p1, p2};
  e.area = mesh.triangle_area(t);
  for (int a = 0; a < 3; ++a) {
    const Vec2& b = p[(a + 1) % 3];
    const Vec2& c = p[(a + 2) % 3];
    e.g1[a] = (b.x2 - c.x2) / (2.0 * e.area);
    e.g2[a] = (c.x1 - b.x1) / (2.0 * e.area);
  }
  for (int k = 0; k < 3; ++k) {
    const auto& l = quad_points[k];
    e.q[k] = {l[0] * p0.x1 + l[1] * p1.x1 + l[2] * p2.x1, l[0] * p0.x2 + l[1] * p1.x2 + l[2] * p2.x2};
  }
  return e;
}

// Dof numbering: row-major over non-Dirichlet vertices, right column folded
// onto the left one. Top-row unknowns come last.
std::vector<int> number_dofs(const CellMesh& mesh, bool wall_on_top, int& count) {
  std::vector<int> dof(mesh.vertices.size(), -1);
  count = 0;
  const int last = wall_on_top ? mesh.rows - 1 : mesh.rows;
  for (int r = 1; r <= last; ++r) {
    for (int i = 0; i < mesh.n1; ++i) dof[mesh.vertex(r, i)] = count++;
    dof[mesh.vertex(r, mesh.n1)] = dof[mesh.vertex(r, 0)];
  }
  return dof;
}

// Coefficients of the domain form at a quadrature point: s for the x1
// derivative and mass terms, 1/s for the x2 derivative term.
using Stretch = std::function<cplx(double)>;

struct DomainAssembly {
  std::vector<Eigen::Triplet<cplx>> triplets;
  Eigen::VectorXcd rhs;
};

DomainAssembly assemble_domain(const CellMesh& mesh, const std::vector<int>& dof, int n,
                               double alpha, double k, const SourceTerm& f,
                               const Stretch& stretch) {
  DomainAssembly out;
  out.rhs = Eigen::VectorXcd::Zero(n);
  out.triplets.reserve(mesh.triangles.size() * 9);
  const double shift = k * k - alpha * alpha;
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const Element e = element(mesh, t);
    const double w = e.area / 3.0;
    std::array<cplx, 3> s{1.0, 1.0, 1.0};
    if (stretch) {
      for (int q = 0; q < 3; ++q) s[q] = stretch(e.q[q].x2);
    }
    std::array<cplx, 3> load{};
    if (!f.is_zero()) {
      for (int q = 0; q < 3; ++q) {
        load[q] = f(e.q[q].x1, e.q[q].x2);
        if (load[q] != 0.0) load[q] *= s[q] * std::polar(1.0, -alpha * e.q[q].x1);
      }
    }
    for (int a = 0; a < 3; ++a) {
      const int row = dof[e.v[a]];
      if (row < 0) continue;
      cplx b = 0.0;
      for (int q = 0; q < 3; ++q) b -= w * load[q] * quad_points[q][a];
      out.rhs[row] += b;
      for (int c = 0; c < 3; ++c) {
        const int col = dof[e.v[c]];
        if (col < 0) continue;
        cplx v = 0.0;
        for (int q = 0; q < 3; ++q) {
          const double la = quad_points[q][a], lc = quad_points[q][c];
          v += w * (s[q] * e.g1[c] * e.g1[a] + e.g2[c] * e.g2[a] / s[q] -
                    2.0 * I * alpha * s[q] * e.g1[c] * la - shift * s[q] * lc * la);
        }
        out.triplets.emplace_back(row, col, v);
      }
    }
  }
  return out;
}

std::vector<int> top_dofs(const CellMesh& mesh, const std::vector<int>& dof) {
  std::vector<int> out(mesh.n1);
  for (int i = 0; i < mesh.n1; ++i) out[i] = dof[mesh.vertex(mesh.rows, i)];
  return out;
}

// U[i][j] = conj(v_j[i]) over top unknowns, j = -J..J; the Fourier top form is
// U diag(-2 pi i c_j) U^H.
Eigen::MatrixXcd trace_adjoint(const CellMesh& mesh, int J) {
  Eigen::MatrixXcd U(mesh.n1, 2 * J + 1);
  for (int j = -J; j <= J; ++j) {
    const auto row = trace_fourier_row(mesh, j);
    for (int i = 0; i < mesh.n1; ++i) U(i, j + J) = std::conj(row[i]);
  }
  return U;
}

Eigen::VectorXcd symbols(const TopCondition& bc, double k, double alpha, int J) {
  Eigen::VectorXcd c(2 * J + 1);
  for (int j = -J; j <= J; ++j) c[j + J] = top_symbol(bc, k, alpha, j);
  return c;
}

void check_truncation(double k, int J) {
  if (J < static_cast<int>(std::ceil(k)) + 1) {
    throw std::invalid_argument("Fourier truncation J must be at least ceil(k) + 1");
  }
}

CellSolution make_solution(const CellMesh& mesh, const std::vector<int>& dof,
                           const Eigen::VectorXcd& x, double alpha, int J) {
  CellSolution s;
  s.alpha = alpha;
  s.J = J;
  s.nodal.assign(mesh.vertices.size(), 0.0);
  for (std::size_t v = 0; v < dof.size(); ++v) {
    if (dof[v] >= 0) s.nodal[v] = x[dof[v]];
  }
  if (J > 0) {
    std::vector<cplx> top(mesh.n1);
    for (int i = 0; i < mesh.n1; ++i) top[i] = s.nodal[mesh.vertex(mesh.rows, i)];
    s.trace_coeffs = trace_fourier(mesh, top, J);
  }
  return s;
}

using SparseLU = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

void factorize(SparseLU& lu, const SparseMatrix& a, double alpha) {
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "sparse LU failed at alpha = " << alpha << ": " << lu.lastErrorMessage();
    throw SolverError(msg.str(), alpha);
  }
}

double relative_residual(const Eigen::VectorXcd& r, const Eigen::VectorXcd& b) {
  const double nb = b.norm();
  return nb > 0.0 ? r.norm() / nb : r.norm();
}

void check_residual(double res, double alpha) {
  if (!(res <= residual_tolerance)) {
    std::ostringstream msg;
    msg << "cell solve residual " << res << " exceeds " << residual_tolerance
        << " at alpha = " << alpha;
    throw SolverError(msg.str(), alpha);
  }
}

}  // namespace

SourceTerm SourceTerm::disk(Evaluator f, Vec2 center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("source disk radius must be positive");
  SourceTerm s;
  s.f_ = std::move(f);
  s.shape_ = Shape::Disk;
  s.a_ = center;
  s.radius_ = radius;
  return s;
}

SourceTerm SourceTerm::box(Evaluator f, Vec2 lower, Vec2 upper) {
  if (!(upper.x1 > lower.x1) || !(upper.x2 > lower.x2)) {
    throw std::invalid_argument("source box must have positive extent");
  }
  SourceTerm s;
  s.f_ = std::move(f);
  s.shape_ = Shape::Box;
  s.a_ = lower;
  s.b_ = upper;
  return s;
}

bool SourceTerm::in_support(double x1, double x2) const {
  if (shape_ == Shape::Disk) {
    const double d1 = x1 - a_.x1, d2 = x2 - a_.x2;
    return d1 * d1 + d2 * d2 < radius_ * radius_;
  }
  return x1 >= a_.x1 && x1 <= b_.x1 && x2 >= a_.x2 && x2 <= b_.x2;
}

void SourceTerm::check_inside(const SurfaceProfile& surface, double top) const {
  if (is_zero()) return;
  double lo1, hi1;
  if (shape_ == Shape::Disk) {
    lo1 = a_.x1 - radius_;
    hi1 = a_.x1 + radius_;
  } else {
    lo1 = a_.x1;
    hi1 = b_.x1;
  }
  if (lo1 < -pi - 1e-12 || hi1 > pi + 1e-12) {
    throw std::invalid_argument("source support leaves the period cell in x1");
  }
  constexpr int samples = 512;
  for (int i = 0; i <= samples; ++i) {
    double x1, lo2, hi2;
    if (shape_ == Shape::Disk) {
      const double th = 2.0 * pi * i / samples;
      x1 = a_.x1 + radius_ * std::cos(th);
      lo2 = hi2 = a_.x2 + radius_ * std::sin(th);
    } else {
      x1 = lo1 + (hi1 - lo1) * i / samples;
      lo2 = a_.x2;
      hi2 = b_.x2;
    }
    if (!(lo2 > surface.zeta(x1)) || !(hi2 < top)) {
      throw std::invalid_argument("source support is not strictly between the surface and the top");
    }
  }
}

cplx top_symbol(const TopCondition& bc, double k, double alpha, int j) {
  if (const auto* p = std::get_if<PmlTbc>(&bc)) return pml_coeff(k, alpha, j, p->sigma);
  return dtn_coeff(k, alpha, j);
}

std::vector<cplx> trace_fourier_row(const CellMesh& mesh, int j) {
  const double dx = mesh.spacing();
  // Fourier integral of a hat function of width 2 dx: dx sinc^2(j dx / 2).
  const double half = 0.5 * j * dx;
  const double sinc = (j == 0) ? 1.0 : std::sin(half) / half;
  const double scale = dx * sinc * sinc / (2.0 * pi);
  std::vector<cplx> row(mesh.n1);
  for (int i = 0; i < mesh.n1; ++i) {
    row[i] = scale * std::polar(1.0, -j * mesh.vertices[mesh.vertex(mesh.rows, i)].x1);
  }
  return row;
}

std::vector<cplx> trace_fourier(const CellMesh& mesh, std::span<const cplx> top_values, int J) {
  if (top_values.size() != static_cast<std::size_t>(mesh.n1) &&
      top_values.size() != static_cast<std::size_t>(mesh.n1 + 1)) {
    throw std::invalid_argument("trace_fourier: wrong number of top values");
  }
  std::vector<cplx> out(2 * J + 1);
  for (int j = -J; j <= J; ++j) {
    const auto row = trace_fourier_row(mesh, j);
    cplx sum = 0.0;
    for (int i = 0; i < mesh.n1; ++i) sum += row[i] * top_values[i];
    out[j + J] = sum;
  }
  return out;
}

CellSystem assemble_cell(const CellMesh& mesh, const SurfaceProfile& surface, double alpha,
                         double k, const TopCondition& bc, int J, const SourceTerm& f) {
  check_truncation(k, J);
  f.check_inside(surface, mesh.top);
  CellSystem sys;
  sys.alpha = alpha;
  sys.k = k;
  sys.J = J;
  int n = 0;
  sys.dof = number_dofs(mesh, false, n);
  auto domain = assemble_domain(mesh, sys.dof, n, alpha, k, f, {});

  const auto top = top_dofs(mesh, sys.dof);
  const Eigen::MatrixXcd U = trace_adjoint(mesh, J);
  const Eigen::VectorXcd c = symbols(bc, k, alpha, J);
  const Eigen::MatrixXcd block = U * (-2.0 * pi * I * c).asDiagonal() * U.adjoint();
  for (int a = 0; a < mesh.n1; ++a) {
    for (int b = 0; b < mesh.n1; ++b) domain.triplets.emplace_back(top[a], top[b], block(a, b));
  }
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(domain.triplets.begin(), domain.triplets.end());
  sys.rhs = std::move(domain.rhs);
  return sys;
}

CellSolution solve_cell(const CellMesh& mesh, const CellSystem& system) {
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(system.size());
  double res = 0.0;
  if (system.rhs.squaredNorm() > 0.0) {
    SparseLU lu;
    factorize(lu, system.matrix, system.alpha);
    x = lu.solve(system.rhs);
    res = relative_residual(system.matrix * x - system.rhs, system.rhs);
    check_residual(res, system.alpha);
  }
  auto s = make_solution(mesh, system.dof, x, system.alpha, system.J);
  s.residual = res;
  return s;
}

CellSystem assemble_stretched(const CellMesh& mesh, const SurfaceProfile& surface, double alpha,
                              double k, const PmlSpec& pml, const SourceTerm& f) {
  pml.validate();
  if (mesh.interface_row >= mesh.rows ||
      std::abs(mesh.vertices[mesh.vertex(mesh.interface_row, 0)].x2 - pml.H) > 1e-12 ||
      std::abs(mesh.top - (pml.H + pml.lambda)) > 1e-12) {
    throw std::invalid_argument("stretched solve needs a layered mesh from H to H + lambda");
  }
  f.check_inside(surface, pml.H);
  CellSystem sys;
  sys.alpha = alpha;
  sys.k = k;
  sys.J = 0;
  int n = 0;
  sys.dof = number_dofs(mesh, true, n);
  const double layer_top = pml.H + pml.lambda;
  auto domain = assemble_domain(mesh, sys.dof, n, alpha, k, f, [&pml, layer_top](double x2) {
    return pml.stretch(std::min(x2, layer_top));
  });
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(domain.triplets.begin(), domain.triplets.end());
  sys.rhs = std::move(domain.rhs);
  return sys;
}

CellSolution solve_stretched(const CellMesh& mesh, const SurfaceProfile& surface, double alpha,
                             double k, const PmlSpec& pml, const SourceTerm& f) {
  return solve_cell(mesh, assemble_stretched(mesh, surface, alpha, k, pml, f));
}

struct CellOperator::Impl {
  const CellMesh* mesh;
  double alpha;
  double k;
  int J;
  std::vector<int> dof;
  std::vector<int> top;
  SparseMatrix matrix;  // with the exact transparent condition
  Eigen::VectorXcd rhs;
  Eigen::VectorXcd base;  // A0^{-1} b
  Eigen::MatrixXcd U;     // trace adjoint on top unknowns
  Eigen::MatrixXcd Z;     // A0^{-1} U (embedded)
  Eigen::MatrixXcd W;     // U^H Z
  Eigen::VectorXcd beta;  // exact symbols
  Eigen::VectorXcd Uh_base;
};

CellOperator::CellOperator(const CellMesh& mesh, const SurfaceProfile& surface, double alpha,
                           double k, int J, const SourceTerm& f)
    : impl_(std::make_unique<Impl>()) {
  auto sys = assemble_cell(mesh, surface, alpha, k, ExactDtn{}, J, f);
  auto& m = *impl_;
  m.mesh = &mesh;
  m.alpha = alpha;
  m.k = k;
  m.J = J;
  m.dof = std::move(sys.dof);
  m.top = top_dofs(mesh, m.dof);
  m.matrix = std::move(sys.matrix);
  m.rhs = std::move(sys.rhs);
  m.U = trace_adjoint(mesh, J);
  m.beta = symbols(ExactDtn{}, k, alpha, J);

  SparseLU lu;
  factorize(lu, m.matrix, alpha);
  const int n = static_cast<int>(m.rhs.size());
  Eigen::MatrixXcd Ufull = Eigen::MatrixXcd::Zero(n, 2 * J + 1);
  for (int i = 0; i < mesh.n1; ++i) Ufull.row(m.top[i]) = m.U.row(i);
  m.Z = lu.solve(Ufull);
  m.base = lu.solve(m.rhs);
  m.W = Eigen::MatrixXcd(2 * J + 1, 2 * J + 1);
  m.Uh_base = Eigen::VectorXcd(2 * J + 1);
  Eigen::MatrixXcd Ztop(mesh.n1, 2 * J + 1);
  Eigen::VectorXcd btop(mesh.n1);
  for (int i = 0; i < mesh.n1; ++i) {
    Ztop.row(i) = m.Z.row(m.top[i]);
    btop[i] = m.base[m.top[i]];
  }
  m.W = m.U.adjoint() * Ztop;
  m.Uh_base = m.U.adjoint() * btop;
}

CellOperator::CellOperator(CellOperator&&) noexcept = default;
CellOperator& CellOperator::operator=(CellOperator&&) noexcept = default;
CellOperator::~CellOperator() = default;

double CellOperator::alpha() const { return impl_->alpha; }

CellSolution CellOperator::solve(const TopCondition& bc) const {
  const auto& m = *impl_;
  Eigen::VectorXcd x = m.base;
  const int r = 2 * m.J + 1;
  if (std::holds_alternative<PmlTbc>(bc)) {
    // (A0 + U D U^H)^{-1} b = z - Z (I + D W)^{-1} D U^H z.
    const Eigen::VectorXcd d = -2.0 * pi * I * (symbols(bc, m.k, m.alpha, m.J) - m.beta);
    Eigen::MatrixXcd core = Eigen::MatrixXcd::Identity(r, r);
    core += d.asDiagonal() * m.W;
    const Eigen::VectorXcd y = core.partialPivLu().solve(d.asDiagonal() * m.Uh_base);
    x -= m.Z * y;
  }
  double res = 0.0;
  if (m.rhs.squaredNorm() > 0.0) {
    Eigen::VectorXcd ax = m.matrix * x;
    if (std::holds_alternative<PmlTbc>(bc)) {
      const Eigen::VectorXcd d = -2.0 * pi * I * (symbols(bc, m.k, m.alpha, m.J) - m.beta);
      Eigen::VectorXcd xt(m.mesh->n1);
      for (int i = 0; i < m.mesh->n1; ++i) xt[i] = x[m.top[i]];
      const Eigen::VectorXcd corr = m.U * (d.asDiagonal() * (m.U.adjoint() * xt));
      for (int i = 0; i < m.mesh->n1; ++i) ax[m.top[i]] += corr[i];
    }
    res = relative_residual(ax - m.rhs, m.rhs);
    check_residual(res, m.alpha);
  }
  auto s = make_solution(*m.mesh, m.dof, x, m.alpha, m.J);
  s.residual = res;
  return s;
}

Probe locate(const CellMesh& mesh, Vec2 x) {
  const double period = 2.0 * pi;
  double x1 = x.x1 - period * std::floor((x.x1 + pi) / period);
  if (x1 >= pi) x1 -= period;
  const int col = std::clamp(static_cast<int>(std::floor((x1 + pi) / mesh.spacing())), 0,
                             mesh.n1 - 1);
  Probe best;
  double best_min = -1e-10;
  for (int c : {col, col - 1, col + 1}) {
    if (c < 0 || c >= mesh.n1) continue;
    for (int r = 0; r < mesh.rows; ++r) {
      for (int half = 0; half < 2; ++half) {
        const int t = r * 2 * mesh.n1 + 2 * c + half;
        const auto& v = mesh.triangles[t];
        const Vec2 &p0 = mesh.vertices[v[0]], &p1 = mesh.vertices[v[1]], &p2 = mesh.vertices[v[2]];
        const double det = (p1.x1 - p0.x1) * (p2.x2 - p0.x2) - (p2.x1 - p0.x1) * (p1.x2 - p0.x2);
        const double l1 = ((x1 - p0.x1) * (p2.x2 - p0.x2) - (p2.x1 - p0.x1) * (x.x2 - p0.x2)) / det;
        const double l2 = ((p1.x1 - p0.x1) * (x.x2 - p0.x2) - (x1 - p0.x1) * (p1.x2 - p0.x2)) / det;
        const double l0 = 1.0 - l1 - l2;
        const double mn = std::min({l0, l1, l2});
        if (mn > best_min) {
          best_min = mn;
          best.triangle = t;
          best.bary = {l0, l1, l2};
        }
      }
    }
    if (best.triangle >= 0) break;
  }
  if (best.triangle < 0) throw std::out_of_range("point lies outside the meshed cell");
  return best;
}

cplx evaluate(const CellMesh& mesh, const CellSolution& w, const Probe& p) {
  const auto& v = mesh.triangles[p.triangle];
  return p.bary[0] * w.nodal[v[0]] + p.bary[1] * w.nodal[v[1]] + p.bary[2] * w.nodal[v[2]];
}

cplx evaluate(const CellMesh& mesh, const CellSolution& w, Vec2 x) {
  return evaluate(mesh, w, locate(mesh, x));
}

cplx synthesize(const FloquetGrid& grid, std::span<const CellSolution> solutions,
                const CellMesh& mesh, Vec2 x) {
  if (solutions.size() != grid.size()) {
    throw std::invalid_argument("synthesize: one cell solution per Floquet sample required");
  }
  const Probe p = locate(mesh, x);
  std::vector<cplx> values(solutions.size());
  for (std::size_t j = 0; j < solutions.size(); ++j) values[j] = evaluate(mesh, solutions[j], p);
  return synthesize(grid, values, x.x1);
}

std::vector<cplx> synthesize_trace(const FloquetGrid& grid, std::span<const CellSolution> solutions,
                                   const CellMesh& mesh, double x2, std::span<const double> x1s) {
  if (solutions.size() != grid.size()) {
    throw std::invalid_argument("synthesize: one cell solution per Floquet sample required");
  }
  std::vector<cplx> out(x1s.size());
  std::vector<cplx> values(solutions.size());
  for (std::size_t i = 0; i < x1s.size(); ++i) {
    const Probe p = locate(mesh, {x1s[i], x2});
    for (std::size_t j = 0; j < solutions.size(); ++j) values[j] = evaluate(mesh, solutions[j], p);
    out[i] = synthesize(grid, values, x1s[i]);
  }
  return out;
}

double l2_difference(const CellMesh& mesh, std::span<const cplx> a, std::span<const cplx> b,
                     int max_row) {
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    if (max_row >= 0 && mesh.triangle_row(t) >= max_row) continue;
    const auto& v = mesh.triangles[t];
    cplx total = 0.0;
    double sq = 0.0;
    for (int i : v) {
      const cplx d = a[i] - (b.empty() ? cplx(0.0) : b[i]);
      total += d;
      sq += std::norm(d);
    }
    sum += mesh.triangle_area(t) / 12.0 * (sq + std::norm(total));
  }
  return std::sqrt(sum);
}

double l2_norm(const CellMesh& mesh, std::span<const cplx> nodal, int max_row) {
  return l2_difference(mesh, nodal, {}, max_row);
}

}  // namespace fbpml
