#pragma once

// P1 finite elements for the Bloch-shifted Helmholtz cell problem
//
//   Delta w + 2 i alpha d1 w + (k^2 - alpha^2) w = e^{-i alpha x1} f
//
// on one period cell, with w = 0 on the surface and either the truncated
// Fourier transparent condition on the top line or a stretched absorbing
// layer closed by a Dirichlet wall.

#include <Eigen/Sparse>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fbpml/mesh.hpp"
#include "fbpml/quadrature.hpp"
#include "fbpml/spectral.hpp"

namespace fbpml {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

// Source f with a declared support (disk or box) inside the base cell.
class SourceTerm {
 public:
  using Evaluator = std::function<cplx(double, double)>;

  SourceTerm() = default;  // f == 0
  static SourceTerm disk(Evaluator f, Vec2 center, double radius);
  static SourceTerm box(Evaluator f, Vec2 lower, Vec2 upper);

  bool is_zero() const { return !f_; }
  bool in_support(double x1, double x2) const;
  cplx operator()(double x1, double x2) const {
    return (f_ && in_support(x1, x2)) ? f_(x1, x2) : cplx(0.0);
  }

  // Throws std::invalid_argument unless the support lies in [-pi, pi] in x1
  // and strictly between the surface and `top` in x2.
  void check_inside(const SurfaceProfile& surface, double top) const;

 private:
  enum class Shape { Disk, Box };
  Evaluator f_;
  Shape shape_ = Shape::Box;
  Vec2 a_{0.0, 0.0};  // disk center or box lower corner
  Vec2 b_{0.0, 0.0};  // box upper corner
  double radius_ = 0.0;
};

struct ExactDtn {};
struct PmlTbc {
  cplx sigma;
};
using TopCondition = std::variant<ExactDtn, PmlTbc>;

// Symbol c_j of the top condition: beta_j for ExactDtn, h(alpha, sigma, j) otherwise.
cplx top_symbol(const TopCondition& bc, double k, double alpha, int j);

inline int default_truncation(double k) { return static_cast<int>(std::ceil(k)) + 10; }

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double alpha)
      : std::runtime_error(what), alpha_(alpha) {}
  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

// Linear system for one Floquet parameter. Periodic vertex pairs share one
// unknown; vertices with a Dirichlet condition carry none.
struct CellSystem {
  double alpha = 0.0;
  double k = 0.0;
  int J = 0;  // Fourier truncation of the top condition; 0 when walled
  std::vector<int> dof;  // per vertex, -1 when Dirichlet
  SparseMatrix matrix;
  Eigen::VectorXcd rhs;

  int size() const { return static_cast<int>(rhs.size()); }
};

struct CellSolution {
  double alpha = 0.0;
  std::vector<cplx> nodal;        // per mesh vertex; exactly zero on Dirichlet vertices
  std::vector<cplx> trace_coeffs; // w_hat(j) for j = -J..J on the top line (empty if walled)
  int J = 0;
  double residual = 0.0;          // ||A x - b|| / ||b||

  cplx trace_coeff(int j) const { return trace_coeffs[static_cast<std::size_t>(j + J)]; }
};

// Exact Fourier coefficients (1 / 2pi) int w(x1, top) e^{-i j x1} dx1 of the
// piecewise-linear trace. `top_values` holds the n1 periodic top vertices
// (the duplicate at x1 = pi may be included as an (n1+1)-th entry).
std::vector<cplx> trace_fourier(const CellMesh& mesh, std::span<const cplx> top_values, int J);

// Row of the linear map nodal top values -> w_hat(j).
std::vector<cplx> trace_fourier_row(const CellMesh& mesh, int j);

// Assembles the cell system with the Fourier top condition. Throws
// std::invalid_argument when J < ceil(k) + 1 or the source leaves the cell.
CellSystem assemble_cell(const CellMesh& mesh, const SurfaceProfile& surface, double alpha,
                         double k, const TopCondition& bc, int J, const SourceTerm& f);

// Sparse LU solve with a relative residual check of 1e-10. Throws SolverError
// on a singular factorization or an unmet residual.
CellSolution solve_cell(const CellMesh& mesh, const CellSystem& system);

// Stretched-coordinate absorbing layer on a mesh whose top is H + lambda and
// whose interface row sits at H, Dirichlet on both the surface and the top.
CellSystem assemble_stretched(const CellMesh& mesh, const SurfaceProfile& surface, double alpha,
                              double k, const PmlSpec& pml, const SourceTerm& f);
CellSolution solve_stretched(const CellMesh& mesh, const SurfaceProfile& surface, double alpha,
                             double k, const PmlSpec& pml, const SourceTerm& f);

// Cell problem at one alpha, factored once with the exact transparent
// condition. Any other top condition differs from it by a rank-(2J+1) term
// on the top unknowns, which is applied through the Woodbury identity, so
// each extra solve costs a dense (2J+1) x (2J+1) system.
class CellOperator {
 public:
  CellOperator(const CellMesh& mesh, const SurfaceProfile& surface, double alpha, double k,
               int J, const SourceTerm& f);
  CellOperator(CellOperator&&) noexcept;
  CellOperator& operator=(CellOperator&&) noexcept;
  ~CellOperator();

  double alpha() const;
  CellSolution solve(const TopCondition& bc) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Where a point falls in the mesh: triangle and barycentric weights.
struct Probe {
  int triangle = -1;
  std::array<double, 3> bary{};
};

// Folds x1 into [-pi, pi) and locates the point; throws std::out_of_range
// outside the meshed strip.
Probe locate(const CellMesh& mesh, Vec2 x);
cplx evaluate(const CellMesh& mesh, const CellSolution& w, const Probe& p);
cplx evaluate(const CellMesh& mesh, const CellSolution& w, Vec2 x);

// u_N(x) = sum_j weight_j e^{i alpha_j x1} w(alpha_j, x_reduced).
cplx synthesize(const FloquetGrid& grid, std::span<const CellSolution> solutions,
                const CellMesh& mesh, Vec2 x);

// u_N on the horizontal line x2 at each abscissa in x1s.
std::vector<cplx> synthesize_trace(const FloquetGrid& grid, std::span<const CellSolution> solutions,
                                   const CellMesh& mesh, double x2, std::span<const double> x1s);

// L2 norm of the P1 field over triangles in rows [0, max_row); max_row < 0 means all rows.
double l2_norm(const CellMesh& mesh, std::span<const cplx> nodal, int max_row = -1);
double l2_difference(const CellMesh& mesh, std::span<const cplx> a, std::span<const cplx> b,
                     int max_row = -1);

}  // namespace fbpml
