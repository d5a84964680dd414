// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "fbpml/selftest.hpp"
#include "fbpml/study.hpp"
#include "oracles.hpp"

using namespace fbpml;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool passed, const std::string& detail) {
  std::cout << "CRITERION " << id << ": " << (passed ? "PASS" : "FAIL") << "  " << name << " | "
            << detail << std::endl;
  if (!passed) ++failures;
}

void info(const std::string& text) { std::cout << "  info: " << text << std::endl; }

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(3) << v;
  return s.str();
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / x.size();
    my += y[i] / x.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

void criterion_4() {
  const oracle::FlatModeCase c;
  const oracle::Bvp1d ref = c.reference();
  const SurfaceProfile s = c.surface();
  std::vector<double> lh, le, errs;
  for (double h : {0.2, 0.1, 0.05, 0.025}) {
    const CellMesh m = build_cell_mesh(s, c.top, h);
    const CellSolution w =
        solve_cell(m, assemble_cell(m, s, c.alpha, c.k, ExactDtn{}, default_truncation(c.k), c.source()));
    const auto e = oracle::l2_error(m, w.nodal, [&](double, double x2) { return ref(x2); });
    errs.push_back(e.error / e.norm);
    lh.push_back(std::log(h));
    le.push_back(std::log(errs.back()));
  }
  const double p = slope(lh, le);
  report(4, "cell solver vs 1D oracle", errs[2] <= 0.01 && std::abs(p - 2.0) <= 0.3,
         "rel L2 at h=0.05: " + sci(errs[2]) + " (<= 1e-2), errors " + sci(errs[0]) + " " + sci(errs[1]) +
             " " + sci(errs[2]) + " " + sci(errs[3]) + ", slope " + std::to_string(p) + " (2 +- 0.3)");
}

void criterion_5() {
  const StudyConfig c = StudyConfig::standard(1.0);
  const SurfaceProfile s = c.surface();
  const SourceTerm f = c.source_term();
  const CellMesh mesh = build_cell_mesh(s, c.H, c.h);
  const CellMesh layered = build_layered_mesh(s, c.H, c.H + c.lambda, c.h);
  const std::size_t below = mesh.vertices.size();
  const FloquetGrid grid = floquet_grid(Wavenumber::from(c.k), c.N);
  double worst = 0.0;
  for (const auto& sample : grid.samples) {
    const CellOperator op(mesh, s, sample.alpha, c.k, c.truncation(), f);
    for (double rho : {2.0, 8.0}) {
      const PmlSpec pml = c.pml(rho);
      const CellSolution tbc = op.solve(PmlTbc{pml.sigma()});
      const CellSolution st = solve_stretched(layered, s, sample.alpha, c.k, pml, f);
      const std::vector<cplx> restricted(st.nodal.begin(), st.nodal.begin() + below);
      worst = std::max(worst, l2_difference(mesh, tbc.nodal, restricted) / l2_norm(mesh, tbc.nodal));
    }
  }
  report(5, "stretched layer vs modified transparent condition", worst <= 1e-2,
         "max rel L2 on the cell below H over all " + std::to_string(grid.size()) +
             " Floquet samples, rho in {2, 8}: " + sci(worst) + " (<= 1e-2)");
}

void criteria_6_7() {
  // N = 32: at N = 16 the k = 5 table is limited by the Floquet quadrature
  // (see the N = 16 info lines), not by the layer.
  constexpr int n_accept = 32;
  bool ok6 = true, ok7 = true;
  std::ostringstream d6, d7;
  for (double k : {1.0, 1.5, 2.5, 5.0}) {
    StudyConfig c = StudyConfig::standard(k);
    c.n_doubling_report = false;
    for (int n : {16, n_accept}) {
      c.N = n;
      const StudyResult r = run_study(c);
      const double e2 = r.records.front().error, e16 = r.records.back().error;
      std::ostringstream row;
      row << "k=" << k << " N=" << n << " errors:";
      for (const auto& rec : r.records) row << ' ' << sci(rec.error);
      row << " | slope " << r.fit.slope << " R^2 " << r.fit.r_squared;
      info(row.str());
      if (n != n_accept) continue;
      const bool a = e2 <= 0.5, b = e2 / e16 >= 50.0, cc = e16 <= 1e-2;
      ok6 = ok6 && a && b && cc;
      d6 << " k=" << k << ": e(2)=" << sci(e2) << " ratio=" << sci(e2 / e16) << " e(16)=" << sci(e16) << ';';
      const bool fit = r.fit.r_squared >= 0.9 && r.fit.slope >= 0.2 && r.fit.slope <= 0.8;
      ok7 = ok7 && fit;
      d7 << " k=" << k << ": slope=" << std::setprecision(3) << r.fit.slope << " R^2=" << r.fit.r_squared
         << (fit ? "" : " (out)") << ';';
    }
  }
  report(6, "error table trend (N=32)", ok6,
         "need e(2) <= 0.5, e(2)/e(16) >= 50, e(16) <= 1e-2;" + d6.str());
  report(7, "log(-log e) vs log rho fit (N=32)", ok7, "need R^2 >= 0.9, slope in [0.2, 0.8];" + d7.str());
}

void criterion_8() {
  StudyConfig c = StudyConfig::standard(1.0);
  const std::optional<double> dtn[] = {std::nullopt};
  const auto x = trace_abscissae(c);
  std::vector<std::vector<cplx>> u;
  for (int n : {4, 8, 16, 32}) u.push_back(compute_traces(c, dtn, n).front());
  const double scale = trace_l2(x, u.back());
  std::vector<double> delta;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) delta.push_back(trace_l2_difference(x, u[i + 1], u[i]) / scale);

  StudyConfig fine = c;
  fine.h = c.h / 2.0;
  const auto uf = compute_traces(fine, dtn, 16).front();
  const double h_delta = trace_l2_difference(x, uf, u[2]) / scale;
  const double floor = 10.0 * h_delta;

  bool ok = true;
  std::ostringstream d;
  d << "deltas N=4->8 " << sci(delta[0]) << ", 8->16 " << sci(delta[1]) << ", 16->32 " << sci(delta[2])
    << "; h-refinement delta " << sci(h_delta) << ";";
  for (std::size_t i = 0; i + 1 < delta.size(); ++i) {
    const double ratio = delta[i] / delta[i + 1];
    const bool at_floor = delta[i + 1] < floor;
    ok = ok && (ratio >= 3.0 || at_floor);
    d << " ratio " << std::setprecision(3) << ratio << (at_floor ? " (floor)" : "");
  }
  report(8, "synthesis quadrature decay, exact DtN, k=1", ok, d.str());
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  auto lap = [&] {
    return std::to_string(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  };

  const CheckResult q = check_gauss_rules(64);
  report(1, "gauss-legendre suite N=1..64", q.passed, q.detail);
  const CheckResult s = check_floquet_separation({1.0, 1.5, 2.5, 5.0}, 64);
  report(2, "floquet grid separation", s.passed, s.detail);
  const CheckResult g = check_gap_certificate(10000);
  report(3, "pml gap certificate", g.passed, g.detail);
  criterion_4();
  criterion_5();
  info("elapsed " + lap() + " s");
  criteria_6_7();
  info("elapsed " + lap() + " s");
  criterion_8();
  const CheckResult b = check_bloch_roundtrip(1e-6);
  report(9, "bloch roundtrip", b.passed, b.detail + " (<= 1e-6)");
  info("elapsed " + lap() + " s");

  std::cout << (failures == 0 ? "ACCEPTANCE: all criteria passed" : "ACCEPTANCE: " + std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
