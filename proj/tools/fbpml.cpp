#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "fbpml/config.hpp"
#include "fbpml/selftest.hpp"
#include "fbpml/study.hpp"

using namespace fbpml;

namespace {

constexpr int exit_config = 2;
constexpr int exit_solver = 3;

// Writes to `path`, or stdout when empty.
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  fn(out);
}

int run_quadrature(int n) {
  const GaussRule g = legendre_rule(n);
  std::cout << std::setprecision(17) << "j,node,weight\n";
  for (int j = 0; j < n; ++j) std::cout << j + 1 << ',' << g.nodes[j] << ',' << g.weights[j] << '\n';
  double sum = 0.0;
  for (double w : g.weights) sum += w;
  double exact = 0.0;
  for (int p = 0; p <= 2 * n - 1; ++p) {
    double q = 0.0;
    for (int i = 0; i < n; ++i) q += g.weights[i] * std::pow(g.nodes[i], p);
    exact = std::max(exact, std::abs(q - ((p % 2 == 0) ? 2.0 / (p + 1) : 0.0)));
  }
  int inside = 0;
  for (int j = 1; j <= n; ++j) {
    const double theta = std::acos(g.nodes[n - j]);
    const AngleBracket b = bruns_bracket(n, j);
    inside += theta > b.lo && theta < b.hi;
  }
  std::cout << std::setprecision(3) << "# weight sum error," << std::abs(sum - 2.0) << '\n'
            << "# max monomial error (degree <= " << 2 * n - 1 << ")," << exact << '\n'
            << "# nodes inside bruns brackets," << inside << '/' << n << '\n';
  return 0;
}

int run_selftest() {
  bool ok = true;
  for (const auto& r : run_selftests()) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet-Bloch PML solver for periodic-surface Helmholtz scattering"};
  app.require_subcommand(1);

  std::string config_path, out_path, mesh_path;
  int threads = 1;
  double rho = 0.0;
  bool dtn = false;
  int n = 16;

  auto* study = app.add_subcommand("study", "PML-strength sweep: error CSV with regression summary");
  study->add_option("config", config_path, "JSON config file")->required();
  study->add_option("--threads", threads, "worker threads for cell solves")->check(CLI::PositiveNumber);
  study->add_option("--out", out_path, "CSV output file (default stdout)");

  auto* solve = app.add_subcommand("solve", "single layer strength: trace CSV on the evaluation line");
  solve->add_option("config", config_path, "JSON config file")->required();
  auto* rho_opt = solve->add_option("--rho", rho, "PML strength");
  solve->add_flag("--dtn", dtn, "use the exact transparent condition instead of a PML");
  solve->add_option("--threads", threads, "worker threads for cell solves")->check(CLI::PositiveNumber);
  solve->add_option("--out", out_path, "trace CSV output file (default stdout)");
  solve->add_option("--mesh-dump", mesh_path, "write the cell mesh as plain text");

  auto* quad = app.add_subcommand("quadrature", "Gauss-Legendre rule with an invariant report");
  quad->add_option("--n", n, "rule order")->check(CLI::Range(1, max_legendre_order));

  app.add_subcommand("selftest", "quadrature, grid, certificate and transform suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    if (quad->parsed()) return run_quadrature(n);
    if (app.got_subcommand("selftest")) return run_selftest();

    const StudyConfig config = load_config(config_path);
    const RunOptions options{threads};
    if (study->parsed()) {
      const StudyResult result = run_study(config, options);
      emit(out_path, [&](std::ostream& os) { write_csv(os, config, result); });
      std::cerr << "slope " << result.fit.slope << ", R^2 " << result.fit.r_squared << '\n';
      return 0;
    }
    if (dtn == (rho_opt->count() > 0)) {
      std::cerr << "solve: give exactly one of --rho or --dtn\n";
      return exit_config;
    }
    if (!dtn && !(rho >= 0.0)) {
      std::cerr << "solve: --rho must be nonnegative\n";
      return exit_config;
    }
    if (!mesh_path.empty()) {
      const SurfaceProfile surface = config.surface();
      const CellMesh mesh = config.formulation == Formulation::Stretched
                                ? build_layered_mesh(surface, config.H, config.H + config.lambda, config.h)
                                : build_cell_mesh(surface, config.H, config.h);
      emit(mesh_path, [&](std::ostream& os) { write_mesh(os, mesh); });
    }
    std::optional<double> which;
    if (!dtn) which = rho;
    const std::optional<double> rhos[] = {which};
    const auto trace = compute_traces(config, rhos, config.N, options).front();
    emit(out_path, [&](std::ostream& os) { write_trace_csv(os, trace_abscissae(config), trace); });
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const StudyError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return exit_solver;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return exit_solver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
