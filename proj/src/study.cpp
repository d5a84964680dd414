#include "fbpml/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace fbpml {

RegressionFit regression(std::span<const ErrorRecord> records) {
  if (records.size() < 2) throw std::invalid_argument("regression needs at least two records");
  std::vector<double> x, y;
  for (const auto& r : records) {
    if (!(r.error > 0.0) || !(r.error < 1.0)) {
      std::ostringstream msg;
      msg << "regression: error " << r.error << " at rho = " << r.rho
          << " is outside (0, 1); log(-log error) is undefined";
      throw std::invalid_argument(msg.str());
    }
    if (!(r.rho > 0.0)) throw std::invalid_argument("regression: rho must be positive");
    x.push_back(std::log(r.rho));
    y.push_back(std::log(-std::log(r.error)));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("regression: all rho values coincide");
  RegressionFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  // Constant data is fitted exactly by the flat line.
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

std::vector<double> trace_abscissae(const StudyConfig& config) {
  const int n = config.trace_points;
  const auto [lo, hi] = config.eval_interval;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = lo + (hi - lo) * i / (n - 1);
  x.back() = hi;
  return x;
}

double trace_l2_difference(std::span<const double> x1, std::span<const cplx> a,
                           std::span<const cplx> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < x1.size(); ++i) {
    const double d0 = std::norm(a[i] - (b.empty() ? cplx(0.0) : b[i]));
    const double d1 = std::norm(a[i + 1] - (b.empty() ? cplx(0.0) : b[i + 1]));
    sum += 0.5 * (x1[i + 1] - x1[i]) * (d0 + d1);
  }
  return std::sqrt(sum);
}

double trace_l2(std::span<const double> x1, std::span<const cplx> values) {
  return trace_l2_difference(x1, values, {});
}

namespace {

// Runs task(i) for i in [0, count) on a fixed pool; rethrows the failure with
// the lowest index so error reports do not depend on scheduling.
template <class Task>
void parallel_for(std::size_t count, int threads, Task&& task) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string describe(std::optional<double> rho, double alpha, const char* what) {
  std::ostringstream msg;
  msg << "cell solve failed at ";
  if (rho) msg << "rho = " << *rho;
  else msg << "exact DtN";
  msg << ", alpha = " << alpha << ": " << what;
  return msg.str();
}

}  // namespace

std::vector<std::vector<cplx>> compute_traces(const StudyConfig& config,
                                              std::span<const std::optional<double>> rhos, int n,
                                              const RunOptions& options) {
  config.validate();
  const Wavenumber wn = Wavenumber::from(config.k);
  const FloquetGrid grid = floquet_grid(wn, n);
  const SurfaceProfile surface = config.surface();
  const SourceTerm source = config.source_term();
  const std::vector<double> x1 = trace_abscissae(config);
  const int J = config.truncation();
  const bool stretched = config.formulation == Formulation::Stretched;

  const CellMesh mesh = stretched
                            ? build_layered_mesh(surface, config.H, config.H + config.lambda, config.h)
                            : build_cell_mesh(surface, config.H, config.h);
  std::vector<Probe> probes;
  probes.reserve(x1.size());
  for (double x : x1) probes.push_back(locate(mesh, {x, config.eval_height}));

  // values[r][j][i] = w(alpha_j, x_i) for strength r.
  const std::size_t ns = grid.size();
  std::vector<std::vector<std::vector<cplx>>> values(
      rhos.size(), std::vector<std::vector<cplx>>(ns, std::vector<cplx>(x1.size())));

  parallel_for(ns, options.threads, [&](std::size_t j) {
    const double alpha = grid.samples[j].alpha;
    auto store = [&](std::size_t r, const CellSolution& w) {
      for (std::size_t i = 0; i < probes.size(); ++i) values[r][j][i] = evaluate(mesh, w, probes[i]);
    };
    if (stretched) {
      for (std::size_t r = 0; r < rhos.size(); ++r) {
        if (!rhos[r]) {
          throw StudyError(describe(rhos[r], alpha, "exact DtN is unavailable in the stretched formulation"),
                           std::numeric_limits<double>::quiet_NaN(), alpha);
        }
        try {
          store(r, solve_stretched(mesh, surface, alpha, config.k, config.pml(*rhos[r]), source));
        } catch (const SolverError& e) {
          throw StudyError(describe(rhos[r], alpha, e.what()), *rhos[r], alpha);
        }
      }
      return;
    }
    std::optional<CellOperator> op;
    try {
      op.emplace(mesh, surface, alpha, config.k, J, source);
    } catch (const SolverError& e) {
      throw StudyError(describe(std::nullopt, alpha, e.what()),
                       std::numeric_limits<double>::quiet_NaN(), alpha);
    }
    for (std::size_t r = 0; r < rhos.size(); ++r) {
      try {
        if (rhos[r]) store(r, op->solve(PmlTbc{config.pml(*rhos[r]).sigma()}));
        else store(r, op->solve(ExactDtn{}));
      } catch (const SolverError& e) {
        throw StudyError(describe(rhos[r], alpha, e.what()),
                         rhos[r].value_or(std::numeric_limits<double>::quiet_NaN()), alpha);
      }
    }
  });

  std::vector<std::vector<cplx>> traces(rhos.size(), std::vector<cplx>(x1.size()));
  std::vector<cplx> column(ns);
  for (std::size_t r = 0; r < rhos.size(); ++r) {
    for (std::size_t i = 0; i < x1.size(); ++i) {
      for (std::size_t j = 0; j < ns; ++j) column[j] = values[r][j][i];
      traces[r][i] = synthesize(grid, column, x1[i]);
    }
  }
  return traces;
}

StudyResult run_study(const StudyConfig& config, const RunOptions& options) {
  config.validate();
  std::vector<std::optional<double>> rhos(config.rho.begin(), config.rho.end());
  rhos.emplace_back(config.rho_reference);
  const auto traces = compute_traces(config, rhos, config.N, options);

  StudyResult result;
  result.x1 = trace_abscissae(config);
  result.reference_trace = traces.back();
  const auto& ref = result.reference_trace;
  for (std::size_t r = 0; r < config.rho.size(); ++r) {
    const double diff = trace_l2_difference(result.x1, traces[r], ref);
    const double denom = config.denominator == ErrorDenominator::Tested
                             ? trace_l2(result.x1, traces[r])
                             : trace_l2(result.x1, ref);
    result.records.push_back({config.rho[r], config.k, diff / denom});
  }
  try {
    result.fit = regression(result.records);
  } catch (const std::invalid_argument&) {
    result.fit = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
                  std::numeric_limits<double>::quiet_NaN()};
  }
  if (config.n_doubling_report && 2 * config.N <= max_legendre_order) {
    const std::optional<double> ref_rho[] = {config.rho_reference};
    const auto doubled = compute_traces(config, ref_rho, 2 * config.N, options).front();
    result.n_doubling_delta =
        trace_l2_difference(result.x1, doubled, ref) / trace_l2(result.x1, ref);
  }
  return result;
}

std::vector<cplx> dtn_reference(const StudyConfig& config, const RunOptions& options) {
  StudyConfig c = config;
  c.formulation = Formulation::ModifiedTbc;
  const std::optional<double> none[] = {std::nullopt};
  return compute_traces(c, none, c.N, options).front();
}

void write_csv(std::ostream& out, const StudyConfig& config, const StudyResult& result) {
  out.precision(10);
  out << "rho,k,error,n_quadrature,mesh_h,truncation_J\n";
  for (const auto& r : result.records) {
    out << r.rho << ',' << r.k << ',' << r.error << ',' << config.N << ',' << config.h << ','
        << config.truncation() << '\n';
  }
  out << "# rho_reference," << config.rho_reference << '\n';
  out << "# regression slope," << result.fit.slope << '\n';
  out << "# regression intercept," << result.fit.intercept << '\n';
  out << "# regression r_squared," << result.fit.r_squared << '\n';
  if (result.n_doubling_delta) out << "# n_doubling_delta," << *result.n_doubling_delta << '\n';
}

void write_trace_csv(std::ostream& out, std::span<const double> x1, std::span<const cplx> values) {
  out.precision(15);
  out << "x1,re,im\n";
  for (std::size_t i = 0; i < x1.size(); ++i) {
    out << x1[i] << ',' << values[i].real() << ',' << values[i].imag() << '\n';
  }
}

}  // namespace fbpml
