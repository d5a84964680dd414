#pragma once

// PML-strength convergence study: trace errors against a strong-layer
// reference and the fit of log(-log error) against log rho.

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fbpml/config.hpp"

namespace fbpml {

struct ErrorRecord {
  double rho;
  double k;
  double error;
};

struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least squares of log(-log error) on log rho. Needs at least two records
// with errors in (0, 1) and positive rho; throws std::invalid_argument naming
// the offending record otherwise.
RegressionFit regression(std::span<const ErrorRecord> records);

// A cell solve failed inside a study. rho is NaN for exact-DtN solves.
class StudyError : public std::runtime_error {
 public:
  StudyError(const std::string& what, double rho, double alpha)
      : std::runtime_error(what), rho_(rho), alpha_(alpha) {}
  double rho() const { return rho_; }
  double alpha() const { return alpha_; }

 private:
  double rho_;
  double alpha_;
};

struct RunOptions {
  int threads = 1;
};

// Uniform abscissae over the evaluation interval, both ends included.
std::vector<double> trace_abscissae(const StudyConfig& config);

// Trapezoid-rule L2 norm of samples on uniform abscissae.
double trace_l2(std::span<const double> x1, std::span<const cplx> values);
double trace_l2_difference(std::span<const double> x1, std::span<const cplx> a,
                           std::span<const cplx> b);

// One trace per requested layer strength (nullopt selects the exact DtN
// condition), synthesised on the evaluation line with quadrature order n.
// Cell solves at distinct alpha run on `threads` workers; results do not
// depend on the worker count.
std::vector<std::vector<cplx>> compute_traces(const StudyConfig& config,
                                              std::span<const std::optional<double>> rhos, int n,
                                              const RunOptions& options = {});

struct StudyResult {
  std::vector<double> x1;
  std::vector<ErrorRecord> records;
  RegressionFit fit;
  std::optional<double> n_doubling_delta;  // relative change of the reference trace for N -> 2N
  std::vector<cplx> reference_trace;
};

StudyResult run_study(const StudyConfig& config, const RunOptions& options = {});

// The same pipeline with the exact transparent condition.
std::vector<cplx> dtn_reference(const StudyConfig& config, const RunOptions& options = {});

// CSV: rho,k,error,n_quadrature,mesh_h,truncation_J then '#' summary lines.
void write_csv(std::ostream& out, const StudyConfig& config, const StudyResult& result);
void write_trace_csv(std::ostream& out, std::span<const double> x1, std::span<const cplx> values);

}  // namespace fbpml
