#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fbpml/fem.hpp"
#include "fbpml/mesh.hpp"
#include "fbpml/spectral.hpp"

namespace fbpml {

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// f = cos(freq1 x1) sin(freq2 x2) inside a disk, zero outside.
struct DiskSource {
  Vec2 center{-0.4, 1.8};
  double radius = 0.4;
  double freq1 = 2.0 * pi;
  double freq2 = 2.0 * pi;
};

enum class ErrorDenominator { Tested, Reference };
enum class Formulation { ModifiedTbc, Stretched };

struct StudyConfig {
  double k = 1.0;
  // zeta = mean + sum sin_n sin(n x1) + sum cos_n cos(n x1)
  double surface_mean = 1.5;
  std::vector<double> surface_sin{1.0 / 3.0};
  std::vector<double> surface_cos{0.0, -0.25};
  double H = 2.5;
  double lambda = 1.5;
  int m = 1;
  double chi_modulus = 1.0;
  double chi_phase = pi / 4.0;
  std::vector<double> rho{2, 4, 6, 8, 10, 12, 14, 16};
  double rho_reference = 25.0;
  int N = 16;
  double h = 0.05;
  int J = 0;  // 0 selects default_truncation(k)
  double eval_height = 2.4;
  std::array<double, 2> eval_interval{-pi, pi};
  DiskSource source;
  int trace_points = 512;
  ErrorDenominator denominator = ErrorDenominator::Tested;
  Formulation formulation = Formulation::ModifiedTbc;
  bool n_doubling_report = true;

  // The numerical-example setup at wave number k.
  static StudyConfig standard(double k);

  // Throws ConfigError describing the first violated constraint.
  void validate() const;

  int truncation() const { return J > 0 ? J : default_truncation(k); }
  SurfaceProfile surface() const;
  PmlSpec pml(double rho) const;
  SourceTerm source_term() const;
};

// JSON document with exactly the StudyConfig keys; unknown keys, wrong types
// and invalid values raise ConfigError.
StudyConfig parse_config(std::string_view text);
StudyConfig load_config(const std::string& path);
std::string to_json(const StudyConfig& config);

}  // namespace fbpml
