#pragma once

// Fast invariant suites shared by the CLI `selftest` command and the
// acceptance driver. Each returns a verdict plus a one-line summary.

#include <cstdint>
#include <string>
#include <vector>

namespace fbpml {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Weights, exactness through degree 2N - 1, Bruns brackets and the
// cosine bounds on d_j + 1 for every N in [1, max_n].
CheckResult check_gauss_rules(int max_n = 64);

// min_n |alpha_j - n| >= 1 / (72 N^4) for N in [1, max_n] and each k.
CheckResult check_floquet_separation(const std::vector<double>& ks, int max_n = 64);

// |h - beta| <= pml_gap_bound over random (k, delta, sigma, z) draws.
CheckResult check_gap_certificate(int draws = 10000, std::uint64_t seed = 20240521);

// Max-norm error of the quadrature inverse of the Bloch transform of a
// smooth field supported on three cells.
CheckResult check_bloch_roundtrip(double tolerance = 1e-6);

std::vector<CheckResult> run_selftests();

}  // namespace fbpml
