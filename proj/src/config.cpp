#include "fbpml/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fbpml {

using nlohmann::json;

StudyConfig StudyConfig::standard(double k) {
  StudyConfig c;
  c.k = k;
  return c;
}

SurfaceProfile StudyConfig::surface() const {
  return SurfaceProfile::fourier(surface_mean, surface_sin, surface_cos, H);
}

PmlSpec StudyConfig::pml(double r) const {
  PmlSpec p;
  p.lambda = lambda;
  p.rho = r;
  p.m = m;
  p.chi = std::polar(chi_modulus, chi_phase);
  p.H = H;
  return p;
}

SourceTerm StudyConfig::source_term() const {
  const double a = source.freq1, b = source.freq2;
  return SourceTerm::disk(
      [a, b](double x1, double x2) { return cplx(std::cos(a * x1) * std::sin(b * x2), 0.0); },
      source.center, source.radius);
}

void StudyConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(k > 0.0) || !std::isfinite(k)) fail("k must be positive");
  if (!Wavenumber::from(k).exceptional) fail("k must satisfy 2k integer (exceptional case)");
  if (!(lambda > 0.0)) fail("pml.lambda must be positive");
  if (m < 1) fail("pml.m must be a positive integer");
  if (!(chi_modulus > 0.0) || !(chi_phase > 0.0) || !(chi_phase < pi / 2.0)) {
    fail("pml chi must have positive real and imaginary parts");
  }
  const std::set<double> distinct(rho.begin(), rho.end());
  if (distinct.size() < 2) fail("pml.rho needs at least two distinct strengths");
  if (!(*distinct.begin() > 0.0)) fail("pml.rho entries must be positive");
  if (!(rho_reference > *distinct.rbegin())) fail("pml.rho_reference must exceed every rho");
  if (N < 1 || N > max_legendre_order) fail("quadrature_n must lie in [1, 512]");
  if (!(h > 0.0)) fail("mesh_h must be positive");
  if (J != 0 && J < static_cast<int>(std::ceil(k)) + 1) fail("truncation_J must be >= ceil(k) + 1");
  if (trace_points < 2) fail("trace_points must be at least 2");
  if (!(eval_interval[0] < eval_interval[1])) fail("eval_interval must be increasing");
  SurfaceProfile s;
  try {
    s = surface();
  } catch (const std::invalid_argument& e) {
    fail(std::string("surface: ") + e.what());
  }
  if (!(eval_height > s.zeta_max) || !(eval_height <= H)) {
    fail("eval_height must satisfy zeta_max < eval_height <= H");
  }
  try {
    source_term().check_inside(s, H);
  } catch (const std::invalid_argument& e) {
    fail(std::string("source: ") + e.what());
  }
}

namespace {

void reject_unknown(const json& j, std::initializer_list<std::string_view> keys,
                    const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out, bool required = false) {
  if (!j.contains(key)) {
    if (required) throw ConfigError(std::string("missing required key '") + key + "'");
    return;
  }
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

StudyConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc,
                 {"k", "surface", "H", "pml", "quadrature_n", "mesh_h", "truncation_J",
                  "eval_height", "eval_interval", "source", "trace_points", "error_denominator",
                  "formulation", "n_doubling_report"},
                 "config");
  StudyConfig c;
  read(doc, "k", c.k, true);
  read(doc, "H", c.H, true);
  if (!doc.contains("surface")) throw ConfigError("missing required key 'surface'");
  const json& surf = doc.at("surface");
  reject_unknown(surf, {"mean", "sin", "cos"}, "surface");
  read(surf, "mean", c.surface_mean, true);
  c.surface_sin.clear();
  c.surface_cos.clear();
  read(surf, "sin", c.surface_sin);
  read(surf, "cos", c.surface_cos);

  if (!doc.contains("pml")) throw ConfigError("missing required key 'pml'");
  const json& pml = doc.at("pml");
  reject_unknown(pml, {"lambda", "m", "chi_modulus", "chi_phase", "rho", "rho_reference"}, "pml");
  read(pml, "lambda", c.lambda, true);
  read(pml, "m", c.m);
  read(pml, "chi_modulus", c.chi_modulus);
  read(pml, "chi_phase", c.chi_phase);
  read(pml, "rho", c.rho, true);
  read(pml, "rho_reference", c.rho_reference);

  read(doc, "quadrature_n", c.N);
  read(doc, "mesh_h", c.h);
  read(doc, "truncation_J", c.J);
  read(doc, "eval_height", c.eval_height, true);
  read(doc, "eval_interval", c.eval_interval);
  read(doc, "trace_points", c.trace_points);
  read(doc, "n_doubling_report", c.n_doubling_report);

  if (doc.contains("source")) {
    const json& src = doc.at("source");
    reject_unknown(src, {"center", "radius", "freq1", "freq2"}, "source");
    std::array<double, 2> center{c.source.center.x1, c.source.center.x2};
    read(src, "center", center);
    c.source.center = {center[0], center[1]};
    read(src, "radius", c.source.radius);
    read(src, "freq1", c.source.freq1);
    read(src, "freq2", c.source.freq2);
  }
  if (doc.contains("error_denominator")) {
    std::string d;
    read(doc, "error_denominator", d);
    if (d == "tested") c.denominator = ErrorDenominator::Tested;
    else if (d == "reference") c.denominator = ErrorDenominator::Reference;
    else throw ConfigError("error_denominator must be 'tested' or 'reference'");
  }
  if (doc.contains("formulation")) {
    std::string f;
    read(doc, "formulation", f);
    if (f == "modified_tbc") c.formulation = Formulation::ModifiedTbc;
    else if (f == "stretched") c.formulation = Formulation::Stretched;
    else throw ConfigError("formulation must be 'modified_tbc' or 'stretched'");
  }
  c.validate();
  return c;
}

StudyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_json(const StudyConfig& c) {
  json doc = {
      {"k", c.k},
      {"surface", {{"mean", c.surface_mean}, {"sin", c.surface_sin}, {"cos", c.surface_cos}}},
      {"H", c.H},
      {"pml",
       {{"lambda", c.lambda},
        {"m", c.m},
        {"chi_modulus", c.chi_modulus},
        {"chi_phase", c.chi_phase},
        {"rho", c.rho},
        {"rho_reference", c.rho_reference}}},
      {"quadrature_n", c.N},
      {"mesh_h", c.h},
      {"truncation_J", c.J},
      {"eval_height", c.eval_height},
      {"eval_interval", c.eval_interval},
      {"source",
       {{"center", {c.source.center.x1, c.source.center.x2}},
        {"radius", c.source.radius},
        {"freq1", c.source.freq1},
        {"freq2", c.source.freq2}}},
      {"trace_points", c.trace_points},
      {"error_denominator", c.denominator == ErrorDenominator::Tested ? "tested" : "reference"},
      {"formulation", c.formulation == Formulation::ModifiedTbc ? "modified_tbc" : "stretched"},
      {"n_doubling_report", c.n_doubling_report},
  };
  return doc.dump(2);
}

}  // namespace fbpml
