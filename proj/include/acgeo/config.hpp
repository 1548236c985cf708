#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "acgeo/minmax.hpp"

namespace acgeo {

// One experiment per invocation: a flat key = value record with everything a
// subcommand may need.  Unknown keys and malformed values are config errors.
struct RunConfig {
  // metric family
  std::string family = "cone";  // cone | flat | profile | perturbed
  double alpha = kPi / 6;
  double a = 1.0;  // profile smoothing scale
  double mu = 1.0; // perturbed decay rate
  std::array<double, 3> amplitudes = {0.05, 0.04, 0.03};

  // discretization and flow
  int N = 256;  // segments per curve
  int M = 32;   // initial slice count
  int rounds = 12;
  int flow_iters_per_round = 12;
  int flow_max_iters = 5000;
  double flow_grad_tol = 0.0;  // 0 = scale-aware default
  double eigen_tol = 0.0;      // 0 = scale-aware default
  int polish_iters = 400;
  double continuity_factor = 0.25;
  double rho_minus = 0.0;  // 0 = 0.25 r0

  // experiment geometry
  double r0 = 1.0;
  double phi0 = 0.0;
  std::vector<double> r0_list;    // sweeps; strictly increasing when given
  std::vector<double> phi0_list;  // distinctness: exactly two angles
  double r_a = 0.0, phi_a = 0.0;  // explicit geodesic endpoints (optional:
  double r_b = 0.0, phi_b = 0.0;  // default is the antipodal pair at r0)
  bool have_endpoints = false;

  // quadrature
  int nr = 512;
  int nphi = 256;

  // execution
  int workers = 1;
  std::uint64_t seed = 12345;
};

// key = value lines, '#' comments, blank lines ignored; duplicate or unknown
// keys are config errors.  Values: numbers, names, or comma-separated lists.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Applies one key = value override (the CLI --set flag); no validation.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

// Enforces the record invariants: known family, N >= 8, M >= 4, tolerances
// and scales nonnegative, r0 positive, r0_list strictly increasing.
void validate_config(const RunConfig& cfg);

SurfaceMetric metric_from(const RunConfig& cfg);
FlowConfig flow_from(const RunConfig& cfg);
MinMaxConfig minmax_from(const RunConfig& cfg);

}  // namespace acgeo
