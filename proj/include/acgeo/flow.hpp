#pragma once

#include <vector>

#include "acgeo/curve.hpp"

namespace acgeo {

// Differential of the discrete energy with respect to each node, expressed as
// a covector in the node's own chart.  Endpoint entries are zero (variations
// are admissible, i.e. fix the endpoints).
Variation energy_gradient(const SurfaceMetric& m, const DiscreteCurve& c);

// Duality pairing sum_i <grad_i, v_i> of a nodal covector field with a nodal
// vector field in matching charts; equals dE[v] when grad = energy_gradient.
double pair_covector(const Variation& grad, const Variation& v);

// Riesz representative of the energy differential in the H^1 inner product:
// the unique admissible W with  h1_inner(m, c, W, V) = pair_covector(grad, V)
// for every admissible V.  Solved exactly (block-tridiagonal factorization).
Variation h1_precondition(const SurfaceMetric& m, const DiscreteCurve& c,
                          const Variation& grad);

double h1_norm(const SurfaceMetric& m, const DiscreteCurve& c, const Variation& v);

struct FlowConfig {
  int max_iters = 5000;
  double grad_tol = 0.0;    // stop when the H^1 norm of the descent direction
                            // falls below this; <= 0 selects the scale-aware
                            // default 1e-8 * E/L of the initial curve
  double step0 = 0.25;      // initial step size
  double min_step = 1e-13;  // declare stall below this
  double step_growth = 1.3;
  // A step q -> q - h W is accepted when the realized energy drop divided by
  // the first-order prediction h * |W|_{H^1}^2 lies in this band, which keeps
  // the discrete energy-drop identity tight along the flow.
  double band_lo = 0.97;
  double band_hi = 1.03;
  double r_floor = 0.0;        // clamp polar radii from below (cone point)
  int embed_check_stride = 0;  // 0 = never check embeddedness during the flow
  bool record_trace = false;
};

struct FlowTracePoint {
  int iter;
  double energy;
  double grad_norm;
  double step;
};

enum class FlowStop { Converged, MaxIters, StepUnderflow, EmbeddingLost };

const char* flow_stop_name(FlowStop s);

struct FlowResult {
  DiscreteCurve curve;
  double energy = 0.0;
  double grad_norm = 0.0;  // H^1 norm of the last descent direction
  int iters = 0;
  int accepted = 0;
  FlowStop stop = FlowStop::MaxIters;
  // max over accepted steps of |drop / (h |W|^2) - 1|, ignoring steps whose
  // predicted drop is below floating-point resolution of the energy
  double max_drop_residual = 0.0;
  std::vector<FlowTracePoint> trace;
};

FlowResult gradient_flow(const SurfaceMetric& m, DiscreteCurve c,
                         const FlowConfig& cfg = {});

struct GeodesicReport {
  DiscreteCurve curve;
  double energy = 0.0;
  double length = 0.0;
  double grad_norm = 0.0;
  bool converged = false;
  int iters = 0;
  double max_drop_residual = 0.0;
  FlowStop stop = FlowStop::MaxIters;
};

// Preconditioned gradient descent to a critical point of the energy with the
// endpoints of `init` held fixed.
GeodesicReport find_geodesic(const SurfaceMetric& m, const DiscreteCurve& init,
                             const FlowConfig& cfg = {});

struct SpectrumReport {
  std::vector<double> eigenvalues;  // ascending; Jacobi form against L^2 mass
  int negative_count = 0;           // Morse index
  double neg_tol = 0.0;             // threshold used for counting
  double geodesic_residual = 0.0;   // H^1 norm of the curve's own gradient
  double arclength = 0.0;
  // Scalar values of the lowest eigenmode at the interior nodes of the
  // constant-speed reparametrization of the curve (size N-1, L^2-normalized).
  std::vector<double> lowest_mode;
};

// Spectrum of the scalar normal second-variation (Jacobi) form
//   Q(u) = int_0^L (u'^2 - K u^2) ds,   u(0) = u(L) = 0,
// discretized with P1 elements on the curve's arclength grid.  neg_tol <= 0
// selects a scale-aware default.
SpectrumReport second_variation(const SurfaceMetric& m, const DiscreteCurve& c,
                                double neg_tol = 0.0);

int morse_index(const SurfaceMetric& m, const DiscreteCurve& c,
                double neg_tol = 0.0);

}  // namespace acgeo
