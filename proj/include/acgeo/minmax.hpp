#pragma once

#include <functional>
#include <vector>

#include "acgeo/cone.hpp"
#include "acgeo/flow.hpp"

namespace acgeo {

// ---------------------------------------------------------------------------
// Two minimizing geodesics between the antipodal points p = (r0, phi0) and
// q = (r0, phi0 + pi): the energy minimizers of the two coordinate arcs, one
// on each side of the pole/vertex.
// ---------------------------------------------------------------------------

struct MinimizerPair {
  GeodesicReport upper;  // flowed from the arc phi in [phi0, phi0 + pi]
  GeodesicReport lower;  // flowed from the arc phi in [phi0 - pi, phi0]
  bool embedded_upper = false;
  bool embedded_lower = false;
  bool disjoint = false;  // interiors disjoint (shared endpoints ignored)
  int index_upper = -1;   // Morse index (-1 = not computed)
  int index_lower = -1;
  double separation = 0.0;  // support distance between the two curves
};

// Flows both coordinate arcs to geodesics and cross-checks them.  Throws
// convergence_error when a flow stalls or a curve loses embeddedness, and
// coincidence_error when the two limits share support (no width to sweep, as
// in the flat plane).
MinimizerPair two_minimizers(const SurfaceMetric& m, double r0, double phi0,
                             int N, const FlowConfig& fc = {},
                             bool with_indices = true);

// ---------------------------------------------------------------------------
// Sweepouts: one-parameter families of curves joining the two minimizers.
// ---------------------------------------------------------------------------

struct Sweepout {
  std::vector<double> s;             // parameter stamps, increasing in [0, 1]
  std::vector<DiscreteCurve> slices;  // same node count each
  double rho_plus = 0.0;   // endpoint radius
  double rho_minus = 0.0;  // neck scale of the construction
  double phi0 = 0.0;       // angle of the endpoint p
  int count() const { return (int)slices.size(); }
};

// Point of the model chord of the wedge at angular parameter t in [0, 1],
//   rho(t) = rho sin(pi/2 (1 - sin a)) / sin(pi/2 (1 + (1 - 2t) sin a)),
//   theta(t) = (1 +/- t) pi sin a  (upper / lower side),
// the polar equation of the straight segment joining the two lifts of the
// antipodal pair at radius rho in the unfolded wedge.
WedgePoint sweepout_chord_point(double rho, double alpha, double t, bool upper);

// The explicit five-stage family joining g_upper to g_lower:
//   (i)    interpolate g_upper to the full-scale upper chord,
//   (ii)   pull the chord down to scale rho_minus along two radial legs,
//   (iii)  swap the inner chord across the pole/vertex (transverse squash),
//   (iv)   push the lower chord back out to full scale,
//   (v)    interpolate the full-scale lower chord to g_lower.
// Slices are constant-speed with the same segment count as the minimizers;
// the first and last slices are verbatim copies of g_upper / g_lower.
// Throws regime_error unless rho_plus > 2 rho_minus > 0.
Sweepout explicit_sweepout(const SurfaceMetric& m, const DiscreteCurve& g_upper,
                           const DiscreteCurve& g_lower, double rho_minus, int M);

// Flat H^1-style distance between two slices with equal node counts, measured
// on node differences in global coordinates; used for the continuity budget.
double slice_distance(const DiscreteCurve& a, const DiscreteCurve& b);

// ---------------------------------------------------------------------------
// Sweepout minimization and width extraction.
// ---------------------------------------------------------------------------

struct MinMaxConfig {
  double r0 = 1.0;   // endpoint radius rho_plus
  double phi0 = 0.0; // endpoint direction
  int N = 256;       // segments per slice
  int M = 32;        // initial slice count
  // Many gentle rounds beat few aggressive ones: each round tears the family
  // a little where it crosses the obstruction and the repair step must patch
  // the tear with node-average blends, which stay clean only between slices
  // that have not flowed far apart.
  int rounds = 12;                // minimization rounds
  int flow_iters_per_round = 12;  // descent budget per slice per round
  double rho_minus = 0.0;         // neck scale; <= 0 selects factor * r0
  double rho_minus_factor = 0.25;
  // Neighbour-slice distance budget, as a fraction of the largest gap in the
  // freshly built sweepout.  The budget sets how sharply the discrete family
  // must resolve the crossing of the obstruction: the certified width behaves
  // like (true width) - O(budget), so looser budgets under-estimate it.
  double continuity_factor = 0.25;
  int max_slices = 0;              // 0 selects 4 M + 1
  double r_floor_factor = 1e-4;    // slice-flow radial floor, times rho_minus
                                   // (cone-point families only)
  double collapse_tol_factor = 1e-3;  // collapse threshold, times r0
  int refine_rounds = 2;              // local 3x re-discretizations at argmax
  int polish_iters = 400;             // saddle polish budget
  int mode_refresh = 12;  // recompute the unstable direction every k steps
  double polish_drop = 0.02;  // max relative energy drop below the width
  FlowConfig flow;        // base step parameters for slice flows
  int workers = 1;        // parallel slice flows (deterministic results)
  // optional observer called after each minimization round (snapshots)
  std::function<void(int round, const Sweepout&)> on_round;
};

struct LambdaTracePoint {
  int round = 0;
  double lambda = 0.0;
  int argmax = 0;
  int slices = 0;
};

struct MinMaxResult {
  double lambda = 0.0;  // width estimate: max slice energy
  int argmax = 0;
  double ratio = 0.0;  // lambda / r0^2
  double e1 = 0.0, e2 = 0.0;
  double gap_margin = 0.0;  // lambda - max(e1, e2)
  double gap_rel = 0.0;     // gap_margin / r0^2
  bool gap = false;
  GeodesicReport gamma3;  // polished argmax slice
  int index_gamma3 = -1;
  bool gamma3_embedded = false;
  double sep_upper = 0.0;  // support distance of gamma3 to each minimizer
  double sep_lower = 0.0;
  std::vector<LambdaTracePoint> trace;
};

// Per-round slice descent with continuity repair: every interior slice flows
// under a fixed budget; wherever the gap between consecutive slices exceeds
// the continuity budget, an interpolated slice is inserted (and flowed).
// Endpoint slices are never touched.  Throws convergence_error if repair
// would exceed the slice cap.  Returns the lambda trace.
std::vector<LambdaTracePoint> minimize_sweepout(const SurfaceMetric& m,
                                                Sweepout& H,
                                                const MinMaxConfig& cfg);

// Locates the widest slice, refines the parameter interval around it at 3x
// density (twice), polishes the argmax slice toward the min-max geodesic by
// descent projected off the unstable direction, and certifies the result:
// energy gap over the minimizers, embeddedness, Morse index, and separation
// from both minimizers (collapse_error when the polished curve lands on one).
MinMaxResult extract_minmax(const SurfaceMetric& m, Sweepout& H,
                            const MinimizerPair& pair, const MinMaxConfig& cfg);

struct PipelineResult {
  MinimizerPair minimizers;
  MinMaxResult minmax;
  Sweepout sweepout;  // final state, after minimization and refinement
};

// two_minimizers + explicit_sweepout + minimize_sweepout + extract_minmax.
PipelineResult run_minmax_pipeline(const SurfaceMetric& m, const MinMaxConfig& cfg);

}  // namespace acgeo
