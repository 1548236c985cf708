#pragma once

#include <vector>

#include "acgeo/metric.hpp"

namespace acgeo {

// Piecewise-linear curve: N + 1 chart points over the uniform parameter grid
// t_i = i / N.  Endpoints are fixed data; operations never move them.
struct DiscreteCurve {
  std::vector<ChartPoint> nodes;

  int segments() const { return (int)nodes.size() - 1; }
  bool valid() const { return nodes.size() >= 2; }
};

// Nodal vector field along a curve, components in each node's own chart.
// Admissible variations vanish at both endpoints.
using Variation = std::vector<Vec2>;

// Geometry of one segment expressed in its evaluation frame: the pole patch if
// either endpoint lies inside the patch radius, otherwise the polar chart with
// the right endpoint's phi lifted next to the left one.
struct SegmentGeom {
  Chart chart = Chart::Polar;
  Vec2 a, b;  // endpoint coordinates in the frame

  Vec2 delta() const { return {b.x1 - a.x1, b.x2 - a.x2}; }
  ChartPoint mid() const {
    return {chart, 0.5 * (a.x1 + b.x1), 0.5 * (a.x2 + b.x2)};
  }
  ChartPoint left() const { return {chart, a.x1, a.x2}; }
  ChartPoint right() const { return {chart, b.x1, b.x2}; }
};

SegmentGeom segment_geometry(const SurfaceMetric& m, const ChartPoint& left,
                             const ChartPoint& right);
// Jacobian mapping node-chart components to frame components at the node.
Jac2 node_to_frame_jacobian(const SurfaceMetric& m, const ChartPoint& node,
                            Chart frame);

// Global topological coordinates (r cos phi, r sin phi); equals patch coords.
Vec2 global_xy(const ChartPoint& p);

// Discrete Dirichlet energy  E = N * sum_i |q_{i+1} - q_i|^2_{g(mid_i)}  and
// length L = sum_i |q_{i+1} - q_i|_{g(mid_i)}; always L^2 <= E with equality
// iff all segment lengths agree.
double energy(const SurfaceMetric& m, const DiscreteCurve& c);
double length(const SurfaceMetric& m, const DiscreteCurve& c);

// Arclength resampling onto n2 + 1 nodes (new nodes lie on the old polyline);
// endpoints are copied verbatim.
DiscreteCurve resample(const SurfaceMetric& m, const DiscreteCurve& c, int n2);
DiscreteCurve reparametrize_constant_speed(const SurfaceMetric& m,
                                           const DiscreteCurve& c);

// Sobolev inner product int_0^1 g(V1, V2) + g(V1', V2') dt of the
// piecewise-linear interpolants, metric frozen at segment midpoints.
double h1_inner(const SurfaceMetric& m, const DiscreteCurve& c, const Variation& v1,
                const Variation& v2);

struct EmbedReport {
  bool embedded = true;
  int seg_i = -1, seg_j = -1;   // offending pair when not embedded
  double min_separation = 0.0;  // over non-adjacent pairs, chart coordinates
};
// Self-intersection scan over non-adjacent segment pairs in global
// coordinates; tol <= 0 selects the default 1e-6 * (L / N).
EmbedReport is_embedded(const SurfaceMetric& m, const DiscreteCurve& c,
                        double tol = 0.0);
// Cross-curve disjointness, ignoring shared endpoints.
bool curves_disjoint(const SurfaceMetric& m, const DiscreteCurve& a,
                     const DiscreteCurve& b, double tol = 0.0);

// Symmetric Hausdorff distance between node supports, measured with the exact
// cone distance of angle alpha in wedge coordinates (alpha = pi/2: Euclidean).
double support_distance(const DiscreteCurve& a, const DiscreteCurve& b, double alpha);
// Same, restricted to nodes with radius in [r_lo, r_hi] on both curves.
double support_distance_window(const DiscreteCurve& a, const DiscreteCurve& b,
                               double alpha, double r_lo, double r_hi);

// Curve constructors and normalization helpers.
DiscreteCurve coordinate_arc(double r0, double phi_from, double phi_to, int N);
DiscreteCurve curve_from_nodes(std::vector<ChartPoint> nodes);
// Re-canonicalize charts and make polar lifts continuous along the curve.
void normalize_curve(const SurfaceMetric& m, DiscreteCurve& c);

}  // namespace acgeo
