#pragma once

#include <vector>

#include "acgeo/metric.hpp"

namespace acgeo {

// A point of the unfolded wedge, polar coordinates relative to a cut meridian.
struct UnfoldedPoint {
  double rho = 0.0;
  double theta = 0.0;  // in (0, 2 pi sin alpha) relative to the cut
};

// Isometric unfolding of cone(alpha) cut along the meridian phi = cut_phi.
UnfoldedPoint unfold(const ChartPoint& polar_point, double alpha, double cut_phi);
ChartPoint fold(const UnfoldedPoint& w, double alpha, double cut_phi);

// The three model geodesics joining antipodal points p = (r, phi0) and
// q = (r, phi0 + pi) on cone(alpha): two smooth chords (one on each side) and
// the singular broken path through the vertex.
struct ConeGeodesicSet {
  double r = 0.0;
  double alpha = 0.0;
  double length_smooth = 0.0;    // 2 r sin(pi/2 sin alpha), both chords
  double length_singular = 0.0;  // 2 r
  // chord endpoints in wedge coordinates with theta(p) = pi sin(alpha)
  UnfoldedPoint upper_a, upper_b;  // theta(q) lifted to 2 pi sin(alpha)
  UnfoldedPoint lower_a, lower_b;  // theta(q) lifted to 0
};
ConeGeodesicSet antipodal_geodesics(double r, double alpha);

// Exact distance on the model cone (unfolding chords + vertex paths).
double cone_distance(const ChartPoint& p, const ChartPoint& q, double alpha);

// Clairaut invariant J = g(velocity, d/dphi) for rotational metrics.
double clairaut_invariant(const SurfaceMetric& m, const ChartPoint& p, Vec2 v);

// Model comparison curves, sampled with N segments at constant speed.
enum class ConeModel { SmoothUpper, SmoothLower, Singular };
std::vector<ChartPoint> cone_model_nodes(ConeModel which, double r0, double phi0,
                                         double alpha, int N);

// --- geodesic shooting -------------------------------------------------------

struct ShotSample {
  double t = 0.0;
  ChartPoint pos;
  Vec2 vel;
  double speed = 0.0;     // |velocity|_g
  double clairaut = 0.0;  // NaN for non-rotational families
};

struct ShotGeodesic {
  std::vector<ShotSample> samples;
  double step = 0.0;                  // actual uniform step used
  double speed_drift_rate = 0.0;      // max |speed - speed0| / (speed0 * arclength)
  double clairaut_drift_rate = 0.0;   // max |J - J0| / (scale * arclength)
  double min_radius = 0.0;            // closest approach to the pole/vertex
  double arclength = 0.0;

  const ShotSample& back() const { return samples.back(); }
};

// Fixed-step RK4 integration of the geodesic equation over parameter span T.
// Switches charts near the pole for families with a patch; throws chart_error
// if a cone-point family trajectory enters the excluded vertex region.
ShotGeodesic geodesic_shoot(const SurfaceMetric& m, const ChartPoint& p0, Vec2 v0,
                            double T, double h);

}  // namespace acgeo
