#pragma once

#include <vector>

#include "acgeo/minmax.hpp"

namespace acgeo {

// ---------------------------------------------------------------------------
// Gauss-Bonnet audits.
//
// For a region Omega with boundary circles, midpoint quadrature of
//   total = integral_Omega K dA + integral_dOmega kappa_g ds
// is compared against 2 pi chi(Omega).  The defect (expected - total) is the
// curvature concentrated at a cone point enclosed by Omega: zero for smooth
// regions, 2 pi (1 - sin alpha) for a disk around the vertex of the cone.
// ---------------------------------------------------------------------------

struct GaussBonnetReport {
  double curvature_integral = 0.0;  // integral of K over the region
  double boundary_integral = 0.0;   // total geodesic curvature of the boundary
  double total = 0.0;               // sum of the two
  double expected = 0.0;            // 2 pi chi of the smooth model region
  double defect = 0.0;              // expected - total
};

// Geodesic curvature of the coordinate circle r = const at angle phi, taken
// with respect to the pole-facing unit normal (the disk-boundary convention:
// circles in the plane have kappa_g = 1/r > 0).
double circle_geodesic_curvature(const SurfaceMetric& m, double r, double phi);

// Total geodesic curvature of the circle r = const (midpoint rule in phi;
// rotational families are evaluated once and weighted by 2 pi).
double circle_total_curvature(const SurfaceMetric& m, double r, int nphi = 256);

// Disk 0 < r <= r0 (chi = 1).  Rotational families only: the curvature
// integrand of the perturbed family is not integrable at the vertex.
GaussBonnetReport gauss_bonnet_disk(const SurfaceMetric& m, double r0,
                                    int nr = 256, int nphi = 256);

// Annulus r_in <= r <= r_out (chi = 0), any family.
GaussBonnetReport gauss_bonnet_annulus(const SurfaceMetric& m, double r_in,
                                       double r_out, int nr = 256, int nphi = 256);

// ---------------------------------------------------------------------------
// Mass: the total angle deficit 2 pi (1 - sin alpha), measured geometrically
// as the asymptotic shortfall of the boundary turning, 2 pi - circle total
// curvature at radius r0 (exact on the cone, converging as r0 grows on the
// smoothed and perturbed families).
// ---------------------------------------------------------------------------

double mass_formula(const SurfaceMetric& m);
double mass_measured(const SurfaceMetric& m, double r0, int nphi = 512);

// ---------------------------------------------------------------------------
// Blow-down comparison: rescale a curve by 1/r0 and measure its support
// distance to each of the three unit-scale model geodesics of the cone with
// the same angle.  Under blow-down the min-max geodesic converges to the
// singular pair, the minimizers to the smooth chords.
// ---------------------------------------------------------------------------

struct BlowDownReport {
  double scale = 0.0;  // rescaling factor r0
  double dist_upper = 0.0;
  double dist_lower = 0.0;
  double dist_singular = 0.0;
  ConeModel best = ConeModel::SmoothUpper;
  double best_dist = 0.0;
};

// Distances use the node supports restricted to rescaled radii in
// [r_lo, r_hi] (r_hi <= 0 means unbounded); the annulus window excludes the
// cap region, where the blown-down family is not close to any model.
BlowDownReport blow_down_compare(const SurfaceMetric& m, const DiscreteCurve& c,
                                 double r0, double phi0, int n_model = 0,
                                 double r_lo = 0.0, double r_hi = 0.0);

// ---------------------------------------------------------------------------
// No-drift diagnostics: the min-max geodesic stays near the pole/vertex at
// every scale instead of drifting off to a far-away minimizer.
// ---------------------------------------------------------------------------

// Metric length of the part of the polyline inside the coordinate ball of
// radius rho around the pole (segments clipped on their chordal supports).
double length_in_ball(const SurfaceMetric& m, const DiscreteCurve& c, double rho);

// Peak of length(c within B_rho) / rho over a log-spaced grid of radii;
// a pair of radial rays through the pole region scores 2.
double vertex_concentration(const SurfaceMetric& m, const DiscreteCurve& c,
                            double rho_lo, double rho_hi, int n_rho = 24);

struct NoDriftPoint {
  double r0 = 0.0;
  double closest_approach = 0.0;  // min node radius of the min-max geodesic
  double lambda = 0.0;
  double ratio = 0.0;             // lambda / r0^2
  double concentration = 0.0;     // vertex_concentration of the geodesic
};

// Runs the full pipeline once per endpoint radius and records where the
// min-max geodesic passes and how its length concentrates near the pole.
std::vector<NoDriftPoint> no_drift_trace(const SurfaceMetric& m,
                                         const std::vector<double>& r0_list,
                                         MinMaxConfig base);

// ---------------------------------------------------------------------------
// Ray asymptotes: in the unfolded wedge (x, y) = rho (cos theta, sin theta),
// theta = phi sin alpha, each end of a geodesic approaches a straight line.
// The fit rotates the outer window of nodes until the least-squares slope
// vanishes; the rotation angle is the asymptotic direction.
// ---------------------------------------------------------------------------

struct RayAsymptote {
  double theta_inf = 0.0;  // asymptotic direction in the wedge
  double intercept = 0.0;  // signed normal offset of the asymptote line
  double growth_c = 0.0;   // sup of residuals, weighted by rho^(1 - mu)
  int nodes_used = 0;
};

// Fits the nodes with radius >= r_min_fit at the chosen end of the curve.
// The residual weight uses the decay rate mu of the perturbed family and is
// uniform (mu = 1) otherwise.
RayAsymptote ray_asymptote(const SurfaceMetric& m, const DiscreteCurve& c,
                           bool from_back, double r_min_fit);

// ---------------------------------------------------------------------------
// Distinctness: min-max geodesics obtained from distinct antipodal data are
// distinct lines; their asymptotic wedge directions track the data with
// slope sin alpha.
// ---------------------------------------------------------------------------

struct DistinctnessReport {
  double phi0_a = 0.0, phi0_b = 0.0;
  RayAsymptote a_front, a_back;  // the two ends of the geodesic at phi0_a
  RayAsymptote b_front, b_back;
  double separation = 0.0;  // mean shift of the asymptotic directions
  double expected = 0.0;    // |phi0_b - phi0_a| sin alpha (difference mod pi)
  double rel_error = 0.0;
  PipelineResult run_a, run_b;
};

// Runs the pipeline at both angles and compares the ray asymptotes of the two
// min-max geodesics.  The fit window covers radii >= r_fit_factor * r0.
// Throws config_error when the two angles name the same antipodal pair
// (equal modulo pi).
DistinctnessReport distinctness_experiment(const SurfaceMetric& m, double phi0_a,
                                           double phi0_b, const MinMaxConfig& base,
                                           double r_fit_factor = 0.6);

}  // namespace acgeo
