#pragma once

#include <array>

#include "acgeo/types.hpp"

namespace acgeo {

enum class Family { Cone, Flat, Profile, Perturbed };

const char* family_name(Family f);

// One of the four surface metric families.
//
//   cone(alpha)          g = dr^2 + r^2 sin^2(alpha) dphi^2           on r > r_min
//   flat()               the Euclidean plane (alpha = pi/2)
//   profile(alpha, a)    g = dr^2 + f(r)^2 dphi^2 with
//                        f(r) = r sin(alpha) + (1 - sin(alpha)) a gd(r/a),
//                        smooth at the pole, K >= 0, conical at infinity
//   perturbed(alpha,mu,c) cone plus decaying non-rotational terms
//                        g_rr    = 1 + c1 (1 + r)^(-mu) cos(phi)
//                        g_rphi  = c3 r (1 + r)^(-mu) sin(phi)
//                        g_phiphi= r^2 sin^2(alpha) (1 + c2 (1 + r)^(-mu))
//
// Families with a smooth pole (flat, profile) carry a Cartesian pole patch of
// radius r_patch; cone and perturbed are singular at r = 0 and reject
// evaluation below r_min.
class SurfaceMetric {
 public:
  static SurfaceMetric cone(double alpha);
  static SurfaceMetric flat();
  static SurfaceMetric profile(double alpha, double a, double r_patch = 0.0);
  static SurfaceMetric perturbed(double alpha, double mu, std::array<double, 3> amp);

  Family family() const { return family_; }
  double alpha() const { return alpha_; }
  double sin_alpha() const { return sin_alpha_; }
  double mu() const { return mu_; }
  double smoothing_scale() const { return a_; }
  double dilation() const { return dil_; }
  std::array<double, 3> amplitudes() const { return amp_; }
  double patch_radius() const { return r_patch_; }
  double min_radius() const { return r_min_; }
  bool has_patch() const { return r_patch_ > 0.0; }
  bool rotational() const { return family_ != Family::Perturbed; }

  Metric2 metric_at(const ChartPoint& p) const;
  MetricJet metric_jet(const ChartPoint& p) const;
  Christoffel christoffel(const ChartPoint& p) const;
  double gauss_curvature(const ChartPoint& p) const;

  // g^(lambda) = lambda^-2 Dil_lambda^* g, expressed in the same family.
  SurfaceMetric rescaled(double lambda) const;

  // rotational profile function f and derivatives (cone/flat/profile only)
  double f(double r) const;
  double fp(double r) const;
  double fpp(double r) const;

  // chart transitions (only for families with a pole patch)
  ChartPoint to_patch(const ChartPoint& p) const;
  ChartPoint to_polar(const ChartPoint& p, double phi_hint = 0.0) const;
  // canonical representation: patch iff radius < r_patch (when available)
  ChartPoint canonical(const ChartPoint& p, double phi_hint = 0.0) const;
  // Jacobian of the coordinate change (chart of p) -> target at p
  Jac2 transition_jacobian(const ChartPoint& p, Chart target) const;

 private:
  SurfaceMetric() = default;
  void require_valid(const ChartPoint& p) const;
  // pole patch auxiliary: g_patch = I - s(r) * (rotational part), and
  // s1 = s'(r)/r, both finite and even at r = 0
  void patch_s(double r, double& s, double& s1) const;

  Family family_ = Family::Flat;
  double alpha_ = kPi / 2;
  double sin_alpha_ = 1.0;
  double a_ = 1.0;        // profile smoothing scale
  double mu_ = 1.0;       // perturbed decay rate
  double dil_ = 1.0;      // accumulated dilation (perturbed rescaling)
  std::array<double, 3> amp_ = {0.0, 0.0, 0.0};
  double r_patch_ = 0.0;  // 0 = no patch
  double r_min_ = 0.0;    // 0 = pole is smooth
};

// Christoffel symbols from a metric jet (general 2d formula).
Christoffel christoffel_from_jet(const MetricJet& jet);

// --- wedge (unfolding) coordinates -----------------------------------------
//
// rho = r, theta = phi * sin(alpha); the model cone unfolds isometrically to
// the Euclidean wedge of opening 2 pi sin(alpha) with the two edges identified.

struct WedgePoint {
  double rho = 0.0;
  double theta = 0.0;
};

double wedge_full_angle(double alpha);
WedgePoint wedge_coords(const ChartPoint& polar_point, double alpha);
ChartPoint wedge_inverse(const WedgePoint& w, double alpha);
// representative of theta in [0, 2 pi sin(alpha))
double wedge_wrap(double theta, double alpha);

// Exact distance between two points of the model cone g_alpha: minimum over
// the vertex path and all straight chords in admissible unfoldings.  For
// alpha = pi/2 this is the Euclidean plane distance.
double cone_point_distance(double r1, double phi1, double r2, double phi2, double alpha);
double cone_point_distance(const WedgePoint& a, const WedgePoint& b, double alpha);

}  // namespace acgeo
