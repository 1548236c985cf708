#include "acgeo/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace acgeo {

UnfoldedPoint unfold(const ChartPoint& p, double alpha, double cut_phi) {
  if (!p.is_polar()) throw chart_error("unfold expects a polar point");
  double delta = p.x2 - cut_phi;
  delta -= 2.0 * kPi * std::floor(delta / (2.0 * kPi));
  if (delta == 0.0)
    throw chart_error("unfold: point lies on the cut meridian (ambiguous lift)");
  return {p.x1, delta * std::sin(alpha)};
}

ChartPoint fold(const UnfoldedPoint& w, double alpha, double cut_phi) {
  return ChartPoint::polar(w.rho, cut_phi + w.theta / std::sin(alpha));
}

ConeGeodesicSet antipodal_geodesics(double r, double alpha) {
  if (!(alpha > 0.0) || !(alpha < kPi / 2))
    throw regime_error("antipodal cone geodesics require 0 < alpha < pi/2");
  if (!(r > 0.0)) throw regime_error("antipodal cone geodesics require r > 0");
  double sa = std::sin(alpha);
  ConeGeodesicSet set;
  set.r = r;
  set.alpha = alpha;
  set.length_smooth = 2.0 * r * std::sin(kPi / 2 * sa);
  set.length_singular = 2.0 * r;
  // wedge frame with theta(p) = pi sin(alpha)
  set.upper_a = {r, kPi * sa};
  set.upper_b = {r, 2.0 * kPi * sa};
  set.lower_a = {r, kPi * sa};
  set.lower_b = {r, 0.0};
  return set;
}

double cone_distance(const ChartPoint& p, const ChartPoint& q, double alpha) {
  if (!p.is_polar() || !q.is_polar())
    throw chart_error("cone_distance expects polar points");
  return cone_point_distance(p.x1, p.x2, q.x1, q.x2, alpha);
}

double clairaut_invariant(const SurfaceMetric& m, const ChartPoint& p, Vec2 v) {
  if (!m.rotational())
    throw regime_error("Clairaut invariant requires a rotational metric");
  if (p.is_polar()) {
    Metric2 g = m.metric_at(p);
    return g.g22 * v.x2;
  }
  // d/dphi in patch coordinates is (-v, u)
  Metric2 g = m.metric_at(p);
  Vec2 k{-p.x2, p.x1};
  return g.dot(v, k);
}

std::vector<ChartPoint> cone_model_nodes(ConeModel which, double r0, double phi0,
                                         double alpha, int N) {
  if (N < 2) throw config_error("cone model curves need N >= 2");
  double sa = std::sin(alpha);
  std::vector<ChartPoint> nodes;
  nodes.reserve(N + 1);
  if (which == ConeModel::Singular) {
    for (int i = 0; i <= N; ++i) {
      double t = (double)i / N;
      double r = r0 * std::abs(1.0 - 2.0 * t);
      nodes.push_back(ChartPoint::polar(r, t <= 0.5 ? phi0 : phi0 + kPi));
    }
    return nodes;
  }
  // straight chord in the unfolded plane from theta = pi sa to 2 pi sa (upper)
  // or to 0 (lower); fold back with the cut at phi0 - pi
  double ta = kPi * sa;
  double tb = which == ConeModel::SmoothUpper ? 2.0 * kPi * sa : 0.0;
  double ax = r0 * std::cos(ta), ay = r0 * std::sin(ta);
  double bx = r0 * std::cos(tb), by = r0 * std::sin(tb);
  for (int i = 0; i <= N; ++i) {
    double t = (double)i / N;
    double x = (1.0 - t) * ax + t * bx;
    double y = (1.0 - t) * ay + t * by;
    double rho = std::hypot(x, y);
    double theta = std::atan2(y, x);
    if (theta < 0) theta += 2.0 * kPi;  // wedge angles live in [0, 2 pi sa), sa <= 1
    // unwrapped phi continuous along the chord (theta spans < pi, no wrap)
    double phi = (phi0 - kPi) + theta / sa;
    nodes.push_back(ChartPoint::polar(rho, phi));
  }
  // enforce exact endpoints
  nodes.front() = ChartPoint::polar(r0, phi0);
  nodes.back() = ChartPoint::polar(r0, which == ConeModel::SmoothUpper ? phi0 + kPi
                                                                       : phi0 - kPi);
  return nodes;
}

namespace {

struct ShootDeriv {
  Vec2 dp;
  Vec2 dv;
};

ShootDeriv geodesic_rhs(const SurfaceMetric& m, const ChartPoint& p, Vec2 v) {
  Christoffel c = m.christoffel(p);
  double a1 = -(c.c1_11 * v.x1 * v.x1 + 2.0 * c.c1_12 * v.x1 * v.x2 +
                c.c1_22 * v.x2 * v.x2);
  double a2 = -(c.c2_11 * v.x1 * v.x1 + 2.0 * c.c2_12 * v.x1 * v.x2 +
                c.c2_22 * v.x2 * v.x2);
  return {v, {a1, a2}};
}

}  // namespace

ShotGeodesic geodesic_shoot(const SurfaceMetric& m, const ChartPoint& p0, Vec2 v0,
                            double T, double h) {
  if (!(T > 0.0) || !(h > 0.0)) throw config_error("geodesic_shoot needs T, h > 0");
  long n = std::max(1l, std::lround(T / h));
  double dt = T / (double)n;

  ShotGeodesic shot;
  shot.step = dt;
  shot.samples.reserve(n + 1);

  struct ShootState {
    ChartPoint p;
    Vec2 v;
  } s{p0, v0};
  double phi_hint = p0.is_polar() ? p0.x2 : 0.0;
  double speed0 = std::sqrt(m.metric_at(p0).norm2(v0));
  if (!(speed0 > 0.0)) throw config_error("geodesic_shoot needs a nonzero velocity");
  bool rot = m.rotational();
  double J0 = rot ? clairaut_invariant(m, p0, v0) : std::numeric_limits<double>::quiet_NaN();
  double j_scale = 1.0;
  if (rot) j_scale = std::max(std::abs(J0), speed0 * std::sqrt(m.metric_at(p0).g22));
  shot.min_radius = p0.radius();
  shot.speed_drift_rate = 0.0;
  shot.clairaut_drift_rate = 0.0;

  auto record = [&](double t) {
    ShotSample smp;
    smp.t = t;
    smp.pos = s.p;
    smp.vel = s.v;
    smp.speed = std::sqrt(m.metric_at(s.p).norm2(s.v));
    smp.clairaut = rot ? clairaut_invariant(m, s.p, s.v)
                       : std::numeric_limits<double>::quiet_NaN();
    shot.samples.push_back(smp);
    double arc = speed0 * t;
    if (arc > 0.0) {
      shot.speed_drift_rate = std::max(
          shot.speed_drift_rate, std::abs(smp.speed - speed0) / (speed0 * arc));
      if (rot)
        shot.clairaut_drift_rate = std::max(
            shot.clairaut_drift_rate, std::abs(smp.clairaut - J0) / (j_scale * arc));
    }
    shot.min_radius = std::min(shot.min_radius, s.p.radius());
  };
  record(0.0);

  double enter_patch = 0.7 * m.patch_radius();
  double exit_patch = 0.95 * m.patch_radius();
  for (long i = 0; i < n; ++i) {
    // guard the vertex for cone-point families
    if (m.min_radius() > 0.0 && s.p.radius() < 2.0 * m.min_radius())
      throw chart_error("geodesic entered the excluded vertex region");
    auto at = [&](Vec2 dp, Vec2 dv, double c) {
      ChartPoint q = s.p;
      q.x1 += c * dp.x1;
      q.x2 += c * dp.x2;
      return geodesic_rhs(m, q, {s.v.x1 + c * dv.x1, s.v.x2 + c * dv.x2});
    };
    ShootDeriv k1 = geodesic_rhs(m, s.p, s.v);
    ShootDeriv k2 = at(k1.dp, k1.dv, 0.5 * dt);
    ShootDeriv k3 = at(k2.dp, k2.dv, 0.5 * dt);
    ShootDeriv k4 = at(k3.dp, k3.dv, dt);
    s.p.x1 += dt / 6.0 * (k1.dp.x1 + 2 * k2.dp.x1 + 2 * k3.dp.x1 + k4.dp.x1);
    s.p.x2 += dt / 6.0 * (k1.dp.x2 + 2 * k2.dp.x2 + 2 * k3.dp.x2 + k4.dp.x2);
    s.v.x1 += dt / 6.0 * (k1.dv.x1 + 2 * k2.dv.x1 + 2 * k3.dv.x1 + k4.dv.x1);
    s.v.x2 += dt / 6.0 * (k1.dv.x2 + 2 * k2.dv.x2 + 2 * k3.dv.x2 + k4.dv.x2);

    // chart management
    if (m.has_patch()) {
      if (s.p.is_polar() && s.p.x1 < enter_patch) {
        Jac2 J = m.transition_jacobian(s.p, Chart::Patch);
        phi_hint = s.p.x2;
        s.v = J.apply(s.v);
        s.p = m.to_patch(s.p);
      } else if (s.p.is_patch() && s.p.radius() > exit_patch) {
        Jac2 J = m.transition_jacobian(s.p, Chart::Polar);
        s.v = J.apply(s.v);
        s.p = m.to_polar(s.p, phi_hint);
        phi_hint = s.p.x2;
      } else if (s.p.is_polar()) {
        phi_hint = s.p.x2;
      }
    }
    record((i + 1) * dt);
  }
  shot.arclength = speed0 * T;
  return shot;
}

}  // namespace acgeo
