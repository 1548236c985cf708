#include "acgeo/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace acgeo {

namespace {

// Unit normal of the coordinate circle at p, pointing toward the pole.
Vec2 pole_facing_normal(const Metric2& g, const ChartPoint& p) {
  (void)p;
  // Gram-Schmidt of -d/dr against the circle tangent d/dphi.
  Vec2 n{-1.0, g.g12 / g.g22};
  double len = g.norm(n);
  return {n.x1 / len, n.x2 / len};
}

}  // namespace

double circle_geodesic_curvature(const SurfaceMetric& m, double r, double phi) {
  ChartPoint p = ChartPoint::polar(r, phi);
  MetricJet jet = m.metric_jet(p);
  Christoffel ch = christoffel_from_jet(jet);
  Vec2 acc{ch.c1_22, ch.c2_22};  // covariant acceleration of the phi-curve
  Vec2 n = pole_facing_normal(jet.g, p);
  return jet.g.dot(acc, n) / jet.g.g22;
}

double circle_total_curvature(const SurfaceMetric& m, double r, int nphi) {
  if (!(r > 0.0)) throw config_error("circle radius must be positive");
  if (m.rotational()) {
    double kg = circle_geodesic_curvature(m, r, 0.0);
    return kg * std::sqrt(m.metric_at(ChartPoint::polar(r, 0.0)).g22) * 2.0 * kPi;
  }
  if (nphi < 4) throw config_error("circle quadrature needs nphi >= 4");
  double dphi = 2.0 * kPi / nphi;
  double sum = 0.0;
  for (int j = 0; j < nphi; ++j) {
    double phi = (j + 0.5) * dphi;
    double kg = circle_geodesic_curvature(m, r, phi);
    double speed = std::sqrt(m.metric_at(ChartPoint::polar(r, phi)).g22);
    sum += kg * speed * dphi;
  }
  return sum;
}

namespace {

// Midpoint quadrature of K dA over r in [r_lo, r_hi]; a rotational integrand
// is evaluated on one meridian and weighted by the full angle.
double curvature_integral(const SurfaceMetric& m, double r_lo, double r_hi,
                          int nr, int nphi) {
  if (nr < 2) throw config_error("area quadrature needs nr >= 2");
  if (nphi < 4) throw config_error("area quadrature needs nphi >= 4");
  int nphi_eff = m.rotational() ? 1 : nphi;
  double dr = (r_hi - r_lo) / nr;
  double dphi = 2.0 * kPi / nphi_eff;
  double sum = 0.0;
  for (int i = 0; i < nr; ++i) {
    double r = r_lo + (i + 0.5) * dr;
    if (r < m.min_radius()) continue;
    for (int j = 0; j < nphi_eff; ++j) {
      double phi = (j + 0.5) * dphi;
      ChartPoint p = ChartPoint::polar(r, phi);
      sum += m.gauss_curvature(p) * std::sqrt(m.metric_at(p).det()) * dr * dphi;
    }
  }
  return sum;
}

GaussBonnetReport finish_report(double area_term, double boundary_term,
                                double expected) {
  GaussBonnetReport rep;
  rep.curvature_integral = area_term;
  rep.boundary_integral = boundary_term;
  rep.total = area_term + boundary_term;
  rep.expected = expected;
  rep.defect = expected - rep.total;
  return rep;
}

}  // namespace

GaussBonnetReport gauss_bonnet_disk(const SurfaceMetric& m, double r0, int nr,
                                    int nphi) {
  if (!(r0 > 0.0)) throw config_error("disk radius must be positive");
  if (!m.rotational())
    throw regime_error(
        "disk Gauss-Bonnet needs a rotational family: the perturbed curvature "
        "is not integrable at the vertex; use the annulus");
  double area = curvature_integral(m, 0.0, r0, nr, nphi);
  double boundary = circle_total_curvature(m, r0, nphi);
  return finish_report(area, boundary, 2.0 * kPi);
}

GaussBonnetReport gauss_bonnet_annulus(const SurfaceMetric& m, double r_in,
                                       double r_out, int nr, int nphi) {
  if (!(r_in > 0.0) || !(r_out > r_in))
    throw config_error("annulus needs 0 < r_in < r_out");
  if (r_in < m.min_radius())
    throw regime_error("annulus must avoid the excluded vertex region");
  double area = curvature_integral(m, r_in, r_out, nr, nphi);
  // Both circles are measured with the pole-facing normal; at the inner
  // boundary that normal points out of the annulus, flipping the sign.
  double boundary = circle_total_curvature(m, r_out, nphi) -
                    circle_total_curvature(m, r_in, nphi);
  return finish_report(area, boundary, 0.0);
}

double mass_formula(const SurfaceMetric& m) {
  return 2.0 * kPi * (1.0 - m.sin_alpha());
}

double mass_measured(const SurfaceMetric& m, double r0, int nphi) {
  return 2.0 * kPi - circle_total_curvature(m, r0, nphi);
}

BlowDownReport blow_down_compare(const SurfaceMetric& m, const DiscreteCurve& c,
                                 double r0, double phi0, int n_model,
                                 double r_lo, double r_hi) {
  if (!(r0 > 0.0)) throw config_error("blow-down scale must be positive");
  if (!c.valid()) throw config_error("blow-down needs a valid curve");
  if (n_model <= 0) n_model = std::max(64, 2 * c.segments());
  if (r_hi <= 0.0) r_hi = std::numeric_limits<double>::infinity();
  if (r_lo < 0.0 || !(r_lo < r_hi))
    throw config_error("blow-down window needs 0 <= r_lo < r_hi");

  DiscreteCurve scaled;
  scaled.nodes.reserve(c.nodes.size());
  for (const ChartPoint& n : c.nodes) {
    if (n.is_polar()) {
      scaled.nodes.push_back(ChartPoint::polar(n.x1 / r0, n.x2));
    } else {
      double r = n.radius() / r0;
      double phi = r > 0.0 ? std::atan2(n.x2, n.x1) : 0.0;
      scaled.nodes.push_back(ChartPoint::polar(std::max(r, 1e-300), phi));
    }
  }

  double alpha = m.alpha();
  auto model_dist = [&](ConeModel which) {
    DiscreteCurve model =
        curve_from_nodes(cone_model_nodes(which, 1.0, phi0, alpha, n_model));
    return support_distance_window(scaled, model, alpha, r_lo, r_hi);
  };

  BlowDownReport rep;
  rep.scale = r0;
  rep.dist_upper = model_dist(ConeModel::SmoothUpper);
  rep.dist_lower = model_dist(ConeModel::SmoothLower);
  rep.dist_singular = model_dist(ConeModel::Singular);
  rep.best = ConeModel::SmoothUpper;
  rep.best_dist = rep.dist_upper;
  if (rep.dist_lower < rep.best_dist) {
    rep.best = ConeModel::SmoothLower;
    rep.best_dist = rep.dist_lower;
  }
  if (rep.dist_singular < rep.best_dist) {
    rep.best = ConeModel::Singular;
    rep.best_dist = rep.dist_singular;
  }
  return rep;
}

double length_in_ball(const SurfaceMetric& m, const DiscreteCurve& c, double rho) {
  if (!(rho > 0.0)) throw config_error("ball radius must be positive");
  if (!c.valid()) throw config_error("length_in_ball needs a valid curve");
  double total = 0.0;
  for (int i = 0; i < c.segments(); ++i) {
    Vec2 A = global_xy(c.nodes[i]);
    Vec2 B = global_xy(c.nodes[i + 1]);
    Vec2 D = B - A;
    double dd = D.x1 * D.x1 + D.x2 * D.x2;
    double fraction;
    if (dd < 1e-300) {
      fraction = (std::hypot(A.x1, A.x2) <= rho) ? 1.0 : 0.0;
    } else {
      // |A + t D|^2 = rho^2 on the chordal support of the segment
      double b = (A.x1 * D.x1 + A.x2 * D.x2) / dd;
      double cterm = (A.x1 * A.x1 + A.x2 * A.x2 - rho * rho) / dd;
      double disc = b * b - cterm;
      if (disc <= 0.0) {
        fraction = 0.0;
      } else {
        double s = std::sqrt(disc);
        double t0 = std::max(0.0, -b - s);
        double t1 = std::min(1.0, -b + s);
        fraction = std::max(0.0, t1 - t0);
      }
    }
    if (fraction <= 0.0) continue;
    SegmentGeom geom = segment_geometry(m, c.nodes[i], c.nodes[i + 1]);
    double seg_len = std::sqrt(m.metric_at(geom.mid()).norm2(geom.delta()));
    total += fraction * seg_len;
  }
  return total;
}

double vertex_concentration(const SurfaceMetric& m, const DiscreteCurve& c,
                            double rho_lo, double rho_hi, int n_rho) {
  if (!(rho_lo > 0.0) || !(rho_hi > rho_lo) || n_rho < 2)
    throw config_error("concentration scan needs 0 < rho_lo < rho_hi, n >= 2");
  double best = 0.0;
  for (int k = 0; k < n_rho; ++k) {
    double rho = rho_lo * std::pow(rho_hi / rho_lo, (double)k / (n_rho - 1));
    best = std::max(best, length_in_ball(m, c, rho) / rho);
  }
  return best;
}

std::vector<NoDriftPoint> no_drift_trace(const SurfaceMetric& m,
                                         const std::vector<double>& r0_list,
                                         MinMaxConfig base) {
  if (r0_list.empty()) throw config_error("no-drift trace needs at least one r0");
  std::vector<NoDriftPoint> out;
  out.reserve(r0_list.size());
  for (double r0 : r0_list) {
    if (!(r0 > 0.0)) throw config_error("no-drift radii must be positive");
    base.r0 = r0;
    PipelineResult res = run_minmax_pipeline(m, base);
    const DiscreteCurve& g3 = res.minmax.gamma3.curve;
    NoDriftPoint pt;
    pt.r0 = r0;
    pt.closest_approach = std::numeric_limits<double>::infinity();
    for (const ChartPoint& n : g3.nodes)
      pt.closest_approach = std::min(pt.closest_approach, n.radius());
    pt.lambda = res.minmax.lambda;
    pt.ratio = res.minmax.ratio;
    pt.concentration = vertex_concentration(m, g3, 0.02 * r0, 0.5 * r0);
    out.push_back(pt);
  }
  return out;
}

RayAsymptote ray_asymptote(const SurfaceMetric& m, const DiscreteCurve& c,
                           bool from_back, double r_min_fit) {
  if (!c.valid()) throw config_error("ray fit needs a valid curve");
  if (!(r_min_fit > 0.0)) throw config_error("ray fit window must be positive");
  double sa = m.sin_alpha();

  // outer window of polar nodes at the chosen end, mapped to the wedge plane
  std::vector<double> X, Y;
  int n = (int)c.nodes.size();
  for (int k = 0; k < n; ++k) {
    const ChartPoint& node = c.nodes[from_back ? n - 1 - k : k];
    if (!node.is_polar() || node.x1 < r_min_fit) break;
    double theta = node.x2 * sa;
    X.push_back(node.x1 * std::cos(theta));
    Y.push_back(node.x1 * std::sin(theta));
  }
  if (X.size() < 3)
    throw config_error("ray fit window contains fewer than three nodes");

  // rotate until the least-squares slope vanishes; the line is then y = b
  double theta_hat = std::atan2(Y.front(), X.front());
  double slope = 0.0, b = 0.0;
  size_t cnt = X.size();
  for (int pass = 0;; ++pass) {
    double ct = std::cos(theta_hat), st = std::sin(theta_hat);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < cnt; ++i) {
      double x = ct * X[i] + st * Y[i];
      double y = -st * X[i] + ct * Y[i];
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double den = cnt * sxx - sx * sx;
    if (!(std::fabs(den) > 1e-30 * cnt * sxx))
      throw convergence_error("ray fit window is angularly degenerate");
    slope = (cnt * sxy - sx * sy) / den;
    b = (sy - slope * sx) / cnt;
    double dtheta = std::atan(slope);
    if (std::fabs(dtheta) < 1e-14) break;
    if (pass >= 100) throw convergence_error("ray asymptote fit did not stabilize");
    theta_hat += dtheta;
  }

  RayAsymptote ray;
  ray.theta_inf = theta_hat;
  ray.intercept = b;
  ray.nodes_used = (int)cnt;

  double mu = m.family() == Family::Perturbed ? m.mu() : 1.0;
  double expo = std::max(0.0, 1.0 - mu);
  double ct = std::cos(theta_hat), st = std::sin(theta_hat);
  double worst = 0.0;
  for (size_t i = 0; i < cnt; ++i) {
    double x = ct * X[i] + st * Y[i];
    double y = -st * X[i] + ct * Y[i];
    double res = std::fabs(y - (slope * x + b));
    double weight = std::pow(std::max(std::hypot(X[i], Y[i]), 1e-300), expo);
    worst = std::max(worst, res / weight);
  }
  ray.growth_c = worst;
  return ray;
}

DistinctnessReport distinctness_experiment(const SurfaceMetric& m, double phi0_a,
                                           double phi0_b, const MinMaxConfig& base,
                                           double r_fit_factor) {
  double dm = std::remainder(phi0_b - phi0_a, kPi);
  if (std::fabs(dm) < 1e-9)
    throw config_error("the two antipodal data coincide modulo pi");
  if (!(r_fit_factor > 0.0) || !(r_fit_factor < 1.0))
    throw config_error("ray fit factor must lie in (0, 1)");

  DistinctnessReport rep;
  rep.phi0_a = phi0_a;
  rep.phi0_b = phi0_b;
  rep.expected = std::fabs(dm) * m.sin_alpha();

  MinMaxConfig cfg = base;
  cfg.phi0 = phi0_a;
  rep.run_a = run_minmax_pipeline(m, cfg);
  cfg.phi0 = phi0_b;
  rep.run_b = run_minmax_pipeline(m, cfg);

  double r_fit = r_fit_factor * base.r0;
  const DiscreteCurve& ga = rep.run_a.minmax.gamma3.curve;
  const DiscreteCurve& gb = rep.run_b.minmax.gamma3.curve;
  rep.a_front = ray_asymptote(m, ga, false, r_fit);
  rep.a_back = ray_asymptote(m, ga, true, r_fit);
  rep.b_front = ray_asymptote(m, gb, false, r_fit);
  rep.b_back = ray_asymptote(m, gb, true, r_fit);

  // a half-turn of the data reproduces the same pair, so direction shifts
  // are compared modulo the wedge angle of a half-turn
  double half_turn = kPi * m.sin_alpha();
  double s_front =
      std::fabs(std::remainder(rep.b_front.theta_inf - rep.a_front.theta_inf, half_turn));
  double s_back =
      std::fabs(std::remainder(rep.b_back.theta_inf - rep.a_back.theta_inf, half_turn));
  rep.separation = 0.5 * (s_front + s_back);
  rep.rel_error = std::fabs(rep.separation - rep.expected) / rep.expected;
  return rep;
}

}  // namespace acgeo
