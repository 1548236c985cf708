#include "acgeo/metric.hpp"

#include <algorithm>
#include <cmath>

namespace acgeo {

namespace {

// Gudermannian gd(x) = atan(sinh x) = pi/2 - 2 atan(exp(-x)), overflow-safe.
double gd(double x) {
  double ax = std::abs(x);
  double v = kPi / 2 - 2.0 * std::atan(std::exp(-ax));
  return x < 0 ? -v : v;
}

double sech(double x) {
  double e = std::exp(-std::abs(x));
  return 2.0 * e / (1.0 + e * e);
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::Cone: return "cone";
    case Family::Flat: return "flat";
    case Family::Profile: return "profile";
    case Family::Perturbed: return "perturbed";
  }
  return "?";
}

SurfaceMetric SurfaceMetric::cone(double alpha) {
  if (!(alpha > 0.0) || !(alpha < kPi / 2))
    throw config_error("cone family requires 0 < alpha < pi/2");
  SurfaceMetric m;
  m.family_ = Family::Cone;
  m.alpha_ = alpha;
  m.sin_alpha_ = std::sin(alpha);
  m.r_min_ = 1e-6;
  return m;
}

SurfaceMetric SurfaceMetric::flat() {
  SurfaceMetric m;
  m.family_ = Family::Flat;
  m.alpha_ = kPi / 2;
  m.sin_alpha_ = 1.0;
  // The patch chart is exact everywhere on the plane; keep it comfortably
  // larger than typical node spacings so curves crossing the origin are
  // measured as straight chords, not polar-angle detours.
  m.r_patch_ = 0.25;
  return m;
}

SurfaceMetric SurfaceMetric::profile(double alpha, double a, double r_patch) {
  if (!(alpha > 0.0) || !(alpha <= kPi / 2))
    throw config_error("profile family requires 0 < alpha <= pi/2");
  if (!(a > 0.0)) throw config_error("profile smoothing scale must be positive");
  SurfaceMetric m;
  m.family_ = Family::Profile;
  m.alpha_ = alpha;
  m.sin_alpha_ = std::sin(alpha);
  m.a_ = a;
  // The patch chart is exact at every radius; a patch region comparable to the
  // smoothing scale lets segments that cross the pole be measured as straight
  // chords through the origin rather than polar-angle detours.
  m.r_patch_ = r_patch > 0.0 ? r_patch : a;
  return m;
}

SurfaceMetric SurfaceMetric::perturbed(double alpha, double mu, std::array<double, 3> amp) {
  if (!(alpha > 0.0) || !(alpha < kPi / 2))
    throw config_error("perturbed family requires 0 < alpha < pi/2");
  if (!(mu > 0.0)) throw config_error("perturbed decay rate mu must be positive");
  for (double c : amp)
    if (std::abs(c) >= 0.5)
      throw config_error("perturbed amplitudes must satisfy |c| < 0.5");
  SurfaceMetric m;
  m.family_ = Family::Perturbed;
  m.alpha_ = alpha;
  m.sin_alpha_ = std::sin(alpha);
  m.mu_ = mu;
  m.amp_ = amp;
  m.r_min_ = 1e-6;
  return m;
}

void SurfaceMetric::require_valid(const ChartPoint& p) const {
  if (p.is_patch()) {
    if (!has_patch())
      throw chart_error(std::string("family ") + family_name(family_) +
                        " has no pole patch");
    return;
  }
  if (!(p.x1 > 0.0)) throw chart_error("polar chart requires r > 0");
  if (r_min_ > 0.0 && p.x1 < r_min_)
    throw chart_error("evaluation below r_min on a family with a cone point");
}

double SurfaceMetric::f(double r) const {
  switch (family_) {
    case Family::Cone: return r * sin_alpha_;
    case Family::Flat: return r;
    case Family::Profile:
      return r * sin_alpha_ + (1.0 - sin_alpha_) * a_ * gd(r / a_);
    case Family::Perturbed: break;
  }
  throw chart_error("profile function undefined for non-rotational family");
}

double SurfaceMetric::fp(double r) const {
  switch (family_) {
    case Family::Cone: return sin_alpha_;
    case Family::Flat: return 1.0;
    case Family::Profile: return sin_alpha_ + (1.0 - sin_alpha_) * sech(r / a_);
    case Family::Perturbed: break;
  }
  throw chart_error("profile function undefined for non-rotational family");
}

double SurfaceMetric::fpp(double r) const {
  switch (family_) {
    case Family::Cone:
    case Family::Flat: return 0.0;
    case Family::Profile: {
      double x = r / a_;
      return -(1.0 - sin_alpha_) / a_ * sech(x) * std::tanh(x);
    }
    case Family::Perturbed: break;
  }
  throw chart_error("profile function undefined for non-rotational family");
}

void SurfaceMetric::patch_s(double r, double& s, double& s1) const {
  if (family_ == Family::Flat) {
    s = 0.0;
    s1 = 0.0;
    return;
  }
  // profile: s = (1 - (f/r)^2)/r^2, s1 = s'/r, both even and finite at 0
  double x = r / a_;
  double beta = 1.0 - sin_alpha_;
  if (x < 1e-3) {
    // series via gd(x)/x = 1 - x^2/6 + x^4/24 - 61 x^6/5040
    double c2 = beta / 12.0 + beta * beta / 36.0;
    double c4 = 61.0 * beta / 2520.0 + beta * beta / 72.0;
    double x2 = x * x;
    s = (beta / 3.0 - c2 * x2 + c4 * x2 * x2) / (a_ * a_);
    s1 = (-2.0 * c2 + 4.0 * c4 * x2) / (a_ * a_ * a_ * a_);
    return;
  }
  double h = f(r) / r;                  // f/r
  double hp = (fp(r) - h) / r;          // (f/r)'
  s = (1.0 - h * h) / (r * r);
  double sp = -2.0 * h * hp / (r * r) - 2.0 * s / r;  // s'(r)
  s1 = sp / r;
}

Metric2 SurfaceMetric::metric_at(const ChartPoint& p) const {
  require_valid(p);
  Metric2 g;
  if (p.is_patch()) {
    double u = p.x1, v = p.x2;
    double r = std::hypot(u, v);
    double s, s1;
    patch_s(r, s, s1);
    g.g11 = 1.0 - s * v * v;
    g.g12 = s * u * v;
    g.g22 = 1.0 - s * u * u;
    return g;
  }
  double r = p.x1, phi = p.x2;
  switch (family_) {
    case Family::Cone: {
      double fr = r * sin_alpha_;
      g.g22 = fr * fr;
      return g;
    }
    case Family::Flat: {
      g.g22 = r * r;
      return g;
    }
    case Family::Profile: {
      double fr = f(r);
      g.g22 = fr * fr;
      return g;
    }
    case Family::Perturbed: {
      double w = std::pow(1.0 + dil_ * r, -mu_);
      g.g11 = 1.0 + amp_[0] * w * std::cos(phi);
      g.g12 = amp_[2] * r * w * std::sin(phi);
      g.g22 = r * r * sin_alpha_ * sin_alpha_ * (1.0 + amp_[1] * w);
      return g;
    }
  }
  return g;
}

MetricJet SurfaceMetric::metric_jet(const ChartPoint& p) const {
  require_valid(p);
  MetricJet jet;
  jet.g = metric_at(p);
  jet.d1 = {0.0, 0.0, 0.0};
  jet.d2 = {0.0, 0.0, 0.0};
  if (p.is_patch()) {
    double u = p.x1, v = p.x2;
    double r = std::hypot(u, v);
    double s, s1;
    patch_s(r, s, s1);
    // d/du with s_u = s1 * u, d/dv with s_v = s1 * v
    jet.d1.g11 = -s1 * u * v * v;
    jet.d1.g12 = s1 * u * u * v + s * v;
    jet.d1.g22 = -s1 * u * u * u - 2.0 * s * u;
    jet.d2.g11 = -s1 * v * v * v - 2.0 * s * v;
    jet.d2.g12 = s1 * u * v * v + s * u;
    jet.d2.g22 = -s1 * v * u * u;
    return jet;
  }
  double r = p.x1, phi = p.x2;
  switch (family_) {
    case Family::Cone:
    case Family::Flat:
    case Family::Profile:
      jet.d1.g22 = 2.0 * f(r) * fp(r);
      return jet;
    case Family::Perturbed: {
      double s2 = sin_alpha_ * sin_alpha_;
      double w = std::pow(1.0 + dil_ * r, -mu_);
      double wp = -mu_ * dil_ * std::pow(1.0 + dil_ * r, -mu_ - 1.0);
      double cp = std::cos(phi), sp = std::sin(phi);
      jet.d1.g11 = amp_[0] * wp * cp;
      jet.d1.g12 = amp_[2] * (w + r * wp) * sp;
      jet.d1.g22 = s2 * (2.0 * r * (1.0 + amp_[1] * w) + r * r * amp_[1] * wp);
      jet.d2.g11 = -amp_[0] * w * sp;
      jet.d2.g12 = amp_[2] * r * w * cp;
      jet.d2.g22 = 0.0;
      return jet;
    }
  }
  return jet;
}

Christoffel christoffel_from_jet(const MetricJet& jet) {
  const Metric2& g = jet.g;
  double det = g.det();
  double i11 = g.g22 / det, i12 = -g.g12 / det, i22 = g.g11 / det;
  // lowered symbols [ij,l] = (d_i g_jl + d_j g_il - d_l g_ij)/2
  double l11_1 = 0.5 * jet.d1.g11;
  double l11_2 = jet.d1.g12 - 0.5 * jet.d2.g11;
  double l12_1 = 0.5 * jet.d2.g11;
  double l12_2 = 0.5 * jet.d1.g22;
  double l22_1 = jet.d2.g12 - 0.5 * jet.d1.g22;
  double l22_2 = 0.5 * jet.d2.g22;
  Christoffel c;
  c.c1_11 = i11 * l11_1 + i12 * l11_2;
  c.c2_11 = i12 * l11_1 + i22 * l11_2;
  c.c1_12 = i11 * l12_1 + i12 * l12_2;
  c.c2_12 = i12 * l12_1 + i22 * l12_2;
  c.c1_22 = i11 * l22_1 + i12 * l22_2;
  c.c2_22 = i12 * l22_1 + i22 * l22_2;
  return c;
}

Christoffel SurfaceMetric::christoffel(const ChartPoint& p) const {
  return christoffel_from_jet(metric_jet(p));
}

double SurfaceMetric::gauss_curvature(const ChartPoint& p) const {
  require_valid(p);
  switch (family_) {
    case Family::Cone:
    case Family::Flat:
      return 0.0;
    case Family::Profile: {
      double r = p.radius();
      double x = r / a_;
      double beta = 1.0 - sin_alpha_;
      if (x < 1e-4) {
        // K = -f''/f = beta/a^2 (1 - (5 - beta) x^2 / 6 + O(x^4))
        return beta / (a_ * a_) * (1.0 - (5.0 - beta) * x * x / 6.0);
      }
      return -fpp(r) / f(r);
    }
    case Family::Perturbed: {
      // Brioschi formula with E = g_rr, F = g_rphi, G = g_phiphi
      double r = p.x1, phi = p.x2;
      double s2 = sin_alpha_ * sin_alpha_;
      double z = 1.0 + dil_ * r;
      double w = std::pow(z, -mu_);
      double wp = -mu_ * dil_ * std::pow(z, -mu_ - 1.0);
      double wpp = mu_ * (mu_ + 1.0) * dil_ * dil_ * std::pow(z, -mu_ - 2.0);
      double cp = std::cos(phi), sp = std::sin(phi);
      double E = 1.0 + amp_[0] * w * cp;
      double F = amp_[2] * r * w * sp;
      double G = r * r * s2 * (1.0 + amp_[1] * w);
      double E_r = amp_[0] * wp * cp;
      double E_phi = -amp_[0] * w * sp;
      double E_phiphi = -amp_[0] * w * cp;
      double F_r = amp_[2] * (w + r * wp) * sp;
      double F_phi = amp_[2] * r * w * cp;
      double F_rphi = amp_[2] * (w + r * wp) * cp;
      double G_r = s2 * (2.0 * r * (1.0 + amp_[1] * w) + r * r * amp_[1] * wp);
      double G_rr = s2 * (2.0 * (1.0 + amp_[1] * w) + 4.0 * r * amp_[1] * wp +
                          r * r * amp_[1] * wpp);
      double G_phi = 0.0;
      auto det3 = [](double a11, double a12, double a13, double a21, double a22,
                     double a23, double a31, double a32, double a33) {
        return a11 * (a22 * a33 - a23 * a32) - a12 * (a21 * a33 - a23 * a31) +
               a13 * (a21 * a32 - a22 * a31);
      };
      double m1 = det3(-0.5 * E_phiphi + F_rphi - 0.5 * G_rr, 0.5 * E_r,
                       F_r - 0.5 * E_phi, F_phi - 0.5 * G_r, E, F, 0.5 * G_phi, F, G);
      double m2 = det3(0.0, 0.5 * E_phi, 0.5 * G_r, 0.5 * E_phi, E, F, 0.5 * G_r, F, G);
      double den = E * G - F * F;
      return (m1 - m2) / (den * den);
    }
  }
  return 0.0;
}

SurfaceMetric SurfaceMetric::rescaled(double lambda) const {
  if (!(lambda > 0.0)) throw config_error("rescale requires lambda > 0");
  SurfaceMetric m = *this;
  switch (family_) {
    case Family::Cone:
    case Family::Flat:
      break;
    case Family::Profile:
      m.a_ = a_ / lambda;
      m.r_patch_ = r_patch_ / lambda;
      break;
    case Family::Perturbed:
      m.dil_ = dil_ * lambda;
      break;
  }
  if (m.r_min_ > 0.0) m.r_min_ = std::max(r_min_ / lambda, 1e-300);
  return m;
}

ChartPoint SurfaceMetric::to_patch(const ChartPoint& p) const {
  if (!has_patch()) throw chart_error("family has no pole patch");
  if (p.is_patch()) return p;
  return ChartPoint::patch(p.x1 * std::cos(p.x2), p.x1 * std::sin(p.x2));
}

ChartPoint SurfaceMetric::to_polar(const ChartPoint& p, double phi_hint) const {
  if (p.is_polar()) return p;
  double r = std::hypot(p.x1, p.x2);
  if (!(r > 0.0)) throw chart_error("patch origin has no polar representation");
  double phi = std::atan2(p.x2, p.x1);
  // lift phi to the representative nearest phi_hint
  double k = std::round((phi_hint - phi) / (2.0 * kPi));
  return ChartPoint::polar(r, phi + 2.0 * kPi * k);
}

ChartPoint SurfaceMetric::canonical(const ChartPoint& p, double phi_hint) const {
  if (!has_patch()) {
    if (p.is_patch()) throw chart_error("family has no pole patch");
    return p;
  }
  double r = p.radius();
  if (r < r_patch_) return to_patch(p);
  return to_polar(p, phi_hint);
}

Jac2 SurfaceMetric::transition_jacobian(const ChartPoint& p, Chart target) const {
  if (p.chart == target) return Jac2::identity();
  if (target == Chart::Patch) {
    // d(u,v)/d(r,phi) at polar p
    double r = p.x1, c = std::cos(p.x2), s = std::sin(p.x2);
    return {c, -r * s, s, r * c};
  }
  // d(r,phi)/d(u,v) at patch p
  double u = p.x1, v = p.x2;
  double r2 = u * u + v * v;
  double r = std::sqrt(r2);
  if (!(r > 0.0)) throw chart_error("transition jacobian singular at patch origin");
  return {u / r, v / r, -v / r2, u / r2};
}

// --- wedge coordinates ------------------------------------------------------

double wedge_full_angle(double alpha) { return 2.0 * kPi * std::sin(alpha); }

WedgePoint wedge_coords(const ChartPoint& p, double alpha) {
  if (!p.is_polar()) throw chart_error("wedge coordinates expect a polar point");
  return {p.x1, p.x2 * std::sin(alpha)};
}

ChartPoint wedge_inverse(const WedgePoint& w, double alpha) {
  return ChartPoint::polar(w.rho, w.theta / std::sin(alpha));
}

double wedge_wrap(double theta, double alpha) {
  double full = wedge_full_angle(alpha);
  double t = std::fmod(theta, full);
  if (t < 0) t += full;
  return t;
}

double cone_point_distance(double r1, double phi1, double r2, double phi2,
                           double alpha) {
  double sa = std::sin(alpha);
  double best = r1 + r2;  // path through the vertex
  double delta = std::remainder(phi2 - phi1, 2.0 * kPi);
  // chords in unfoldings: lifts delta + 2 pi k with |(delta + 2 pi k) sa| < pi
  int kmax = (int)std::ceil((kPi / sa + kPi) / (2.0 * kPi)) + 1;
  for (int k = -kmax; k <= kmax; ++k) {
    double dphi = delta + 2.0 * kPi * k;
    double dtheta = dphi * sa;
    if (std::abs(dtheta) >= kPi) continue;
    double chord =
        std::sqrt(std::max(0.0, r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * std::cos(dtheta)));
    best = std::min(best, chord);
  }
  return best;
}

double cone_point_distance(const WedgePoint& a, const WedgePoint& b, double alpha) {
  double sa = std::sin(alpha);
  return cone_point_distance(a.rho, a.theta / sa, b.rho, b.theta / sa, alpha);
}

}  // namespace acgeo
