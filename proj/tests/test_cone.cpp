#include <doctest.h>

#include <cmath>

#include "acgeo/cone.hpp"
#include "oracles.hpp"

using namespace acgeo;

TEST_SUITE_BEGIN("cone");

TEST_CASE("unfold and fold") {
  double alpha = kPi / 6;
  // (r=1, phi=pi), cut at 0 -> (1, pi/2)
  UnfoldedPoint w = unfold(ChartPoint::polar(1.0, kPi), alpha, 0.0);
  CHECK(w.rho == doctest::Approx(1.0));
  CHECK(w.theta == doctest::Approx(kPi / 2).epsilon(1e-15));
  ChartPoint back = fold(w, alpha, 0.0);
  CHECK(back.x2 == doctest::Approx(kPi).epsilon(1e-14));
  // lift is taken modulo 2 pi relative to the cut
  UnfoldedPoint w2 = unfold(ChartPoint::polar(2.0, kPi + 2 * kPi), alpha, 0.0);
  CHECK(w2.theta == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK_THROWS_AS(unfold(ChartPoint::polar(1.0, 2 * kPi), alpha, 0.0), chart_error);
}

TEST_CASE("unfolding preserves the cone metric along random segments") {
  // the chord length computed in the unfolded plane equals cone_distance
  double alpha = 0.4;
  oracle::Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    double r1 = rng.uniform(0.2, 3.0), r2 = rng.uniform(0.2, 3.0);
    double phi1 = rng.uniform(0.5, 1.0);
    double dphi = rng.uniform(-0.45, 0.45) * kPi / std::sin(alpha);
    double phi2 = phi1 + dphi;
    UnfoldedPoint a = unfold(ChartPoint::polar(r1, phi1), alpha, phi1 - kPi);
    UnfoldedPoint b = unfold(ChartPoint::polar(r2, phi2), alpha, phi1 - kPi);
    double chord = std::hypot(a.rho * std::cos(a.theta) - b.rho * std::cos(b.theta),
                              a.rho * std::sin(a.theta) - b.rho * std::sin(b.theta));
    double d = cone_distance(ChartPoint::polar(r1, phi1), ChartPoint::polar(r2, phi2),
                             alpha);
    CHECK(d <= chord + 1e-12);
    // for small angular separation the chord is the geodesic
    if (std::abs(dphi) * std::sin(alpha) < kPi / 2 && chord < r1 + r2)
      CHECK(d == doctest::Approx(chord).epsilon(1e-12));
  }
}

TEST_CASE("antipodal geodesics lengths") {
  // alpha = pi/6, r = 1: smooth length 2 sin(pi/4) = sqrt(2), singular 2
  auto set = antipodal_geodesics(1.0, kPi / 6);
  CHECK(set.length_smooth == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(set.length_singular == doctest::Approx(2.0));
  // alpha = pi/3: 2 sin(pi/2 sin(pi/3))
  auto set2 = antipodal_geodesics(1.0, kPi / 3);
  double expected = 2.0 * std::sin(kPi / 2 * std::sin(kPi / 3));
  CHECK(set2.length_smooth == doctest::Approx(expected).epsilon(1e-15));
  // smooth beats singular strictly for alpha < pi/2
  CHECK(set.length_smooth < set.length_singular);
  CHECK(set2.length_smooth < set2.length_singular);
  CHECK_THROWS_AS(antipodal_geodesics(1.0, kPi / 2), regime_error);
  // scaling in r
  auto set3 = antipodal_geodesics(7.0, kPi / 6);
  CHECK(set3.length_smooth == doctest::Approx(7.0 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("model curve nodes") {
  int N = 64;
  double r0 = 2.0, phi0 = 0.3, alpha = kPi / 6;
  auto up = cone_model_nodes(ConeModel::SmoothUpper, r0, phi0, alpha, N);
  auto lo = cone_model_nodes(ConeModel::SmoothLower, r0, phi0, alpha, N);
  auto sg = cone_model_nodes(ConeModel::Singular, r0, phi0, alpha, N);
  REQUIRE(up.size() == (size_t)N + 1);
  CHECK(up.front().x1 == doctest::Approx(r0));
  CHECK(up.front().x2 == doctest::Approx(phi0));
  CHECK(up.back().x2 == doctest::Approx(phi0 + kPi));
  CHECK(lo.back().x2 == doctest::Approx(phi0 - kPi));
  // chord length recovered by summing segment cone distances
  double len = 0.0;
  for (int i = 0; i < N; ++i) len += cone_distance(up[i], up[i + 1], alpha);
  CHECK(len == doctest::Approx(2.0 * r0 * std::sin(kPi / 4)).epsilon(1e-10));
  // constant speed: all segment lengths equal
  double l0 = cone_distance(up[0], up[1], alpha);
  for (int i = 1; i < N; ++i)
    CHECK(cone_distance(up[i], up[i + 1], alpha) == doctest::Approx(l0).epsilon(1e-9));
  // singular curve dips to the vertex at the midpoint
  CHECK(sg[N / 2].x1 == doctest::Approx(0.0));
  CHECK(sg.front().x1 == doctest::Approx(r0));
  // the upper chord reaches its closest approach r0 cos(pi/2 sin a) at t = 1/2
  CHECK(up[N / 2].x1 == doctest::Approx(r0 * std::cos(kPi / 4)).epsilon(1e-12));
}

TEST_CASE("clairaut invariant") {
  auto m = SurfaceMetric::cone(kPi / 6);
  ChartPoint p = ChartPoint::polar(2.0, 0.7);
  Vec2 v{0.3, 0.25};
  // J = r^2 sin^2(alpha) phidot = 4 * 0.25 * 0.25
  CHECK(clairaut_invariant(m, p, v) == doctest::Approx(0.25).epsilon(1e-12));
  auto pm = SurfaceMetric::perturbed(kPi / 6, 1.0, {0.1, 0.1, 0.1});
  CHECK_THROWS_AS(clairaut_invariant(pm, p, v), regime_error);
  // patch chart: rigid rotation field (-v, u)
  auto mp = SurfaceMetric::profile(kPi / 6, 1.0);
  ChartPoint q = ChartPoint::patch(0.004, 0.001);
  Vec2 w{0.2, -0.5};
  double J = clairaut_invariant(mp, q, w);
  // compare against polar evaluation on the overlap
  ChartPoint qp = mp.to_polar(q, 0.0);
  Jac2 Jac = mp.transition_jacobian(q, Chart::Polar);
  double Jpol = mp.metric_at(qp).g22 * Jac.apply(w).x2;
  CHECK(J == doctest::Approx(Jpol).epsilon(1e-10));
}

TEST_CASE("shooting on the flat plane is a straight line") {
  auto m = SurfaceMetric::flat();
  // start at (r=1, phi=0), velocity (1, 1): x(t) = (1+t, t) in Cartesian
  auto shot = geodesic_shoot(m, ChartPoint::polar(1.0, 0.0), Vec2{1.0, 1.0}, 2.0, 1e-3);
  auto end = shot.back();
  ChartPoint ep = end.pos.is_patch() ? m.to_polar(end.pos, 0.0) : end.pos;
  double x = ep.x1 * std::cos(ep.x2), y = ep.x1 * std::sin(ep.x2);
  CHECK(x == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(y == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(shot.speed_drift_rate < 1e-10);
}

TEST_CASE("cone shooting reproduces the unfolding chord") {
  // [oracle: the exact geodesic is a straight chord in the unfolded wedge]
  double alpha = kPi / 6;
  auto m = SurfaceMetric::cone(alpha);
  double sa = std::sin(alpha);
  // chord from theta=0 to theta=pi sa at rho=1 (the antipodal smooth geodesic)
  // initial direction: angle of B-A in the plane at A=(1,0)
  double bx = std::cos(kPi * sa), by = std::sin(kPi * sa);
  double ang = std::atan2(by - 0.0, bx - 1.0);
  Vec2 v{std::cos(ang), std::sin(ang) / (1.0 * sa)};  // (rdot, phidot)
  double L = 2.0 * std::sin(kPi / 2 * sa);
  auto shot = geodesic_shoot(m, ChartPoint::polar(1.0, 0.0), v, L, 1e-3);
  auto end = shot.back();
  CHECK(end.pos.x1 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(end.pos.x2 == doctest::Approx(kPi).epsilon(1e-8));
  // intermediate positions match the chord folded back, at many steps
  for (size_t k = 0; k < shot.samples.size(); k += 97) {
    const auto& smp = shot.samples[k];
    double t = smp.t / L;
    double px = (1.0 - t) * 1.0 + t * bx, py = t * by;
    double rho = std::hypot(px, py);
    CHECK(smp.pos.x1 == doctest::Approx(rho).epsilon(1e-7));
  }
  // Clairaut drift per unit arclength
  CHECK(shot.clairaut_drift_rate < 1e-8);
  CHECK(shot.speed_drift_rate < 1e-8);
  // closest approach predicted by the Clairaut bound: f(r*) = |J|/speed
  double J = clairaut_invariant(m, ChartPoint::polar(1.0, 0.0), v);
  double rstar = std::abs(J) / sa;  // unit speed
  CHECK(shot.min_radius >= rstar * (1.0 - 1e-6));
  CHECK(shot.min_radius == doctest::Approx(rstar).epsilon(1e-3));
}

TEST_CASE("profile shooting crosses the pole smoothly") {
  auto m = SurfaceMetric::profile(kPi / 6, 1.0);
  // the meridian is a geodesic through the pole
  auto shot = geodesic_shoot(m, ChartPoint::polar(1.0, 0.0), Vec2{-1.0, 0.0}, 2.0, 1e-3);
  auto end = shot.back();
  ChartPoint ep = end.pos.is_patch() ? m.to_polar(end.pos, kPi) : end.pos;
  CHECK(ep.x1 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(wedge_wrap(ep.x2 - kPi, kPi / 2) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(shot.min_radius < 1e-3);
  CHECK(shot.speed_drift_rate < 1e-7);
}

TEST_CASE("vertex guard on the cone") {
  auto m = SurfaceMetric::cone(kPi / 6);
  // radial infall hits the excluded vertex region
  CHECK_THROWS_AS(
      geodesic_shoot(m, ChartPoint::polar(1.0, 0.0), Vec2{-1.0, 0.0}, 1.5, 1e-4),
      chart_error);
}

TEST_CASE("RK4 convergence order at least 3.8") {
  auto m = SurfaceMetric::profile(kPi / 4, 1.0);
  ChartPoint p0 = ChartPoint::polar(2.0, 0.3);
  Vec2 v0{-0.8, 0.35};
  double T = 3.0;
  auto endpoint = [&](double h) {
    auto s = geodesic_shoot(m, p0, v0, T, h).back();
    ChartPoint q = s.pos.is_patch() ? m.to_polar(s.pos, 0.0) : s.pos;
    return q;
  };
  ChartPoint e1 = endpoint(1e-2), e2 = endpoint(5e-3), e3 = endpoint(2.5e-3),
             e4 = endpoint(1.25e-3);
  auto dist = [](ChartPoint a, ChartPoint b) {
    return std::hypot(a.x1 - b.x1, a.x2 - b.x2);
  };
  double d1 = dist(e1, e2), d2 = dist(e2, e3), d3 = dist(e3, e4);
  double order1 = std::log2(d1 / d2);
  double order2 = std::log2(d2 / d3);
  CHECK(order1 >= 3.8);
  CHECK(order2 >= 3.8);
  // drift rates at h = 1e-3 on cone and profile
  auto mc = SurfaceMetric::cone(kPi / 6);
  double sa = std::sin(kPi / 6);
  auto shot = geodesic_shoot(mc, ChartPoint::polar(1.5, 0.2), Vec2{-0.5, 0.9 / (1.5 * sa)},
                             2.0, 1e-3);
  CHECK(shot.clairaut_drift_rate < 1e-8);
  auto shotp = geodesic_shoot(m, p0, v0, T, 1e-3);
  CHECK(shotp.clairaut_drift_rate < 1e-8);
  CHECK(shotp.speed_drift_rate < 1e-8);
}

TEST_SUITE_END();
