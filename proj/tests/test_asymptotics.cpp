#include <doctest.h>

#include <cmath>

#include "acgeo/asymptotics.hpp"

using namespace acgeo;

TEST_SUITE_BEGIN("asymptotics");

namespace {

// Discrete meridian pair through the pole: phi0 + pi side in, phi0 side out.
DiscreteCurve meridian_pair(const SurfaceMetric& m, double r0, double phi0, int N) {
  DiscreteCurve c;
  c.nodes.reserve(N + 1);
  for (int i = 0; i <= N; ++i) {
    double s = -r0 + 2.0 * r0 * i / N;  // signed radius along the meridian
    double r = std::fabs(s);
    double phi = s < 0 ? phi0 + kPi : phi0;
    if (m.has_patch() && r < 0.999 * m.patch_radius()) {
      c.nodes.push_back(ChartPoint::patch(r * std::cos(phi), r * std::sin(phi)));
    } else {
      c.nodes.push_back(ChartPoint::polar(std::max(r, 1e-12), phi));
    }
  }
  return c;
}

// Nodes of the straight line y = d (rotated by theta) in the unfolded wedge.
DiscreteCurve wedge_line(double alpha, double theta, double d, double t_lo,
                         double t_hi, int N) {
  double sa = std::sin(alpha);
  DiscreteCurve c;
  c.nodes.reserve(N + 1);
  for (int i = 0; i <= N; ++i) {
    double t = t_lo + (t_hi - t_lo) * i / N;
    double x = std::cos(theta) * t - std::sin(theta) * d;
    double y = std::sin(theta) * t + std::cos(theta) * d;
    c.nodes.push_back(ChartPoint::polar(std::hypot(x, y), std::atan2(y, x) / sa));
  }
  return c;
}

}  // namespace

TEST_CASE("circle geodesic curvature matches the rotational rate f'/f") {
  auto prof = SurfaceMetric::profile(kPi / 6, 1.0);
  for (double r : {0.7, 3.0, 9.0}) {
    double expect = prof.fp(r) / prof.f(r);
    for (double phi : {0.0, 1.1, 4.4})
      CHECK(circle_geodesic_curvature(prof, r, phi) ==
            doctest::Approx(expect).epsilon(1e-12));
    CHECK(circle_total_curvature(prof, r) ==
          doctest::Approx(2.0 * kPi * prof.fp(r)).epsilon(1e-12));
  }

  // flat and cone circles both turn at rate 1/r, but the cone circle is
  // shorter, so its total turning is only 2 pi sin(alpha)
  auto flat = SurfaceMetric::flat();
  auto cone = SurfaceMetric::cone(kPi / 6);
  CHECK(circle_geodesic_curvature(flat, 2.5, 0.4) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(circle_geodesic_curvature(cone, 2.5, 0.4) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(circle_total_curvature(cone, 2.5) ==
        doctest::Approx(kPi).epsilon(1e-12));  // 2 pi sin(pi/6)

  CHECK_THROWS_AS(circle_total_curvature(flat, 0.0), config_error);
}

TEST_CASE("Gauss-Bonnet is exact on the model disks and annuli") {
  auto cone = SurfaceMetric::cone(kPi / 6);
  auto flat = SurfaceMetric::flat();

  GaussBonnetReport disk = gauss_bonnet_disk(cone, 1.5);
  CHECK(disk.curvature_integral == 0.0);
  CHECK(disk.boundary_integral == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(disk.expected == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  // the disk defect is the curvature concentrated at the vertex: the mass
  CHECK(disk.defect == doctest::Approx(mass_formula(cone)).epsilon(1e-13));

  GaussBonnetReport ann = gauss_bonnet_annulus(cone, 0.5, 3.0);
  CHECK(std::fabs(ann.defect) < 1e-12);

  GaussBonnetReport fd = gauss_bonnet_disk(flat, 2.0);
  CHECK(std::fabs(fd.defect) < 1e-12);
  CHECK(fd.boundary_integral == doctest::Approx(2.0 * kPi).epsilon(1e-14));

  auto pert = SurfaceMetric::perturbed(kPi / 6, 1.0, {0.05, 0.04, 0.03});
  CHECK_THROWS_AS(gauss_bonnet_disk(pert, 2.0), regime_error);
  CHECK_THROWS_AS(gauss_bonnet_annulus(cone, 1e-9, 1.0), regime_error);
  CHECK_THROWS_AS(gauss_bonnet_annulus(cone, 2.0, 1.0), config_error);
  CHECK_THROWS_AS(gauss_bonnet_disk(flat, -1.0), config_error);
}

TEST_CASE("Gauss-Bonnet closes on the smoothed and perturbed families") {
  auto prof = SurfaceMetric::profile(kPi / 6, 1.0);

  GaussBonnetReport disk = gauss_bonnet_disk(prof, 8.0, 512, 256);
  CHECK(std::fabs(disk.defect) < 1e-4);
  // the rotational curvature integral has the closed form 2 pi (f'(0) - f'(r0))
  double analytic = 2.0 * kPi * (prof.fp(0.0) - prof.fp(8.0));
  CHECK(disk.curvature_integral == doctest::Approx(analytic).epsilon(1e-4));

  GaussBonnetReport ann = gauss_bonnet_annulus(prof, 1.0, 9.0, 512, 256);
  CHECK(std::fabs(ann.defect) < 1e-4);

  auto pert = SurfaceMetric::perturbed(kPi / 6, 1.0, {0.05, 0.04, 0.03});
  GaussBonnetReport pann = gauss_bonnet_annulus(pert, 2.0, 10.0, 256, 256);
  CHECK(std::fabs(pann.curvature_integral) > 1e-3);  // genuinely curved
  CHECK(std::fabs(pann.defect) < 1e-5);
}

TEST_CASE("mass: closed form against the asymptotic turning shortfall") {
  auto cone = SurfaceMetric::cone(kPi / 6);
  auto flat = SurfaceMetric::flat();
  auto prof = SurfaceMetric::profile(kPi / 6, 1.0);
  auto pert = SurfaceMetric::perturbed(kPi / 6, 1.0, {0.05, 0.04, 0.03});

  CHECK(mass_formula(cone) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(mass_formula(flat) == doctest::Approx(0.0));
  CHECK(mass_formula(prof) == doctest::Approx(kPi).epsilon(1e-15));

  // exact at every radius on the cone
  CHECK(mass_measured(cone, 2.0) == doctest::Approx(kPi).epsilon(1e-12));

  // smoothed family: converges as the circle grows
  double err3 = std::fabs(mass_measured(prof, 3.0) - kPi);
  double err12 = std::fabs(mass_measured(prof, 12.0) - kPi);
  CHECK(err3 > 0.1);
  CHECK(err12 < 1e-4);
  CHECK(err12 < err3);

  // perturbation decays: the angle deficit survives at large radius
  CHECK(std::fabs(mass_measured(pert, 50.0) - kPi) < 1e-3);
}

TEST_CASE("blow-down identifies the model geodesic behind each curve") {
  double alpha = kPi / 6;
  auto cone = SurfaceMetric::cone(alpha);

  MinimizerPair pair = two_minimizers(cone, 1.0, 0.3, 128, {}, false);
  BlowDownReport up = blow_down_compare(cone, pair.upper.curve, 1.0, 0.3);
  CHECK(up.best == ConeModel::SmoothUpper);
  CHECK(up.best_dist < 0.01);
  CHECK(up.dist_lower > 0.3);
  CHECK(up.dist_singular > 0.3);
  BlowDownReport lo = blow_down_compare(cone, pair.lower.curve, 1.0, 0.3);
  CHECK(lo.best == ConeModel::SmoothLower);
  CHECK(lo.best_dist < 0.01);

  // smoothed family: the rescaled minimizer approaches the model chord as the
  // scale grows (the profile is a shifted cone at large radius)
  auto prof = SurfaceMetric::profile(alpha, 1.0);
  MinimizerPair p10 = two_minimizers(prof, 10.0, 0.3, 128, {}, false);
  MinimizerPair p40 = two_minimizers(prof, 40.0, 0.3, 128, {}, false);
  BlowDownReport b10 = blow_down_compare(prof, p10.upper.curve, 10.0, 0.3);
  BlowDownReport b40 = blow_down_compare(prof, p40.upper.curve, 40.0, 0.3);
  CHECK(b10.best == ConeModel::SmoothUpper);
  CHECK(b40.best == ConeModel::SmoothUpper);
  CHECK(b10.best_dist < 0.1);
  CHECK(b40.best_dist < 0.03);
  CHECK(b40.best_dist < b10.best_dist);

  // a meridian pair blows down onto the singular model
  BlowDownReport sing = blow_down_compare(prof, meridian_pair(prof, 10.0, 0.3, 128),
                                          10.0, 0.3);
  CHECK(sing.best == ConeModel::Singular);
  CHECK(sing.best_dist < 0.05);
  CHECK(sing.dist_upper > 0.3);
  CHECK(sing.dist_lower > 0.3);

  CHECK_THROWS_AS(blow_down_compare(cone, pair.upper.curve, 0.0, 0.3), config_error);
}

TEST_CASE("length near the pole concentrates like a radial pair") {
  auto flat = SurfaceMetric::flat();

  // straight chord at distance 0.3 from the origin
  DiscreteCurve chord;
  int N = 256;
  for (int i = 0; i <= N; ++i) {
    double x = -4.0 + 8.0 * i / N, y = 0.3;
    chord.nodes.push_back(ChartPoint::polar(std::hypot(x, y), std::atan2(y, x)));
  }
  CHECK(length_in_ball(flat, chord, 0.5) ==
        doctest::Approx(2.0 * std::sqrt(0.25 - 0.09)).epsilon(1e-2));
  CHECK(length_in_ball(flat, chord, 0.2) == 0.0);  // ball misses the chord

  auto prof = SurfaceMetric::profile(kPi / 6, 1.0);
  DiscreteCurve pair = meridian_pair(prof, 10.0, 0.4, 128);
  CHECK(length_in_ball(prof, pair, 2.0) == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(vertex_concentration(prof, pair, 0.5, 5.0) ==
        doctest::Approx(2.0).epsilon(1e-6));

  CHECK_THROWS_AS(length_in_ball(flat, chord, 0.0), config_error);
  CHECK_THROWS_AS(vertex_concentration(flat, chord, 1.0, 0.5), config_error);
}

TEST_CASE("ray asymptotes recover straight wedge lines exactly") {
  double alpha = kPi / 6;
  auto cone = SurfaceMetric::cone(alpha);

  DiscreteCurve line = wedge_line(alpha, 0.7, 0.3, 5.0, 50.0, 40);
  RayAsymptote back = ray_asymptote(cone, line, true, 4.0);
  CHECK(back.theta_inf == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(back.intercept == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(back.growth_c < 1e-12);
  CHECK(back.nodes_used == 41);
  RayAsymptote front = ray_asymptote(cone, line, false, 4.0);
  CHECK(front.theta_inf == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(front.intercept == doctest::Approx(0.3).epsilon(1e-12));

  // a meridian of the smoothed family is radial: direction phi0 sin(alpha),
  // zero offset, zero residual
  auto prof = SurfaceMetric::profile(alpha, 1.0);
  DiscreteCurve mer;
  for (int i = 0; i <= 46; ++i)
    mer.nodes.push_back(ChartPoint::polar(0.5 + 0.25 * i, 0.4));
  RayAsymptote ray = ray_asymptote(prof, mer, true, 6.0);
  CHECK(ray.theta_inf == doctest::Approx(0.4 * std::sin(alpha)).epsilon(1e-12));
  CHECK(std::fabs(ray.intercept) < 1e-12);
  CHECK(ray.growth_c < 1e-12);

  CHECK_THROWS_AS(ray_asymptote(cone, line, true, 100.0), config_error);
  CHECK_THROWS_AS(ray_asymptote(cone, line, true, 0.0), config_error);
}

TEST_CASE("no-drift: the min-max geodesic hugs the pole at every scale") {
  auto prof = SurfaceMetric::profile(kPi / 6, 1.0);
  MinMaxConfig base;
  base.N = 96;
  base.M = 16;
  base.phi0 = 0.3;
  base.workers = 2;

  auto trace = no_drift_trace(prof, {8.0, 16.0}, base);
  REQUIRE(trace.size() == 2);
  for (const NoDriftPoint& pt : trace) {
    CAPTURE(pt.r0);
    // passes within a few smoothing lengths of the pole, never drifts out
    CHECK(pt.closest_approach <= 5.0 * prof.smoothing_scale());
    // scale-invariant width of the saddle
    CHECK(pt.ratio > 3.6);
    CHECK(pt.ratio < 4.4);
    // length near the pole is that of two radial rays
    CHECK(pt.concentration > 1.5);
    CHECK(pt.concentration < 2.5);
  }
  CHECK(trace[1].lambda > trace[0].lambda);
  CHECK(std::fabs(trace[1].ratio - trace[0].ratio) < 0.2);

  CHECK_THROWS_AS(no_drift_trace(prof, {}, base), config_error);
  CHECK_THROWS_AS(no_drift_trace(prof, {-1.0}, base), config_error);
}

TEST_CASE("distinct antipodal data give distinct asymptotic directions") {
  auto pert = SurfaceMetric::perturbed(kPi / 6, 1.0, {0.05, 0.04, 0.03});
  MinMaxConfig base;
  base.r0 = 8.0;
  base.N = 96;
  base.M = 16;
  base.workers = 2;

  DistinctnessReport rep =
      distinctness_experiment(pert, 0.2, 0.2 + kPi / 4, base);
  CHECK(rep.expected == doctest::Approx(kPi / 4 * 0.5).epsilon(1e-12));
  CHECK(rep.rel_error < 0.05);

  // both runs produced certified saddles
  CHECK(rep.run_a.minmax.gap);
  CHECK(rep.run_b.minmax.gap);
  CHECK(rep.run_a.minmax.index_gamma3 == 1);
  CHECK(rep.run_b.minmax.index_gamma3 == 1);

  // the rays really are asymptotically straight
  for (const RayAsymptote* r :
       {&rep.a_front, &rep.a_back, &rep.b_front, &rep.b_back})
    CHECK(r->growth_c < 0.01);

  // phi0 and phi0 + pi name the same antipodal pair
  CHECK_THROWS_AS(distinctness_experiment(pert, 0.3, 0.3 + kPi, base), config_error);
  CHECK_THROWS_AS(distinctness_experiment(pert, 0.2, 0.8, base, 1.5), config_error);
}

TEST_SUITE_END();
