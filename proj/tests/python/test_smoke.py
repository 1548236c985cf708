"""Smoke tests of the python bindings: one pass over every exported call."""

import math

import pytest

import acgeo


ALPHA = math.pi / 6


def test_metric_families_and_mass():
    cone = acgeo.SurfaceMetric.cone(ALPHA)
    assert cone.rotational
    assert cone.alpha == pytest.approx(ALPHA)
    # 2 pi (1 - sin alpha) with sin alpha = 1/2
    assert cone.mass == pytest.approx(math.pi, abs=1e-12)
    assert acgeo.SurfaceMetric.flat().mass == pytest.approx(0.0, abs=1e-12)
    prof = acgeo.SurfaceMetric.profile(ALPHA, 1.0)
    assert acgeo.mass_formula(prof) == pytest.approx(math.pi, abs=1e-12)
    pert = acgeo.SurfaceMetric.perturbed(ALPHA, 1.0, (0.05, 0.04, 0.03))
    assert not pert.rotational


def test_bad_config_raises_value_error():
    with pytest.raises(ValueError):
        acgeo.SurfaceMetric.cone(2.0)  # cone angle must lie in (0, pi/2)


def test_geodesic_matches_exact_cone_length():
    cone = acgeo.SurfaceMetric.cone(ALPHA)
    g = acgeo.geodesic(cone, 1.0, 0.2, 1.0, 0.2 + math.pi, n=256)
    assert g.converged
    assert g.embedded
    assert g.index == 0
    # exact antipodal distance: 2 sin(pi/2 sin alpha) = sqrt(2)
    assert g.length == pytest.approx(math.sqrt(2.0), abs=1e-3)
    assert len(g.nodes) == 257
    r, phi = g.nodes[0]
    assert (r, phi) == (pytest.approx(1.0), pytest.approx(0.2))


def test_energy_length_inequality():
    cone = acgeo.SurfaceMetric.cone(ALPHA)
    nodes = [(1.0 + 0.1 * k, 0.3 * k) for k in range(9)]
    e = acgeo.energy(cone, nodes)
    l = acgeo.length(cone, nodes)
    assert l * l <= e + 1e-12


def test_cone_distance_triangle():
    d = acgeo.cone_distance(1.0, 0.0, 1.0, math.pi, ALPHA)
    assert d == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_minmax_pipeline_on_the_cone():
    cone = acgeo.SurfaceMetric.cone(ALPHA)
    res = acgeo.minmax(cone, r0=1.0, phi0=0.25, n=96, m=12, rounds=8)
    assert res.gap
    assert 3.0 < res.lambda_ < 4.8
    assert res.ratio == pytest.approx(res.lambda_)
    assert res.indices[0] == 0 and res.indices[1] == 0
    assert len(res.trace) == 8
    assert len(res.gamma3) > 0
    assert res.separation > 0.1


def test_minmax_exact_width_on_profile():
    prof = acgeo.SurfaceMetric.profile(ALPHA, 1.0)
    res = acgeo.minmax(prof, r0=4.0, n=96, m=12, rounds=8)
    # the saddle is the meridian pair through the pole: lambda = 4 r0^2
    assert res.lambda_ == pytest.approx(64.0, rel=1e-6)
    assert res.indices[2] == 1


def test_minmax_flat_plane_raises():
    with pytest.raises(RuntimeError):
        acgeo.minmax(acgeo.SurfaceMetric.flat(), r0=1.0, n=32, m=8, rounds=2)


def test_gauss_bonnet_audit():
    cone = acgeo.SurfaceMetric.cone(ALPHA)
    rep = acgeo.gauss_bonnet_disk(cone, 1.5)
    assert rep["defect"] == pytest.approx(acgeo.mass_formula(cone), abs=1e-10)
    prof = acgeo.SurfaceMetric.profile(ALPHA, 1.0)
    assert acgeo.mass_measured(prof, 12.0) == pytest.approx(math.pi, abs=1e-3)
