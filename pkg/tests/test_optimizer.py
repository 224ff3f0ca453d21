import numpy as np
import pytest

import eit_forge as ef

GRID = np.linspace(-15, 15, 301)
OD = 5.0


@pytest.fixture(scope="module")
def base_dist():
    return ef.gaussian_distribution(n_nodes=801)


@pytest.fixture(scope="module")
def cesium():
    scheme = ef.cesium_scheme(3)
    fields = ef.FieldConfig()
    center = ef.transparency_center(scheme, fields)
    window = (center - 3.0, center + 0.15)
    return scheme, fields, window


def test_zero_depth_scan_constant(cesium, base_dist):
    scheme, fields, window = cesium
    template = ef.HoleSpec(0.0, depth=0.0)
    res = ef.scan_hole_center(scheme, fields, base_dist, template,
                              np.arange(0, 151, 25.0), GRID, OD, window)
    contrasts = [v for _, v in res.samples]
    unholed = ef.eit_contrast(
        ef.transmission_spectrum(scheme, fields, base_dist, GRID, OD),
        window).contrast
    assert max(contrasts) - min(contrasts) <= 1e-12
    assert contrasts[0] == pytest.approx(unholed, abs=1e-12)


def test_scan_best_center_band(cesium, base_dist):
    scheme, fields, window = cesium
    res = ef.scan_hole_center(scheme, fields, base_dist, ef.HoleSpec(0.0),
                              np.arange(0, 151, 5.0), GRID, OD, window)
    assert 30.0 <= res.best_center <= 55.0
    assert res.best_contrast == max(v for _, v in res.samples)


def test_lambda_scan_nearly_flat(base_dist):
    # Without extra excited levels there is no detrimental velocity class,
    # so moving the hole barely changes the contrast.
    scheme = ef.cesium_scheme(1)
    fields = ef.FieldConfig()
    res = ef.scan_hole_center(scheme, fields, base_dist, ef.HoleSpec(0.0),
                              np.arange(0, 151, 5.0), GRID, OD,
                              (-3.0, 0.15))
    contrasts = [v for _, v in res.samples]
    assert max(contrasts) - min(contrasts) <= 0.1


def test_optimize_single_hole(cesium, base_dist):
    scheme, fields, window = cesium
    unholed = ef.eit_contrast(
        ef.transmission_spectrum(scheme, fields, base_dist, GRID, OD),
        window).contrast
    res = ef.optimize_holes(scheme, fields, base_dist, 1, (0.0, 150.0),
                            ef.HoleSpec(0.0), GRID, OD, window)
    assert res.converged
    assert 30.0 <= res.holes[0].center <= 55.0
    assert res.contrast >= 3.0 * unholed


def test_optimize_two_holes_not_worse(cesium, base_dist):
    scheme, fields, window = cesium
    one = ef.optimize_holes(scheme, fields, base_dist, 1, (0.0, 150.0),
                            ef.HoleSpec(0.0), GRID, OD, window)
    two = ef.optimize_holes(scheme, fields, base_dist, 2, (0.0, 150.0),
                            ef.HoleSpec(0.0), GRID, OD, window)
    assert two.contrast >= 0.95 * one.contrast


def test_optimize_far_bounds_no_gain(cesium, base_dist):
    scheme, fields, window = cesium
    unholed = ef.eit_contrast(
        ef.transmission_spectrum(scheme, fields, base_dist, GRID, OD),
        window).contrast
    res = ef.optimize_holes(scheme, fields, base_dist, 1, (200.0, 300.0),
                            ef.HoleSpec(200.0), GRID, OD, window)
    assert res.contrast <= 1.5 * unholed


def test_optimize_deterministic(cesium, base_dist):
    scheme, fields, window = cesium
    a = ef.optimize_holes(scheme, fields, base_dist, 2, (0.0, 150.0),
                          ef.HoleSpec(0.0), GRID, OD, window)
    b = ef.optimize_holes(scheme, fields, base_dist, 2, (0.0, 150.0),
                          ef.HoleSpec(0.0), GRID, OD, window)
    assert a.holes == b.holes
    assert a.contrast == b.contrast


def test_optimize_beats_coarse_samples(cesium, base_dist):
    scheme, fields, window = cesium
    coarse = ef.scan_hole_center(scheme, fields, base_dist,
                                 ef.HoleSpec(0.0), np.arange(0, 151, 5.0),
                                 GRID, OD, window)
    res = ef.optimize_holes(scheme, fields, base_dist, 1, (0.0, 150.0),
                            ef.HoleSpec(0.0), GRID, OD, window)
    assert res.contrast >= coarse.best_contrast


def test_optimize_validation(cesium, base_dist):
    scheme, fields, window = cesium
    with pytest.raises(ValueError):
        ef.optimize_holes(scheme, fields, base_dist, 0, (0.0, 150.0),
                          ef.HoleSpec(0.0), GRID, OD, window)
    with pytest.raises(ValueError):
        ef.optimize_holes(scheme, fields, base_dist, 1, (0.0, 1000.0),
                          ef.HoleSpec(0.0), GRID, OD, window)
