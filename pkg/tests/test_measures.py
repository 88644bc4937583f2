"""Quadrature measures: construction, validation, and moment exactness."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zcsim import NumericalError, QuadratureMeasure, build_measure, integrate
from zcsim.measures import MEASURE_NAMES, MIN_RESOLUTION


@pytest.mark.parametrize("name", MEASURE_NAMES)
def test_unit_mass(name):
    mu = build_measure(name, 16)
    assert abs(float(np.sum(mu.weights)) - 1.0) < 1e-12
    assert mu.label == name


@pytest.mark.parametrize("name", MEASURE_NAMES)
def test_minimum_resolution_enforced(name):
    with pytest.raises(ValueError):
        build_measure(name, MIN_RESOLUTION - 1)


def test_unknown_name():
    with pytest.raises(ValueError, match="unknown measure"):
        build_measure("lebesgue-on-mars", 16)


def test_validation_rejects_bad_weights():
    nodes = np.array([0.0 + 0j, 1.0 + 0j])
    with pytest.raises(ValueError, match="positive"):
        QuadratureMeasure(1, nodes, np.array([1.5, -0.5]), "bad")
    with pytest.raises(ValueError, match="mass"):
        QuadratureMeasure(1, nodes, np.array([0.3, 0.3]), "bad")


def test_validation_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        QuadratureMeasure(1, np.zeros((3, 2), dtype=complex), np.full(3, 1 / 3), "bad")
    with pytest.raises(ValueError):
        QuadratureMeasure(2, np.zeros(3, dtype=complex), np.full(3, 1 / 3), "bad")


def test_circle_moments():
    # z^k integrates to 0 for 0 < |k| < resolution, to 1 for k = 0
    mu = build_measure("unit-circle-arc", 32)
    assert abs(integrate(mu, lambda z: np.ones_like(z, dtype=float)) - 1) < 1e-14
    for k in (1, 2, 7, 31):
        assert abs(integrate(mu, lambda z, k=k: z ** k)) < 1e-13
        assert abs(integrate(mu, lambda z, k=k: z ** k * np.conj(z) ** k) - 1) < 1e-13


def test_arcsine_moments():
    mu = build_measure("interval-arcsine", 64)
    # central binomial moments: E x^2 = 1/2, E x^4 = 3/8, odd moments vanish
    assert abs(integrate(mu, lambda x: x ** 2) - 0.5) < 1e-13
    assert abs(integrate(mu, lambda x: x ** 4) - 0.375) < 1e-13
    assert abs(integrate(mu, lambda x: x ** 3)) < 1e-13


def test_uniform_interval_moments():
    mu = build_measure("interval-uniform", 24)
    assert abs(integrate(mu, lambda x: x ** 2) - 1 / 3) < 1e-13
    assert abs(integrate(mu, lambda x: x ** 6) - 1 / 7) < 1e-13


def test_disk_moments():
    mu = build_measure("unit-disk-area", 12)
    # normalized area measure on the unit disk: E |z|^(2k) = 1/(k+1)
    for k in (1, 2, 5):
        got = integrate(mu, lambda z, k=k: np.abs(z) ** (2 * k))
        assert abs(got - 1 / (k + 1)) < 1e-12
    assert abs(integrate(mu, lambda z: z)) < 1e-13


def test_torus_product_moments():
    mu = build_measure("torus-2d", 16)
    assert mu.dimension == 2
    got = integrate(mu, lambda p: p[:, 0] ** 2 * np.conj(p[:, 0]) ** 2
                    * p[:, 1] * np.conj(p[:, 1]))
    assert abs(got - 1) < 1e-12
    assert abs(integrate(mu, lambda p: p[:, 0] * p[:, 1])) < 1e-13


def test_bidisk_moments():
    mu = build_measure("bidisk-area", 8)
    got = integrate(mu, lambda p: np.abs(p[:, 0]) ** 2 * np.abs(p[:, 1]) ** 4)
    assert abs(got - (1 / 2) * (1 / 3)) < 1e-12


def test_integrate_scalar_fallback():
    mu = build_measure("interval-uniform", 8)
    got = integrate(mu, lambda x: float(x.real) ** 2 if np.isscalar(x) or x.ndim == 0 else (_ for _ in ()).throw(TypeError))
    assert abs(got - 1 / 3) < 1e-13


def test_integrate_rejects_nonfinite():
    mu = build_measure("interval-arcsine", 8)
    with np.errstate(divide="ignore", invalid="ignore"):
        with pytest.raises(NumericalError, match="not finite"):
            integrate(mu, lambda x: 1.0 / (x - x[0]))


@given(st.integers(min_value=MIN_RESOLUTION, max_value=60))
@settings(max_examples=20, deadline=None)
def test_circle_exactness_scales_with_resolution(n):
    # equispaced rule integrates z^k exactly for all 0 < k < n
    mu = build_measure("unit-circle-arc", n)
    k = max(1, n - 1)
    assert abs(integrate(mu, lambda z: z ** k)) < 1e-12
