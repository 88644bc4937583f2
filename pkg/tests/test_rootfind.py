"""Polynomial solvers: simultaneous univariate iteration and the
resultant-based bivariate system solver."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zcsim import (
    SolverError,
    build_ensemble,
    roots_bivariate,
    roots_univariate,
    sample,
    zeros_of_pair,
    zeros_of_sample,
)


def _poly_from_roots(roots):
    c = np.array([1.0 + 0j])
    for r in roots:
        c = np.convolve(c, np.array([-r, 1.0 + 0j]))
    return c


# ---------------------------------------------------------------------------
# univariate


def test_cubic_known_roots():
    zs = roots_univariate([-6.0, 11.0, -6.0, 1.0])
    assert zs.converged
    assert zs.total_count == 3
    assert np.allclose(np.sort(zs.points.real), [1, 2, 3], atol=1e-10)
    assert np.all(zs.residuals < 1e-10)
    assert np.all(zs.multiplicities == 1)


def test_linear():
    zs = roots_univariate([3.0, -2.0])
    assert zs.total_count == 1
    assert zs.points[0] == pytest.approx(1.5)


def test_constant_rejected():
    with pytest.raises(ValueError, match="degree must be at least 1"):
        roots_univariate([5.0])


def test_trailing_zero_coefficients_give_origin_roots():
    # z^3 - z^2 = z^2 (z - 1)
    zs = roots_univariate([0.0, 0.0, -1.0, 1.0])
    assert zs.total_count == 3
    at_origin = zs.multiplicities[np.abs(zs.points) < 1e-12]
    assert at_origin.sum() == 2
    assert np.any(np.abs(zs.points - 1.0) < 1e-10)


def test_leading_zero_coefficients_trimmed():
    zs = roots_univariate([-6.0, 11.0, -6.0, 1.0, 0.0, 0.0])
    assert zs.total_count == 3
    assert zs.diagnostics["degree"] == 3


def test_double_root_merged_with_multiplicity():
    zs = roots_univariate([0.25, -1.0, 1.0])
    assert zs.total_count == 2
    assert len(zs.points) == 1
    assert zs.multiplicities[0] == 2
    assert zs.points[0] == pytest.approx(0.5, abs=1e-6)


def test_large_root_spread():
    # widely separated scales exercise the reversed-polynomial branch
    roots = [1e-6, 1.0, 1e6]
    zs = roots_univariate(_poly_from_roots(roots))
    assert zs.converged
    got = np.sort(np.abs(zs.points))
    assert np.allclose(got, roots, rtol=1e-8)


@given(st.lists(st.complex_numbers(max_magnitude=3.0, allow_nan=False,
                                   allow_infinity=False),
                min_size=1, max_size=7))
@settings(max_examples=60, deadline=None)
def test_vieta_sum_and_product(roots):
    c = _poly_from_roots(roots)
    zs = roots_univariate(c)
    assert zs.total_count == len(roots)
    pts = np.repeat(zs.points, zs.multiplicities)
    # clustered roots carry the usual eps^(1/k) conditioning, hence the
    # loose gates; wrong roots would miss by orders of magnitude
    assert np.sum(pts) == pytest.approx(np.sum(roots), rel=1e-4, abs=5e-4)
    assert np.prod(pts) == pytest.approx(np.prod(roots), rel=1e-4, abs=5e-4)


def test_kac_sample_zero_count(kac50):
    zs = zeros_of_sample(sample(kac50, 1, 0))
    assert zs.converged
    assert zs.total_count == 50
    assert np.all(zs.residuals < 1e-8)
    assert zs.diagnostics["route"] == "monomial"


def test_su2_high_degree_converges():
    basis = build_ensemble("family=su2 N=160")
    zs = zeros_of_sample(sample(basis, 2, 5))
    assert zs.converged
    assert zs.total_count == 160
    assert np.all(zs.residuals < 1e-8)


def test_recurrence_basis_joukowski_route():
    basis = build_ensemble("family=onb measure=interval-arcsine N=100")
    zs = zeros_of_sample(sample(basis, 4, 7))
    assert zs.converged
    assert zs.total_count == 100
    assert zs.diagnostics["route"] == "joukowski"
    assert np.all(zs.residuals < 1e-8)


def test_skewed_sample_solvable():
    basis = build_ensemble("family=skewed N=40")
    zs = zeros_of_sample(sample(basis, 9, 9))
    assert zs.converged
    assert zs.total_count == 40


# ---------------------------------------------------------------------------
# bivariate


def test_line_meets_hyperbola():
    # z - w = 0 and zw - 1 = 0 meet at (1,1) and (-1,-1)
    f = np.array([[0.0, -1.0], [1.0, 0.0]], dtype=complex)
    g = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
    zs = roots_bivariate(f, g)
    assert zs.dimension == 2
    assert zs.total_count == 2
    got = sorted((round(p[0].real), round(p[1].real)) for p in zs.points)
    assert got == [(-1, -1), (1, 1)]
    assert np.allclose(np.abs(zs.points - np.sign(zs.points.real)), 0, atol=1e-8)


def test_circle_meets_diagonal():
    # z^2 + w^2 = 1 and z = w
    f = np.zeros((3, 3), dtype=complex)
    f[0, 0] = -1.0
    f[2, 0] = 1.0
    f[0, 2] = 1.0
    g = np.array([[0.0, -1.0], [1.0, 0.0]], dtype=complex)
    zs = roots_bivariate(f, g)
    assert zs.total_count == 2
    r = 1 / np.sqrt(2)
    got = np.sort(zs.points[:, 0].real)
    assert np.allclose(got, [-r, r], atol=1e-9)
    assert np.allclose(zs.points[:, 0], zs.points[:, 1], atol=1e-9)


def test_shared_component_rejected():
    f = np.array([[0.0, -1.0], [1.0, 0.0]], dtype=complex)
    with pytest.raises(SolverError, match="shared component"):
        roots_bivariate(f, f.copy())


def test_bivariate_diagnostics_keys(torus6):
    zs = zeros_of_pair(sample(torus6, 3, 0), sample(torus6, 3, 1))
    for key in ("shear_attempts", "transform", "bezout_bound",
                "resultant_route", "count", "bezout_complete"):
        assert key in zs.diagnostics, key
    assert zs.diagnostics["bezout_bound"] == 36


def test_torus_pair_complete_count(torus6):
    zs = zeros_of_pair(sample(torus6, 17, 0), sample(torus6, 17, 1))
    assert zs.total_count == 36
    assert zs.diagnostics["bezout_complete"]
    assert np.all(zs.residuals < 1e-7)


def test_su3_pair_count(su3_4):
    zs = zeros_of_pair(sample(su3_4, 5, 2), sample(su3_4, 5, 3))
    assert zs.total_count == 16
    assert zs.diagnostics["bezout_complete"]


def test_square_polytope_pair_count():
    basis = build_ensemble("family=polytope vertices=(0,0);(1,0);(0,1);(1,1) N=6")
    zs = zeros_of_pair(sample(basis, 8, 0), sample(basis, 8, 1))
    # two generic bidegree-(6,6) curves meet in 2*36 points; the product
    # bound 144 overcounts for this sparse support, so completeness is
    # judged against the resultant degree
    assert zs.total_count == 72
    assert zs.diagnostics["resultant_degree"] == 72
    assert zs.diagnostics["count"] == 72


def test_bivariate_residuals_certify_points(torus6):
    s1, s2 = sample(torus6, 23, 4), sample(torus6, 23, 5)
    zs = zeros_of_pair(s1, s2)
    from zcsim.ensemble import evaluate
    v1 = np.abs(evaluate(s1, zs.points))
    v2 = np.abs(evaluate(s2, zs.points))
    scale1 = np.max(np.abs(s1.coeffs))
    scale2 = np.max(np.abs(s2.coeffs))
    assert np.max(v1) < 1e-5 * scale1 * 36   # generous absolute sanity gate
    assert np.max(v2) < 1e-5 * scale2 * 36


def test_bivariate_determinism(torus6):
    a = zeros_of_pair(sample(torus6, 31, 0), sample(torus6, 31, 1))
    b = zeros_of_pair(sample(torus6, 31, 0), sample(torus6, 31, 1))
    assert np.array_equal(a.points, b.points)
    assert np.array_equal(a.multiplicities, b.multiplicities)
