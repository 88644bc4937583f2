"""Ensemble construction: spec parsing, basis structure, orthonormality,
and the Gaussian coefficient sampler."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zcsim import build_ensemble, gram_residual, parse_spec, sample
from zcsim.ensemble import (
    basis_log_values_h,
    basis_values,
    coefficient_stream,
    combined_coefficients,
    dilated_lattice_points,
    evaluate,
    evaluate_h,
    metric_log_factor,
    sample_log_abs,
    total_degree_dictionary,
)

PINNED = [
    "family=kac N=50",
    "family=su2 N=50",
    "family=su3 N=4",
    "family=onb measure=interval-arcsine N=100",
    "family=onb measure=torus-2d N=6",
    "family=weighted-onb measure=interval-uniform weight=gaussian-radial N=9",
    "family=polytope vertices=(0,0);(2,0);(0,2) N=5",
    "family=skewed N=40",
]


# ---------------------------------------------------------------------------
# spec text


@pytest.mark.parametrize("text", PINNED)
def test_spec_round_trip(text):
    spec = parse_spec(text)
    assert parse_spec(spec.to_text()) == spec
    assert spec.to_text() == parse_spec(spec.to_text()).to_text()


@pytest.mark.parametrize("bad", [
    "family=frobenius N=5",
    "family=kac",
    "N=5",
    "family=kac N=zero",
    "family=kac N=0",
    "family=kac N=5 flavor=mint",
    "family=kac N=5 N=6",
    "family=polytope N=3",
    "family=polytope vertices=(0;0) N=3",
    "family=polytope vertices=(-1,0);(1,0);(0,1) N=3",
    "family=onb measure=klein-bottle N=4",
    "family=weighted-onb measure=interval-uniform weight=anvil N=4",
])
def test_spec_rejects_malformed(bad):
    with pytest.raises(ValueError):
        parse_spec(bad)


def test_spec_whitespace_tolerant():
    assert parse_spec("  family=kac   N=7 ") == parse_spec("family=kac N=7")


# ---------------------------------------------------------------------------
# basis structure


def test_kac_is_unit_monomials(kac20):
    assert kac20.metric == "flat"
    assert kac20.cardinality == 21
    assert np.allclose(kac20.coeffs, np.eye(21))


def test_su2_binomial_scaling(su2_50):
    want = np.sqrt([math.comb(50, j) for j in range(51)])
    assert su2_50.metric == "fubini-study"
    assert su2_50.metric_power == 50
    assert np.allclose(np.diag(su2_50.coeffs), want)


def test_su3_multinomial_scaling(su3_4):
    assert su3_4.dimension == 2
    assert su3_4.cardinality == 15        # (4+1)(4+2)/2 monomials
    expo = su3_4.dictionary.exponents
    diag = np.diag(su3_4.coeffs).real
    for (a, b), got in zip(expo, diag):
        c = math.factorial(4) / (math.factorial(a) * math.factorial(b)
                                 * math.factorial(4 - a - b))
        assert got == pytest.approx(math.sqrt(c), rel=1e-12)


def test_simplex_polytope_equals_su3():
    poly = build_ensemble("family=polytope vertices=(0,0);(1,0);(0,1) N=4")
    su3 = build_ensemble("family=su3 N=4")
    assert poly.cardinality == su3.cardinality
    assert np.allclose(np.sort(np.diag(poly.coeffs).real),
                       np.sort(np.diag(su3.coeffs).real))
    assert poly.metric == su3.metric and poly.metric_power == su3.metric_power


def test_skewed_factorial_scaling():
    basis = build_ensemble("family=skewed N=6")
    want = np.array([math.factorial(j) ** 0.25 for j in range(7)])
    assert np.allclose(np.diag(basis.coeffs).real, want)
    assert basis.check_kind == "declared"


def test_arcsine_basis_is_scaled_chebyshev():
    basis = build_ensemble("family=onb measure=interval-arcsine N=12")
    x = np.linspace(-0.95, 0.95, 41).astype(complex)
    vals = basis_values(basis, x)
    for n in range(13):
        cheb = np.polynomial.chebyshev.chebval(x.real, [0] * n + [1])
        scale = 1.0 if n == 0 else math.sqrt(2.0)
        assert np.allclose(vals[n].real, scale * cheb, atol=1e-9), f"row {n}"


def test_dilated_lattice_point_counts():
    tri = dilated_lattice_points([(0, 0), (2, 0), (0, 2)], 5)
    assert tri.shape == (66, 2)           # triangle of side 10
    sq = dilated_lattice_points([(0, 0), (1, 0), (0, 1), (1, 1)], 3)
    assert sq.shape == (16, 2)
    seg = dilated_lattice_points([(0,), (3,)], 2)
    assert seg.shape == (7, 1)


def test_polytope_square_cardinality():
    basis = build_ensemble("family=polytope vertices=(0,0);(1,0);(0,1);(1,1) N=3")
    assert basis.cardinality == 16
    assert basis.metric_power == 6        # homogenization degree p*N = 2*3


@pytest.mark.parametrize("text", PINNED)
def test_gram_residual_small(text):
    basis = build_ensemble(text)
    res = gram_residual(basis)
    if res is not None:
        assert res < 1e-8, f"{text}: residual {res:.3e}"


def test_metrized_kernel_constant_su2(su2_50):
    # the invariant ensembles have constant metrized kernel sum_j |S_j|_h^2
    z = np.array([0.0, 0.3 + 0.4j, 2.0 - 1.0j, 10.0j])
    logs = basis_log_values_h(su2_50, z)
    kernel = np.exp(2 * logs).sum(axis=0)
    assert np.allclose(kernel, kernel[0], rtol=1e-10)


def test_metric_log_factor_fubini_study(su2_50):
    z = np.array([0.5 + 0.5j, 2.0])
    want = -0.5 * 50 * np.log1p(np.abs(z) ** 2)
    assert np.allclose(metric_log_factor(su2_50, z), want)


def test_total_degree_dictionary_graded_lex():
    d = total_degree_dictionary(2, 2)
    assert d.exponents.tolist() == [
        [0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]


# ---------------------------------------------------------------------------
# sampler


def test_sampler_determinism(kac20):
    a = sample(kac20, 7, 3)
    b = sample(kac20, 7, 3)
    assert np.array_equal(a.coeffs, b.coeffs)
    c = sample(kac20, 7, 4)
    d = sample(kac20, 8, 3)
    assert not np.array_equal(a.coeffs, c.coeffs)
    assert not np.array_equal(a.coeffs, d.coeffs)


def test_stream_key_distinctness():
    # streams keyed by (seed, trial) never alias across the two slots
    a = coefficient_stream(1, 2).standard_normal(4)
    b = coefficient_stream(2, 1).standard_normal(4)
    assert not np.allclose(a, b)


def test_coefficient_moments(kac20):
    draws = 100_000
    rng_vals = np.concatenate(
        [sample(kac20, 5, t).coeffs for t in range(draws // 21 + 1)])[:draws]
    assert abs(np.mean(rng_vals)) < 5 / math.sqrt(draws)
    assert abs(np.mean(np.abs(rng_vals) ** 2) - 1.0) < 5 / math.sqrt(draws)
    # complex Gaussian: the pseudo-variance E c^2 vanishes
    assert abs(np.mean(rng_vals ** 2)) < 5 / math.sqrt(draws)


def test_evaluate_matches_direct_sum(su2_50):
    s = sample(su2_50, 11, 0)
    z = np.array([0.2 - 0.7j, 1.5, -0.3j])
    combined = combined_coefficients(s)
    direct = sum(c * z ** k for k, c in enumerate(combined))
    assert np.allclose(evaluate(s, z), direct, rtol=1e-10)


def test_evaluate_dimension_two(su3_4):
    s = sample(su3_4, 13, 2)
    pts = np.array([[0.4 + 0.1j, -0.2j], [1.0, 1.0]])
    combined = combined_coefficients(s)
    expo = su3_4.dictionary.exponents
    direct = np.array([
        sum(c * p[0] ** a * p[1] ** b for c, (a, b) in zip(combined, expo))
        for p in pts])
    assert np.allclose(evaluate(s, pts), direct, rtol=1e-10)


def test_evaluate_h_matches_metric(su2_50):
    s = sample(su2_50, 3, 9)
    z = np.array([0.5 + 0.2j, 3.0])
    want = np.abs(evaluate(s, z)) * (1 + np.abs(z) ** 2) ** (-25)
    assert np.allclose(evaluate_h(s, z), want, rtol=1e-10)


def test_sample_log_abs_consistency():
    basis = build_ensemble("family=onb measure=interval-arcsine N=30")
    s = sample(basis, 21, 5)
    z = np.array([0.3 + 0.2j, -0.9, 1.4j])
    got = sample_log_abs(s, z)
    want = np.log(np.abs(evaluate(s, z)))
    assert np.allclose(got, want, atol=1e-8)


def test_sample_log_abs_far_field_no_overflow(su2_50):
    # recurrence/log path must stay finite where naive evaluation overflows
    basis = build_ensemble("family=onb measure=interval-arcsine N=400")
    s = sample(basis, 1, 1)
    val = sample_log_abs(s, np.array([40.0 + 0j]))
    assert np.isfinite(val).all()
    assert val[0] > 100


@given(st.integers(min_value=0, max_value=2 ** 64 - 1),
       st.integers(min_value=0, max_value=2 ** 32))
@settings(max_examples=25, deadline=None)
def test_sampler_deterministic_any_key(seed, trial):
    basis = build_ensemble("family=kac N=3")
    a = sample(basis, seed, trial)
    b = sample(basis, seed, trial)
    assert np.array_equal(a.coeffs, b.coeffs)
    assert a.coeffs.shape == (4,)
