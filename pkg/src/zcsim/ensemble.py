"""Gaussian random polynomial ensembles.

An ensemble is a polynomial basis declared orthonormal together with the
standard complex Gaussian law on its coefficients: each coefficient has
independent real and imaginary parts of mean 0 and variance 1/2, so
``E c_j = 0``, ``E c_j c_k = 0`` and ``E c_j conj(c_k) = delta_jk``.

Shipped families
----------------
* ``kac``            monomials ``z^j``, flat metric (orthonormal for
                     normalized arc length on the unit circle)
* ``su2`` / ``su3``  ``sqrt(multinomial(N; a)) z^a`` with the degree-N
                     Fubini-Study metric
* ``onb``            monomials orthonormalized in L2 of a named measure
* ``weighted-onb``   the same with weight ``w(z)^(2N) dmu``
* ``polytope``       su-normalized monomials restricted to the lattice
                     points of a dilated polytope, embedded at the
                     homogeneous degree of the dilate
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import GramSingularError, NumericalError
from .measures import MIN_RESOLUTION, QuadratureMeasure, build_measure

# ---------------------------------------------------------------------------
# monomial dictionaries

_EVAL_CHUNK = 16384  # points per block when evaluating bases on large grids


@dataclass(frozen=True)
class MonomialDictionary:
    """Multi-exponents in graded lexicographic order (z1 before z2)."""

    dimension: int
    exponents: np.ndarray  # (d, m) int64

    def __post_init__(self):
        exps = np.asarray(self.exponents, dtype=np.int64)
        if exps.ndim != 2 or exps.shape[1] != self.dimension:
            raise ValueError("exponent table must have shape (d, dimension)")
        if np.any(exps < 0):
            raise ValueError("exponents must be nonnegative")
        object.__setattr__(self, "exponents", exps)

    @property
    def size(self) -> int:
        return self.exponents.shape[0]

    @property
    def max_total_degree(self) -> int:
        return int(self.exponents.sum(axis=1).max())


def _graded_lex_sort(points: Sequence[Sequence[int]]) -> np.ndarray:
    key = lambda a: (sum(a), tuple(-x for x in a))
    return np.asarray(sorted((tuple(p) for p in points), key=key), dtype=np.int64)


def total_degree_dictionary(dimension: int, degree: int) -> MonomialDictionary:
    """All monomials of total degree <= degree, graded lex order."""
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if dimension == 1:
        exps = np.arange(degree + 1, dtype=np.int64)[:, None]
        return MonomialDictionary(1, exps)
    if dimension == 2:
        pts = [(i, j) for i in range(degree + 1) for j in range(degree + 1 - i)]
        return MonomialDictionary(2, _graded_lex_sort(pts))
    raise ValueError("only dimensions 1 and 2 are supported")


def dictionary_from_exponents(points: Sequence[Sequence[int]]) -> MonomialDictionary:
    pts = _graded_lex_sort(points)
    return MonomialDictionary(pts.shape[1], pts)


# ---------------------------------------------------------------------------
# weights for weighted orthonormalization

def _weight_constant(z):
    return np.ones(np.asarray(z).shape[0] if np.ndim(z) else (), dtype=float)


def _weight_gaussian_radial(z):
    z = np.asarray(z)
    sq = np.abs(z) ** 2 if z.ndim <= 1 else np.sum(np.abs(z) ** 2, axis=-1)
    return np.exp(-0.5 * sq)


WEIGHT_FUNCTIONS = {
    "constant": _weight_constant,
    "gaussian-radial": _weight_gaussian_radial,
}


def _resolve_weight(weight):
    if weight is None:
        return None, None
    if isinstance(weight, str):
        if weight not in WEIGHT_FUNCTIONS:
            raise ValueError(f"unknown weight '{weight}'")
        return WEIGHT_FUNCTIONS[weight], weight
    return weight, None


# ---------------------------------------------------------------------------
# polynomial bases

@dataclass
class PolynomialBasis:
    """A finite polynomial basis declared orthonormal.

    ``coeffs[j]`` are the monomial coefficients of basis element j over
    ``dictionary`` (lower triangular in dictionary order: element j has
    leading monomial j).  ``metric`` is "flat" or "fubini-study" with
    ``metric_power`` the line-bundle power entering ``(1+|z|^2)^(-p/2)``.

    For bases over real-interval measures a three-term recurrence
    ``(a, b)`` is stored as well: p_0 = 1/b[0],
    p_{k+1} = ((x - a[k]) p_k - b[k] p_{k-1}) / b[k+1].  It is the
    numerically reliable evaluation path at high degree, where the
    monomial coefficient rows are kept for reference but suffer from
    catastrophic cancellation when evaluated directly.

    ``check_kind`` records how orthonormality is verified:
    "measure" (quadrature), "fs-moments" (closed-form Fubini-Study
    monomial moments) or "declared" (orthonormal by fiat).
    """

    dictionary: MonomialDictionary
    coeffs: np.ndarray
    metric: str
    metric_power: int
    degree: int
    label: str
    recurrence: Optional[tuple] = None
    check_kind: str = "declared"
    check_measure: Optional[QuadratureMeasure] = None
    check_weight: Optional[str] = None
    check_power: int = 0
    base_locus: str = ""

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.ndim != 2 or self.coeffs.shape[1] != self.dictionary.size:
            raise ValueError("coefficient matrix must be (n, dictionary size)")
        if self.metric not in ("flat", "fubini-study"):
            raise ValueError(f"unknown metric '{self.metric}'")

    @property
    def cardinality(self) -> int:
        return self.coeffs.shape[0]

    @property
    def dimension(self) -> int:
        return self.dictionary.dimension


def monomial_values(dictionary: MonomialDictionary, points: np.ndarray) -> np.ndarray:
    """Value table of every dictionary monomial at every point, shape (d, P)."""
    exps = dictionary.exponents
    if dictionary.dimension == 1:
        z = np.asarray(points, dtype=complex).ravel()
        top = int(exps.max(initial=0))
        powers = np.empty((top + 1, z.shape[0]), dtype=complex)
        powers[0] = 1.0
        for k in range(1, top + 1):
            powers[k] = powers[k - 1] * z
        return powers[exps[:, 0]]
    pts = np.asarray(points, dtype=complex).reshape(-1, 2)
    out = np.ones((dictionary.size, pts.shape[0]), dtype=complex)
    for axis in range(2):
        top = int(exps[:, axis].max(initial=0))
        powers = np.empty((top + 1, pts.shape[0]), dtype=complex)
        powers[0] = 1.0
        for k in range(1, top + 1):
            powers[k] = powers[k - 1] * pts[:, axis]
        out *= powers[exps[:, axis]]
    return out


def _abs_sq(points, dimension):
    if dimension == 1:
        return np.abs(np.asarray(points, dtype=complex).ravel()) ** 2
    pts = np.asarray(points, dtype=complex).reshape(-1, 2)
    return np.sum(np.abs(pts) ** 2, axis=1)


def metric_log_factor(basis: PolynomialBasis, points) -> np.ndarray:
    """log of the pointwise metric normalization |.|_h / |.|."""
    if basis.metric == "flat" or basis.metric_power == 0:
        return np.zeros(np.asarray(points).reshape(-1, basis.dimension if basis.dimension == 2 else 1).shape[0])
    return -0.5 * basis.metric_power * np.log1p(_abs_sq(points, basis.dimension))


def _diagonal_structure(coeffs) -> Optional[tuple]:
    nz = np.abs(coeffs) > 0
    if not np.all(nz.sum(axis=1) == 1):
        return None
    cols = np.argmax(nz, axis=1)
    return cols, coeffs[np.arange(coeffs.shape[0]), cols]


def basis_values(basis: PolynomialBasis, points) -> np.ndarray:
    """Evaluate every basis element at every point (no metric factor)."""
    if basis.recurrence is not None:
        a, b = basis.recurrence
        z = np.asarray(points, dtype=complex).ravel()
        return _recurrence_values(a, b, basis.cardinality, z)
    return basis.coeffs @ monomial_values(basis.dictionary, points)


def basis_log_values_h(basis: PolynomialBasis, points) -> np.ndarray:
    """log |S_j(z)|_h, shape (n, P).  Stable for every shipped family.

    Diagonal coefficient matrices use exact logs of single monomials,
    recurrence bases use a rescaled forward recurrence, and dense rows
    fall back to direct evaluation (adequate at the moderate degrees at
    which dense rows arise).
    """
    mlog = metric_log_factor(basis, points)
    if basis.recurrence is not None:
        a, b = basis.recurrence
        z = np.asarray(points, dtype=complex).ravel()
        return _recurrence_log_values(a, b, basis.cardinality, z) + mlog[None, :]
    diag = _diagonal_structure(basis.coeffs)
    with np.errstate(divide="ignore", invalid="ignore"):
        if diag is not None:
            cols, vals = diag
            exps = basis.dictionary.exponents[cols]
            # convention per factor: 0 * log 0 = 0 (coord^0 = 1 even at 0)
            if basis.dimension == 1:
                z = np.asarray(points, dtype=complex).ravel()
                logz = np.log(np.abs(z))
                logs = exps[:, 0:1] * logz[None, :]
                logs = np.where(np.isnan(logs), 0.0, logs)
            else:
                pts = np.asarray(points, dtype=complex).reshape(-1, 2)
                logz = np.log(np.abs(pts))
                t1 = exps[:, 0:1] * logz[None, :, 0]
                t2 = exps[:, 1:2] * logz[None, :, 1]
                logs = (np.where(np.isnan(t1), 0.0, t1)
                        + np.where(np.isnan(t2), 0.0, t2))
            return logs + np.log(np.abs(vals))[:, None] + mlog[None, :]
        return np.log(np.abs(basis_values(basis, points))) + mlog[None, :]


# --- recurrence evaluation -------------------------------------------------

_RESCALE_LIMIT = 1e120


def _recurrence_values(a, b, n, z):
    """Plain forward recurrence; fine on bounded windows."""
    vals = np.empty((n, z.shape[0]), dtype=complex)
    p_prev = np.zeros_like(z)
    p_cur = np.full_like(z, 1.0 / b[0])
    vals[0] = p_cur
    for k in range(n - 1):
        p_next = ((z - a[k]) * p_cur - b[k] * p_prev) / b[k + 1]
        p_prev, p_cur = p_cur, p_next
        vals[k + 1] = p_cur
    return vals


def _recurrence_log_values(a, b, n, z):
    """log |p_k(z)| for all k with joint rescaling against overflow."""
    logs = np.empty((n, z.shape[0]), dtype=float)
    p_prev = np.zeros_like(z)
    p_cur = np.full_like(z, 1.0 / b[0])
    shift = np.zeros(z.shape[0], dtype=float)
    with np.errstate(divide="ignore"):
        logs[0] = np.log(np.abs(p_cur))
    for k in range(n - 1):
        p_next = ((z - a[k]) * p_cur - b[k] * p_prev) / b[k + 1]
        p_prev, p_cur = p_cur, p_next
        with np.errstate(divide="ignore"):
            logs[k + 1] = np.log(np.abs(p_cur)) + shift
        big = np.maximum(np.abs(p_cur), np.abs(p_prev)) > _RESCALE_LIMIT
        if np.any(big):
            p_cur = np.where(big, p_cur / _RESCALE_LIMIT, p_cur)
            p_prev = np.where(big, p_prev / _RESCALE_LIMIT, p_prev)
            shift = shift + np.where(big, np.log(_RESCALE_LIMIT), 0.0)
    return logs


def recurrence_sample_values(basis: PolynomialBasis, c, z):
    """sum_k c_k p_k(z) by forward recurrence (Clenshaw-free, stable here
    because the dominant-growth direction is the one being tracked)."""
    a, b = basis.recurrence
    z = np.asarray(z, dtype=complex).ravel()
    p_prev = np.zeros_like(z)
    p_cur = np.full_like(z, 1.0 / b[0])
    acc = c[0] * p_cur
    for k in range(len(c) - 1):
        p_next = ((z - a[k]) * p_cur - b[k] * p_prev) / b[k + 1]
        p_prev, p_cur = p_cur, p_next
        acc = acc + c[k + 1] * p_cur
    return acc


def recurrence_sample_log_abs(basis: PolynomialBasis, c, z):
    """log |sum_k c_k p_k(z)| with joint rescaling against overflow."""
    a, b = basis.recurrence
    z = np.asarray(z, dtype=complex).ravel()
    p_prev = np.zeros_like(z)
    p_cur = np.full_like(z, 1.0 / b[0])
    acc = c[0] * p_cur
    shift = np.zeros(z.shape[0], dtype=float)
    for k in range(len(c) - 1):
        p_next = ((z - a[k]) * p_cur - b[k] * p_prev) / b[k + 1]
        p_prev, p_cur = p_cur, p_next
        acc = acc + c[k + 1] * p_cur
        big = np.maximum(np.maximum(np.abs(p_cur), np.abs(p_prev)), np.abs(acc)) > _RESCALE_LIMIT
        if np.any(big):
            s = np.where(big, 1.0 / _RESCALE_LIMIT, 1.0)
            p_cur, p_prev, acc = p_cur * s, p_prev * s, acc * s
            shift = shift + np.where(big, np.log(_RESCALE_LIMIT), 0.0)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(acc)) + shift


# ---------------------------------------------------------------------------
# orthonormalization

def _node_weights(mu, weight, power):
    w = mu.weights
    if weight is not None and power != 0:
        wv = np.asarray(weight(mu.nodes), dtype=float)
        if np.any(wv < 0):
            raise ValueError("weight function must be nonnegative")
        w = w * wv ** (2 * power)
    return w


_PD_FLOOR = 1e-10       # relative eigenvalue floor for the Gram matrix
_REORTH_TRIGGER = 1e-10  # loss of orthogonality that triggers a second pass
_GRAM_TOL = 1e-8


def orthonormalize(dictionary: MonomialDictionary, mu: QuadratureMeasure,
                   weight=None, power: int = 0) -> PolynomialBasis:
    """Modified Gram-Schmidt on the dictionary monomials in L2(w^(2p) dmu).

    One reorthogonalization pass is applied when the first sweep loses
    more than 1e-10 of orthogonality.  The transformation is lower
    triangular in dictionary order.
    """
    wfun, wname = _resolve_weight(weight)
    if dictionary.dimension != mu.dimension:
        raise ValueError("dictionary and measure dimensions differ")
    V = monomial_values(dictionary, mu.nodes)
    w = _node_weights(mu, wfun, power)
    d, nn = V.shape
    if d > nn:
        raise GramSingularError(
            f"{d} monomials exceed {nn} quadrature nodes", float("inf"))
    G = (V * w) @ V.conj().T
    ev = np.linalg.eigvalsh(0.5 * (G + G.conj().T))
    if ev[0] <= _PD_FLOOR * ev[-1]:
        cond = ev[-1] / ev[0] if ev[0] > 0 else float("inf")
        raise GramSingularError(
            "Gram matrix numerically singular (degree too high for the node count)",
            cond)

    Q = V.astype(complex, copy=True)
    T = np.eye(d, dtype=complex)

    def sweep():
        for j in range(d):
            for i in range(j):
                c = np.sum(w * Q[j] * Q[i].conj())
                Q[j] -= c * Q[i]
                T[j] -= c * T[i]
            nrm = math.sqrt(float(np.sum(w * np.abs(Q[j]) ** 2).real))
            if nrm == 0.0:
                raise GramSingularError("zero vector encountered in Gram-Schmidt",
                                        float("inf"))
            Q[j] /= nrm
            T[j] /= nrm

    sweep()
    R = (Q * w) @ Q.conj().T - np.eye(d)
    if np.max(np.abs(R)) > _REORTH_TRIGGER:
        sweep()
        R = (Q * w) @ Q.conj().T - np.eye(d)
    if np.max(np.abs(R)) > _GRAM_TOL:
        raise NumericalError(
            f"orthonormalization left Gram residual {np.max(np.abs(R)):.2e}")
    return PolynomialBasis(
        dictionary=dictionary, coeffs=T, metric="flat", metric_power=0,
        degree=dictionary.max_total_degree, label=f"onb({mu.label})",
        check_kind="measure", check_measure=mu, check_weight=wname,
        check_power=power)


def _stieltjes_basis(dictionary, mu, weight, power) -> PolynomialBasis:
    """Discretized Stieltjes orthonormalization for real-interval measures.

    Mathematically the same flag as Gram-Schmidt, but carried out on node
    values through the three-term recurrence, which stays stable at
    degrees where the monomial Gram matrix is numerically singular.
    """
    wfun, wname = _resolve_weight(weight)
    x = mu.nodes.real
    if np.max(np.abs(mu.nodes.imag)) > 1e-14:
        raise ValueError("Stieltjes path requires a real-interval measure")
    w = _node_weights(mu, wfun, power)
    n = dictionary.size
    if n > x.shape[0]:
        raise GramSingularError(
            f"{n} polynomials exceed {x.shape[0]} quadrature nodes", float("inf"))
    a = np.zeros(max(n - 1, 0))
    b = np.zeros(n)
    b[0] = math.sqrt(float(w.sum()))
    p_prev = np.zeros_like(x)
    p_cur = np.full_like(x, 1.0 / b[0])
    # coefficient rows, built with the same recurrence; approximate in
    # floating point at high degree, kept for reference only
    rows = np.zeros((n, n))
    rows[0, 0] = 1.0 / b[0]
    shift = np.zeros((n,))
    for k in range(n - 1):
        a[k] = float(np.sum(w * x * p_cur ** 2))
        v = (x - a[k]) * p_cur - b[k] * p_prev
        b[k + 1] = math.sqrt(float(np.sum(w * v ** 2)))
        if not b[k + 1] > 1e-14 * b[0]:
            raise GramSingularError(
                "recurrence breakdown (degree too high for the node count)",
                float("inf"))
        p_prev, p_cur = p_cur, v / b[k + 1]
        rows[k + 1, 1:k + 2] = rows[k, 0:k + 1]
        rows[k + 1, 0:k + 1] -= a[k] * rows[k, 0:k + 1]
        rows[k + 1, 0:k] -= b[k] * rows[k - 1, 0:k] if k >= 1 else 0.0
        rows[k + 1] /= b[k + 1]
    return PolynomialBasis(
        dictionary=dictionary, coeffs=rows.astype(complex), metric="flat",
        metric_power=0, degree=dictionary.max_total_degree,
        label=f"onb({mu.label})", recurrence=(a, b),
        check_kind="measure", check_measure=mu, check_weight=wname,
        check_power=power)


def gram_matrix(basis: PolynomialBasis) -> Optional[np.ndarray]:
    """Gram matrix under the basis's defining inner product, or None when
    the basis is orthonormal purely by declaration."""
    if basis.check_kind == "declared":
        return None
    if basis.check_kind == "fs-moments":
        exps = basis.dictionary.exponents
        p = basis.check_power
        inv = np.array([1.0 / _multinomial(p, tuple(alpha)) for alpha in exps])
        return (basis.coeffs * inv) @ basis.coeffs.conj().T
    mu = basis.check_measure
    wfun = WEIGHT_FUNCTIONS[basis.check_weight] if basis.check_weight else None
    w = _node_weights(mu, wfun, basis.check_power)
    V = basis_values(basis, mu.nodes)
    return (V * w) @ V.conj().T


def gram_residual(basis: PolynomialBasis) -> Optional[float]:
    G = gram_matrix(basis)
    if G is None:
        return None
    return float(np.max(np.abs(G - np.eye(basis.cardinality))))


# ---------------------------------------------------------------------------
# ensemble specifications

_FAMILIES = ("kac", "su2", "su3", "onb", "weighted-onb", "polytope", "skewed")

MEASURE_DIMS = {
    "unit-circle-arc": 1,
    "unit-disk-area": 1,
    "interval-arcsine": 1,
    "interval-uniform": 1,
    "torus-2d": 2,
    "bidisk-area": 2,
}

_INTERVAL_MEASURES = ("interval-arcsine", "interval-uniform")


@dataclass(frozen=True)
class EnsembleSpec:
    """Parsed ensemble description with a canonical textual form."""

    family: str
    degree: int
    measure: Optional[str] = None
    weight: Optional[str] = None
    vertices: Optional[tuple] = None
    resolution: Optional[int] = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family '{self.family}'")
        if self.degree < 1:
            raise ValueError("degree N must be >= 1")
        if self.family in ("onb", "weighted-onb"):
            if self.measure not in MEASURE_DIMS:
                raise ValueError(f"family {self.family} needs a known measure, "
                                 f"got {self.measure!r}")
        if self.family == "weighted-onb" and self.weight not in WEIGHT_FUNCTIONS:
            raise ValueError(f"family weighted-onb needs a known weight, "
                             f"got {self.weight!r}")
        if self.family == "polytope":
            if not self.vertices:
                raise ValueError("family polytope needs vertices")
            dims = {len(v) for v in self.vertices}
            if dims not in ({1}, {2}):
                raise ValueError("polytope vertices must share dimension 1 or 2")
            if any(x < 0 for v in self.vertices for x in v):
                raise ValueError("polytope vertices must be nonnegative")

    @property
    def dimension(self) -> int:
        if self.family in ("kac", "su2", "skewed"):
            return 1
        if self.family == "su3":
            return 2
        if self.family == "polytope":
            return len(self.vertices[0])
        return MEASURE_DIMS[self.measure]

    def to_text(self) -> str:
        parts = [f"family={self.family}"]
        if self.measure:
            parts.append(f"measure={self.measure}")
        if self.weight:
            parts.append(f"weight={self.weight}")
        if self.vertices:
            vtx = ";".join("(" + ",".join(str(x) for x in v) + ")" for v in self.vertices)
            parts.append(f"vertices={vtx}")
        parts.append(f"N={self.degree}")
        if self.resolution:
            parts.append(f"resolution={self.resolution}")
        return " ".join(parts)


def parse_spec(text: str) -> EnsembleSpec:
    """Parse the canonical form, e.g. ``family=su2 N=50`` or
    ``family=polytope vertices=(0,0);(2,0);(0,2) N=5``."""
    fields = {}
    for token in text.split():
        if "=" not in token:
            raise ValueError(f"malformed ensemble token {token!r}")
        key, value = token.split("=", 1)
        if key in fields:
            raise ValueError(f"duplicate ensemble key {key!r}")
        fields[key] = value
    known = {"family", "measure", "weight", "vertices", "N", "resolution"}
    extra = set(fields) - known
    if extra:
        raise ValueError(f"unknown ensemble keys {sorted(extra)}")
    if "family" not in fields or "N" not in fields:
        raise ValueError("ensemble text needs at least family=... and N=...")
    vertices = None
    if "vertices" in fields:
        vertices = []
        for chunk in fields["vertices"].split(";"):
            chunk = chunk.strip()
            if not (chunk.startswith("(") and chunk.endswith(")")):
                raise ValueError(f"malformed vertex {chunk!r}")
            vertices.append(tuple(int(x) for x in chunk[1:-1].split(",")))
        vertices = tuple(vertices)
    try:
        degree = int(fields["N"])
    except ValueError:
        raise ValueError(f"N must be an integer, got {fields['N']!r}") from None
    resolution = int(fields["resolution"]) if "resolution" in fields else None
    return EnsembleSpec(
        family=fields["family"], degree=degree, measure=fields.get("measure"),
        weight=fields.get("weight"), vertices=vertices, resolution=resolution)


# ---------------------------------------------------------------------------
# polytope lattice points

def _convex_hull_2d(points: np.ndarray) -> np.ndarray:
    """Monotone chain; returns CCW hull, possibly degenerate (1-2 points)."""
    pts = np.unique(points, axis=0)
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    if pts.shape[0] <= 2:
        return pts
    def turn(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and turn(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out
    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if hull.shape[0] < 3:
        return pts[[0, -1]] if pts.shape[0] >= 2 else pts
    return hull


def dilated_lattice_points(vertices, dilate: int) -> np.ndarray:
    """Integer points of ``dilate * conv(vertices)``, with an inclusive
    1e-9 boundary tolerance."""
    verts = np.asarray(vertices, dtype=float) * dilate
    tol = 1e-9
    if verts.shape[1] == 1:
        lo = int(np.ceil(verts.min() - tol))
        hi = int(np.floor(verts.max() + tol))
        return np.arange(lo, hi + 1, dtype=np.int64)[:, None]
    hull = _convex_hull_2d(verts)
    lo = np.ceil(verts.min(axis=0) - tol).astype(int)
    hi = np.floor(verts.max(axis=0) + tol).astype(int)
    cand = np.array([(i, j) for i in range(lo[0], hi[0] + 1)
                     for j in range(lo[1], hi[1] + 1)], dtype=float)
    if cand.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    if hull.shape[0] == 1:
        keep = np.all(np.abs(cand - hull[0]) <= tol, axis=1)
    elif hull.shape[0] == 2:
        d = hull[1] - hull[0]
        rel = cand - hull[0]
        cross = rel[:, 0] * d[1] - rel[:, 1] * d[0]
        t = rel @ d / (d @ d)
        keep = (np.abs(cross) <= tol * max(1.0, np.linalg.norm(d))) & \
               (t >= -tol) & (t <= 1 + tol)
    else:
        keep = np.ones(cand.shape[0], dtype=bool)
        for i in range(hull.shape[0]):
            e = hull[(i + 1) % hull.shape[0]] - hull[i]
            rel = cand - hull[i]
            keep &= (e[0] * rel[:, 1] - e[1] * rel[:, 0]) >= -tol * max(1.0, np.linalg.norm(e))
    return cand[keep].astype(np.int64)


# ---------------------------------------------------------------------------
# ensemble construction

def _multinomial(total: int, alpha: tuple) -> float:
    rest = total - sum(alpha)
    if rest < 0:
        raise ValueError("multi-index exceeds total degree")
    out = 1
    left = total
    for a in alpha:
        out *= math.comb(left, a)
        left -= a
    return float(out)


def _default_resolution(name: str, degree: int) -> int:
    if name in ("unit-circle-arc", "torus-2d"):
        return max(2 * degree + 6, MIN_RESOLUTION)
    if name in _INTERVAL_MEASURES:
        return max(degree + 8, MIN_RESOLUTION)
    return max(degree + 4, MIN_RESOLUTION)  # disk-type, radial rule


def _su_basis(dimension: int, degree: int, label: str) -> PolynomialBasis:
    dictionary = total_degree_dictionary(dimension, degree)
    scales = np.array([math.sqrt(_multinomial(degree, tuple(alpha)))
                       for alpha in dictionary.exponents])
    return PolynomialBasis(
        dictionary=dictionary, coeffs=np.diag(scales).astype(complex),
        metric="fubini-study", metric_power=degree, degree=degree, label=label,
        check_kind="fs-moments", check_power=degree)


def build_ensemble(spec: Union[EnsembleSpec, str]) -> PolynomialBasis:
    """Construct the basis for an ensemble specification."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    N = spec.degree
    if spec.family == "kac":
        dictionary = total_degree_dictionary(1, N)
        mu = build_measure("unit-circle-arc",
                           spec.resolution or _default_resolution("unit-circle-arc", N))
        return PolynomialBasis(
            dictionary=dictionary, coeffs=np.eye(N + 1, dtype=complex),
            metric="flat", metric_power=0, degree=N, label=spec.to_text(),
            check_kind="measure", check_measure=mu)
    if spec.family in ("su2", "su3"):
        basis = _su_basis(1 if spec.family == "su2" else 2, N, spec.to_text())
        return basis
    if spec.family in ("onb", "weighted-onb"):
        mu = build_measure(spec.measure,
                           spec.resolution or _default_resolution(spec.measure, N))
        dictionary = total_degree_dictionary(mu.dimension, N)
        weight = spec.weight if spec.family == "weighted-onb" else None
        power = N if weight else 0
        if spec.measure in _INTERVAL_MEASURES:
            basis = _stieltjes_basis(dictionary, mu, weight, power)
        else:
            basis = orthonormalize(dictionary, mu, weight, power)
        basis.degree = N
        basis.label = spec.to_text()
        return basis
    if spec.family == "polytope":
        p = max(sum(v) for v in spec.vertices)
        if p < 1:
            raise ValueError("polytope must contain a vertex of positive degree")
        hom = p * N
        points = dilated_lattice_points(spec.vertices, N)
        if points.shape[0] == 0:
            raise ValueError("dilated polytope contains no lattice points")
        dictionary = dictionary_from_exponents(points)
        scales = np.array([math.sqrt(_multinomial(hom, tuple(alpha)))
                           for alpha in dictionary.exponents])
        locus = ""
        mins = dictionary.exponents.min(axis=0)
        degs = dictionary.exponents.sum(axis=1)
        notes = []
        if np.all(degs > 0):
            notes.append("origin chart center (all exponents positive degree)")
        for axis in range(dictionary.dimension):
            if mins[axis] > 0:
                notes.append(f"coordinate hyperplane z{axis + 1}=0")
        if notes:
            locus = "base locus meets: " + "; ".join(notes)
        return PolynomialBasis(
            dictionary=dictionary, coeffs=np.diag(scales).astype(complex),
            metric="fubini-study", metric_power=hom, degree=N,
            label=spec.to_text(), check_kind="fs-moments", check_power=hom,
            base_locus=locus)
    if spec.family == "skewed":
        # stress family: monomials rescaled by (j!)^(1/4), declared
        # orthonormal under the inner product that makes them so
        scales = np.exp(0.25 * np.cumsum(np.log(np.maximum(np.arange(N + 1), 1))))
        basis = declared_basis(scales, spec.to_text())
        return basis
    raise ValueError(f"unknown family '{spec.family}'")


def declared_basis(scales, label: str, metric: str = "flat",
                   metric_power: int = 0) -> PolynomialBasis:
    """Univariate monomial basis with row j scaled by ``scales[j]`` and
    declared orthonormal as-is (used for stress ensembles)."""
    scales = np.asarray(scales, dtype=complex)
    dictionary = total_degree_dictionary(1, scales.shape[0] - 1)
    return PolynomialBasis(
        dictionary=dictionary, coeffs=np.diag(scales), metric=metric,
        metric_power=metric_power, degree=scales.shape[0] - 1, label=label,
        check_kind="declared")


# ---------------------------------------------------------------------------
# Gaussian samples

_MASK64 = (1 << 64) - 1


@dataclass
class GaussianSample:
    """Coefficients of one draw ``f = sum_j c_j S_j`` from an ensemble."""

    coeffs: np.ndarray
    basis: PolynomialBasis
    seed: int
    trial: int


def coefficient_stream(seed: int, trial: int) -> np.random.Generator:
    """Counter-based RNG stream keyed by (seed, trial): identical keys give
    bit-identical draws regardless of execution order."""
    key = np.array([seed & _MASK64, trial & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample(basis: PolynomialBasis, seed: int, trial: int) -> GaussianSample:
    rng = coefficient_stream(seed, trial)
    parts = rng.standard_normal((2, basis.cardinality))
    c = math.sqrt(0.5) * (parts[0] + 1j * parts[1])
    return GaussianSample(coeffs=c, basis=basis, seed=seed, trial=trial)


def combined_coefficients(s: GaussianSample) -> np.ndarray:
    """Monomial coefficients of the sampled polynomial over the dictionary."""
    return s.coeffs @ s.basis.coeffs


def evaluate(s: GaussianSample, points) -> np.ndarray:
    """Value of the sampled polynomial; Horner accumulation for dense
    univariate dictionaries, power tables otherwise."""
    basis = s.basis
    if basis.recurrence is not None:
        return recurrence_sample_values(basis, s.coeffs, points)
    combined = combined_coefficients(s)
    if basis.dimension == 1:
        z = np.asarray(points, dtype=complex).ravel()
        top = basis.dictionary.max_total_degree
        dense = np.zeros(top + 1, dtype=complex)
        dense[basis.dictionary.exponents[:, 0]] = combined
        acc = np.full_like(z, dense[top])
        for k in range(top - 1, -1, -1):
            acc = acc * z + dense[k]
        return acc
    return combined @ monomial_values(basis.dictionary, points)


def evaluate_h(s: GaussianSample, points) -> np.ndarray:
    """Metric-normalized magnitude |f(z)|_h (real, nonnegative)."""
    raw = np.abs(evaluate(s, points))
    if s.basis.metric == "flat" or s.basis.metric_power == 0:
        return raw
    return raw * np.exp(metric_log_factor(s.basis, points))


def sample_log_abs(s: GaussianSample, points) -> np.ndarray:
    """log |f(z)| through the overflow-safe path for each representation."""
    if s.basis.recurrence is not None:
        return recurrence_sample_log_abs(s.basis, s.coeffs, points)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(evaluate(s, points)))
