"""Zero sets of sampled polynomials.

Univariate roots come from the Aberth-Ehrlich simultaneous iteration
(no eigensolver involved).  Bivariate systems are reduced to univariate
ones through a Sylvester resultant evaluated at Fourier points, followed
by candidate pairing and Newton polish; every accepted point is validated
against a residual gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft
import scipy.linalg
import scipy.special

from .ensemble import (GaussianSample, combined_coefficients,
                       recurrence_sample_values)
from .errors import SolverError

GOLDEN_ANGLE = 2.0 * np.pi * (1.0 - 2.0 / (1.0 + math.sqrt(5.0)))

MAX_SWEEPS = 500
CONV_REL = 1e-13           # correction threshold relative to root magnitude
CLUSTER_REL = 1e-7         # near-coincident roots are merged and flagged
RESIDUAL_REL = 1e-8        # acceptance gate relative to coefficient scale
PAIR_TOL = 1e-6            # w-candidate pairing tolerance
_TRIM_REL = 1e-12          # relative trim for numerically zero lead coefficients
MAX_BIDEGREE = 20
_SHEAR_ATTEMPTS = 3


@dataclass
class ZeroSet:
    """Solution set of one sampled section (or pair of sections).

    ``points`` is complex (n,) in dimension 1 and (n, 2) in dimension 2.
    ``residuals`` are relative to the coefficient scale (and metric
    normalized when produced from an ensemble sample).  Multiplicities
    count merged near-coincident points.
    """

    dimension: int
    points: np.ndarray
    residuals: np.ndarray
    multiplicities: np.ndarray
    converged: bool
    diagnostics: dict = field(default_factory=dict)

    @property
    def total_count(self) -> int:
        return int(self.multiplicities.sum())


# ---------------------------------------------------------------------------
# univariate solver

def _horner(c, z):
    acc = np.full_like(z, c[-1])
    for k in range(len(c) - 2, -1, -1):
        acc = acc * z + c[k]
    return acc


def _newton_corrections(c, z):
    """w = p/p' evaluated stably: direct Horner for |z| <= 1, reversed
    polynomial for |z| > 1 so nothing overflows far from the origin."""
    d = len(c) - 1
    w = np.empty_like(z)
    inner = np.abs(z) <= 1.0
    if np.any(inner):
        zi = z[inner]
        dc = c[1:] * np.arange(1, d + 1)
        p = _horner(c, zi)
        dp = _horner(dc, zi)
        dp = np.where(dp == 0, 1e-300, dp)
        w[inner] = p / dp
    if np.any(~inner):
        zo = z[~inner]
        t = 1.0 / zo
        r = c[::-1]
        dr = r[1:] * np.arange(1, d + 1)
        rv = _horner(r, t)
        rdv = _horner(dr, t)
        # p = z^d r(1/z);  p' = z^(d-1) (d r(t) - t r'(t))
        denom = d * rv - t * rdv
        denom = np.where(denom == 0, 1e-300, denom)
        w[~inner] = zo * rv / denom
    return w


def _log_abs_poly(c, z):
    """log |p(z)| without overflow, via the reversed polynomial outside
    the unit disk."""
    z = np.asarray(z, dtype=complex)
    d = len(c) - 1
    out = np.empty(z.shape, dtype=float)
    inner = np.abs(z) <= 1.0
    with np.errstate(divide="ignore"):
        if np.any(inner):
            out[inner] = np.log(np.abs(_horner(c, z[inner])))
        if np.any(~inner):
            zo = z[~inner]
            out[~inner] = d * np.log(np.abs(zo)) + np.log(np.abs(_horner(c[::-1], 1.0 / zo)))
    return out


def _log_local_scale(c, z):
    """log sum_j |c_j| |z|^j, the local coefficient scale against which a
    residual |p(z)| is a relative backward error."""
    z = np.asarray(z, dtype=complex)
    a = np.abs(np.asarray(c))
    with np.errstate(divide="ignore"):
        logc = np.log(a)
        logr = np.log(np.abs(z))
    j = np.arange(a.shape[0])
    mat = logc[None, :] + j[None, :] * logr[:, None]
    zero = ~np.isfinite(logr)
    if np.any(zero):
        mat[zero, :] = -np.inf
        mat[zero, 0] = logc[0]
    return scipy.special.logsumexp(mat, axis=1)


def _initial_points(c):
    """Starting configuration for the simultaneous iteration: annulus radii
    from the upper convex hull of (j, log|c_j|) (each hull edge of width k
    contributes k roots at radius |c_lo / c_hi|^(1/k)), spread along a
    golden-angle spiral.  For flat coefficient profiles this degenerates
    to the usual near-unit circle."""
    d = len(c) - 1
    a = np.abs(c)
    idx = np.nonzero(a)[0]
    logs = np.log(a[idx])
    hull = []
    for k in range(idx.shape[0]):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            lhs = (idx[i1] - idx[i0]) * (logs[k] - logs[i0])
            rhs = (idx[k] - idx[i0]) * (logs[i1] - logs[i0])
            if lhs >= rhs:
                hull.pop()
            else:
                break
        hull.append(k)
    radii = np.empty(d)
    pos = 0
    for a_i, b_i in zip(hull[:-1], hull[1:]):
        k1, k2 = int(idx[a_i]), int(idx[b_i])
        r = math.exp((logs[a_i] - logs[b_i]) / (k2 - k1))
        radii[pos: pos + (k2 - k1)] = min(max(r, 1e-12), 1e12)
        pos += k2 - k1
    angles = 0.37 + GOLDEN_ANGLE * np.arange(d)
    return radii * np.exp(1j * angles), radii, angles


def _aberth(c):
    """Simultaneous root iteration for a normalized coefficient vector.

    A point is converged once its correction drops below CONV_REL times
    its magnitude.  Returns (roots, converged_mask, sweeps).
    """
    d = len(c) - 1
    if d == 1:
        return np.array([-c[0] / c[1]]), np.array([True]), 0
    z, radii, angles = _initial_points(c)
    conv = np.zeros(d, dtype=bool)
    sweeps = 0
    for sweeps in range(1, MAX_SWEEPS + 1):
        w = _newton_corrections(c, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        s = np.sum(1.0 / diff, axis=1) - 1.0  # remove the diagonal 1/1 term
        denom = 1.0 - w * s
        denom = np.where(denom == 0, 1e-300, denom)
        delta = w / denom
        z = z - delta
        bad = ~np.isfinite(z)
        if np.any(bad):
            z[bad] = radii[bad] * np.exp(1j * (angles[bad] + 0.1 * sweeps))
            continue
        conv = np.abs(delta) <= CONV_REL * np.maximum(np.abs(z), 1e-8)
        if np.all(conv):
            break
    return z, conv, sweeps


def _cluster(points, rel=CLUSTER_REL):
    """Merge points closer than rel x scale; returns (reps, multiplicities,
    member index lists)."""
    n = points.shape[0]
    if n == 0:
        return points, np.zeros(0, dtype=int), []
    scale = max(1.0, float(np.max(np.abs(points))))
    tol = rel * scale
    order = np.lexsort((points.imag, points.real))
    assigned = np.full(n, -1, dtype=int)
    groups = []
    for idx in order:
        placed = False
        for gi in range(len(groups) - 1, max(len(groups) - 40, -1), -1):
            if abs(points[groups[gi][0]] - points[idx]) <= tol:
                groups[gi].append(idx)
                placed = True
                break
        if not placed:
            groups.append([idx])
    reps = np.array([points[g].mean() for g in groups])
    mult = np.array([len(g) for g in groups], dtype=int)
    return reps, mult, groups


def roots_univariate(coeffs) -> ZeroSet:
    """All complex roots of ``sum_j coeffs[j] z^j`` with multiplicities.

    Exact zero leading coefficients are trimmed; exact zero trailing
    coefficients become roots at the origin.  Residuals are the relative
    backward errors |p(root)| / sum_j |c_j| |root|^j; for roots of unit
    size this is |p(root)| against the plain coefficient scale.
    """
    c = np.asarray(coeffs, dtype=complex).ravel()
    while c.shape[0] > 1 and c[-1] == 0:
        c = c[:-1]
    if c.shape[0] <= 1:
        raise ValueError("polynomial degree must be at least 1")
    nz = np.nonzero(c)[0]
    origin = int(nz[0])
    c_red = c[origin:]
    scale = float(np.max(np.abs(c_red)))
    c_red = c_red / scale
    if c_red.shape[0] > 1:
        roots, conv, sweeps = _aberth(c_red)
    else:
        roots = np.zeros(0, dtype=complex)
        conv = np.ones(0, dtype=bool)
        sweeps = 0
    with np.errstate(over="ignore"):
        logres = _log_abs_poly(c_red, roots) - _log_local_scale(c_red, roots)
        residuals = np.exp(np.minimum(logres, 700.0))
    if origin:
        roots = np.concatenate([np.zeros(origin, dtype=complex), roots])
        residuals = np.concatenate([np.zeros(origin), residuals])
        conv = np.concatenate([np.ones(origin, dtype=bool), conv])
    reps, mult, groups = _cluster(roots)
    res = np.array([residuals[g].max() for g in groups])
    return ZeroSet(
        dimension=1, points=reps, residuals=res, multiplicities=mult,
        converged=bool(np.all(conv)),
        diagnostics={"sweeps": sweeps, "degree": int(c.shape[0] - 1),
                     "coefficient_scale": scale})


# ---------------------------------------------------------------------------
# samples in dimension 1

def _chebyshev_coefficients(s: GaussianSample) -> np.ndarray:
    """Chebyshev-T coefficients of a recurrence-basis sample, computed by
    exact interpolation at Chebyshev points (stable at any degree)."""
    n = s.basis.cardinality
    k = np.arange(n)
    x = np.cos((2 * k + 1) * np.pi / (2 * n))
    vals = recurrence_sample_values(s.basis, s.coeffs, x.astype(complex))
    dct_re = scipy.fft.dct(vals.real, type=2)
    dct_im = scipy.fft.dct(vals.imag, type=2)
    d = (dct_re + 1j * dct_im) / (2.0 * n)
    d[1:] *= 2.0
    return d


def _pair_reciprocal_images(zs: np.ndarray, rs: np.ndarray):
    """The Joukowski image of a self-reciprocal root set lists every zero
    twice; greedily merge nearest pairs, keeping the worse residual."""
    n = zs.shape[0]
    used = np.zeros(n, dtype=bool)
    out = []
    res = []
    order = np.lexsort((zs.imag, zs.real))
    for idx in order:
        if used[idx]:
            continue
        used[idx] = True
        dist = np.abs(zs - zs[idx])
        dist[used] = np.inf
        j = int(np.argmin(dist))
        if np.isfinite(dist[j]):
            used[j] = True
            out.append(0.5 * (zs[idx] + zs[j]))
            res.append(max(rs[idx], rs[j]))
        else:
            out.append(zs[idx])
            res.append(rs[idx])
    return np.asarray(out, dtype=complex), np.asarray(res, dtype=float)


def zeros_of_sample(s: GaussianSample) -> ZeroSet:
    """Zero set of a univariate ensemble sample, metric-normalized residuals.

    Monomial-representable bases go straight to the Aberth solver.  Bases
    carried by a real three-term recurrence are rewritten on the Joukowski
    parameter u (where z = (u + 1/u)/2) as a self-reciprocal polynomial of
    twice the degree with O(1) coefficients, which keeps high degrees
    well conditioned.
    """
    basis = s.basis
    if basis.dimension != 1:
        raise ValueError("zeros_of_sample handles dimension 1 only")
    if basis.recurrence is not None:
        d = _chebyshev_coefficients(s)
        n = d.shape[0] - 1
        q = np.zeros(2 * n + 1, dtype=complex)
        q[n] = d[0]
        for k in range(1, n + 1):
            q[n + k] += 0.5 * d[k]
            q[n - k] += 0.5 * d[k]
        # symmetric trim: a numerically zero top coefficient removes one
        # far root (u -> 0 and u -> inf images of the same z)
        top = float(np.max(np.abs(q)))
        lost = 0
        while q.shape[0] > 3 and abs(q[-1]) < _TRIM_REL * top and abs(q[0]) < _TRIM_REL * top:
            q = q[1:-1]
            lost += 1
        uset = roots_univariate(q)
        uroots = np.repeat(uset.points, uset.multiplicities)
        ures = np.repeat(uset.residuals, uset.multiplicities)
        zs = 0.5 * (uroots + 1.0 / uroots)
        pts, prs = _pair_reciprocal_images(zs, ures)
        reps, mult, groups = _cluster(pts)
        # residual of a z zero inherits the backward error of its u-space
        # preimages; the Joukowski map does not change the relative scale
        res = np.array([prs[g].max() for g in groups])
        return ZeroSet(
            dimension=1, points=reps, residuals=res, multiplicities=mult,
            converged=uset.converged,
            diagnostics={"route": "joukowski", "degree": n,
                         "degree_effective": n - lost,
                         "sweeps": uset.diagnostics["sweeps"]})
    combined = combined_coefficients(s)
    dense = np.zeros(basis.dictionary.max_total_degree + 1, dtype=complex)
    dense[basis.dictionary.exponents[:, 0]] = combined
    zset = roots_univariate(dense)
    zset.diagnostics["route"] = "monomial"
    return zset


# ---------------------------------------------------------------------------
# bivariate systems

def _trim_table(t):
    t = np.asarray(t, dtype=complex)
    if t.ndim != 2:
        raise ValueError("coefficient table must be 2-d")
    rows = np.nonzero(np.any(t != 0, axis=1))[0]
    cols = np.nonzero(np.any(t != 0, axis=0))[0]
    if rows.size == 0:
        raise ValueError("coefficient table is identically zero")
    return t[: rows[-1] + 1, : cols[-1] + 1]


def _total_degree(t):
    idx = np.nonzero(t)
    return int((idx[0] + idx[1]).max())


def _general_position_transform(key0: int, key1: int, attempt: int) -> np.ndarray:
    """Attempt 0 is the identity: independent Gaussian pairs are already in
    general position almost surely.  Retries use a lower-triangular shear
    w -> w + tau z, which keeps the w-degree of the coefficient tables (a
    full unitary would inflate bidegree-(n, n) tables to total degree 2n
    and collapse the Sylvester determinant scale by |u|^(table area))."""
    if attempt == 0:
        return np.eye(2, dtype=complex)
    rng = np.random.Generator(np.random.Philox(key=np.array(
        [key0 & ((1 << 64) - 1),
         ((key1 << 2) | attempt) & ((1 << 64) - 1)], dtype=np.uint64)))
    tau = 0.5 * np.exp(2j * np.pi * rng.random())
    return np.array([[1.0, 0.0], [tau, 1.0]], dtype=complex)


def _compose_linear(t, u):
    """Coefficient table of ``f(U (z, w))`` for a 2x2 matrix U."""
    dz, dw = t.shape[0] - 1, t.shape[1] - 1
    top = dz + dw
    out = np.zeros((top + 1, top + 1), dtype=complex)
    # expansion of (u00 z + u01 w)^i indexed by the z-exponent
    def expansion(i, c0, c1):
        a = np.arange(i + 1)
        return np.array([math.comb(i, int(k)) for k in a]) * (c0 ** a) * (c1 ** (i - a))
    exp_z = [expansion(i, u[0, 0], u[0, 1]) for i in range(dz + 1)]
    exp_w = [expansion(j, u[1, 0], u[1, 1]) for j in range(dw + 1)]
    for i in range(dz + 1):
        for j in range(dw + 1):
            cij = t[i, j]
            if cij == 0:
                continue
            vz, vw = exp_z[i], exp_w[j]
            for a in range(i + 1):
                zb = a + np.arange(j + 1)
                wb = (i - a) + (j - np.arange(j + 1))
                out[zb, wb] += cij * vz[a] * vw
    return out


def _w_coefficients_at(t, zvals):
    """Coefficients in w of f(z, .) for a batch of z values: (M, dw+1)."""
    dz = t.shape[0] - 1
    powers = np.empty((zvals.shape[0], dz + 1), dtype=complex)
    powers[:, 0] = 1.0
    for k in range(1, dz + 1):
        powers[:, k] = powers[:, k - 1] * zvals
    return powers @ t


def _trim_poly(c, rel=_TRIM_REL):
    c = np.asarray(c, dtype=complex)
    top = float(np.max(np.abs(c)))
    if top == 0.0:
        return c[:1]
    keep = c.shape[0]
    while keep > 1 and abs(c[keep - 1]) < rel * top:
        keep -= 1
    return c[:keep]


def _sylvester_blocks(t1, t2):
    """Sylvester matrix of (f1, f2) in w as a matrix polynomial in z:
    returns blocks S_k with S(z) = sum_k S_k z^k."""
    n1 = t1.shape[1] - 1
    n2 = t2.shape[1] - 1
    if n1 == 0 and n2 == 0:
        raise SolverError("system has no w dependence")
    d = max(t1.shape[0], t2.shape[0]) - 1
    size = n1 + n2
    blocks = np.zeros((d + 1, size, size), dtype=complex)
    for i in range(n2):
        blocks[: t1.shape[0], i, i: i + n1 + 1] = t1[:, ::-1]
    for i in range(n1):
        blocks[: t2.shape[0], n2 + i, i: i + n2 + 1] = t2[:, ::-1]
    return blocks


def _pencil_z_values(blocks, key):
    """Eigenvalues z with det S(z) = 0 via the companion linearization of
    the matrix polynomial S(z) = sum_k S_k z^k.

    The substitution z = (a s + b)/(c s + e) with a seeded unitary Moebius
    map regularizes the leading block to (scalar) * S(a/c); without it the
    leading block is structurally singular whenever det S drops degree and
    QZ returns 0/0 indeterminates in place of genuine eigenvalues."""
    d = blocks.shape[0] - 1
    size = blocks.shape[1]
    if d == 0:
        return np.zeros(0, dtype=complex)
    rng = np.random.Generator(np.random.Philox(key=np.array(
        [key[0] & ((1 << 64) - 1),
         ((key[1] << 8) | (key[2] << 2) | 1) & ((1 << 64) - 1)],
        dtype=np.uint64)))
    g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(g)
    (a, b), (c, e) = q * (np.diag(r).conj() / np.abs(np.diag(r)))
    # T_j = sum_k S_k * [s^j] (a s + b)^k (c s + e)^(d - k)
    M = np.zeros((d + 1, d + 1), dtype=complex)
    for k in range(d + 1):
        poly = np.ones(1, dtype=complex)
        for _ in range(k):
            poly = np.convolve(poly, np.array([b, a]))
        for _ in range(d - k):
            poly = np.convolve(poly, np.array([e, c]))
        M[k, : poly.shape[0]] = poly
    T = np.tensordot(M, blocks, axes=(0, 0))
    big = d * size
    A = np.zeros((big, big), dtype=complex)
    B = np.eye(big, dtype=complex)
    A[: big - size, size:] = np.eye(big - size)
    for k in range(d):
        A[big - size:, k * size: (k + 1) * size] = -T[k]
    B[big - size:, big - size:] = T[d]
    svals = scipy.linalg.eigvals(A, B, check_finite=False)
    svals = svals[np.isfinite(svals)]
    zvals = (a * svals + b) / (c * svals + e)
    finite = np.isfinite(zvals) & (np.abs(zvals) < 1e12)
    return zvals[finite]


def _resultant_coefficients(t1, t2):
    """Coefficients of Res_w(f1, f2) by FFT from Sylvester determinants at
    Fourier points, plus a flag saying whether they can be trusted.

    The interpolation has an absolute noise floor eps * max|det|; systems
    whose zeros pair small |z| with large |w| (corner-heavy Newton
    polytopes) have genuine low-order coefficients below that floor, and
    their small roots would come out wrong.  Raises SolverError when every
    determinant sits at LU roundoff, the signature of a shared factor."""
    n1 = t1.shape[1] - 1
    n2 = t2.shape[1] - 1
    if n1 == 0 and n2 == 0:
        raise SolverError("system has no w dependence")
    dz1 = t1.shape[0] - 1
    dz2 = t2.shape[0] - 1
    bound = dz1 * n2 + dz2 * n1
    if bound == 0:
        return np.ones(1, dtype=complex), True
    m = 8
    while m < bound + 1:
        m *= 2
    w0 = np.exp(2j * np.pi * 0.37 / m)
    zvals = w0 * np.exp(2j * np.pi * np.arange(m) / m)
    a = _w_coefficients_at(t1, zvals)
    b = _w_coefficients_at(t2, zvals)
    size = n1 + n2
    s = np.zeros((m, size, size), dtype=complex)
    for i in range(n2):
        s[:, i, i: i + n1 + 1] = a[:, ::-1]
    for i in range(n1):
        s[:, n2 + i, i: i + n2 + 1] = b[:, ::-1]
    dets = np.linalg.det(s)
    top = float(np.max(np.abs(dets)))
    rn_a = np.sqrt((np.abs(a) ** 2).sum(axis=1))
    rn_b = np.sqrt((np.abs(b) ** 2).sum(axis=1))
    lu_floor = np.finfo(float).eps * float(np.max(rn_a ** n2 * rn_b ** n1))
    if top < 1e4 * max(lu_floor, 1e-300):
        raise SolverError(
            "resultant numerically zero (shared component suspected)")
    coeffs = scipy.fft.fft(dets) / m
    coeffs = coeffs[: bound + 1] * w0 ** (-np.arange(bound + 1))
    c = _trim_poly(coeffs)
    floor = np.finfo(float).eps * top + lu_floor
    trusted = c.shape[0] > 1 and float(np.min(np.abs(c))) > 1e3 * floor
    return c, trusted


def _poly_of_w(t, z):
    dz = t.shape[0] - 1
    powers = z ** np.arange(dz + 1)
    return powers @ t


def _newton_polish(t1, t2, pts, steps=5):
    """A few Newton steps on the square system, vectorized over points."""
    d1z = _table_partial(t1, 0)
    d1w = _table_partial(t1, 1)
    d2z = _table_partial(t2, 0)
    d2w = _table_partial(t2, 1)
    z, w = pts[:, 0].copy(), pts[:, 1].copy()
    for _ in range(steps):
        f1 = _eval_table(t1, z, w)
        f2 = _eval_table(t2, z, w)
        if max(np.max(np.abs(f1)), np.max(np.abs(f2))) < 1e-15:
            break
        j11 = _eval_table(d1z, z, w)
        j12 = _eval_table(d1w, z, w)
        j21 = _eval_table(d2z, z, w)
        j22 = _eval_table(d2w, z, w)
        det = j11 * j22 - j12 * j21
        det = np.where(det == 0, 1e-300, det)
        dz = (f1 * j22 - f2 * j12) / det
        dw = (f2 * j11 - f1 * j21) / det
        z, w = z - dz, w - dw
    return np.stack([z, w], axis=1)


def _table_partial(t, axis):
    if axis == 0:
        if t.shape[0] == 1:
            return np.zeros((1, t.shape[1]), dtype=complex)
        return t[1:, :] * np.arange(1, t.shape[0])[:, None]
    if t.shape[1] == 1:
        return np.zeros((t.shape[0], 1), dtype=complex)
    return t[:, 1:] * np.arange(1, t.shape[1])[None, :]


def _eval_table(t, z, w):
    pz = np.empty((t.shape[0], z.shape[0]), dtype=complex)
    pz[0] = 1.0
    for k in range(1, t.shape[0]):
        pz[k] = pz[k - 1] * z
    pw = np.empty((t.shape[1], w.shape[0]), dtype=complex)
    pw[0] = 1.0
    for k in range(1, t.shape[1]):
        pw[k] = pw[k - 1] * w
    return np.einsum("ij,ip,jp->p", t, pz, pw)


def _local_scale(t, z, w):
    """Backward-error scale sum |c_ij| |z|^i |w|^j; the natural residual
    normalization, invariant (jointly with |f|) under metric rescaling."""
    return np.real(_eval_table(np.abs(t).astype(complex), np.abs(z).astype(complex),
                               np.abs(w).astype(complex)))


def _small_roots(c):
    c = _trim_poly(c)
    if c.shape[0] <= 1:
        return np.zeros(0, dtype=complex)
    zset = roots_univariate(c)
    return np.repeat(zset.points, zset.multiplicities)


def _pair_candidates(g1, g2, zroots):
    """Match w-roots of the two slices over each clustered resultant root.
    Returns the candidate points and the number of resultant roots that
    paired with nothing (the telltale of a wrong resultant route)."""
    zreps, _, _ = _cluster(zroots, rel=1e-8)
    cands = []
    unpaired = 0
    for zeta in zreps:
        w1 = _small_roots(_poly_of_w(g1, zeta))
        w2 = _small_roots(_poly_of_w(g2, zeta))
        if w1.size == 0 or w2.size == 0:
            unpaired += 1
            continue
        dist = np.abs(w1[:, None] - w2[None, :])
        wi, wj = np.nonzero(dist <= PAIR_TOL * np.maximum(1.0, np.abs(w1))[:, None])
        if wi.size == 0:
            unpaired += 1
        for a, b in zip(wi, wj):
            cands.append((zeta, 0.5 * (w1[a] + w2[b])))
    return cands, unpaired


def roots_bivariate(table1, table2, shear_key=(0, 0)) -> ZeroSet:
    """Common zeros in C^2 of two polynomials given as coefficient tables
    ``t[i, j] ~ z^i w^j`` (total degrees <= 20).

    z-coordinates come from the w-resultant, computed by whichever of two
    routes survives its own failure mode: FFT interpolation of Sylvester
    determinants (wrong for corner-heavy tables whose genuine low-order
    coefficients sit below the eps * max|det| interpolation floor) and the
    companion-pencil eigenproblem (wrong for total-degree tables whose
    det S(z) degree deficit makes a high-multiplicity infinite eigenvalue
    splatter like eps^(1/multiplicity)).  The failure modes are
    complementary, and both are detectable downstream: a wrong route
    leaves resultant roots whose slices share no w-root, so the solver
    tries the preferred route, verifies pairing, and switches when needed.

    Candidate w values at each resultant root are the near-common roots of
    the two slices, polished by Newton iteration and accepted only under
    the residual gate.  The first attempt solves the system as given
    (independent Gaussian pairs are in general position almost surely); a
    degenerate outcome is retried under seeded triangular shears w -> w + tau z.
    """
    t1 = _trim_table(table1)
    t2 = _trim_table(table2)
    deg1 = _total_degree(t1)
    deg2 = _total_degree(t2)
    if deg1 < 1 or deg2 < 1:
        raise ValueError("both polynomials must be nonconstant")
    if max(deg1, deg2) > MAX_BIDEGREE:
        raise ValueError(f"total degree beyond supported bound {MAX_BIDEGREE}")
    s1 = float(np.max(np.abs(t1)))
    s2 = float(np.max(np.abs(t2)))
    t1 = t1 / s1
    t2 = t2 / s2
    last_err = None
    for attempt in range(_SHEAR_ATTEMPTS):
        u = _general_position_transform(shear_key[0], shear_key[1], attempt)
        if attempt == 0:
            g1, g2 = t1, t2
        else:
            g1 = _trim_table(_compose_linear(t1, u))
            g2 = _trim_table(_compose_linear(t2, u))
        try:
            coeffs, trusted = _resultant_coefficients(g1, g2)
        except SolverError as exc:
            last_err = exc
            continue
        routes = ["interpolation", "pencil"] if trusted else ["pencil", "interpolation"]
        cands: list = []
        res_route = routes[0]
        for route in routes:
            if route == "interpolation":
                zroots = _small_roots(coeffs)
            else:
                zroots = _pencil_z_values(
                    _sylvester_blocks(g1, g2),
                    (shear_key[0], shear_key[1], attempt))
            if zroots.size == 0:
                continue
            rcands, unpaired = _pair_candidates(g1, g2, zroots)
            if len(rcands) > len(cands):
                cands = rcands
                res_route = route
            if unpaired == 0 and rcands:
                break
        if not cands:
            last_err = SolverError("no candidate common roots survived pairing")
            continue
        pts = np.asarray(cands, dtype=complex)
        pts = _newton_polish(g1, g2, pts)
        finite = np.all(np.isfinite(pts), axis=1)
        pts = pts[finite]
        r1 = np.abs(_eval_table(g1, pts[:, 0], pts[:, 1]))
        r2 = np.abs(_eval_table(g2, pts[:, 0], pts[:, 1]))
        s1loc = _local_scale(g1, pts[:, 0], pts[:, 1])
        s2loc = _local_scale(g2, pts[:, 0], pts[:, 1])
        ok = (r1 <= RESIDUAL_REL * s1loc) & (r2 <= RESIDUAL_REL * s2loc)
        pts = pts[ok]
        if pts.shape[0] == 0:
            last_err = SolverError("no candidate passed the residual gate")
            continue
        # merge duplicates in the sheared frame, then map back
        reps_idx = []
        mults = []
        taken = np.zeros(pts.shape[0], dtype=bool)
        scale_pt = max(1.0, float(np.max(np.abs(pts))))
        for i in range(pts.shape[0]):
            if taken[i]:
                continue
            close = (np.abs(pts[:, 0] - pts[i, 0]) + np.abs(pts[:, 1] - pts[i, 1])
                     <= CLUSTER_REL * scale_pt) & ~taken
            idx = np.nonzero(close)[0]
            taken[idx] = True
            reps_idx.append(idx)
            mults.append(len(idx))
        merged = np.array([pts[idx].mean(axis=0) for idx in reps_idx])
        back = merged @ u.T  # original coords: (z, w) = U (z', w')
        rr1 = np.abs(_eval_table(t1, back[:, 0], back[:, 1])) / _local_scale(t1, back[:, 0], back[:, 1])
        rr2 = np.abs(_eval_table(t2, back[:, 0], back[:, 1])) / _local_scale(t2, back[:, 0], back[:, 1])
        res_final = np.maximum(rr1, rr2)
        keep = res_final <= 10 * RESIDUAL_REL  # mild slack after the shear-back
        merged = back[keep]
        res_final = res_final[keep]
        mult = np.asarray(mults, dtype=int)[keep]
        count = int(mult.sum())
        return ZeroSet(
            dimension=2, points=merged, residuals=res_final,
            multiplicities=mult, converged=True,
            diagnostics={
                "shear_attempts": attempt + 1,
                "transform": u,
                "bezout_bound": deg1 * deg2,
                "resultant_degree": int(zroots.size),
                "resultant_route": res_route,
                "count": count,
                "bezout_complete": count == deg1 * deg2,
            })
    raise last_err if last_err is not None else SolverError("bivariate solve failed")


def _sample_table(s: GaussianSample) -> np.ndarray:
    combined = combined_coefficients(s)
    exps = s.basis.dictionary.exponents
    t = np.zeros((exps[:, 0].max() + 1, exps[:, 1].max() + 1), dtype=complex)
    t[exps[:, 0], exps[:, 1]] = combined
    return t


def zeros_of_pair(s1: GaussianSample, s2: GaussianSample) -> ZeroSet:
    """Common zero set of two independent samples (dimension 2); retry
    shears are keyed by (seed, trial).

    Residuals are relative backward errors |f_j| / sum |c| |z|^i |w|^j;
    since numerator and denominator carry the same metric factor, these
    are already the metric-normalized quantities.
    """
    if s1.basis.dimension != 2 or s2.basis.dimension != 2:
        raise ValueError("zeros_of_pair requires dimension-2 samples")
    t1 = _sample_table(s1)
    t2 = _sample_table(s2)
    return roots_bivariate(t1, t2, shear_key=(s1.seed, s1.trial))
