"""Linear statistics of zero sets against smooth bump test functions.

Two independent routes compute the same pairing (Z, phi): a direct sum of
phi over the zero points, and a potential-theoretic quadrature of
log|f| * Lap(phi) (the zero set never enters the second route).  Keeping
both routes separate is the point; experiments cross-check them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ensemble import GaussianSample, sample_log_abs
from .rootfind import ZeroSet
from .szego import ComplexGrid

_TAIL = 0.025   # below this distance to the support edge the profile is
                # under 2e-17 of its peak; treated as exactly 0


def _profile(t):
    """Standard bump u(t) = exp(1 - 1/(1 - t)) for t < 1, else 0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = t < 1.0 - _TAIL
    ti = t[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - ti))
    return out


def _profile_derivatives(t):
    """(u, u', u'') wherever t < 1, all exactly 0 near and past the edge."""
    t = np.asarray(t, dtype=float)
    u = np.zeros_like(t)
    du = np.zeros_like(t)
    ddu = np.zeros_like(t)
    inside = t < 1.0 - _TAIL
    ti = t[inside]
    g = 1.0 / (1.0 - ti)
    ui = np.exp(1.0 - g)
    u[inside] = ui
    du[inside] = -ui * g ** 2
    ddu[inside] = ui * (g ** 4 - 2.0 * g ** 3)
    return u, du, ddu


@dataclass(frozen=True)
class TestFunction:
    """Radial bump at ``center`` with support radius ``radius``.

    In dimension 2 the function is the product of per-coordinate bumps,
    supported on a polydisk.
    """

    center: tuple
    radius: float
    dimension: int = 1

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if len(self.center) != self.dimension:
            raise ValueError("center length must match dimension")

    def _t(self, points, coord):
        a = self.center[coord]
        if self.dimension == 1:
            z = np.asarray(points, dtype=complex)
        else:
            z = np.asarray(points)[:, coord]
        return np.abs(z - a) ** 2 / self.radius ** 2

    def value(self, points) -> np.ndarray:
        out = _profile(self._t(points, 0))
        for coord in range(1, self.dimension):
            out = out * _profile(self._t(points, coord))
        return out

    def laplacian(self, points) -> np.ndarray:
        """Closed-form Laplacian.

        Per coordinate, Lap u(|z - a|^2 / r^2) = (4/r^2)(t u'' + u'); the
        full Laplacian in dimension 2 is Lap_1(u1) u2 + u1 Lap_2(u2).
        """
        r2 = self.radius ** 2
        t0 = self._t(points, 0)
        u0, du0, ddu0 = _profile_derivatives(t0)
        lap0 = (4.0 / r2) * (t0 * ddu0 + du0)
        if self.dimension == 1:
            return lap0
        t1 = self._t(points, 1)
        u1, du1, ddu1 = _profile_derivatives(t1)
        lap1 = (4.0 / r2) * (t1 * ddu1 + du1)
        return lap0 * u1 + u0 * lap1

    def support_radius(self) -> float:
        return self.radius


def bump_dictionary(dimension: int = 1) -> list:
    """The fixed experiment dictionary.

    Dimension 1: five radius-0.6 bumps centered at 0 and at +-0.8 on the
    real and imaginary axes, jointly covering the region where all shipped
    limit measures live.  Dimension 2: five product bumps, four touching
    the unit torus from different sides plus one at the origin.
    """
    r = 0.6
    if dimension == 1:
        centers = [0.0, 0.8, -0.8, 0.8j, -0.8j]
        return [TestFunction(center=(c,), radius=r, dimension=1) for c in centers]
    centers = [(0.8, 0.8), (-0.8, -0.8), (0.8j, 0.8j), (0.8, -0.8), (0.0, 0.0)]
    return [TestFunction(center=c, radius=r, dimension=2) for c in centers]


@dataclass(frozen=True)
class PairingResult:
    raw: float
    normalized: float
    method: str

    def __post_init__(self):
        if self.method not in ("root-sum", "poincare-lelong"):
            raise ValueError("unknown pairing method tag")


def pair_points(zeros: ZeroSet, phi: TestFunction, degree: int,
                codimension: int) -> PairingResult:
    """(Z, phi) as a multiplicity-weighted sum of phi over the zero set;
    normalized value divides by degree^codimension."""
    if codimension != zeros.dimension or phi.dimension != zeros.dimension:
        raise ValueError("pairing requires codimension = dimension of the zero set")
    if zeros.points.shape[0] == 0:
        raw = 0.0
    else:
        raw = float(np.sum(phi.value(zeros.points) * zeros.multiplicities))
    return PairingResult(raw=raw, normalized=raw / degree ** codimension,
                         method="root-sum")


def pair_pl(sample: GaussianSample, phi: TestFunction,
            grid: ComplexGrid) -> PairingResult:
    """(Z, phi) = (1/2 pi) integral of log|f| Lap(phi), midpoint rule.

    The log singularities at zeros are integrable and left to the cell
    rule; an evaluation point landing exactly on a zero is nudged by a
    half spacing of the midpoint lattice.
    """
    if sample.basis.dimension != 1 or phi.dimension != 1 or grid.dimension != 1:
        raise ValueError("potential-route pairing is a dimension-1 construction")
    (x0, x1, nx), (y0, y1, ny) = grid.axes
    hx, hy = grid.spacings
    a = phi.center[0]
    r = phi.radius
    if not (x0 + 2 * hx <= a.real - r and a.real + r <= x1 - 2 * hx
            and y0 + 2 * hy <= a.imag - r and a.imag + r <= y1 - 2 * hy):
        raise ValueError("test-function support must sit inside the grid window")
    xc = np.linspace(x0 + hx / 2, x1 - hx / 2, nx - 1)
    yc = np.linspace(y0 + hy / 2, y1 - hy / 2, ny - 1)
    gx, gy = np.meshgrid(xc, yc, indexing="ij")
    pts = (gx + 1j * gy).ravel()
    lap = phi.laplacian(pts)
    live = lap != 0.0
    pts_live = pts[live]
    logs = sample_log_abs(sample, pts_live)
    exact = ~np.isfinite(logs)
    if np.any(exact):
        logs[exact] = sample_log_abs(sample,
                                     pts_live[exact] + 0.5 * (hx + 1j * hy))
    raw = float(np.sum(logs * lap[live]) * hx * hy / (2.0 * np.pi))
    return PairingResult(raw=raw, normalized=raw / sample.basis.degree,
                         method="poincare-lelong")


def ddbar_norms(phi: TestFunction, radial: int = 240, angular: int = 256) -> dict:
    """Norms of the complex Hessian of phi under the declared convention.

    Writing i ddbar(phi) = g * omega with omega the unit-mass Fubini-Study
    measure, g = (pi/2)(1 + |z|^2)^2 Lap(phi); returns sup |g| and
    integral of g^2 d omega.  The convention is declared, not canonical:
    only rates are convention-free, so constants compared under it are
    reported informationally wherever they appear.
    """
    if phi.dimension != 1:
        raise ValueError("norms are provided for dimension 1")
    from numpy.polynomial.legendre import leggauss
    nodes, weights = leggauss(radial)
    s = 0.5 * phi.radius * (nodes + 1.0)
    ws = 0.5 * phi.radius * weights
    theta = 2.0 * np.pi * np.arange(angular) / angular
    wt = 2.0 * np.pi / angular
    a = phi.center[0]
    zs = a + s[:, None] * np.exp(1j * theta)[None, :]
    pts = zs.ravel()
    lap = phi.laplacian(pts)
    g = 0.5 * np.pi * (1.0 + np.abs(pts) ** 2) ** 2 * lap
    rho = (1.0 / np.pi) / (1.0 + np.abs(pts) ** 2) ** 2
    area_weight = (ws[:, None] * s[:, None] * np.ones_like(theta)[None, :] * wt).ravel()
    l2sq = float(np.sum(g ** 2 * rho * area_weight))
    return {"sup": float(np.max(np.abs(g))), "l2_squared": l2sq}
