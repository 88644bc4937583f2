"""Limit objects: equilibrium reference measures and Green functions.

Each reference measure carries an adapted exact-quadrature pairing and a
seeded sampler drawing from the same law; the two are cross-checked by a
KS test.  Green functions ship only for sets with classical closed forms
(disk, interval, and their products); no envelope solver is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .currents import TestFunction

_ANGULAR = 4096
_RADIAL = 400


def _circle_pairing(phi: TestFunction) -> float:
    theta = 2.0 * np.pi * np.arange(_ANGULAR) / _ANGULAR
    pts = np.exp(1j * theta)
    return float(np.mean(phi.value(pts)))


def _arcsine_pairing(phi: TestFunction) -> float:
    n = 2048
    k = np.arange(n)
    x = np.cos((2 * k + 1) * np.pi / (2 * n))
    return float(np.mean(phi.value(x.astype(complex))))


def _fs_pairing(phi: TestFunction) -> float:
    # radial-angular rule over the bump's own support disk
    from numpy.polynomial.legendre import leggauss
    nodes, weights = leggauss(_RADIAL)
    r = phi.radius
    s = 0.5 * r * (nodes + 1.0)
    ws = 0.5 * r * weights
    theta = 2.0 * np.pi * np.arange(256) / 256
    wt = 2.0 * np.pi / 256
    a = phi.center[0]
    zs = (a + s[:, None] * np.exp(1j * theta)[None, :]).ravel()
    vals = phi.value(zs)
    dens = (1.0 / np.pi) / (1.0 + np.abs(zs) ** 2) ** 2
    w2 = (ws[:, None] * s[:, None] * np.full((1, theta.size), wt)).ravel()
    return float(np.sum(vals * dens * w2))


def _torus_pairing(phi: TestFunction) -> float:
    n = 1024
    theta = 2.0 * np.pi * np.arange(n) / n
    ring = np.exp(1j * theta)
    # product structure: phi is a product bump, but integrate jointly to
    # stay correct for any phi
    z, w = np.meshgrid(ring, ring, indexing="ij")
    pts = np.stack([z.ravel(), w.ravel()], axis=1)
    return float(np.mean(phi.value(pts)))


def _fs2_pairing(phi: TestFunction) -> float:
    # unit-mass Fubini-Study volume on C^2: (2/pi^2)(1 + |z|^2 + |w|^2)^-3
    from numpy.polynomial.legendre import leggauss
    nodes, weights = leggauss(64)
    r = phi.radius
    s1 = 0.5 * r * (nodes + 1.0)
    w1 = 0.5 * r * weights
    theta = 2.0 * np.pi * np.arange(48) / 48
    wt = 2.0 * np.pi / 48
    a1, a2 = phi.center
    z = (a1 + s1[:, None] * np.exp(1j * theta)[None, :]).ravel()
    w = (a2 + s1[:, None] * np.exp(1j * theta)[None, :]).ravel()
    wz = (w1[:, None] * s1[:, None] * np.full((1, theta.size), wt)).ravel()
    zz, ww = np.meshgrid(z, w, indexing="ij")
    pts = np.stack([zz.ravel(), ww.ravel()], axis=1)
    vals = phi.value(pts)
    rho = np.abs(zz.ravel()) ** 2 + np.abs(ww.ravel()) ** 2
    dens = (2.0 / np.pi ** 2) / (1.0 + rho) ** 3
    wgt = np.outer(wz, wz).ravel()
    return float(np.sum(vals * dens * wgt))


@dataclass(frozen=True)
class ReferenceMeasure:
    """A unit-mass limit measure with exact pairing and seeded sampler."""

    name: str
    dimension: int
    _pairing: Callable = field(repr=False)
    _sampler: Callable = field(repr=False)

    def pairing(self, phi: TestFunction) -> float:
        if phi.dimension != self.dimension:
            raise ValueError("test function dimension mismatch")
        return self._pairing(phi)

    def sample(self, seed: int, count: int) -> np.ndarray:
        rng = np.random.Generator(np.random.Philox(key=np.array(
            [seed & ((1 << 64) - 1), 0x5EED], dtype=np.uint64)))
        return self._sampler(rng, count)


def _sample_circle(rng, count):
    return np.exp(2j * np.pi * rng.random(count))


def _sample_arcsine(rng, count):
    return np.cos(np.pi * rng.random(count)).astype(complex)


def _sample_fs(rng, count):
    u = rng.random(count)
    rad = np.sqrt(u / (1.0 - u))
    return rad * np.exp(2j * np.pi * rng.random(count))


def _sample_torus(rng, count):
    z = np.exp(2j * np.pi * rng.random(count))
    w = np.exp(2j * np.pi * rng.random(count))
    return np.stack([z, w], axis=1)


def _sample_fs2(rng, count):
    # squared-radius law of the unit-mass FS volume: with q = |z|^2 + |w|^2,
    # P(q <= Q) = integral over {s + t <= Q} of 2 (1 + s + t)^-3 ds dt
    #           = (Q / (1 + Q))^2, inverted exactly below; the direction is
    # uniform on the 3-sphere since the density depends on q alone
    u = np.sqrt(rng.random(count))
    q = u / (1.0 - u)
    g = rng.standard_normal((count, 4))
    g /= np.linalg.norm(g, axis=1)[:, None]
    z = (g[:, 0] + 1j * g[:, 1]) * np.sqrt(q)
    w = (g[:, 2] + 1j * g[:, 3]) * np.sqrt(q)
    return np.stack([z, w], axis=1)


REFERENCES = {
    "circle-uniform": ReferenceMeasure("circle-uniform", 1,
                                       _circle_pairing, _sample_circle),
    "interval-arcsine": ReferenceMeasure("interval-arcsine", 1,
                                         _arcsine_pairing, _sample_arcsine),
    "fubini-study": ReferenceMeasure("fubini-study", 1, _fs_pairing, _sample_fs),
    "torus-uniform-2d": ReferenceMeasure("torus-uniform-2d", 2,
                                         _torus_pairing, _sample_torus),
    "fubini-study-2d": ReferenceMeasure("fubini-study-2d", 2,
                                        _fs2_pairing, _sample_fs2),
}


def reference_pairing(ref: ReferenceMeasure, phi: TestFunction) -> float:
    return ref.pairing(phi)


def discrepancy(pairings_emp, ref: ReferenceMeasure, dictionary=None) -> float:
    """Max over the bump dictionary of |empirical - reference pairing|."""
    from .currents import bump_dictionary
    if dictionary is None:
        dictionary = bump_dictionary(ref.dimension)
    emp = np.asarray(pairings_emp, dtype=float)
    if emp.shape[0] != len(dictionary):
        raise ValueError("one empirical pairing per dictionary element required")
    refs = np.array([ref.pairing(phi) for phi in dictionary])
    return float(np.max(np.abs(emp - refs)))


# ---------------------------------------------------------------------------
# Green functions

@dataclass(frozen=True)
class GreenFunction:
    """Closed-form Green function with pole at infinity for a compact K."""

    name: str
    dimension: int
    _eval: Callable = field(repr=False)

    def value(self, points) -> np.ndarray:
        return self._eval(points)


def _green_disk(points):
    z = np.asarray(points, dtype=complex)
    with np.errstate(divide="ignore"):
        return np.maximum(np.log(np.abs(z)), 0.0)


def _green_interval(points):
    z = np.asarray(points, dtype=complex)
    # branch of sqrt(z^2 - 1) that behaves like z at infinity, so the
    # value log|z + sqrt(z^2 - 1)| is >= 0 with equality on [-1, 1]
    s = np.sqrt(z - 1.0) * np.sqrt(z + 1.0)
    return np.maximum(np.log(np.abs(z + s)), 0.0)


def _green_bidisk(points):
    pts = np.asarray(points)
    g1 = _green_disk(pts[:, 0])
    g2 = _green_disk(pts[:, 1])
    return np.maximum(g1, g2)


GREEN_FUNCTIONS = {
    "circle-uniform": GreenFunction("disk", 1, _green_disk),
    "interval-arcsine": GreenFunction("interval", 1, _green_interval),
    "torus-uniform-2d": GreenFunction("bidisk", 2, _green_bidisk),
}
