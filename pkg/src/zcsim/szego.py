"""Diagonal kernels and expected zero densities on grids.

The expected zero current of a Gaussian sample has the local potential
(1/2) log Pi(z, z), where Pi is the diagonal kernel sum_j |S_j(z)|_h^2 of
the orthonormal family.  On a grid this becomes

    density = (1/4 pi) * Laplacian_discrete(log Pi) + c1_density,

with the curvature trace density of the metric added back (zero for the
flat metric).  log Pi is always assembled by log-sum-exp over
2 log |S_j|_h, never by summing raw squares, so high degrees cannot
overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .ensemble import PolynomialBasis, basis_log_values_h
from .errors import NumericalError

MARGIN = 2             # stencil margin nodes per side; no density on them
_MIN_NODES = 8
_CHUNK = 32768


@dataclass(frozen=True)
class ComplexGrid:
    """Uniform rectangular grid over C^m, m in {1, 2}.

    ``axes`` holds 2m tuples (start, stop, count): the real and imaginary
    axes of each complex coordinate, in order (x1, y1[, x2, y2]).  Values
    attached to the grid are stored flattened in C order over the axes in
    that order.
    """

    dimension: int
    axes: tuple

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError("grid dimension must be 1 or 2")
        if len(self.axes) != 2 * self.dimension:
            raise ValueError("need two real axes per complex coordinate")
        for start, stop, count in self.axes:
            if count < _MIN_NODES:
                raise ValueError(f"axis node count {count} below minimum {_MIN_NODES}")
            if not stop > start:
                raise ValueError("axis range must be increasing")

    @property
    def shape(self) -> tuple:
        return tuple(int(a[2]) for a in self.axes)

    @property
    def spacings(self) -> tuple:
        return tuple((a[1] - a[0]) / (a[2] - 1) for a in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def axis_values(self, k: int) -> np.ndarray:
        start, stop, count = self.axes[k]
        return np.linspace(start, stop, count)

    def points(self) -> np.ndarray:
        """Flattened complex coordinates: (size,) for m = 1, (size, 2) else."""
        grids = np.meshgrid(*[self.axis_values(k) for k in range(len(self.axes))],
                            indexing="ij")
        if self.dimension == 1:
            return (grids[0] + 1j * grids[1]).ravel()
        z = grids[0] + 1j * grids[1]
        w = grids[2] + 1j * grids[3]
        return np.stack([z.ravel(), w.ravel()], axis=1)

    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    def interior_mask(self) -> np.ndarray:
        """Flattened mask of nodes at least MARGIN away from every edge."""
        mask = np.ones(self.shape, dtype=bool)
        for ax, n in enumerate(self.shape):
            sl = [slice(None)] * len(self.shape)
            sl[ax] = slice(0, MARGIN)
            mask[tuple(sl)] = False
            sl[ax] = slice(n - MARGIN, n)
            mask[tuple(sl)] = False
        return mask.ravel()


def square_grid(half_width: float, nodes: int, center: complex = 0.0) -> ComplexGrid:
    """Convenience m = 1 window [-w, w]^2 around a center."""
    cx, cy = center.real, center.imag
    ax = (cx - half_width, cx + half_width, nodes)
    ay = (cy - half_width, cy + half_width, nodes)
    return ComplexGrid(dimension=1, axes=(ax, ay))


def square_grid_2d(half_width: float, nodes: int) -> ComplexGrid:
    a = (-half_width, half_width, nodes)
    return ComplexGrid(dimension=2, axes=(a, a, a, a))


def refine_grid(grid: ComplexGrid) -> ComplexGrid:
    """Halve the spacing keeping node alignment (counts n -> 2n - 1)."""
    axes = tuple((a[0], a[1], 2 * a[2] - 1) for a in grid.axes)
    return ComplexGrid(dimension=grid.dimension, axes=axes)


@dataclass
class SzegoKernelGrid:
    """Diagonal kernel values on a grid, with the stable log copy."""

    grid: ComplexGrid
    values: np.ndarray       # Pi(z, z) >= 0, flattened
    log_values: np.ndarray   # log Pi, the quantity actually differentiated
    metric: str
    metric_power: int
    basis_label: str = ""


def kernel_on_grid(basis: PolynomialBasis, grid: ComplexGrid,
                   chunk: int = _CHUNK) -> SzegoKernelGrid:
    """Evaluate Pi(z, z) = sum_j |S_j(z)|_h^2 over the grid nodes."""
    if basis.dimension != grid.dimension:
        raise ValueError("grid dimension does not match the basis")
    pts = grid.points()
    n = pts.shape[0]
    logpi = np.empty(n, dtype=float)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        logs = basis_log_values_h(basis, pts[lo:hi])
        logpi[lo:hi] = logsumexp(2.0 * logs, axis=0)
    with np.errstate(over="ignore"):
        values = np.exp(np.minimum(logpi, 700.0))
    return SzegoKernelGrid(grid=grid, values=values, log_values=logpi,
                           metric=basis.metric, metric_power=basis.metric_power,
                           basis_label=basis.label)


def c1_trace_density(metric: str, power: int, points: np.ndarray,
                     dimension: int) -> np.ndarray:
    """Trace density of the curvature form of the metric.

    Flat metric: 0.  Fubini-Study at power P: the Laplacian trace of
    (P/4 pi) log(1 + |z|^2), which is (P/pi) (1 + |z|^2)^-2 in dimension 1
    and (P/pi) (2 + r) / (1 + r)^2 with r = |z1|^2 + |z2|^2 in dimension 2.
    """
    if metric == "flat":
        return np.zeros(points.shape[0])
    if dimension == 1:
        r = np.abs(points) ** 2
        return (power / np.pi) / (1.0 + r) ** 2
    r = np.abs(points[:, 0]) ** 2 + np.abs(points[:, 1]) ** 2
    return (power / np.pi) * (2.0 + r) / (1.0 + r) ** 2


@dataclass
class ExpectedZeroDensity:
    """Discrete expected zero density with its stencil error estimate.

    ``values`` is flattened over the grid with zeros on the MARGIN frame
    (boundary nodes carry no density).  ``stencil_bound`` is the maximum
    pointwise error estimate (h^2/12) * |4th difference quotient|, and
    ``bound_values`` its per-node version for cell aggregation.
    """

    grid: ComplexGrid
    values: np.ndarray
    mass: float
    includes_c1: bool
    stencil_bound: float
    bound_values: np.ndarray
    interior: np.ndarray
    approximation_note: str = ""


def _plane_laplacian(u: np.ndarray, ax_x: int, ax_y: int, hx: float, hy: float):
    """5-point Laplacian along the (ax_x, ax_y) plane, valid MARGIN in."""
    def shift(arr, ax, k):
        return np.roll(arr, -k, axis=ax)
    lap = ((shift(u, ax_x, 1) + shift(u, ax_x, -1) - 2 * u) / hx ** 2
           + (shift(u, ax_y, 1) + shift(u, ax_y, -1) - 2 * u) / hy ** 2)
    return lap


def _fourth_difference(u: np.ndarray, ax: int, h: float):
    def shift(arr, k):
        return np.roll(arr, -k, axis=ax)
    d4 = shift(u, 2) - 4 * shift(u, 1) + 6 * u - 4 * shift(u, -1) + shift(u, -2)
    return np.abs(d4) / h ** 2   # (h^2/12)*|u''''| estimated as |d4|/(12 h^2)


def expected_density(kernel: SzegoKernelGrid) -> ExpectedZeroDensity:
    """Expected zero density (1/4 pi) Lap(log Pi) + c1 trace on the grid.

    Raises NumericalError when the kernel is not strictly positive inside
    the stencil window (a base point inside the window; shrink it).
    """
    grid = kernel.grid
    shape = grid.shape
    u = kernel.log_values.reshape(shape)
    interior = grid.interior_mask().reshape(shape)
    # stencil needs finite log Pi one node around every interior node;
    # the margin is 2, so checking margin-1 suffices
    near = np.ones(shape, dtype=bool)
    for ax, n in enumerate(shape):
        sl = [slice(None)] * len(shape)
        sl[ax] = slice(0, MARGIN - 1)
        near[tuple(sl)] = False
        sl[ax] = slice(n - MARGIN + 1, n)
        near[tuple(sl)] = False
    if not np.all(np.isfinite(u[near])):
        raise NumericalError(
            "kernel vanishes inside the stencil window; shrink the window "
            "away from the base locus")
    h = grid.spacings
    if grid.dimension == 1:
        lap = _plane_laplacian(u, 0, 1, h[0], h[1])
        d4 = (_fourth_difference(u, 0, h[0]) + _fourth_difference(u, 1, h[1])) / 12.0
    else:
        lap = (_plane_laplacian(u, 0, 1, h[0], h[1])
               + _plane_laplacian(u, 2, 3, h[2], h[3]))
        d4 = sum(_fourth_difference(u, ax, h[ax]) for ax in range(4)) / 12.0
    pts = grid.points()
    c1 = c1_trace_density(kernel.metric, kernel.metric_power, pts, grid.dimension)
    dens = lap.ravel() / (4.0 * np.pi) + c1
    dens = np.where(interior.ravel(), dens, 0.0)
    bound = np.where(interior.ravel(), d4.ravel() / (4.0 * np.pi), 0.0)
    bound = np.where(np.isfinite(bound), bound, 0.0)
    mass = float(dens[interior.ravel()].sum() * grid.cell_volume())
    return ExpectedZeroDensity(
        grid=grid, values=dens, mass=mass,
        includes_c1=(kernel.metric != "flat"),
        stencil_bound=float(bound.max()) if bound.size else 0.0,
        bound_values=bound, interior=interior.ravel())


def simultaneous_density(d1: ExpectedZeroDensity,
                         d2: ExpectedZeroDensity) -> ExpectedZeroDensity:
    """Expected density of the simultaneous zeros of an independent pair,
    realized as the pointwise product of the factors' trace densities.

    This product realization is an approximation: it reproduces the
    product structure and total-mass scaling for torus-invariant
    ensembles on product grids but does not perform the mixed-term
    form algebra of the exact wedge.  The note field records this.
    """
    if d1.grid is not d2.grid and d1.grid != d2.grid:
        raise ValueError("factors must share one grid")
    if d1.grid.dimension != 2:
        raise ValueError("simultaneous density is a dimension-2 construction")
    vals = d1.values * d2.values
    interior = d1.interior & d2.interior
    vals = np.where(interior, vals, 0.0)
    mass = float(vals[interior].sum() * d1.grid.cell_volume())
    bound = np.abs(d1.values) * d2.bound_values + np.abs(d2.values) * d1.bound_values
    return ExpectedZeroDensity(
        grid=d1.grid, values=vals, mass=mass,
        includes_c1=d1.includes_c1 or d2.includes_c1,
        stencil_bound=float(bound.max()) if bound.size else 0.0,
        bound_values=bound, interior=interior,
        approximation_note=(
            "pointwise product of trace densities; exact wedge algebra "
            "is not performed (valid as stated for torus-invariant factors)"))
