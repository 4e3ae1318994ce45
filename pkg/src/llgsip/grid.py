"""Uniform-grid discrete operators, inner products and norms in 2D/3D.

All fields live on the nodes of a uniform rectangular lattice with either
periodic wrap-around or homogeneous Neumann (ghost-reflection) boundaries.
Gradients and midpoint interpolants live on the half-point faces between
adjacent nodes.

Neumann boundaries use the reflection rule m_{-1} = m_{1}: central
differences vanish at the wall and the 3-point Laplacian at a boundary node
degenerates to 2*(m_1 - m_0)/h^2.  With trapezoidal node weights (half
weight on wall nodes) the summation-by-parts identity
    <-lap(f), g> == <grad(f), grad(g)>
holds exactly for both boundary kinds; the inner products below carry those
weights so the identity is an invariant of this module, not an
approximation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

PERIODIC = "periodic"
NEUMANN = "neumann"


class GridMismatchError(ValueError):
    """Raised when fields from different grids are combined."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform rectangular lattice descriptor.

    counts:   nodes per axis, e.g. (Nx, Ny) or (Nx, Ny, Nz)
    spacing:  mesh size per axis
    origin:   coordinate of node (0, 0[, 0])
    boundary: "periodic" or "neumann"
    """

    counts: tuple
    spacing: tuple
    origin: tuple = None
    boundary: str = PERIODIC

    def __post_init__(self):
        counts = tuple(int(n) for n in self.counts)
        spacing = tuple(float(h) for h in self.spacing)
        origin = self.origin
        if origin is None:
            origin = (0.0,) * len(counts)
        origin = tuple(float(x) for x in origin)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", origin)
        if len(counts) not in (2, 3):
            raise ValueError(f"grid must be 2D or 3D, got {len(counts)} axes")
        if len(spacing) != len(counts) or len(origin) != len(counts):
            raise ValueError("counts, spacing and origin must have equal length")
        if any(n < 2 for n in counts):
            raise ValueError(f"need at least 2 nodes per axis, got {counts}")
        if any(h <= 0 for h in spacing):
            raise ValueError(f"spacing must be positive, got {spacing}")
        if self.boundary not in (PERIODIC, NEUMANN):
            raise ValueError(f"unknown boundary kind {self.boundary!r}")

    @property
    def dim(self):
        return len(self.counts)

    @property
    def num_nodes(self):
        return int(np.prod(self.counts))

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    def require_uniform(self):
        """The scheme's analysis assumes hx == hy (== hz)."""
        h = self.spacing[0]
        if any(abs(hi - h) > 1e-14 * abs(h) for hi in self.spacing):
            raise ValueError(f"solver requires uniform spacing, got {self.spacing}")
        return h

    def axes_coordinates(self):
        """1D coordinate arrays per axis."""
        return tuple(
            self.origin[a] + self.spacing[a] * np.arange(self.counts[a])
            for a in range(self.dim)
        )

    def meshgrid(self):
        """Node coordinate arrays, each of shape ``counts``."""
        return np.meshgrid(*self.axes_coordinates(), indexing="ij")


@dataclass
class VectorField:
    """One 3-vector per lattice node, array shape counts + (3,)."""

    grid: GridSpec
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.shape != self.grid.counts + (3,):
            raise GridMismatchError(
                f"field shape {self.data.shape} does not match grid "
                f"{self.grid.counts + (3,)}"
            )

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.counts + (3,)))

    @classmethod
    def constant(cls, grid, vec):
        data = np.broadcast_to(np.asarray(vec, dtype=float), grid.counts + (3,))
        return cls(grid, np.array(data))

    @classmethod
    def from_function(cls, grid, fn, t=None):
        """Sample ``fn(*coords)`` or ``fn(*coords, t)`` at the nodes.

        ``fn`` must return the three components (each broadcastable over the
        node coordinate arrays).
        """
        coords = grid.meshgrid()
        comps = fn(*coords) if t is None else fn(*coords, t)
        data = np.stack([np.broadcast_to(c, grid.counts) for c in comps], axis=-1)
        return cls(grid, np.array(data, dtype=float))

    def copy(self):
        return VectorField(self.grid, self.data.copy())

    def pointwise_norm(self):
        """|m| at every node, shape ``counts``."""
        return np.sqrt(np.sum(self.data ** 2, axis=-1))


@dataclass
class StaggeredGradient:
    """Per-axis arrays of values at half-point faces.

    ``axes[a]`` holds the values at faces i+1/2 along axis ``a``.  On
    periodic grids each axis carries ``counts[a]`` faces (the last one
    wraps); on Neumann grids only the ``counts[a] - 1`` interior faces are
    stored, the reflected ghost faces carrying no independent information.
    """

    grid: GridSpec
    axes: tuple

    def __post_init__(self):
        expected = _face_counts(self.grid)
        for a, arr in enumerate(self.axes):
            if arr.shape[: self.grid.dim] != expected[a]:
                raise GridMismatchError(
                    f"axis {a} face array has shape {arr.shape}, expected "
                    f"leading {expected[a]}"
                )


def _face_counts(grid):
    out = []
    for a in range(grid.dim):
        c = list(grid.counts)
        if grid.boundary == NEUMANN:
            c[a] -= 1
        out.append(tuple(c))
    return out


def _check_same_grid(f, g):
    if f.grid != g.grid:
        raise GridMismatchError("fields live on different grids")


# ---------------------------------------------------------------------------
# raw-array stencils (leading axes are the spatial ones, trailing shape free)
# ---------------------------------------------------------------------------

def _diff_axis(grid, values, axis):
    """Forward difference (f_{i+1} - f_i)/h at faces along ``axis``."""
    h = grid.spacing[axis]
    if grid.boundary == PERIODIC:
        return (np.roll(values, -1, axis=axis) - values) / h
    lo = [slice(None)] * values.ndim
    hi = [slice(None)] * values.ndim
    lo[axis] = slice(None, -1)
    hi[axis] = slice(1, None)
    return (values[tuple(hi)] - values[tuple(lo)]) / h


def _mid_axis(grid, values, axis):
    """Arithmetic mean of the two adjacent nodes at faces along ``axis``."""
    if grid.boundary == PERIODIC:
        return 0.5 * (np.roll(values, -1, axis=axis) + values)
    lo = [slice(None)] * values.ndim
    hi = [slice(None)] * values.ndim
    lo[axis] = slice(None, -1)
    hi[axis] = slice(1, None)
    return 0.5 * (values[tuple(hi)] + values[tuple(lo)])


def _reflect_pad(grid, values, axis):
    """Ghost-reflection padding m_{-1} = m_{1} on one axis."""
    pad = [(0, 0)] * values.ndim
    pad[axis] = (1, 1)
    return np.pad(values, pad, mode="reflect")


def array_gradient(grid, values):
    """Per-axis face arrays of forward differences of a raw array."""
    return tuple(_diff_axis(grid, values, a) for a in range(grid.dim))


def array_midpoint(grid, values):
    return tuple(_mid_axis(grid, values, a) for a in range(grid.dim))


def array_laplacian(grid, values):
    """Second-order 3-point Laplacian of a raw array."""
    out = np.zeros_like(values)
    for a in range(grid.dim):
        h2 = grid.spacing[a] ** 2
        if grid.boundary == PERIODIC:
            out += (
                np.roll(values, -1, axis=a) - 2.0 * values + np.roll(values, 1, axis=a)
            ) / h2
        else:
            p = _reflect_pad(grid, values, a)
            lo = [slice(None)] * values.ndim
            mid = [slice(None)] * values.ndim
            hi = [slice(None)] * values.ndim
            lo[a] = slice(None, -2)
            mid[a] = slice(1, -1)
            hi[a] = slice(2, None)
            out += (p[tuple(hi)] - 2.0 * p[tuple(mid)] + p[tuple(lo)]) / h2
    return out


def array_central_difference(grid, values, axis):
    """Node-centered central difference (f_{i+1} - f_{i-1})/(2h).

    With ghost reflection the derivative vanishes at Neumann walls.
    """
    h = grid.spacing[axis]
    if grid.boundary == PERIODIC:
        return (np.roll(values, -1, axis=axis) - np.roll(values, 1, axis=axis)) / (2 * h)
    p = _reflect_pad(grid, values, axis)
    lo = [slice(None)] * values.ndim
    hi = [slice(None)] * values.ndim
    lo[axis] = slice(None, -2)
    hi[axis] = slice(2, None)
    return (p[tuple(hi)] - p[tuple(lo)]) / (2 * h)


# ---------------------------------------------------------------------------
# field-level operators
# ---------------------------------------------------------------------------

def gradient_apply(f: VectorField) -> StaggeredGradient:
    """Discrete gradient: forward differences at the half-point faces."""
    return StaggeredGradient(f.grid, array_gradient(f.grid, f.data))


def interpolate_midpoint(f: VectorField) -> StaggeredGradient:
    """Matched central interpolation at the half-point faces."""
    return StaggeredGradient(f.grid, array_midpoint(f.grid, f.data))


def laplacian_apply(f: VectorField) -> VectorField:
    return VectorField(f.grid, array_laplacian(f.grid, f.data))


# ---------------------------------------------------------------------------
# weights, inner products, norms
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _node_weights(grid):
    """Quadrature weight per node, shape ``counts``.

    All-ones for periodic grids; trapezoidal (half weight on wall nodes,
    tensorized over axes) for Neumann grids.  These weights are what makes
    summation by parts exact for the reflection Laplacian.
    """
    w = np.ones(grid.counts)
    if grid.boundary == NEUMANN:
        for a in range(grid.dim):
            wa = np.ones(grid.counts[a])
            wa[0] = wa[-1] = 0.5
            shape = [1] * grid.dim
            shape[a] = grid.counts[a]
            w = w * wa.reshape(shape)
    return w


@lru_cache(maxsize=64)
def _face_weights(grid):
    """Per-axis quadrature weight for face sums.

    Full weight along the differencing axis, trapezoidal weights in the
    transverse directions on Neumann grids.
    """
    out = []
    for a, shape in enumerate(_face_counts(grid)):
        w = np.ones(shape)
        if grid.boundary == NEUMANN:
            for b in range(grid.dim):
                if b == a:
                    continue
                wb = np.ones(shape[b])
                wb[0] = wb[-1] = 0.5
                s = [1] * grid.dim
                s[b] = shape[b]
                w = w * wb.reshape(s)
        out.append(w)
    return tuple(out)


def inner_product(f: VectorField, g: VectorField) -> float:
    """Discrete l2 inner product, h^dim-weighted sum of pointwise dots."""
    _check_same_grid(f, g)
    w = _node_weights(f.grid)
    return float(f.grid.cell_volume * np.sum(w * np.sum(f.data * g.data, axis=-1)))


def gradient_inner_product(F: StaggeredGradient, G: StaggeredGradient) -> float:
    """h^dim-weighted sum over all faces of the per-face contractions."""
    if F.grid != G.grid:
        raise GridMismatchError("staggered gradients live on different grids")
    grid = F.grid
    fw = _face_weights(grid)
    total = 0.0
    for a in range(grid.dim):
        prod = F.axes[a] * G.axes[a]
        # contract any trailing (component) axes
        while prod.ndim > grid.dim:
            prod = prod.sum(axis=-1)
        total += np.sum(fw[a] * prod)
    return float(grid.cell_volume * total)


def l2_norm(f: VectorField) -> float:
    return float(np.sqrt(max(inner_product(f, f), 0.0)))


def grad_l2_norm(f: VectorField) -> float:
    g = gradient_apply(f)
    return float(np.sqrt(max(gradient_inner_product(g, g), 0.0)))


def lp_norm(f: VectorField, p) -> float:
    if p < 1:
        raise ValueError(f"lp norm needs p >= 1, got {p}")
    if np.isinf(p):
        return linf_norm(f)
    w = _node_weights(f.grid)
    mags = f.pointwise_norm()
    return float((f.grid.cell_volume * np.sum(w * mags ** p)) ** (1.0 / p))


def linf_norm(f: VectorField) -> float:
    return float(np.max(f.pointwise_norm()))


def h1_norm(f: VectorField) -> float:
    return float(np.sqrt(l2_norm(f) ** 2 + grad_l2_norm(f) ** 2))


def norms(f: VectorField, p=4):
    """All discrete norms at once: l2, lp, linf and the full H1 norm."""
    return {
        "l2": l2_norm(f),
        "lp": lp_norm(f, p),
        "linf": linf_norm(f),
        "h1": h1_norm(f),
    }
