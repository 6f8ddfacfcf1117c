"""Geometric substrate: points, grid domains, annuli, continua, separation ratios.

Everything lives on a global integer lattice: cell ``idx`` (an n-vector of
integers) occupies the cube ``[idx*h, (idx+1)*h)`` and has center
``(idx + 0.5) * h``.  Domains in n = 2 or 3 dimensions only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage

from .errors import (
    DegenerateContinuumError,
    EmptyDomainError,
    NotContainedError,
    OverlapError,
)

__all__ = [
    "Annulus",
    "Continuum",
    "DiscreteDomain",
    "ShapeSpec",
    "annulus_shape",
    "box_shape",
    "disk_shape",
    "distance_to_boundary",
    "half_plane_shape",
    "polygon_shape",
    "rasterize",
    "separation_ratio",
]

SUPPORTED_DIMS = (2, 3)


def as_point(coords) -> np.ndarray:
    """Validate and return a point as a float vector."""
    p = np.asarray(coords, dtype=float).reshape(-1)
    if p.size not in SUPPORTED_DIMS:
        raise ValueError(f"points must have 2 or 3 coordinates, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point coordinates must be finite")
    return p


@dataclass(frozen=True)
class ShapeSpec:
    """Open region given by a vectorized membership predicate plus a bounding box.

    ``predicate`` maps an (m, n) array of points to an (m,) boolean array.
    """

    name: str
    dimension: int
    lo: np.ndarray
    hi: np.ndarray
    predicate: Callable[[np.ndarray], np.ndarray]

    def __post_init__(self):
        object.__setattr__(self, "lo", np.asarray(self.lo, dtype=float))
        object.__setattr__(self, "hi", np.asarray(self.hi, dtype=float))
        if self.dimension not in SUPPORTED_DIMS:
            raise ValueError("only dimensions 2 and 3 are supported")
        if not np.all(self.hi > self.lo):
            raise ValueError("bounding box must have positive extent")


def disk_shape(center=(0.0, 0.0), radius: float = 1.0) -> ShapeSpec:
    c = as_point(center)
    if radius <= 0:
        raise ValueError("radius must be positive")
    return ShapeSpec(
        name="disk",
        dimension=c.size,
        lo=c - radius,
        hi=c + radius,
        predicate=lambda pts: np.linalg.norm(pts - c, axis=1) < radius,
    )


def box_shape(lo, hi) -> ShapeSpec:
    lo = as_point(lo)
    hi = as_point(hi)
    return ShapeSpec(
        name="square",
        dimension=lo.size,
        lo=lo,
        hi=hi,
        predicate=lambda pts: np.all((pts > lo) & (pts < hi), axis=1),
    )


def annulus_shape(center=(0.0, 0.0), r_inner: float = 1.0, r_outer: float = 2.0) -> ShapeSpec:
    c = as_point(center)
    if not 0 < r_inner < r_outer:
        raise ValueError("need 0 < r_inner < r_outer")

    def pred(pts):
        d = np.linalg.norm(pts - c, axis=1)
        return (d > r_inner) & (d < r_outer)

    return ShapeSpec(name="annulus", dimension=c.size, lo=c - r_outer, hi=c + r_outer, predicate=pred)


def half_plane_shape(lo, hi, normal, offset: float = 0.0) -> ShapeSpec:
    """Bounding box clipped to the open half-space ``<x, normal> > offset``."""
    lo = as_point(lo)
    hi = as_point(hi)
    nrm = as_point(normal)
    if np.linalg.norm(nrm) == 0:
        raise ValueError("normal must be nonzero")

    def pred(pts):
        inside_box = np.all((pts > lo) & (pts < hi), axis=1)
        return inside_box & (pts @ nrm > offset)

    return ShapeSpec(name="half-plane-clipped", dimension=lo.size, lo=lo, hi=hi, predicate=pred)


def polygon_shape(vertices: Sequence[Sequence[float]]) -> ShapeSpec:
    """Simple polygon in the plane, given by its vertex loop."""
    from matplotlib.path import Path

    verts = np.asarray(vertices, dtype=float)
    if verts.ndim != 2 or verts.shape[1] != 2 or verts.shape[0] < 3:
        raise ValueError("polygon needs at least 3 two-dimensional vertices")
    path = Path(verts)
    return ShapeSpec(
        name="polygon",
        dimension=2,
        lo=verts.min(axis=0),
        hi=verts.max(axis=0),
        predicate=lambda pts: path.contains_points(pts),
    )


def _neighbor_offsets(dim: int) -> np.ndarray:
    """All nonzero offsets in {-1,0,1}^dim, in fixed lexicographic order."""
    grids = np.meshgrid(*([np.array([-1, 0, 1])] * dim), indexing="ij")
    offs = np.stack([g.ravel() for g in grids], axis=1)
    offs = offs[np.any(offs != 0, axis=1)]
    return offs.astype(np.int64)


@dataclass(frozen=True)
class DiscreteDomain:
    """Occupied cells of a grid-discretized region.

    Attributes:
        dimension: n, 2 or 3.
        spacing: cell side h > 0.
        cells: (N, n) int64 array of lattice indices, lexicographically sorted.
        connected_flag: False when rasterization had to drop smaller components.
    """

    dimension: int
    spacing: float
    cells: np.ndarray
    connected_flag: bool = True

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=np.int64)
        if cells.ndim != 2 or cells.shape[1] != self.dimension:
            raise ValueError("cells must be an (N, n) index array")
        if cells.shape[0] == 0:
            raise EmptyDomainError("domain has no cells")
        if self.dimension not in SUPPORTED_DIMS:
            raise ValueError("only dimensions 2 and 3 are supported")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        order = np.lexsort(cells.T[::-1])
        cells = np.ascontiguousarray(cells[order])
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def n_cells(self) -> int:
        return self.cells.shape[0]

    @property
    def cell_measure(self) -> float:
        return self.spacing**self.dimension

    @cached_property
    def centers(self) -> np.ndarray:
        c = (self.cells + 0.5) * self.spacing
        c.setflags(write=False)
        return c

    @cached_property
    def _lookup(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flat bounding-box table mapping lattice index -> cell id (or -1)."""
        lo = self.cells.min(axis=0)
        extent = self.cells.max(axis=0) - lo + 1
        table = np.full(int(np.prod(extent)), -1, dtype=np.int64)
        flat = np.ravel_multi_index((self.cells - lo).T, extent)
        table[flat] = np.arange(self.n_cells)
        return table, lo, extent

    def cell_ids(self, indices: np.ndarray) -> np.ndarray:
        """Map lattice index rows to cell ids; -1 where absent."""
        table, lo, extent = self._lookup
        rel = np.asarray(indices, dtype=np.int64).reshape(-1, self.dimension) - lo
        inside = np.all((rel >= 0) & (rel < extent), axis=1)
        out = np.full(rel.shape[0], -1, dtype=np.int64)
        if np.any(inside):
            flat = np.ravel_multi_index(rel[inside].T, extent)
            out[inside] = table[flat]
        return out

    def locate(self, points: np.ndarray) -> np.ndarray:
        """Cell ids of the cells containing the given points; -1 where outside."""
        pts = np.asarray(points, dtype=float).reshape(-1, self.dimension)
        return self.cell_ids(np.floor(pts / self.spacing).astype(np.int64))

    @cached_property
    def adjacency(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CSR adjacency (indptr, indices, edge_lengths) over full neighbor stencil.

        8 neighbors in 2-D, 26 in 3-D; edge length is the Euclidean distance
        between the two cell centers.
        """
        offs = _neighbor_offsets(self.dimension)
        cols, lens = [], []
        counts = np.zeros(self.n_cells, dtype=np.int64)
        for off in offs:
            nb = self.cell_ids(self.cells + off)
            ok = nb >= 0
            counts += ok
            cols.append((nb, ok))
            lens.append(float(np.linalg.norm(off)) * self.spacing)
        indptr = np.concatenate([[0], np.cumsum(counts)])
        indices = np.empty(indptr[-1], dtype=np.int64)
        elen = np.empty(indptr[-1], dtype=np.float64)
        cursor = indptr[:-1].copy()
        for (nb, ok), length in zip(cols, lens):
            rows = np.nonzero(ok)[0]
            pos = cursor[rows]
            indices[pos] = nb[rows]
            elen[pos] = length
            cursor[rows] += 1
        for arr in (indptr, indices, elen):
            arr.setflags(write=False)
        return indptr, indices, elen

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        """Cells with at least one stencil neighbor outside the domain."""
        offs = _neighbor_offsets(self.dimension)
        mask = np.zeros(self.n_cells, dtype=bool)
        for off in offs:
            mask |= self.cell_ids(self.cells + off) < 0
        mask.setflags(write=False)
        return mask

    @property
    def boundary_cells(self) -> np.ndarray:
        return self.cells[self.boundary_mask]

    def subdomain(self, keep: np.ndarray) -> "DiscreteDomain":
        """Domain restricted to a cell-id mask (same lattice; may be disconnected)."""
        keep = np.asarray(keep)
        if keep.dtype == bool:
            cells = self.cells[keep]
        else:
            cells = self.cells[np.asarray(keep, dtype=np.int64)]
        if cells.shape[0] == 0:
            raise EmptyDomainError("subdomain has no cells")
        return DiscreteDomain(self.dimension, self.spacing, cells, connected_flag=True)

    def is_connected(self) -> bool:
        """Face-connectivity check over the occupied cells."""
        return _count_components(self.cells)[0] == 1


def _count_components(cells: np.ndarray) -> tuple[int, np.ndarray]:
    """Label face-connected components; returns (count, per-cell labels)."""
    lo = cells.min(axis=0)
    extent = cells.max(axis=0) - lo + 1
    grid = np.zeros(extent, dtype=bool)
    grid[tuple((cells - lo).T)] = True
    structure = ndimage.generate_binary_structure(cells.shape[1], 1)
    labeled, count = ndimage.label(grid, structure=structure)
    return count, labeled[tuple((cells - lo).T)]


def rasterize(shape: ShapeSpec, resolution: float) -> DiscreteDomain:
    """Discretize a shape at ``resolution`` cells per unit length.

    A cell is occupied when its center satisfies the shape predicate.  If the
    occupied set splits into several face-connected components, the largest
    one is kept and the result carries ``connected_flag=False``.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    h = 1.0 / resolution
    lo_idx = np.floor(shape.lo / h).astype(np.int64)
    hi_idx = np.ceil(shape.hi / h).astype(np.int64)
    axes = [np.arange(a, b) for a, b in zip(lo_idx, hi_idx)]
    mesh = np.meshgrid(*axes, indexing="ij")
    idx = np.stack([m.ravel() for m in mesh], axis=1)
    centers = (idx + 0.5) * h
    occupied = idx[shape.predicate(centers)]
    if occupied.shape[0] == 0:
        raise EmptyDomainError(f"no cell centers satisfy the {shape.name} predicate at resolution {resolution}")
    count, labels = _count_components(occupied)
    connected = count == 1
    if not connected:
        largest = np.argmax(np.bincount(labels)[1:]) + 1
        occupied = occupied[labels == largest]
    return DiscreteDomain(shape.dimension, h, occupied, connected_flag=connected)


@dataclass(frozen=True)
class Annulus:
    """Open spherical ring A(center, r_inner, r_outer)."""

    center: np.ndarray
    r_inner: float
    r_outer: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not 0 < self.r_inner < self.r_outer:
            from .errors import BadRadiiError

            raise BadRadiiError(f"need 0 < r_inner < r_outer, got ({self.r_inner}, {self.r_outer})")

    @property
    def dimension(self) -> int:
        return self.center.size


@dataclass(frozen=True)
class Continuum:
    """Nondegenerate polyline continuum."""

    points: np.ndarray
    label: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] not in SUPPORTED_DIMS:
            raise ValueError("continuum needs >= 2 points in 2 or 3 dimensions")
        if not np.all(np.isfinite(pts)):
            raise ValueError("continuum points must be finite")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.diameter() == 0.0:
            raise DegenerateContinuumError(f"continuum {self.label!r} has zero diameter")

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def diameter(self) -> float:
        diffs = self.points[:, None, :] - self.points[None, :, :]
        return float(np.sqrt((diffs**2).sum(axis=2)).max())

    def distance_to(self, other: "Continuum") -> float:
        diffs = self.points[:, None, :] - other.points[None, :, :]
        return float(np.sqrt((diffs**2).sum(axis=2)).min())

    def densified(self, step: float) -> np.ndarray:
        """Points resampled along the polyline at spacing <= step."""
        out = [self.points[0]]
        for a, b in zip(self.points[:-1], self.points[1:]):
            seg = np.linalg.norm(b - a)
            k = max(int(np.ceil(seg / step)), 1)
            for t in range(1, k + 1):
                out.append(a + (b - a) * (t / k))
        return np.asarray(out)


def segment(a, b, label: str = "") -> Continuum:
    return Continuum(np.stack([as_point(a), as_point(b)]), label=label)


def separation_ratio(e: Continuum, f: Continuum) -> float:
    """dist(E, F) / min(diam E, diam F) over polyline vertices.

    Vertex-set distances only; sampling density is the caller's burden.
    """
    de, df = e.diameter(), f.diameter()
    if de == 0.0 or df == 0.0:
        raise DegenerateContinuumError("both continua must have positive diameter")
    dist = e.distance_to(f)
    if dist == 0.0:
        raise OverlapError("continua touch; separation ratio undefined")
    return dist / min(de, df)


def distance_to_boundary(k_cells: np.ndarray, domain: DiscreteDomain) -> float:
    """Min center distance from a cell set to the domain's boundary cells.

    Returns +inf when the domain has no boundary cells.
    """
    k_cells = np.asarray(k_cells, dtype=np.int64).reshape(-1, domain.dimension)
    if np.any(domain.cell_ids(k_cells) < 0):
        raise NotContainedError("K has cells outside the domain")
    bnd = domain.boundary_cells
    if bnd.shape[0] == 0:
        return float("inf")
    kc = (k_cells + 0.5) * domain.spacing
    bc = (bnd + 0.5) * domain.spacing
    # chunked pairwise min to bound memory on large K
    best = np.inf
    for start in range(0, kc.shape[0], 4096):
        block = kc[start : start + 4096]
        d = np.sqrt(((block[:, None, :] - bc[None, :, :]) ** 2).sum(axis=2))
        best = min(best, float(d.min()))
    return best
