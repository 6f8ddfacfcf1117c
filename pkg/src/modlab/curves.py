"""Grid curves, joining/annulus curve families, and family-level predicates.

A curve is an ordered cell-id sequence in one domain, consecutive ids being
stencil neighbors (8 in 2-D, 26 in 3-D).  Families are held implicitly as
(source set, sink set) plus a separation oracle; explicit member lists are
optional sample material.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .errors import (
    BadRadiiError,
    NoCurveError,
    NotAnnulusTargetError,
    OverlapError,
)
from .geometry import Annulus, Continuum, DiscreteDomain

__all__ = [
    "Curve",
    "CurveFamily",
    "annulus_family",
    "crossing_subcurve",
    "density_length",
    "joining_family",
    "minorizes",
    "shortest_curve",
    "MinorizationReport",
]


@dataclass(frozen=True)
class Curve:
    """Polyline path over domain cells."""

    domain: DiscreteDomain
    vertices: np.ndarray  # (k,) cell ids

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.int64)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("curve needs at least two vertices")
        if v.min() < 0 or v.max() >= self.domain.n_cells:
            raise ValueError("curve vertex outside domain")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self) -> int:
        return int(self.vertices.size)

    @property
    def points(self) -> np.ndarray:
        """World coordinates of the vertex cell centers."""
        return self.domain.centers[self.vertices]

    def edge_lengths(self) -> np.ndarray:
        steps = self.domain.cells[self.vertices[1:]] - self.domain.cells[self.vertices[:-1]]
        return np.linalg.norm(steps.astype(float), axis=1) * self.domain.spacing

    def euclidean_length(self) -> float:
        return float(self.edge_lengths().sum())

    def cell_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """Incidence weights: each edge contributes half its length to each endpoint.

        Returns (cell_ids, weights) with one entry per (edge, endpoint) visit;
        repeated visits accumulate when summed by the solver.
        """
        el = self.edge_lengths()
        cells = np.concatenate([self.vertices[:-1], self.vertices[1:]])
        weights = np.concatenate([el, el]) * 0.5
        return cells, weights

    def slice(self, start: int, stop: int) -> "Curve":
        """Subcurve over vertex positions [start, stop] inclusive."""
        return Curve(self.domain, self.vertices[start : stop + 1])

    def key(self) -> bytes:
        return self.vertices.tobytes()


def density_length(curve: Curve, rho_values: np.ndarray) -> float:
    """Length of a curve under a cell density: sum of edge length times the
    mean density of the edge's endpoint cells."""
    rho_values = np.asarray(rho_values, dtype=float)
    v = curve.vertices
    mean_rho = 0.5 * (rho_values[v[:-1]] + rho_values[v[1:]])
    return float((curve.edge_lengths() * mean_rho).sum())


@dataclass(frozen=True)
class CurveFamily:
    """Curves joining a source cell set to a sink cell set within one domain.

    kind is "joining" (endpoint continua) or "annulus" (sphere shells around
    a center); annulus families carry their Annulus for crossing tests.
    """

    domain: DiscreteDomain
    source_ids: np.ndarray
    sink_ids: np.ndarray
    kind: str = "joining"
    annulus: Optional[Annulus] = None
    explicit_curves: tuple[Curve, ...] = field(default=())

    def __post_init__(self):
        for name in ("source_ids", "sink_ids"):
            ids = np.unique(np.asarray(getattr(self, name), dtype=np.int64))
            ids.setflags(write=False)
            object.__setattr__(self, name, ids)
        if self.kind not in ("joining", "annulus"):
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.kind == "annulus" and self.annulus is None:
            raise ValueError("annulus family needs its Annulus")
        if np.intersect1d(self.source_ids, self.sink_ids).size:
            raise OverlapError("source and sink cell sets overlap; family is degenerate")

    @property
    def is_empty(self) -> bool:
        return self.source_ids.size == 0 or self.sink_ids.size == 0

    def sink_mask(self) -> np.ndarray:
        mask = np.zeros(self.domain.n_cells, dtype=bool)
        mask[self.sink_ids] = True
        return mask


def _shell_band(domain: DiscreteDomain, center: np.ndarray, radius: float) -> np.ndarray:
    """Ids of domain cells within half a cell diagonal of the sphere |x-c| = r."""
    half_band = 0.5 * domain.spacing * np.sqrt(domain.dimension)
    d = np.linalg.norm(domain.centers - center, axis=1)
    return np.nonzero(np.abs(d - radius) <= half_band)[0]


def annulus_family(domain: DiscreteDomain, annulus: Annulus, clip: bool = True) -> CurveFamily:
    """Family joining the two sphere shells of an annulus inside a domain.

    With clip=True the family domain is restricted to the open annulus
    (intersected with the given domain); shells become one-cell-diameter
    bands around the exact radii.
    """
    if annulus.dimension != domain.dimension:
        raise ValueError("annulus and domain dimensions differ")
    if clip:
        d = np.linalg.norm(domain.centers - annulus.center, axis=1)
        keep = (d > annulus.r_inner) & (d < annulus.r_outer)
        if not np.any(keep):
            raise NoCurveError("annulus does not intersect the domain")
        sub = domain.subdomain(keep)
    else:
        sub = domain
    src = _shell_band(sub, annulus.center, annulus.r_inner)
    snk = _shell_band(sub, annulus.center, annulus.r_outer)
    if src.size == 0 or snk.size == 0:
        raise NoCurveError("a sphere shell has no cells at this resolution")
    overlap = np.intersect1d(src, snk)
    if overlap.size:
        raise BadRadiiError("annulus too thin for this resolution: shells overlap")
    return CurveFamily(sub, src, snk, kind="annulus", annulus=annulus)


def snap_continuum(domain: DiscreteDomain, continuum: Continuum) -> np.ndarray:
    """Domain cell ids traversed by a continuum's polyline."""
    pts = continuum.densified(domain.spacing * 0.5)
    ids = domain.locate(pts)
    return np.unique(ids[ids >= 0])


def joining_family(domain: DiscreteDomain, e: Continuum, f: Continuum) -> CurveFamily:
    """Family of curves joining two continua inside a domain."""
    src = snap_continuum(domain, e)
    snk = snap_continuum(domain, f)
    if src.size == 0 or snk.size == 0:
        raise NoCurveError("a continuum has no cells inside the domain")
    return CurveFamily(domain, src, snk, kind="joining")


def shortest_curve(family: CurveFamily, rho_values: np.ndarray) -> tuple[Curve, float]:
    """Cheapest family member under a nonnegative cell density.

    Weighted multi-source Dijkstra over the domain grid; ties broken by fewer
    edges, then by vertex id (deterministic).  Raises NoCurveError when the
    sink set is unreachable.
    """
    if family.is_empty:
        raise NoCurveError("family has an empty endpoint set")
    rho_values = np.ascontiguousarray(rho_values, dtype=np.float64)
    if rho_values.shape != (family.domain.n_cells,):
        raise ValueError("density values do not match the family domain")
    if rho_values.min() < 0 or not np.all(np.isfinite(rho_values)):
        raise ValueError("density must be finite and nonnegative")
    indptr, indices, elen = family.domain.adjacency
    dist, hops, pred, sink = _kernels.grid_dijkstra(
        indptr, indices, elen, rho_values, family.source_ids, family.sink_mask(), True
    )
    if sink < 0:
        raise NoCurveError("sink set unreachable from source set")
    path = _kernels.extract_path(pred, sink)[::-1]  # reorient source -> sink
    return Curve(family.domain, path), float(dist[sink])


def spanning_curves(family: CurveFamily, max_count: int = 2048) -> list[Curve]:
    """Deterministic covering sample: Euclidean shortest-path tree from the
    sink set, one tree path per (strided) source cell."""
    if family.is_empty:
        return []
    indptr, indices, elen = family.domain.adjacency
    ones = np.ones(family.domain.n_cells)
    src_mask = np.zeros(family.domain.n_cells, dtype=bool)
    src_mask[family.source_ids] = True
    dist, hops, pred, _ = _kernels.grid_dijkstra(
        indptr, indices, elen, ones, family.sink_ids, src_mask, False
    )
    stride = max(1, int(np.ceil(family.source_ids.size / max_count)))
    out = []
    for s in family.source_ids[::stride]:
        if not np.isfinite(dist[s]):
            continue
        path = _kernels.extract_path(pred, s)
        if path.size >= 2:
            out.append(Curve(family.domain, path))
    return out


def crossing_subcurve(curve: Curve, z, eps1: float, eps2: float) -> Optional[Curve]:
    """Shell-to-shell crossing of the annulus A(z, eps1, eps2) along a curve.

    Returns the subcurve between the last exit of the eps1-ball and the first
    subsequent arrival at the eps2 shell (tolerances of one cell side), or
    None when the curve never makes the crossing.
    """
    if not 0 < eps1 < eps2:
        raise BadRadiiError(f"need 0 < eps1 < eps2, got ({eps1}, {eps2})")
    h = curve.domain.spacing
    d = np.linalg.norm(curve.points - np.asarray(z, dtype=float), axis=1)
    near = d <= eps1 + h
    far = d >= eps2 - h
    if not near.any() or not far.any():
        return None
    first_near = int(np.argmax(near))
    far_after = np.nonzero(far & (np.arange(d.size) > first_near))[0]
    if far_after.size == 0:
        return None
    j = int(far_after[0])
    near_before = np.nonzero(near[:j])[0]
    i = int(near_before[-1])
    if j <= i:
        return None
    return curve.slice(i, j)


@dataclass(frozen=True)
class MinorizationReport:
    holds_on_sample: bool
    sample_size: int
    witnesses: tuple[int, ...]  # indices of sampled curves with no crossing

    def __bool__(self) -> bool:
        return self.holds_on_sample


def minorizes(family1: CurveFamily, family2: CurveFamily, sample_size: int = 100, seed: int = 0) -> MinorizationReport:
    """Sample evidence for the overflowing relation family1 > family2.

    Checks that each sampled member of family1 contains a subcurve crossing
    family2's annulus shell to shell.  family2 must be of annulus kind; the
    result is sample evidence, not a proof.
    """
    if family2.kind != "annulus":
        raise NotAnnulusTargetError("minorization target must be an annulus family")
    ann = family2.annulus
    samples = list(family1.explicit_curves[:sample_size])
    if len(samples) < sample_size:
        samples.extend(_perturbed_members(family1, sample_size - len(samples), seed))
    witnesses = []
    for i, curve in enumerate(samples):
        if crossing_subcurve(curve, ann.center, ann.r_inner, ann.r_outer) is None:
            witnesses.append(i)
    return MinorizationReport(
        holds_on_sample=len(witnesses) == 0 and len(samples) > 0,
        sample_size=len(samples),
        witnesses=tuple(witnesses),
    )


def _perturbed_members(family: CurveFamily, count: int, seed: int) -> list[Curve]:
    """Distinct family members from shortest paths under random log-normal densities."""
    rng = np.random.default_rng(seed)
    found: dict[bytes, Curve] = {}
    attempts = 0
    while len(found) < count and attempts < 4 * count + 8:
        rho = np.exp(0.7 * rng.standard_normal(family.domain.n_cells))
        try:
            curve, _ = shortest_curve(family, rho)
        except NoCurveError:
            break
        found.setdefault(curve.key(), curve)
        attempts += 1
    return list(found.values())[:count]
