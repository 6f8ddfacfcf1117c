"""Discrete p-modulus of curve families by cutting planes.

The master problem min sum(rho^p) * h^n over admissible densities is solved
on a growing active set of curves: a compiled multiplicative dual ascent
handles the restricted problem, and the rho-shortest family member acts as
separation oracle.  Both a primal value and a certified dual lower bound are
returned; their gap and the shortest member's length form the stopping
certificate, so correctness rests on the certificate rather than on the
update rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .curves import Curve, CurveFamily, annulus_family, shortest_curve, spanning_curves
from .errors import NoCurveError
from .geometry import Annulus, DiscreteDomain

__all__ = ["DensityField", "ModulusResult", "p_modulus", "ring_modulus"]

MIN_P = 1.05


@dataclass(frozen=True)
class DensityField:
    """Nonnegative cell density over a domain, aligned with domain.cells."""

    domain: DiscreteDomain
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.shape != (self.domain.n_cells,):
            raise ValueError("density values must match the domain cell count")
        if not np.all(np.isfinite(v)) or v.min() < 0:
            raise ValueError("density must be finite and nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, domain: DiscreteDomain, value: float) -> "DensityField":
        return cls(domain, np.full(domain.n_cells, float(value)))

    def energy(self, p: float) -> float:
        return float((self.values**p).sum() * self.domain.cell_measure)


@dataclass(frozen=True)
class ModulusResult:
    value: float
    dual_lower_bound: float
    rho_star: DensityField
    active_curves: tuple[Curve, ...]
    iterations: int
    min_curve_length: float
    p: float
    converged: bool

    def __post_init__(self):
        if self.dual_lower_bound > self.value + 1e-12 * max(1.0, self.value):
            raise ValueError("dual bound exceeds primal value")

    @property
    def admissible_upper_bound(self) -> float:
        """Energy of rho_star rescaled to unit shortest length (admissible)."""
        if self.value == 0.0:
            return 0.0
        return self.value / self.min_curve_length**self.p

    @property
    def relative_gap(self) -> float:
        if self.value == 0.0:
            return 0.0
        return (self.value - self.dual_lower_bound) / self.value


def _zero_result(family: CurveFamily, p: float) -> ModulusResult:
    return ModulusResult(
        value=0.0,
        dual_lower_bound=0.0,
        rho_star=DensityField.constant(family.domain, 0.0),
        active_curves=(),
        iterations=0,
        min_curve_length=math.inf,
        p=p,
        converged=True,
    )


def _lambda_seed(cells: np.ndarray, weights: np.ndarray, deficit: float, p: float, cell_measure: float) -> float:
    """Multiplier making a curve's own-density length roughly `deficit`."""
    if deficit <= 0.0:
        deficit = 1e-3
    conj = p / (p - 1.0)
    denom = float((weights**conj).sum())
    if denom <= 0.0:
        return 0.0
    return p * cell_measure * (deficit / denom) ** (p - 1.0)


def p_modulus(
    family: CurveFamily,
    p: float = 2.0,
    tol: float = 1e-3,
    max_iter: int = 4000,
    max_inner: int = 200,
    step: float = 0.5,
    seed_cover: bool = True,
) -> ModulusResult:
    """Discrete p-modulus M_p of a curve family with a duality certificate.

    Iterates (a) dual ascent on the active curves' multipliers with the
    stationarity closed form rho_c = (sum of incident lam*w / (p h^n))^(1/(p-1)),
    (b) a shortest-curve oracle call; a curve shorter than 1 - tol joins the
    active set.  Success requires the oracle length >= 1 - tol and a relative
    primal/dual gap <= tol.

    p must be at least 1.05: the dual exponent 1/(p-1) makes the closed form
    useless as p -> 1.  An unreachable or empty family yields value 0 with an
    empty certificate (the convention for the modulus of the empty family).
    """
    if p < MIN_P:
        raise ValueError(f"p must be >= {MIN_P} (dual exponent blows up near 1)")
    if family.is_empty:
        return _zero_result(family, p)

    domain = family.domain
    cm = domain.cell_measure
    try:
        seed_curve, _ = shortest_curve(family, np.ones(domain.n_cells))
    except NoCurveError:
        return _zero_result(family, p)

    active: list[Curve] = []
    seen: set[bytes] = set()
    inc_cells: list[np.ndarray] = []
    inc_weights: list[np.ndarray] = []
    lam_list: list[float] = []

    def add_curve(curve: Curve, deficit: float) -> bool:
        key = curve.key()
        if key in seen:
            return False
        seen.add(key)
        cells, weights = curve.cell_weights()
        active.append(curve)
        inc_cells.append(cells)
        inc_weights.append(weights)
        lam_list.append(_lambda_seed(cells, weights, deficit, p, cm))
        return True

    add_curve(seed_curve, 1.0)
    if seed_cover:
        for c in spanning_curves(family):
            add_curve(c, 1.0)

    rho = np.zeros(domain.n_cells)
    scratch = np.zeros(domain.n_cells)
    cc = ww = cid = cptr = None
    lam = None
    stale = True

    inner_tol = 0.5 * tol
    primal = dual = 0.0
    min_len = 0.0
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        if stale:
            lens = np.array([a.size for a in inc_cells], dtype=np.int64)
            cc = np.concatenate(inc_cells)
            ww = np.concatenate(inc_weights)
            cid = np.repeat(np.arange(len(active), dtype=np.int64), lens)
            cptr = np.concatenate([[0], np.cumsum(lens)]).astype(np.int64)
            new_lam = np.asarray(lam_list, dtype=np.float64)
            if lam is not None:
                new_lam[: lam.size] = lam
            lam = new_lam
            stale = False
        _, primal, dual, _ = _kernels.dual_ascent(
            cc, ww, cid, cptr, lam, rho, scratch, p, cm, step, max_inner, inner_tol
        )
        lam_list[: lam.size] = lam.tolist()
        cut, min_len = shortest_curve(family, rho)
        gap_ok = primal > 0 and (primal - min(dual, primal)) <= tol * primal
        if min_len >= 1.0 - tol and gap_ok:
            converged = True
            break
        if min_len < 1.0 - tol:
            current = float(min_len)
            stale = add_curve(cut, 1.0 - current) or stale

    return ModulusResult(
        value=primal,
        dual_lower_bound=min(dual, primal),
        rho_star=DensityField(domain, rho.copy()),
        active_curves=tuple(active),
        iterations=iterations,
        min_curve_length=float(min_len),
        p=p,
        converged=converged,
    )


def ring_modulus(
    x0,
    r1: float,
    r2: float,
    domain: DiscreteDomain,
    p: float = 2.0,
    tol: float = 1e-3,
    **kwargs,
) -> ModulusResult:
    """p-modulus of the family joining the spheres S(x0, r1) and S(x0, r2)
    within the annulus clipped to the domain."""
    ann = Annulus(np.asarray(x0, dtype=float), r1, r2)
    fam = annulus_family(domain, ann, clip=True)
    return p_modulus(fam, p=p, tol=tol, **kwargs)
