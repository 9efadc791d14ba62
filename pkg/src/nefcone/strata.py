"""Boundary combinatorics at small level: Satake strata, cusps, fiber inventories
over the boundary of the genus-2 compactification, and an intersection model
of the Shioda modular surface ``S(n)``.

Every count here comes from explicit enumeration; no closed formulas for
group orders are used.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import numpy as np

from .exactfan import to_fraction

PSL2_MAX_LEVEL = 30
CUSP_MAX_VECTORS = 10**6

CUSP_CONVENTION = (
    "primitive vectors of (Z/n)^{2g} (order exactly n); 'primitive_vectors' is the raw count, "
    "'count' identifies v with -v; boundary components are indexed by lines in Q^g, and for "
    "g >= 2 these counts are reported under the Q^{2g} convention only"
)


class ResourceBoundExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class StratumDescriptor:
    genus_of_stratum: int
    dimension: int
    index_set_size: int | str
    kind: str

    def to_json(self) -> dict:
        return {
            "genus_of_stratum": self.genus_of_stratum,
            "dimension": self.dimension,
            "index_set_size": self.index_set_size,
            "kind": self.kind,
        }


@dataclass(frozen=True)
class CuspCount:
    g: int
    n: int
    primitive_vectors: int
    count: int
    convention: str = CUSP_CONVENTION

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "n": self.n,
            "primitive_vectors": self.primitive_vectors,
            "count": self.count,
            "convention": self.convention,
        }


def enumerate_cusps(g: int, n: int, max_vectors: int = CUSP_MAX_VECTORS) -> CuspCount:
    """Count primitive vectors of ``(Z/n)^{2g}``, raw and up to sign."""
    if g < 1 or n < 1:
        raise ValueError("g and n must be positive")
    total = n ** (2 * g)
    if total > max_vectors:
        raise ResourceBoundExceeded(f"(Z/{n})^{2 * g} has {total} vectors, above the bound {max_vectors}")
    seen: set[tuple[int, ...]] = set()
    raw = 0
    for v in itertools.product(range(n), repeat=2 * g):
        if math.gcd(n, *v) != 1:
            continue
        raw += 1
        neg = tuple((-x) % n for x in v)
        seen.add(min(v, neg))
    return CuspCount(g, n, raw, len(seen))


def satake_strata(g: int, n: int, max_vectors: int = CUSP_MAX_VECTORS) -> list[StratumDescriptor]:
    """Strata ``A_k(n)``, ``k = g, ..., 0``.

    Only the codimension-one stratum gets an index-set size, taken from the
    sign-identified cusp count when the enumeration fits the bound.
    """
    if g < 1:
        raise ValueError("g must be positive")
    out = []
    for k in range(g, -1, -1):
        size: int | str = "not computed"
        if k == g:
            size = 1
        elif k == g - 1:
            try:
                size = enumerate_cusps(g, n, max_vectors).count
            except ResourceBoundExceeded:
                pass
        out.append(StratumDescriptor(k, k * (k + 1) // 2, size, "interior" if k == g else "boundary"))
    return out


@lru_cache(maxsize=None)
def group_order_psl2(n: int) -> int:
    """``|PSL(2, Z/n)|`` by enumerating all ``n^4`` matrices."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > PSL2_MAX_LEVEL:
        raise ResourceBoundExceeded(f"enumeration is capped at n <= {PSL2_MAX_LEVEL}")
    r = np.arange(n, dtype=np.int64)
    a, b, c, d = np.meshgrid(r, r, r, r, indexing="ij", sparse=True)
    sl2 = int(np.count_nonzero((a * d - b * c) % n == 1 % n))
    # -I differs from I exactly when n > 2
    return sl2 // 2 if n > 2 else sl2


def boundary_degree(a, b, n: int) -> Fraction:
    """Degree of ``aL - bB`` on the modular curve ``X(n)``."""
    a, b = to_fraction(a), to_fraction(b)
    return group_order_psl2(n) * (a / 12 - b / n)


# ---------------------------------------------------------------------------
# fibers over boundary points of A*_2(n)

POINT_TYPES = ("I", "II", "IIIa", "IIIb")
SURFACE_KINDS = ("abelian", "elliptic-ruled", "P1xP1", "P2", "P2-blown-up-3", "Kummer")
NOT_SPECIFIED = "not specified"


@dataclass(frozen=True)
class FiberDescriptor:
    point_type: str
    n: int
    components: tuple[tuple[str, int], ...]
    note: str = ""

    @property
    def specified(self) -> bool:
        return self.note != NOT_SPECIFIED

    @property
    def total(self) -> int | None:
        if not self.specified:
            return None
        return sum(c for _, c in self.components)

    def count(self, kind: str) -> int:
        return sum(c for k, c in self.components if k == kind)

    def to_json(self) -> dict:
        return {
            "point_type": self.point_type,
            "n": self.n,
            "components": [{"kind": k, "count": c} for k, c in self.components],
            "total": self.total,
            "note": self.note,
        }


def fiber_type(point_type: str, n: int) -> FiberDescriptor:
    if point_type not in POINT_TYPES:
        raise ValueError(f"unknown point type {point_type!r}; expected one of {POINT_TYPES}")
    if n < 1:
        raise ValueError("n must be positive")
    if n >= 3:
        inventory = {
            "I": (("abelian", 1),),
            "II": (("elliptic-ruled", n),),
            "IIIa": (("P1xP1", n * n),),
            "IIIb": (("P2", 2 * n * n), ("P2-blown-up-3", n * n)),
        }
        note = "cycle of elliptic ruled surfaces" if point_type == "II" else ""
        return FiberDescriptor(point_type, n, inventory[point_type], note)
    # levels 1 and 2: the fibers are taken in the Kummer setting
    if point_type == "I":
        return FiberDescriptor("I", n, (("Kummer", 1),), "general fiber is a Kummer surface")
    if point_type == "IIIb":
        return FiberDescriptor("IIIb", n, (("P2", 8 if n == 2 else 2),), "Kummer setting")
    return FiberDescriptor(point_type, n, (), NOT_SPECIFIED)


# ---------------------------------------------------------------------------
# Shioda modular surface


@dataclass(frozen=True)
class ShiodaModel:
    """Numerical intersection model on ``span{F, pull_LX, pull_B, L_ij}``.

    ``F`` is a fiber of ``S(n) -> X(n)``, ``pull_LX`` and ``pull_B`` the
    pullbacks of ``L`` and of the cusp divisor of ``X(n)``, and ``L_ij`` the
    ``n^2`` torsion sections.  Distinct sections are modeled as disjoint.
    """

    n: int
    mu: int

    @property
    def deg_L_on_X(self) -> Fraction:
        return Fraction(self.mu, 12)

    @property
    def deg_B_on_X(self) -> Fraction:
        return Fraction(self.mu, self.n)

    def sections(self) -> list[str]:
        return [f"L_{i}_{j}" for i in range(self.n) for j in range(self.n)]

    def classes(self) -> list[str]:
        return ["F", "pull_LX", "pull_B"] + self.sections()

    def pair(self, x: str, y: str) -> Fraction:
        sx, sy = x.startswith("L_"), y.startswith("L_")
        if sx and sy:
            return -self.deg_L_on_X if x == y else Fraction(0)
        if sx or sy:
            other = y if sx else x
            return {"F": Fraction(1), "pull_LX": self.deg_L_on_X, "pull_B": self.deg_B_on_X}[other]
        for name in (x, y):
            if name not in ("F", "pull_LX", "pull_B"):
                raise KeyError(f"unknown class {name!r}")
        # all three are pulled back from the base curve
        return Fraction(0)

    def intersect(self, u: Mapping[str, object], v: Mapping[str, object]) -> Fraction:
        total = Fraction(0)
        for x, cx in u.items():
            for y, cy in v.items():
                total += to_fraction(cx) * to_fraction(cy) * self.pair(x, y)
        return total

    def table(self) -> dict[str, dict[str, Fraction]]:
        names = self.classes()
        return {x: {y: self.pair(x, y) for y in names} for x in names}

    def to_json(self) -> dict:
        names = self.classes()
        return {
            "n": self.n,
            "mu": self.mu,
            "deg_L_on_X": str(self.deg_L_on_X),
            "classes": names,
            "pairing": [[str(self.pair(x, y)) for y in names] for x in names],
        }


def shioda_model(n: int) -> ShiodaModel:
    if n < 1:
        raise ValueError("n must be positive")
    return ShiodaModel(n, group_order_psl2(n))


def minus_nD_restriction(model: ShiodaModel) -> dict[str, Fraction]:
    """``-n D`` restricted to its own component: ``2 pull_LX + 2 sum L_ij``."""
    out = {"pull_LX": Fraction(2)}
    out.update({s: Fraction(2) for s in model.sections()})
    return out


@dataclass(frozen=True)
class NormalBundleReport:
    n: int
    mu: int
    fiber_degree: Fraction
    section_degree: Fraction

    @property
    def nef_on_model(self) -> bool:
        return self.fiber_degree >= 0 and self.section_degree >= 0

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "mu": self.mu,
            "fiber_degree": str(self.fiber_degree),
            "section_degree": str(self.section_degree),
            "nef_on_model": self.nef_on_model,
        }


def check_minus_nD_nef(n: int) -> NormalBundleReport:
    model = shioda_model(n)
    e = minus_nD_restriction(model)
    fiber = model.intersect(e, {"F": 1})
    # all sections are equivalent under translation; check every one anyway
    degrees = {model.intersect(e, {s: 1}) for s in model.sections()}
    if len(degrees) != 1:
        raise AssertionError(f"section degrees disagree: {degrees}")
    return NormalBundleReport(n, model.mu, fiber, degrees.pop())


@dataclass(frozen=True)
class RestrictionLedger:
    """``H = aL - bD`` restricted to a genus-2 boundary component ``S(n)``."""

    a: Fraction
    b: Fraction
    n: int
    fiber_degree: Fraction
    section_degree: Fraction
    base_degree: Fraction

    @property
    def nonnegative(self) -> bool:
        return min(self.fiber_degree, self.section_degree) >= 0

    def to_json(self) -> dict:
        return {
            "a": str(self.a),
            "b": str(self.b),
            "n": self.n,
            "fiber_degree": str(self.fiber_degree),
            "section_degree": str(self.section_degree),
            "base_degree": str(self.base_degree),
            "nonnegative": self.nonnegative,
        }


def g2_restriction_ledger(a, b, n: int) -> RestrictionLedger:
    """Degrees of ``pull(aL - bB) + (b/n)(-nD|)`` on a fiber and on a section."""
    a, b = to_fraction(a), to_fraction(b)
    model = shioda_model(n)
    cls = {"pull_LX": a, "pull_B": -b}
    for k, v in minus_nD_restriction(model).items():
        cls[k] = cls.get(k, Fraction(0)) + b / n * v
    fiber = model.intersect(cls, {"F": 1})
    section = model.intersect(cls, {model.sections()[0]: 1})
    return RestrictionLedger(a, b, n, fiber, section, boundary_degree(a, b, n))
