"""Divisor classes ``aL - bD`` on level-``n`` toroidal compactifications and
their exact intersection bookkeeping.

A class is stored as a formal rational combination of the symbols ``L``,
``D`` and the auxiliary symbols in :data:`AUX_SYMBOLS`.  The nef test
evaluates the two inequalities ``b >= 0`` and ``a - 12 b / n >= 0`` and,
when one fails, attaches a test curve with a negative exact intersection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .exactfan import to_fraction

AUX_SYMBOLS = ("H1", "B", "Mbar", "N", "Theta_null")
SYMBOLS = ("L", "D") + AUX_SYMBOLS
THEOREM_GENERA = (2, 3)

# How each symbol pulls back along A*_g(n2) -> A*_g(n1): the covering is
# branched of order n2/n1 along the boundary, so boundary-type symbols scale.
_BOUNDARY_TYPE = frozenset({"D", "B", "N"})

CANONICAL_CAVEAT = (
    "K = (g+1)L - D is used as an identity of Q-classes; singular points and "
    "ramification are not corrected for"
)


def _clean(aux: Mapping[str, object] | None) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    for key, val in (aux or {}).items():
        if key not in AUX_SYMBOLS:
            raise KeyError(f"unknown auxiliary symbol {key!r}; allowed: {', '.join(AUX_SYMBOLS)}")
        v = to_fraction(val)
        if v:
            out[key] = v
    return out


@dataclass(frozen=True)
class DivisorClass:
    """``coeff_L * L + coeff_D * D + sum(aux[s] * s)`` on ``A*_g(n)``.

    ``g`` may be 1 for classes living on the base of a boundary fibration.
    """

    g: int
    n: int
    coeff_L: Fraction = Fraction(0)
    coeff_D: Fraction = Fraction(0)
    aux: Mapping[str, Fraction] = field(default_factory=dict)
    caveat: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.g < 1:
            raise ValueError("g must be at least 1")
        if self.n < 1:
            raise ValueError("level n must be at least 1")
        object.__setattr__(self, "coeff_L", to_fraction(self.coeff_L))
        object.__setattr__(self, "coeff_D", to_fraction(self.coeff_D))
        object.__setattr__(self, "aux", _clean(self.aux))

    @classmethod
    def from_ab(cls, g: int, n: int, a, b) -> "DivisorClass":
        """The class ``aL - bD``."""
        return cls(g, n, to_fraction(a), -to_fraction(b))

    @classmethod
    def symbol(cls, g: int, n: int, name: str, coeff=1) -> "DivisorClass":
        c = to_fraction(coeff)
        if name == "L":
            return cls(g, n, c, 0)
        if name == "D":
            return cls(g, n, 0, c)
        return cls(g, n, 0, 0, {name: c})

    @property
    def a(self) -> Fraction:
        return self.coeff_L

    @property
    def b(self) -> Fraction:
        return -self.coeff_D

    def coefficients(self) -> dict[str, Fraction]:
        """Non-zero coefficients by symbol, in the canonical symbol order."""
        raw = {"L": self.coeff_L, "D": self.coeff_D, **self.aux}
        return {s: raw[s] for s in SYMBOLS if raw.get(s)}

    def is_LD(self) -> bool:
        return not self.aux

    def _check(self, other: "DivisorClass"):
        if (self.g, self.n) != (other.g, other.n):
            raise ValueError(f"classes live on different spaces: (g,n)={self.g, self.n} vs {other.g, other.n}")

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        aux = dict(self.aux)
        for k, v in other.aux.items():
            aux[k] = aux.get(k, Fraction(0)) + v
        return DivisorClass(self.g, self.n, self.coeff_L + other.coeff_L, self.coeff_D + other.coeff_D, aux)

    def __neg__(self) -> "DivisorClass":
        return self.scale(-1)

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return self + (-other)

    def scale(self, k) -> "DivisorClass":
        k = to_fraction(k)
        return DivisorClass(self.g, self.n, k * self.coeff_L, k * self.coeff_D, {s: k * v for s, v in self.aux.items()})

    def __mul__(self, k) -> "DivisorClass":
        return self.scale(k)

    __rmul__ = __mul__

    def __str__(self) -> str:
        parts = [f"({v}){s}" for s, v in self.coefficients().items()]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        out = {
            "g": self.g,
            "n": self.n,
            "coefficients": {s: str(v) for s, v in self.coefficients().items()},
            "a": str(self.a),
            "b": str(self.b),
        }
        if self.caveat:
            out["caveat"] = self.caveat
        return out


@dataclass(frozen=True)
class CurveClass:
    name: str
    level: int
    intersections: Mapping[str, Fraction]
    provenance: str

    def __post_init__(self):
        vals = {k: to_fraction(v) for k, v in self.intersections.items()}
        for k in vals:
            if k not in SYMBOLS:
                raise KeyError(f"unknown divisor symbol {k!r}")
        missing = {"L", "D"} - set(vals)
        if missing:
            raise ValueError(f"curve ledger must define {sorted(missing)}")
        object.__setattr__(self, "intersections", vals)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "level": self.level,
            "intersections": {s: str(self.intersections[s]) for s in SYMBOLS if s in self.intersections},
            "provenance": self.provenance,
        }


class MissingLedgerEntry(KeyError):
    pass


def intersect(c: DivisorClass, curve: CurveClass) -> Fraction:
    """Exact pairing of a class with a test curve through its ledger."""
    if c.n != curve.level:
        raise ValueError(f"class at level {c.n} paired with curve at level {curve.level}")
    total = Fraction(0)
    for sym, coeff in c.coefficients().items():
        if sym not in curve.intersections:
            raise MissingLedgerEntry(f"curve {curve.name!r} has no intersection number for {sym}")
        total += coeff * curve.intersections[sym]
    return total


# level-1 values on X(1) x {A}
_MODULAR_CURVE_LEVEL1 = {"L": Fraction(1, 12), "D": Fraction(1)}


def modular_curve(n: int = 1) -> CurveClass:
    """The modular test curve at level ``n``.

    At level ``n`` the preimage of ``X(1) x {A}`` has degree ``mu(n)`` over it;
    the stored class is that preimage divided by ``mu(n)``.  The ledger is the
    level-1 ledger pushed through the pullback scaling of each symbol, giving
    ``L.C = 1/12`` and ``D.C = 1/n``.
    """
    if n < 1:
        raise ValueError("level must be positive")
    vals = {s: v / (n if s in _BOUNDARY_TYPE else 1) for s, v in _MODULAR_CURVE_LEVEL1.items()}
    return CurveClass(
        f"C_mod(n={n})",
        n,
        vals,
        "level-1 values L.C=1/12, D.C=1 on X(1) x {A}; level n via pullback, normalised by 1/mu(n)",
    )


def fiber_curve(n: int, d: int = 1) -> CurveClass:
    """A curve of ``H``-degree ``d`` in a fiber of a boundary component over a lower-genus space."""
    if n < 1:
        raise ValueError("level must be positive")
    if d < 1:
        raise ValueError("H-degree must be a positive integer")
    return CurveClass(
        f"C_fib(n={n},d={d})",
        n,
        {"L": Fraction(0), "D": Fraction(-2 * d, n)},
        "L is trivial on fibers of the boundary fibration; D restricts to -(2/n)H",
    )


@dataclass(frozen=True)
class NefVerdict:
    cls: DivisorClass
    is_nef: bool
    inequalities: dict
    witness: CurveClass | None = None
    witness_value: Fraction | None = None
    status: str = "theorem"

    @property
    def margin(self) -> Fraction:
        return self.inequalities["a - 12b/n"]

    def to_json(self) -> dict:
        return {
            "class": self.cls.to_json(),
            "is_nef": self.is_nef,
            "margin": str(self.margin),
            "inequalities": {
                "b": str(self.inequalities["b"]),
                "b >= 0": self.inequalities["b >= 0"],
                "a - 12b/n": str(self.inequalities["a - 12b/n"]),
                "a - 12b/n >= 0": self.inequalities["a - 12b/n >= 0"],
            },
            "witness": None if self.witness is None else self.witness.to_json(),
            "witness_value": None if self.witness_value is None else str(self.witness_value),
            "status": self.status,
        }


def to_LD(c: DivisorClass) -> DivisorClass:
    """Rewrite ``c`` in the span of ``L`` and ``D`` using the exact relations available.

    ``H1`` (genus 2) and ``Theta_null`` are eliminated; other auxiliary
    symbols have no expression in ``L, D`` and raise ``ValueError``.
    """
    if c.is_LD():
        return c
    out = DivisorClass(c.g, c.n, c.coeff_L, c.coeff_D)
    for sym, v in c.aux.items():
        if sym == "H1" and c.g == 2:
            # n D = 10 L - 2 H1
            out = out + DivisorClass(c.g, c.n, 5 * v, -v * c.n / 2)
        elif sym == "Theta_null" and c.g >= 2:
            w, o = theta_null_data(c.g)
            # [Theta_null] = w L - o n D
            out = out + DivisorClass(c.g, c.n, v * w, -v * o * c.n)
        else:
            raise ValueError(f"{sym} has no expression in L and D at g={c.g}")
    return out


def theta_null_data(g: int) -> tuple[Fraction, Fraction]:
    """Weight and boundary vanishing order (level 1) of the theta-null form."""
    if g < 2:
        raise ValueError("g must be at least 2")
    return Fraction(2 ** (g - 2) * (2**g + 1)), Fraction(2) ** (2 * g - 5)


def nef_test(c: DivisorClass) -> NefVerdict:
    c = to_LD(c)
    a, b, n = c.a, c.b, c.n
    margin = a - 12 * b / n
    ineq = {"b": b, "b >= 0": b >= 0, "a - 12b/n": margin, "a - 12b/n >= 0": margin >= 0}
    status = "theorem" if c.g in THEOREM_GENERA else "conjectural"
    if b < 0:
        curve = fiber_curve(n)
    elif margin < 0:
        curve = modular_curve(n)
    else:
        return NefVerdict(c, True, ineq, status=status)
    value = intersect(c, curve)
    assert value < 0
    return NefVerdict(c, False, ineq, curve, value, status)


def pullback_level(c: DivisorClass, n1: int, n2: int) -> DivisorClass:
    """Pull ``c`` back from level ``n1`` to level ``n2`` (``n1 | n2``)."""
    if c.n != n1:
        raise ValueError(f"class is at level {c.n}, not {n1}")
    if n1 < 1 or n2 % n1:
        raise ValueError(f"level {n1} does not divide {n2}")
    r = Fraction(n2, n1)
    scale = {s: (r if s in _BOUNDARY_TYPE else 1) for s in SYMBOLS}
    aux = {s: v * scale[s] for s, v in c.aux.items()}
    return DivisorClass(c.g, n2, c.coeff_L, c.coeff_D * r, aux, c.caveat)


def canonical_class(g: int, n: int) -> DivisorClass:
    return DivisorClass(g, n, g + 1, -1, caveat=CANONICAL_CAVEAT)


def general_type_coefficient(g: int, n: int) -> Fraction:
    """Coefficient of ``L`` after eliminating ``D`` with the theta-null divisor."""
    if g < 2:
        raise ValueError("g must be at least 2")
    if n < 1:
        raise ValueError("n must be positive")
    w, o = theta_null_data(g)
    return (g + 1) - w / (n * o)


GENERAL_TYPE_N0 = {2: 4, 3: 3, 4: 2, 5: 2, 6: 2}
GENERAL_TYPE_EXCEPTIONS = {(4, 2): "possible non-canonical singularities", (7, 1): "coefficient of L is negative"}


def general_type_n0(g: int) -> int:
    if g < 2:
        raise ValueError("g must be at least 2")
    return GENERAL_TYPE_N0.get(g, 1)


@dataclass(frozen=True)
class TableCell:
    g: int
    n0: int
    coefficient: Fraction
    exception: str | None

    @property
    def positive(self) -> bool:
        return self.coefficient > 0

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "n0": self.n0,
            "coefficient": str(self.coefficient),
            "sign": "+" if self.coefficient > 0 else ("0" if self.coefficient == 0 else "-"),
            "exception": self.exception,
        }


def general_type_table(genera: Iterable[int] = (2, 3, 4, 5, 6, 7)) -> list[TableCell]:
    """Sign of the ``L`` coefficient at ``(g, n0(g))`` for each column of the table."""
    cells = []
    for g in genera:
        n0 = general_type_n0(g)
        cells.append(TableCell(g, n0, general_type_coefficient(g, n0), GENERAL_TYPE_EXCEPTIONS.get((g, n0))))
    return cells


def humbert_decompose(c: DivisorClass) -> DivisorClass:
    """Eliminate ``D`` in genus 2 using ``n D = 10 L - 2 H1``."""
    if c.g != 2:
        raise ValueError("the Humbert relation is a genus-2 identity")
    d = c.coeff_D
    aux = dict(c.aux)
    aux["H1"] = aux.get("H1", Fraction(0)) - 2 * d / c.n
    return DivisorClass(2, c.n, c.coeff_L + 10 * d / c.n, 0, aux, c.caveat)


@dataclass(frozen=True)
class BoundaryRestriction:
    """``H`` restricted to a boundary component, in two equivalent forms.

    ``base`` lives on ``A*_{g-1}(n)`` and is pulled back along the fibration;
    ``intermediate`` is ``a L - b B - b N`` with ``N`` the normal bundle.
    """

    source: DivisorClass
    base: DivisorClass
    mbar_coeff: Fraction
    intermediate: DivisorClass

    def expand(self) -> DivisorClass:
        """``base + mbar_coeff * Mbar`` with ``Mbar = L - n N`` substituted."""
        n = self.source.n
        k = self.mbar_coeff
        lifted = DivisorClass(self.source.g, n, self.base.coeff_L, 0, self.base.aux)
        return lifted + DivisorClass(self.source.g, n, k, 0, {"N": -n * k})

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "base": self.base.to_json(),
            "mbar_coeff": str(self.mbar_coeff),
            "intermediate": self.intermediate.to_json(),
        }


def restrict_to_boundary(H: DivisorClass) -> BoundaryRestriction:
    if not H.is_LD():
        raise ValueError("restriction is defined for classes a L - b D")
    if H.g not in THEOREM_GENERA:
        raise ValueError("the boundary fibration is available for g = 2, 3")
    a, b, n = H.a, H.b, H.n
    base = DivisorClass(H.g - 1, n, a - b / n, 0, {"B": -b})
    intermediate = DivisorClass(H.g, n, a, 0, {"B": -b, "N": -b})
    return BoundaryRestriction(H, base, b / n, intermediate)


def epsilon_margin(a, b, n: int, eps) -> Fraction:
    """``(a - 12b/n) - (b/n)(1 - 12/(12 + eps))``."""
    a, b, eps = to_fraction(a), to_fraction(b), to_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if n < 1:
        raise ValueError("n must be positive")
    return (a - 12 * b / n) - (b / n) * (1 - Fraction(12) / (12 + eps))


def max_epsilon(a, b, n: int) -> Fraction | float | None:
    """Supremum of ``eps > 0`` with a positive margin.

    The margin is ``m - (b/n) f`` with ``f = eps/(12+eps)`` sweeping ``(0, 1)``.
    Returns ``math.inf`` when unbounded and ``None`` when no ``eps`` works.
    """
    a, b = to_fraction(a), to_fraction(b)
    m = a - 12 * b / n
    if b <= 0:
        # margin is non-decreasing in eps; it tends to m - b/n
        return math.inf if m - b / n > 0 else None
    if m <= 0:
        return None
    r = m * n / b  # need f < r
    if r >= 1:
        return math.inf
    return 12 * r / (1 - r)


def pigeonhole_boundary(intersections: Iterable) -> int:
    vals = [to_fraction(v) for v in intersections]
    if not vals:
        raise ValueError("need at least one intersection number")
    total = sum(vals, Fraction(0))
    if total > 0:
        raise ValueError(f"precondition violated: the sum {total} is positive")
    return next(i for i, v in enumerate(vals) if v <= 0)
