"""Exact rational linear algebra on symmetric matrices and the standard Voronoi cones.

Symmetric ``g x g`` matrices are identified with vectors of their upper
triangular entries, read row by row::

    g = 2:  (a11, a12, a22)
    g = 3:  (a11, a12, a13, a22, a23, a33)

This is the global coordinate order.  The torus coordinates ``t_ij`` are
dual to the basis ``U_ij`` (ones at ``(i, j)`` and ``(j, i)``), so they
follow the same order.

All arithmetic is done with :class:`fractions.Fraction`; nothing on an exact
path ever touches a float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

__all__ = [
    "Rational",
    "SymMatrix",
    "Cone",
    "LatticeMap",
    "Containment",
    "NonSimplicialError",
    "to_fraction",
    "mat_mul",
    "transpose",
    "identity",
    "det",
    "inverse",
    "solve",
    "sym_dim",
    "standard_cone",
    "sigma3_prime",
    "gl_conjugate",
    "cone_contains",
    "project_rho",
    "project_lambda",
    "rho_map",
    "lambda_map",
    "lambda_bar_map",
    "gl_generators",
    "fan_orbit_sample",
    "SIGMA3_LABELS",
    "SIGMA3_PRIME_LABELS",
]


class NonSimplicialError(ValueError):
    """Raised when a cone's generators are linearly dependent."""


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted on exact paths; pass int, str or Fraction")
    return Fraction(x)


# ---------------------------------------------------------------------------
# plain matrix helpers (lists of lists of Fractions / ints)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    if len(a[0]) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)}x{len(a[0])} times {len(b)}x{len(b[0])}")
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*a)]


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _row_reduce(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form of ``rows`` restricted to pivots in the first ``ncols`` columns."""
    rows = [list(map(Fraction, r)) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def det(a: Sequence[Sequence]) -> Fraction:
    n = len(a)
    m = [list(map(Fraction, row)) for row in a]
    result = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            result = -result
        result *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return result


def inverse(a: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(a)
    aug = [list(row) + identity(n)[i] for i, row in enumerate(a)]
    red, pivots = _row_reduce(aug, n)
    if len(pivots) < n:
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red]


def solve(columns: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """Solve ``sum_j x_j * columns[j] == rhs`` exactly.

    The columns must be linearly independent (raises :class:`NonSimplicialError`
    otherwise).  Returns ``None`` when ``rhs`` is outside their span.
    """
    k = len(columns)
    d = len(rhs)
    rows = [[Fraction(columns[j][i]) for j in range(k)] + [Fraction(rhs[i])] for i in range(d)]
    red, pivots = _row_reduce(rows, k)
    if len(pivots) < k:
        raise NonSimplicialError(f"{k} generators span a space of rank {len(pivots)}")
    if any(row[k] != 0 for row in red[len(pivots):]):
        return None
    return [red[i][k] for i in range(k)]


def sym_dim(g: int) -> int:
    return g * (g + 1) // 2


def _upper_index(g: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(g) for j in range(i, g)]


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymMatrix:
    """A symmetric matrix with exact rational entries."""

    entries: tuple[tuple[Fraction, ...], ...]

    def __init__(self, rows: Iterable[Iterable]):
        entries = tuple(tuple(to_fraction(x) for x in row) for row in rows)
        g = len(entries)
        if any(len(row) != g for row in entries):
            raise ValueError("matrix must be square")
        for i in range(g):
            for j in range(i):
                if entries[i][j] != entries[j][i]:
                    raise ValueError(f"matrix is not symmetric at ({i}, {j})")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_upper(cls, vec: Sequence, g: int) -> "SymMatrix":
        if len(vec) != sym_dim(g):
            raise ValueError(f"expected {sym_dim(g)} coordinates for g={g}, got {len(vec)}")
        m = [[Fraction(0)] * g for _ in range(g)]
        for (i, j), x in zip(_upper_index(g), vec):
            m[i][j] = m[j][i] = to_fraction(x)
        return cls(m)

    @classmethod
    def zero(cls, g: int) -> "SymMatrix":
        return cls([[0] * g for _ in range(g)])

    @property
    def g(self) -> int:
        return len(self.entries)

    def upper(self) -> tuple[Fraction, ...]:
        return tuple(self.entries[i][j] for i, j in _upper_index(self.g))

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.entries for x in row)

    def is_primitive(self) -> bool:
        if not self.is_integral():
            return False
        return math.gcd(*(int(x) for x in self.upper())) == 1

    def block(self, k: int) -> "SymMatrix":
        """Upper-left ``k x k`` block."""
        return SymMatrix([row[:k] for row in self.entries[:k]])

    def rows(self) -> list[list[Fraction]]:
        return [list(r) for r in self.entries]

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        if self.g != other.g:
            raise ValueError("dimension mismatch")
        return SymMatrix([[x + y for x, y in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        return self + (-other)

    def __neg__(self) -> "SymMatrix":
        return SymMatrix([[-x for x in r] for r in self.entries])

    def __mul__(self, scalar) -> "SymMatrix":
        s = to_fraction(scalar)
        return SymMatrix([[s * x for x in r] for r in self.entries])

    __rmul__ = __mul__

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.entries)
        return f"SymMatrix([{body}])"

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.entries]


def _primitive(vec: Sequence[Fraction]) -> tuple[int, ...]:
    den = math.lcm(*(Fraction(x).denominator for x in vec))
    ints = [int(Fraction(x) * den) for x in vec]
    g = math.gcd(*ints)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(x // g for x in ints)


@dataclass(frozen=True)
class Cone:
    """Rational polyhedral cone spanned by integer rays.

    ``rays`` are coordinate vectors.  When ``g`` is set they are upper
    triangular coordinates of symmetric ``g x g`` matrices; otherwise they
    live in an abstract lattice.  ``ray_names`` label the rays (and hence the
    dual torus coordinates) and take no part in equality.
    """

    label: str
    rays: tuple[tuple[int, ...], ...]
    g: int | None = None
    ray_names: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.rays:
            return
        dim = len(self.rays[0])
        for r in self.rays:
            if len(r) != dim:
                raise ValueError("rays have inconsistent length")
            if all(x == 0 for x in r):
                raise ValueError("zero ray")
            if math.gcd(*r) != 1:
                raise ValueError(f"ray {r} is not primitive")
        if self.g is not None and dim != sym_dim(self.g):
            raise ValueError(f"rays of a Sym_{self.g} cone need {sym_dim(self.g)} coordinates")

    @classmethod
    def from_matrices(cls, label: str, mats: Sequence[SymMatrix], names: Sequence[str] = ()) -> "Cone":
        g = mats[0].g
        return cls(label, tuple(_primitive(m.upper()) for m in mats), g, tuple(names))

    @property
    def ambient_rank(self) -> int:
        return len(self.rays[0]) if self.rays else 0

    def generators(self) -> list[SymMatrix]:
        if self.g is None:
            raise TypeError("cone rays are not symmetric matrices")
        return [SymMatrix.from_upper(r, self.g) for r in self.rays]

    def key(self) -> tuple[tuple[int, ...], ...]:
        """Normal form used for cone equality: sorted primitive rays."""
        return tuple(sorted(self.rays))

    def same_as(self, other: "Cone") -> bool:
        return self.g == other.g and self.key() == other.key()

    def to_json(self) -> dict:
        if self.g is not None:
            gens = [m.to_json() for m in self.generators()]
        else:
            gens = [[str(x) for x in r] for r in self.rays]
        return {"label": self.label, "generators": gens}


SIGMA2_LABELS = ("gamma1", "gamma2", "gamma3")
SIGMA3_LABELS = ("alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3")
SIGMA3_PRIME_LABELS = ("alpha1", "alpha2", "beta1", "beta2", "beta3")

_SIGMA2 = (
    [[1, 0], [0, 0]],
    [[0, 0], [0, 1]],
    [[1, -1], [-1, 1]],
)
_SIGMA3 = (
    [[1, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 1, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 1]],
    [[0, 0, 0], [0, 1, -1], [0, -1, 1]],
    [[1, 0, -1], [0, 0, 0], [-1, 0, 1]],
    [[1, -1, 0], [-1, 1, 0], [0, 0, 0]],
)


def standard_cone(g: int) -> Cone:
    """The standard second-Voronoi cone: sigma_2 (gamma_1..3) or sigma_3 (alpha_1..3, beta_1..3)."""
    if g == 2:
        return Cone.from_matrices("sigma2", [SymMatrix(m) for m in _SIGMA2], SIGMA2_LABELS)
    if g == 3:
        return Cone.from_matrices("sigma3", [SymMatrix(m) for m in _SIGMA3], SIGMA3_LABELS)
    raise ValueError(f"standard cone only defined for g in (2, 3), got {g}")


def sigma3_prime() -> Cone:
    """rho(sigma_3) in N_5, with coordinates in the basis (alpha1, alpha2, beta1, beta2, beta3)."""
    rays = tuple(tuple(int(i == j) for j in range(5)) for i in range(5))
    return Cone("sigma3'", rays, None, SIGMA3_PRIME_LABELS)


def gl_conjugate(m: SymMatrix, M: Sequence[Sequence[int]]) -> SymMatrix:
    """Right action ``m -> tM m M``."""
    if len(M) != m.g or any(len(row) != m.g for row in M):
        raise ValueError(f"dimension mismatch: {m.g}x{m.g} form and {len(M)}x{len(M[0])} matrix")
    return SymMatrix(mat_mul(mat_mul(transpose(M), m.rows()), M))


@dataclass(frozen=True)
class Containment:
    contained: bool
    coefficients: tuple[Fraction, ...] | None = None

    def __bool__(self) -> bool:
        return self.contained


def cone_contains(cone: Cone, m: SymMatrix | Sequence) -> Containment:
    """Exact membership test for a simplicial cone.

    The certificate is the coefficient vector on the cone's rays.
    """
    vec = m.upper() if isinstance(m, SymMatrix) else tuple(map(to_fraction, m))
    if not cone.rays:
        zero = all(x == 0 for x in vec)
        return Containment(zero, () if zero else None)
    if len(vec) != cone.ambient_rank:
        raise ValueError("dimension mismatch between cone and point")
    coeffs = solve(cone.rays, vec)
    if coeffs is None or any(c < 0 for c in coeffs):
        return Containment(False)
    return Containment(True, tuple(coeffs))


def project_rho(v: Sequence) -> tuple[Fraction, ...]:
    """N_6 -> N_5: drop the alpha3 coordinate of a point written in the sigma_3 basis."""
    if len(v) != 6:
        raise ValueError("expected coordinates in the basis (alpha1, alpha2, alpha3, beta1, beta2, beta3)")
    v = tuple(map(to_fraction, v))
    return v[:2] + v[3:]


def project_lambda(m: SymMatrix) -> SymMatrix:
    if m.g != 3:
        raise ValueError("lambda is defined on 3x3 symmetric matrices")
    return m.block(2)


@dataclass(frozen=True)
class LatticeMap:
    """Integer matrix acting on column coordinate vectors."""

    matrix: tuple[tuple[int, ...], ...]
    name: str = ""

    def __init__(self, matrix: Sequence[Sequence[int]], name: str = ""):
        rows = tuple(tuple(int(x) for x in row) for row in matrix)
        if any(Fraction(x).denominator != 1 for row in matrix for x in row):
            raise ValueError("lattice maps need integer entries")
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "name", name)

    @property
    def source_rank(self) -> int:
        return len(self.matrix[0])

    @property
    def target_rank(self) -> int:
        return len(self.matrix)

    def __call__(self, v: Sequence) -> tuple[Fraction, ...]:
        if len(v) != self.source_rank:
            raise ValueError(f"{self.name or 'map'} expects {self.source_rank} coordinates")
        return tuple(sum(Fraction(a) * to_fraction(x) for a, x in zip(row, v)) for row in self.matrix)

    def compose(self, inner: "LatticeMap") -> "LatticeMap":
        """``self o inner``."""
        return LatticeMap(mat_mul(self.matrix, inner.matrix), f"{self.name}o{inner.name}")


def rho_map() -> LatticeMap:
    return LatticeMap([[int(j == i) for j in range(6)] for i in (0, 1, 3, 4, 5)], "rho")


def lambda_map() -> LatticeMap:
    """lambda in upper coordinates: (a11,a12,a13,a22,a23,a33) -> (a11,a12,a22)."""
    return LatticeMap([[int(j == i) for j in range(6)] for i in (0, 1, 3)], "lambda")


def lambda_bar_map() -> LatticeMap:
    """The map N_5 -> Sym_2 through which lambda factors (columns are lambda of the sigma3' basis)."""
    sigma3 = standard_cone(3).generators()
    cols = [project_lambda(sigma3[i]).upper() for i in (0, 1, 3, 4, 5)]
    return LatticeMap(transpose(cols), "lambda_bar")


# ---------------------------------------------------------------------------
# GL(g, Z) orbit samples


def gl_generators(g: int) -> list[list[list[int]]]:
    """Fixed generating set of GL(g, Z) used for orbit samples.

    Adjacent transpositions, negation of the first basis vector, and the
    transvection ``e_2 -> e_2 + e_1`` together with its inverse.
    """
    gens = []
    for i in range(g - 1):
        p = identity(g)
        p[i][i] = p[i + 1][i + 1] = 0
        p[i][i + 1] = p[i + 1][i] = 1
        gens.append(p)
    neg = identity(g)
    neg[0][0] = -1
    gens.append(neg)
    for s in (1, -1):
        t = identity(g)
        t[0][1] = s
        gens.append(t)
    return gens


def fan_orbit_sample(g: int, word_length: int, generators: Sequence | None = None) -> list[Cone]:
    """Distinct cones ``tM sigma_g M`` for words ``M`` of length at most ``word_length``.

    Output order is deterministic: breadth-first by word length, then by
    generator order.
    """
    if word_length < 0:
        raise ValueError("word_length must be non-negative")
    gens = [list(map(list, m)) for m in (generators or gl_generators(g))]
    base = standard_cone(g).generators()
    seen_mats = {tuple(map(tuple, identity(g)))}
    frontier = [identity(g)]
    words = [identity(g)]
    for _ in range(word_length):
        nxt = []
        for w in frontier:
            for s in gens:
                prod = mat_mul(w, s)
                key = tuple(map(tuple, prod))
                if key not in seen_mats:
                    seen_mats.add(key)
                    nxt.append(prod)
        words.extend(nxt)
        frontier = nxt
    cones: list[Cone] = []
    keys = set()
    for w in words:
        c = Cone.from_matrices(f"sigma{g}", [gl_conjugate(m, w) for m in base])
        if c.key() not in keys:
            keys.add(c.key())
            cones.append(c)
    return cones
