"""Theta characteristics, exact exponent calculus of theta series in torus charts, and
a truncated numeric evaluator.

A term of ``Theta_{m'm''}(tau, z)`` with ``x = q + m'`` is
``exp(2 pi i [x tau x / 2 + x (z + m'')])``.  With ``tau`` the upper-left
block of a period matrix of size ``h + 1`` and ``z`` its last column, every
term is a Laurent monomial in the level-``n`` coordinates ``t_ij`` times the
phase ``exp(2 pi i x . m'')``.  Phases are kept as exact rationals ``r``
meaning the unit ``exp(2 pi i r)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .charts import BOUNDARY_VARS, chart_embedding, in_siegel_space, invert, nu_matrix
from .exactfan import SymMatrix, gl_conjugate, standard_cone, to_fraction

DEFAULT_TAIL_TOLERANCE = 1e-14
DEFAULT_COMPARE_TOLERANCE = 1e-8

# chart coordinate -> index of the sigma_3 ray it is dual to
CHART_RAY = {"T1": 0, "T2": 1, "T3": 2, "T4": 3, "T5": 4, "T6": 5}


class InconclusiveValuation(RuntimeError):
    """The search box is too small to certify a global minimum."""


class LevelConditionError(ValueError):
    pass


@dataclass(frozen=True)
class ThetaCharacteristic:
    m_prime: tuple[Fraction, ...]
    m_dblprime: tuple[Fraction, ...]
    p: int = 1

    def __init__(self, m_prime: Sequence, m_dblprime: Sequence | None = None, p: int | None = None):
        mp = tuple(to_fraction(x) for x in m_prime)
        mpp = tuple(to_fraction(x) for x in (m_dblprime if m_dblprime is not None else [0] * len(mp)))
        if len(mp) != len(mpp):
            raise ValueError("m' and m'' must have the same length")
        if p is None:
            den = math.lcm(*(x.denominator for x in mp + mpp)) if mp else 1
            p = den // 2 if den % 2 == 0 else den
        if p < 1:
            raise ValueError("p must be positive")
        for x in mp + mpp:
            if (2 * p * x).denominator != 1:
                raise ValueError(f"characteristic entry {x} is not in (1/{2 * p})Z")
        object.__setattr__(self, "m_prime", mp)
        object.__setattr__(self, "m_dblprime", mpp)
        object.__setattr__(self, "p", int(p))

    @property
    def h(self) -> int:
        return len(self.m_prime)

    def to_json(self) -> dict:
        return {"m_prime": [str(x) for x in self.m_prime], "m_dblprime": [str(x) for x in self.m_dblprime], "p": self.p}


def characteristics(p: int, h: int = 2, with_dblprime: bool = False) -> list[ThetaCharacteristic]:
    """All characteristics with entries ``j / 2p``, ``0 <= j < 2p`` (i.e. (1/2p)Z^h mod Z^h)."""
    vals = [Fraction(j, 2 * p) for j in range(2 * p)]
    primes = list(itertools.product(vals, repeat=h))
    if not with_dblprime:
        return [ThetaCharacteristic(mp, [0] * h, p) for mp in primes]
    return [ThetaCharacteristic(mp, mpp, p) for mp in primes for mpp in primes]


@dataclass(frozen=True)
class ThetaTerm:
    q: tuple[int, ...]
    exponents: dict[str, Fraction]
    phase: Fraction

    def to_json(self) -> dict:
        return {"q": list(self.q), "exponents": {k: str(v) for k, v in self.exponents.items()}, "phase": str(self.phase)}


def _shifted(q: Sequence[int], ch: ThetaCharacteristic) -> list[Fraction]:
    if len(q) != ch.h:
        raise ValueError(f"q has length {len(q)} but the characteristic has length {ch.h}")
    return [int(a) + b for a, b in zip(q, ch.m_prime)]


def _phase(x: Sequence[Fraction], ch: ThetaCharacteristic) -> Fraction:
    return sum((a * b for a, b in zip(x, ch.m_dblprime)), Fraction(0)) % 1


def term_exponents_t(q: Sequence[int], ch: ThetaCharacteristic, n: int) -> ThetaTerm:
    """Exponents of the ``t_ij`` in the term ``q`` (``t_{i,h+1}`` carries the ``z`` direction)."""
    x = _shifted(q, ch)
    h = ch.h
    exps: dict[str, Fraction] = {}
    for i in range(h):
        for j in range(i, h + 1):
            if j == h:
                e = x[i] * n
            elif i == j:
                e = x[i] * x[i] * n / 2
            else:
                e = x[i] * x[j] * n
            exps[f"t{i + 1}{j + 1}"] = e
    return ThetaTerm(tuple(int(a) for a in q), exps, _phase(x, ch))


def term_exponents_T(q: Sequence[int], ch: ThetaCharacteristic, n: int) -> ThetaTerm:
    """Exponents of ``T1, T2, T4, T5, T6`` on the boundary chart of sigma_3' (h = 2 only)."""
    if ch.h != 2:
        raise ValueError("the boundary chart expansion needs a characteristic of length 2")
    x1, x2 = _shifted(q, ch)
    exps = {
        "T1": x1 * x1 * n / 2,
        "T2": x2 * x2 * n / 2,
        "T4": x2 * (x2 - 2) * n / 2,
        "T5": x1 * (x1 - 2) * n / 2,
        "T6": (x1 - x2) ** 2 * n / 2,
    }
    return ThetaTerm(tuple(int(a) for a in q), exps, _phase([x1, x2], ch))


def pushforward_to_chart(term: ThetaTerm) -> dict[str, Fraction]:
    """Rewrite a ``t``-monomial in ``T1..T6`` via the inverse of the sigma_3 chart embedding."""
    inv = invert(chart_embedding(3))
    return inv.pull_exponents(term.exponents)


# ---------------------------------------------------------------------------
# exponent forms of chart coordinates


@dataclass(frozen=True)
class ExponentForm:
    """Exponent of one chart coordinate in the term ``q`` of a single theta factor.

    With ``s = w . (q + m')`` the exponent equals ``(n/2) (s^2 + 2 c s)``;
    ``s`` ranges over ``w . m' + d Z`` where ``d = gcd(w)``.
    """

    w: tuple[int, int]
    c: int
    n: int
    shift: Fraction

    @property
    def step(self) -> int:
        return math.gcd(*self.w)

    def at(self, q: Sequence[int]) -> Fraction:
        s = self.w[0] * q[0] + self.w[1] * q[1] + self.shift
        return Fraction(self.n, 2) * (s * s + 2 * self.c * s)

    def of_k(self, k: int) -> Fraction:
        s = k + self.shift
        return Fraction(self.n, 2) * (s * s + 2 * self.c * s)

    def global_minimizers(self) -> list[int]:
        """Integers ``k`` in ``dZ`` where ``of_k`` attains its global minimum."""
        d = self.step
        if d == 0:
            return [0]
        vertex = -self.shift - self.c
        lo = math.floor(vertex / d) * d
        candidates = [lo, lo + d]
        best = min(self.of_k(k) for k in candidates)
        return [k for k in candidates if self.of_k(k) == best]

    def integer_valued(self) -> bool:
        """Whether the exponent is an integer for every ``q`` in Z^2.

        Written as ``A j^2 + B j + C`` with ``k = d j``, a rational quadratic
        is integer valued on Z exactly when ``2A``, ``A + B`` and ``C`` are
        integers.
        """
        A, B, C = self.coefficients()
        return all(x.denominator == 1 for x in (2 * A, A + B, C))

    def coefficients(self) -> tuple[Fraction, Fraction, Fraction]:
        d = self.step
        half = Fraction(self.n, 2)
        A = half * d * d
        B = half * d * (2 * self.shift + 2 * self.c)
        C = half * (self.shift * self.shift + 2 * self.c * self.shift)
        return A, B, C


def _rank_one_root(m: SymMatrix) -> tuple[int, ...] | None:
    """Integer ``v`` with ``m = v v^T`` (up to the sign of ``v``), if one exists."""
    g = m.g
    diag = [m.entries[i][i] for i in range(g)]
    v = []
    for d in diag:
        if d < 0 or d.denominator != 1:
            return None
        r = math.isqrt(int(d))
        if r * r != d:
            return None
        v.append(r)
    pivot = next((i for i in range(g) if v[i]), None)
    if pivot is None:
        return tuple(v) if all(x == 0 for x in m.upper()) else None
    for j in range(g):
        if j != pivot and m.entries[pivot][j] < 0:
            v[j] = -v[j]
    if any(m.entries[i][j] != v[i] * v[j] for i in range(g) for j in range(g)):
        return None
    return tuple(v)


def chart_rays(chart: tuple[int, int] = (0, 0)) -> list[SymMatrix]:
    """Rays of ``t nu sigma_3 nu`` for ``chart = (n_idx, m_idx)``, in the sigma_3 order."""
    nu = nu_matrix(*chart)
    return [gl_conjugate(m, nu) for m in standard_cone(3).generators()]


def exponent_form(variable: str, ch: ThetaCharacteristic, n: int, chart: tuple[int, int] = (0, 0)) -> ExponentForm:
    """The exponent of chart coordinate ``variable`` as a function of ``q``.

    The coordinate dual to a ray ``r`` carries the exponent ``<e, r>`` of a
    ``t``-monomial ``e``; for a theta term this pairing is
    ``n (x G x / 2 + x . h)`` with ``G`` the upper-left block of ``r`` and
    ``h`` its last column.  Rays here are rank one, ``r = v v^T``.
    """
    if ch.h != 2:
        raise ValueError("chart exponent forms need a characteristic of length 2")
    if variable not in CHART_RAY:
        raise ValueError(f"unknown chart coordinate {variable!r}")
    ray = chart_rays(chart)[CHART_RAY[variable]]
    v = _rank_one_root(ray)
    if v is None:
        raise InconclusiveValuation(f"ray {ray} is not of the form v v^T")
    w = (v[0], v[1])
    shift = w[0] * ch.m_prime[0] + w[1] * ch.m_prime[1]
    return ExponentForm(w, v[2], n, shift)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SectionSpec:
    """Product of theta factors at level ``n``, raised to ``power``."""

    factors: tuple[ThetaCharacteristic, ...]
    level: int
    power: int = 1

    def __init__(self, factors: Iterable[ThetaCharacteristic], level: int, power: int = 1):
        factors = tuple(factors)
        if not factors:
            raise ValueError("a section needs at least one theta factor")
        if level < 1 or power < 1:
            raise ValueError("level and power must be positive")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "level", int(level))
        object.__setattr__(self, "power", int(power))

    @property
    def p(self) -> int:
        return math.lcm(*(f.p for f in self.factors))

    @property
    def level_4p2(self) -> bool:
        return self.level % (4 * self.p**2) == 0

    @property
    def level_8p2(self) -> bool:
        return self.level % (8 * self.p**2) == 0

    def to_json(self) -> dict:
        return {
            "factors": [f.to_json() for f in self.factors],
            "level": self.level,
            "power": self.power,
            "flags": {"n = 0 mod 4p^2": self.level_4p2, "n = 0 mod 8p^2": self.level_8p2},
        }


def _as_spec(obj, level: int | None) -> SectionSpec:
    if isinstance(obj, SectionSpec):
        return obj
    if isinstance(obj, ThetaCharacteristic):
        if level is None:
            raise ValueError("a level is needed for a bare characteristic")
        return SectionSpec([obj], level)
    raise TypeError("expected a SectionSpec or ThetaCharacteristic")


def _box(radius: int, dim: int = 2):
    return itertools.product(range(-radius, radius + 1), repeat=dim)


@dataclass(frozen=True)
class Valuation:
    value: Fraction
    attained_at: tuple[int, ...]
    certified: bool
    certificate: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "valuation": str(self.value),
            "attained_at": list(self.attained_at),
            "certified": self.certified,
            "certificate": self.certificate,
        }


def _factor_minimum(form: ExponentForm, radius: int) -> tuple[Fraction, tuple[int, int], dict]:
    best = None
    reached = set()
    for q in _box(radius):
        k = form.w[0] * q[0] + form.w[1] * q[1]
        reached.add(k)
        key = (form.of_k(k), sum(map(abs, q)))
        if best is None or key < best[0]:
            best = (key, q)
    best = (best[0][0], best[1])
    minimizers = form.global_minimizers()
    covered = all(k in reached for k in minimizers)
    cert = {
        "direction": list(form.w),
        "step": form.step,
        "vertex": str(-form.shift - form.c),
        "global_minimizers": minimizers,
        "box_min": str(best[0]),
        "covered": covered,
    }
    if not covered or form.of_k(minimizers[0]) != best[0]:
        raise InconclusiveValuation(
            f"box of radius {radius} misses the global minimiser k={minimizers} of direction {form.w}; enlarge box"
        )
    return best[0], best[1], cert


def valuation(
    spec: SectionSpec | ThetaCharacteristic,
    variable: str,
    box_radius: int,
    level: int | None = None,
    chart: tuple[int, int] = (0, 0),
) -> Valuation:
    """Order of vanishing of a theta product along ``variable = 0``.

    The minimum of the total exponent over the box is certified global: each
    factor's exponent is a convex quadratic in one integer ``k``, and the box
    must reach both integers next to the vertex.
    """
    spec = _as_spec(spec, level)
    if variable not in BOUNDARY_VARS:
        raise ValueError(f"variable must be one of {BOUNDARY_VARS}")
    if box_radius < 1:
        raise ValueError("box_radius must be at least 1")
    total = Fraction(0)
    where: list[int] = []
    certs = []
    for ch in spec.factors:
        form = exponent_form(variable, ch, spec.level, chart)
        val, q, cert = _factor_minimum(form, box_radius)
        total += val
        where.extend(q)
        certs.append(cert)
    return Valuation(total * spec.power, tuple(where), True, certs)


def brute_force_minimum(spec: SectionSpec, variable: str, box_radius: int, chart=(0, 0)) -> Fraction:
    """Minimum of the total exponent over the full product box (no separation of factors)."""
    forms = [exponent_form(variable, ch, spec.level, chart) for ch in spec.factors]
    best = None
    for qs in _box(box_radius, 2 * len(forms)):
        val = sum(f.at(qs[2 * i: 2 * i + 2]) for i, f in enumerate(forms))
        if best is None or val < best:
            best = val
    return best * spec.power


@dataclass
class ChartCheck:
    chart: tuple[int, int]
    min_exponent: Fraction
    integer_valued: bool
    box_integral: bool
    non_negative: bool

    @property
    def passed(self) -> bool:
        return self.integer_valued and self.box_integral and self.non_negative

    def to_json(self) -> dict:
        return {
            "chart": list(self.chart),
            "min_exponent": str(self.min_exponent),
            "integer_valued": self.integer_valued,
            "box_integral": self.box_integral,
            "non_negative": self.non_negative,
            "passed": self.passed,
        }


@dataclass
class ExtensionReport:
    spec: SectionSpec
    variable: str
    box_radius: int
    charts: list[ChartCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.charts)

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "variable": self.variable,
            "box_radius": self.box_radius,
            "charts": [c.to_json() for c in self.charts],
            "passed": self.passed,
        }


def check_extension(
    spec: SectionSpec,
    chart_grid: Iterable[tuple[int, int]] = ((0, 0),),
    box_radius: int = 2,
    variable: str = "T2",
) -> ExtensionReport:
    """Check that the ``variable`` exponent of every term is a non-negative integer, chart by chart.

    Integrality is certified for all ``q`` through the integer-valued
    polynomial test and additionally confirmed on the box; non-negativity
    uses the certified global minimum.
    """
    p = spec.p
    if spec.level % (8 * p * p):
        raise LevelConditionError(f"level {spec.level} is not divisible by 8p^2 = {8 * p * p}")
    checks = []
    for chart in chart_grid:
        chart = tuple(chart)
        forms = [exponent_form(variable, ch, spec.level, chart) for ch in spec.factors]
        minimum = Fraction(0)
        for f in forms:
            minimum += _factor_minimum(f, box_radius)[0]
        minimum *= spec.power
        # a sum of functions of independent variables is integer valued iff
        # each factor is up to a constant and the constants add to an integer
        offsets = [f.of_k(0) for f in forms]
        shifted_ok = all(
            all(x.denominator == 1 for x in (2 * A, A + B)) for A, B, _ in (f.coefficients() for f in forms)
        )
        integer_valued = shifted_ok and sum(offsets, Fraction(0)).denominator == 1
        values = [{f.at(q) for q in _box(box_radius)} for f in forms]
        box_integral = all(
            (sum(combo, Fraction(0)) * spec.power).denominator == 1 for combo in itertools.product(*values)
        )
        checks.append(ChartCheck(chart, minimum, integer_valued, box_integral, minimum >= 0))
    return ExtensionReport(spec, variable, box_radius, checks)


# ---------------------------------------------------------------------------
# numeric theta


@dataclass(frozen=True)
class ThetaValue:
    """Truncated theta value ``mantissa * exp(log_offset)``.

    ``log_offset`` is the log of the largest term and ``tail_bound`` is
    relative to that term.
    """

    mantissa: complex
    log_offset: float
    radius: int
    tail_bound: float

    @property
    def value(self) -> complex:
        return self.mantissa * math.exp(self.log_offset)

    def to_json(self) -> dict:
        v = self.value
        return {
            "value": [v.real, v.imag],
            "mantissa": [self.mantissa.real, self.mantissa.imag],
            "log_offset": self.log_offset,
            "radius": self.radius,
            "tail_bound": self.tail_bound,
        }


def _log_tail_bound(Y: np.ndarray, center: np.ndarray, log_scale: float, radius: int) -> float:
    """Log of an upper bound for the sum of ``|terms|`` with ``max|q_i| > radius``.

    ``|term(q)| = exp(log_scale - pi (q + d) Y (q + d))`` with ``d = center``;
    bounded by a product of one-dimensional Gaussian sums using the smallest
    eigenvalue of ``Y``.
    """
    lam = float(np.linalg.eigvalsh(Y).min())
    h = Y.shape[0]
    r = radius + 1 - float(np.max(np.abs(center)))
    if r <= 0:
        return math.inf
    log_tail = math.log(2) - math.pi * lam * r * r - math.log1p(-math.exp(-2 * math.pi * lam * r))
    log_full = math.log(2 + 1 / math.sqrt(lam))
    return log_scale + math.log(h) + log_tail + (h - 1) * log_full


def _log_max_term(Y, center, log_scale, radius) -> float:
    q = np.clip(np.rint(-center), -radius, radius)
    d = q + center
    return log_scale - math.pi * float(d @ Y @ d)


def _relative_tail(Y, center, log_scale, radius) -> float:
    diff = _log_tail_bound(Y, center, log_scale, radius) - _log_max_term(Y, center, log_scale, radius)
    return math.exp(min(diff, 700.0))


def theta_numeric(
    tau,
    z,
    ch: ThetaCharacteristic,
    radius: int | None = None,
    tolerance: float = DEFAULT_TAIL_TOLERANCE,
) -> ThetaValue:
    """Truncated ``Theta_{m'm''}(tau, z)`` summed over ``q`` in ``[-R, R]^h``.

    With ``radius=None`` the smallest radius whose tail bound is below
    ``tolerance`` times the largest term is used.
    """
    tau = np.atleast_2d(np.asarray(tau, dtype=complex))
    z = np.asarray(z, dtype=complex).reshape(-1)
    h = ch.h
    if tau.shape != (h, h) or z.size != h:
        raise ValueError("tau, z and the characteristic disagree in size")
    if not in_siegel_space(tau):
        raise ValueError("tau is not in the Siegel upper half space")
    Y = tau.imag
    mp = np.array([float(x) for x in ch.m_prime])
    mpp = np.array([float(x) for x in ch.m_dblprime])
    c = np.linalg.solve(Y, z.imag)
    log_scale = math.pi * float(c @ Y @ c)
    center = mp + c

    if radius is None:
        radius = max(1, int(math.ceil(np.max(np.abs(center)))))
        while _relative_tail(Y, center, log_scale, radius) > tolerance:
            radius += 1
            if radius > 10_000:
                raise ValueError("could not reach the tail tolerance")
    grid = np.array(list(_box(radius, h)), dtype=float) + mp
    expo = 2j * np.pi * (0.5 * np.einsum("ki,ij,kj->k", grid, tau, grid) + grid @ (z + mpp))
    # normalise by the largest term actually present in the box
    offset = float(expo.real.max())
    tail = math.exp(min(_log_tail_bound(Y, center, log_scale, radius) - offset, 700.0))
    if tail > tolerance:
        raise ValueError(f"relative tail bound {tail:.3e} exceeds tolerance {tolerance:.1e}")
    mantissa = complex(np.sum(np.exp(expo - offset)))
    return ThetaValue(mantissa, offset, radius, tail)


def log_quasi_period_factor(tau, z, k, kprime) -> complex:
    """2 pi i [-(1/2) k tau k - k (z + k')], the log of the lattice-shift factor."""
    tau = np.asarray(tau, dtype=complex)
    z = np.asarray(z, dtype=complex)
    k = np.asarray(k, dtype=float)
    kp = np.asarray(kprime, dtype=float)
    return complex(2j * np.pi * (-0.5 * k @ tau @ k - k @ (z + kp)))


def quasi_period_factor(tau, z, k, kprime) -> complex:
    return complex(np.exp(log_quasi_period_factor(tau, z, k, kprime)))


def _relative_gap(a: ThetaValue | tuple, b: ThetaValue | tuple, log_factor: complex = 0j) -> float:
    """``|a - e^{log_factor} b| / max(|a|, |e^{log_factor} b|)`` without overflow."""
    ma, la = (a.mantissa, a.log_offset) if isinstance(a, ThetaValue) else a
    mb, lb = (b.mantissa, b.log_offset) if isinstance(b, ThetaValue) else b
    mb = mb * np.exp(1j * log_factor.imag)
    lb = lb + log_factor.real
    top = max(la, lb)
    x = ma * math.exp(la - top)
    y = mb * math.exp(lb - top)
    return float(abs(x - y) / max(abs(x), abs(y)))


def _check_lattice_shift(ch: ThetaCharacteristic, k, kprime):
    kk = [Fraction(int(a)) for a in k]
    kkp = [Fraction(int(a)) for a in kprime]
    extra = sum((a * b for a, b in zip(ch.m_prime, kkp)), Fraction(0)) - sum(
        (a * b for a, b in zip(kk, ch.m_dblprime)), Fraction(0)
    )
    if extra.denominator != 1:
        raise LevelConditionError("m'.k' - k.m'' is not an integer; the shift is not in the period lattice")


def quasi_periodicity_residual(tau, z, ch: ThetaCharacteristic, k, kprime, tolerance=DEFAULT_TAIL_TOLERANCE) -> float:
    """Relative residual of Theta(tau, z + k tau + k') = factor * Theta(tau, z)."""
    _check_lattice_shift(ch, k, kprime)
    tau = np.asarray(tau, dtype=complex)
    z = np.asarray(z, dtype=complex)
    shifted = z + np.asarray(k, dtype=float) @ tau + np.asarray(kprime, dtype=float)
    lhs = theta_numeric(tau, shifted, ch, tolerance=tolerance)
    rhs = theta_numeric(tau, z, ch, tolerance=tolerance)
    return _relative_gap(lhs, rhs, log_quasi_period_factor(tau, z, k, kprime))


@dataclass
class TransformSample:
    gamma: list[list[int]] | None
    k: tuple[int, ...]
    kprime: tuple[int, ...]
    shift_residual: float
    modulus_residual: float

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma,
            "k": list(self.k),
            "kprime": list(self.kprime),
            "shift_residual": self.shift_residual,
            "modulus_residual": self.modulus_residual,
        }


@dataclass
class TransformReport:
    spec: SectionSpec
    samples: list[TransformSample]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(s.shift_residual < self.tolerance and s.modulus_residual < self.tolerance for s in self.samples)

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "tolerance": self.tolerance,
            "samples": [s.to_json() for s in self.samples],
            "passed": self.passed,
        }


def _product(spec: SectionSpec, tau, z) -> tuple[complex, float]:
    """The theta product as ``(mantissa, log_offset)``."""
    mant, log = complex(1), 0.0
    for ch in spec.factors:
        v = theta_numeric(tau, z, ch)
        mant *= v.mantissa
        log += v.log_offset
    return mant**spec.power, log * spec.power


def is_level_element(gamma, n: int) -> bool:
    from .charts import is_symplectic

    g2 = len(gamma)
    return is_symplectic(gamma) and all((gamma[i][j] - int(i == j)) % n == 0 for i in range(g2) for j in range(g2))


def check_transformation(
    spec: SectionSpec,
    samples: Sequence[tuple],
    tau,
    z,
    tolerance: float = DEFAULT_COMPARE_TOLERANCE,
) -> TransformReport:
    """Numerically check the automorphy behaviour of a theta product at ``(tau, z)``.

    Each sample is ``(gamma, k, k')`` with ``gamma`` in Gamma_h(n) (or None
    for the identity) and ``k, k'`` in ``n Z^h``.  The lattice shift must
    reproduce the quasi-periodicity factor (raised to the number of
    factors); the modular transformation is checked in modulus only, with
    expected modulus ``|det(C tau + D)|^{#factors / 2}``.
    """
    n = spec.level
    if n % (4 * spec.p**2):
        raise LevelConditionError(f"level {n} is not divisible by 4p^2 = {4 * spec.p**2}")
    tau = np.asarray(tau, dtype=complex)
    z = np.asarray(z, dtype=complex)
    h = tau.shape[0]
    base = _product(spec, tau, z)
    out = []
    for gamma, k, kp in samples:
        k = tuple(int(x) for x in k)
        kp = tuple(int(x) for x in kp)
        if any(x % n for x in k + kp):
            raise LevelConditionError("lattice shifts must lie in n Z^h")
        for ch in spec.factors:
            _check_lattice_shift(ch, k, kp)
        shifted = z + np.asarray(k, dtype=float) @ tau + np.asarray(kp, dtype=float)
        log_factor = log_quasi_period_factor(tau, z, k, kp) * (len(spec.factors) * spec.power)
        shift_res = _relative_gap(_product(spec, tau, shifted), base, log_factor)

        if gamma is None:
            gamma_l = None
            mod_res = 0.0
        else:
            gamma_l = [[int(x) for x in row] for row in gamma]
            if not is_level_element(gamma_l, n):
                raise LevelConditionError("gamma is not in the principal congruence subgroup of level n")
            G = np.asarray(gamma_l, dtype=float)
            C, D = G[h:, :h], G[h:, h:]
            ctd = C @ tau + D
            ctd_inv = np.linalg.inv(ctd)
            tau_s = (G[:h, :h] @ tau + G[:h, h:]) @ ctd_inv
            tau_s = (tau_s + tau_s.T) / 2
            z_s = z @ ctd_inv
            weight = len(spec.factors) * spec.power
            log_expected = (
                weight / 2 * math.log(abs(np.linalg.det(ctd)))
                + weight * float(np.real(1j * np.pi * (z @ ctd_inv @ C @ z)))
                + math.log(abs(base[0]))
                + base[1]
            )
            got_m, got_l = _product(spec, tau_s, z_s)
            log_got = math.log(abs(got_m)) + got_l
            mod_res = float(-math.expm1(-abs(log_got - log_expected)))
        out.append(TransformSample(gamma_l, k, kp, float(shift_res), float(mod_res)))
    return TransformReport(spec, out, tolerance)


def form_order(weight: int, vanishing_order) -> Fraction:
    """Vanishing order at the boundary divided by the weight."""
    if weight <= 0:
        raise ValueError("weight must be positive")
    m = to_fraction(vanishing_order)
    if m < 0:
        raise ValueError("vanishing order must be non-negative")
    return m / weight
