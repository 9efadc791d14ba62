"""Monomial maps between torus charts and the parabolic action on block period matrices.

Coordinate conventions (used by every exponent matrix in this package):

* ``t``-coordinates for g = 3 are ordered ``t11, t12, t13, t22, t23, t33``
  and for g = 2 ``t11, t12, t22``; ``t_ij = exp(2 pi i tau_ij / n)``.
* ``T1..T6`` are dual to the rays ``alpha1, alpha2, alpha3, beta1, beta2, beta3``
  of sigma_3; ``T1..T3`` (g = 2) are dual to ``gamma1, gamma2, gamma3``.
* On the boundary chart of sigma_3' the coordinates are ``T1, T2, T4, T5, T6``,
  and the target sigma_2 chart is written ``S1, S2, S3``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exactfan import (
    Cone,
    LatticeMap,
    SymMatrix,
    det,
    gl_conjugate,
    identity,
    inverse,
    lambda_bar_map,
    mat_mul,
    sigma3_prime,
    solve,
    standard_cone,
    sym_dim,
    transpose,
)

T_VARS_G3 = ("t11", "t12", "t13", "t22", "t23", "t33")
T_VARS_G2 = ("t11", "t12", "t22")
CHART_VARS_G3 = ("T1", "T2", "T3", "T4", "T5", "T6")
CHART_VARS_G2 = ("T1", "T2", "T3")
BOUNDARY_VARS = ("T1", "T2", "T4", "T5", "T6")
SIGMA2_VARS = ("S1", "S2", "S3")

SIEGEL_TOLERANCE = 1e-9


class NotUnimodularError(ValueError):
    pass


@dataclass(frozen=True)
class MonomialMap:
    """``target_i = prod_j source_j ** exponent_matrix[i][j]``."""

    source_vars: tuple[str, ...]
    target_vars: tuple[str, ...]
    exponent_matrix: tuple[tuple[int, ...], ...]

    def __init__(self, source_vars, target_vars, exponent_matrix):
        rows = tuple(tuple(int(x) for x in row) for row in exponent_matrix)
        if any(Fraction(x).denominator != 1 for row in exponent_matrix for x in row):
            raise ValueError("monomial exponents must be integers")
        if len(rows) != len(target_vars) or any(len(r) != len(source_vars) for r in rows):
            raise ValueError("exponent matrix shape does not match variable lists")
        object.__setattr__(self, "source_vars", tuple(source_vars))
        object.__setattr__(self, "target_vars", tuple(target_vars))
        object.__setattr__(self, "exponent_matrix", rows)

    def row(self, var: str) -> dict[str, int]:
        """Non-zero exponents of one target variable."""
        r = self.exponent_matrix[self.target_vars.index(var)]
        return {v: e for v, e in zip(self.source_vars, r) if e}

    def is_unimodular(self) -> bool:
        return len(self.source_vars) == len(self.target_vars) and abs(det(self.exponent_matrix)) == 1

    def compose(self, inner: "MonomialMap") -> "MonomialMap":
        """``self o inner``: first apply ``inner``, then ``self``."""
        if tuple(inner.target_vars) != tuple(self.source_vars):
            raise ValueError("variables do not chain")
        return MonomialMap(inner.source_vars, self.target_vars, mat_mul(self.exponent_matrix, inner.exponent_matrix))

    def pull_exponents(self, exponents: dict[str, Fraction]) -> dict[str, Fraction]:
        """Rewrite a monomial in the target variables as a monomial in the source variables."""
        out = {v: Fraction(0) for v in self.source_vars}
        for tv, e in exponents.items():
            if e == 0:
                continue
            row = self.exponent_matrix[self.target_vars.index(tv)]
            for sv, a in zip(self.source_vars, row):
                out[sv] += a * Fraction(e)
        return out

    def evaluate(self, values: Sequence[complex]) -> list[complex]:
        if len(values) != len(self.source_vars):
            raise ValueError("wrong number of coordinates")
        out = []
        for row in self.exponent_matrix:
            acc = complex(1)
            for v, e in zip(values, row):
                if e:
                    acc *= complex(v) ** e
            out.append(acc)
        return out

    def to_json(self) -> dict:
        return {
            "source_vars": list(self.source_vars),
            "target_vars": list(self.target_vars),
            "exponent_matrix": [list(r) for r in self.exponent_matrix],
        }


def identity_map(variables: Sequence[str]) -> MonomialMap:
    return MonomialMap(variables, variables, identity(len(variables)))


def chart_embedding(g: int) -> MonomialMap:
    """The inclusion of the big torus into the affine chart of sigma_g, as monomials in ``t``."""
    if g == 3:
        rows = [
            [1, 1, 1, 0, 0, 0],   # T1 = t11 t12 t13
            [0, 1, 0, 1, 1, 0],   # T2 = t12 t22 t23
            [0, 0, 1, 0, 1, 1],   # T3 = t13 t23 t33
            [0, 0, 0, 0, -1, 0],  # T4 = t23^-1
            [0, 0, -1, 0, 0, 0],  # T5 = t13^-1
            [0, -1, 0, 0, 0, 0],  # T6 = t12^-1
        ]
        return MonomialMap(T_VARS_G3, CHART_VARS_G3, rows)
    if g == 2:
        rows = [
            [1, 1, 0],   # T1 = t11 t12
            [0, 1, 1],   # T2 = t12 t22
            [0, -1, 0],  # T3 = t12^-1
        ]
        return MonomialMap(T_VARS_G2, CHART_VARS_G2, rows)
    raise ValueError(f"chart embedding only defined for g in (2, 3), got {g}")


def chart_inverse_reference() -> MonomialMap:
    """Hand-written ``t_ij`` in terms of ``T1..T6``, kept independent of :func:`invert`."""
    rows = [
        [1, 0, 0, 0, 1, 1],    # t11 = T1 T5 T6
        [0, 0, 0, 0, 0, -1],   # t12 = T6^-1
        [0, 0, 0, 0, -1, 0],   # t13 = T5^-1
        [0, 1, 0, 1, 0, 1],    # t22 = T2 T4 T6
        [0, 0, 0, -1, 0, 0],   # t23 = T4^-1
        [0, 0, 1, 1, 1, 0],    # t33 = T3 T4 T5
    ]
    return MonomialMap(CHART_VARS_G3, T_VARS_G3, rows)


def dual_chart(cone: Cone, chart_vars: Sequence[str]) -> MonomialMap:
    """Chart coordinates of a full-dimensional simplicial Sym_g cone, derived from its rays.

    The coordinate dual to ray ``k`` is the character ``u_k`` with
    ``<u_k, ray_j> = delta_kj``; in the ``t`` basis this is row ``k`` of the
    inverse transpose of the ray matrix.
    """
    if cone.g is None or len(cone.rays) != sym_dim(cone.g):
        raise ValueError("need a full-dimensional cone of symmetric matrices")
    t_vars = T_VARS_G3 if cone.g == 3 else T_VARS_G2
    u = inverse(transpose([list(r) for r in cone.rays]))
    if any(x.denominator != 1 for row in u for x in row):
        raise NotUnimodularError(f"cone {cone.label} is not unimodular")
    return MonomialMap(t_vars, chart_vars, u)


def invert(f: MonomialMap) -> MonomialMap:
    if len(f.source_vars) != len(f.target_vars):
        raise NotUnimodularError("only square exponent matrices can be inverted")
    if abs(det(f.exponent_matrix)) != 1:
        raise NotUnimodularError("exponent matrix is not unimodular")
    inv = inverse(f.exponent_matrix)
    return MonomialMap(f.target_vars, f.source_vars, inv)


def boundary_projection() -> MonomialMap:
    """T_{sigma3'} -> T_{sigma2}: (T1, T2, T4, T5, T6) -> (T1 T5, T2 T4, T6)."""
    rows = [
        [1, 0, 0, 1, 0],
        [0, 1, 1, 0, 0],
        [0, 0, 0, 0, 1],
    ]
    return MonomialMap(BOUNDARY_VARS, SIGMA2_VARS, rows)


def dual_of_lattice_map(
    f: LatticeMap,
    source_cone: Cone,
    target_cone: Cone,
    source_vars: Sequence[str] | None = None,
    target_vars: Sequence[str] | None = None,
) -> MonomialMap:
    """Monomial map on chart coordinates induced by a lattice map between simplicial cones.

    If ``f(source ray j) = sum_i c_ij * (target ray i)`` then target
    coordinate ``S_i`` pulls back to ``prod_j T_j ** c_ij``.
    """
    if source_vars is None:
        source_vars = source_cone.ray_names or tuple(f"{source_cone.label}_{j}" for j in range(len(source_cone.rays)))
    if target_vars is None:
        target_vars = target_cone.ray_names or tuple(f"{target_cone.label}_{i}" for i in range(len(target_cone.rays)))
    cols = []
    for j, ray in enumerate(source_cone.rays):
        image = f(ray)
        c = solve(target_cone.rays, image)
        if c is None or any(x.denominator != 1 for x in c):
            raise ValueError(f"image of source ray {j} is not an integer combination of the target rays")
        if any(x < 0 for x in c):
            raise ValueError(f"image of source ray {j} leaves the target cone")
        cols.append([int(x) for x in c])
    return MonomialMap(source_vars, target_vars, transpose(cols))


def lambda_boundary_map() -> MonomialMap:
    """``dual_of_lattice_map`` applied to lambda on sigma3' -> sigma2."""
    return dual_of_lattice_map(lambda_bar_map(), sigma3_prime(), standard_cone(2), BOUNDARY_VARS, SIGMA2_VARS)


def nu_matrix(n_idx: int, m_idx: int) -> list[list[int]]:
    return [[1, 0, m_idx], [0, 1, n_idx], [0, 0, 1]]


def nu_chart(n_idx: int, m_idx: int) -> LatticeMap:
    """Conjugation by nu_{nm} on Sym_3, as a 6x6 matrix on upper coordinates."""
    nu = nu_matrix(n_idx, m_idx)
    cols = []
    for k in range(6):
        basis = [0] * 6
        basis[k] = 1
        cols.append(gl_conjugate(SymMatrix.from_upper(basis, 3), nu).upper())
    return LatticeMap(transpose(cols), f"nu_{n_idx}{m_idx}")


def shifted_sigma3(n_idx: int, m_idx: int) -> Cone:
    """The cone ``t nu sigma_3 nu``, rays kept in the sigma_3 order."""
    nu = nu_matrix(n_idx, m_idx)
    gens = [gl_conjugate(m, nu) for m in standard_cone(3).generators()]
    return Cone.from_matrices(f"sigma3_{n_idx}{m_idx}", gens, standard_cone(3).ray_names)


# ---------------------------------------------------------------------------
# parabolic subgroup acting on H_g


@dataclass(frozen=True)
class BlockPeriodPoint:
    """tau = [[tau1, t(tau2)], [tau2, tau3]] with tau1 of size g-1."""

    tau1: np.ndarray
    tau2: np.ndarray
    tau3: complex

    def __post_init__(self):
        t1 = np.atleast_2d(np.asarray(self.tau1, dtype=complex))
        t2 = np.asarray(self.tau2, dtype=complex).reshape(-1)
        if t1.shape != (t2.size, t2.size):
            raise ValueError("tau1 must be (g-1)x(g-1) and tau2 of length g-1")
        object.__setattr__(self, "tau1", t1)
        object.__setattr__(self, "tau2", t2)
        object.__setattr__(self, "tau3", complex(self.tau3))

    @classmethod
    def from_matrix(cls, tau) -> "BlockPeriodPoint":
        tau = np.asarray(tau, dtype=complex)
        return cls(tau[:-1, :-1], tau[-1, :-1], tau[-1, -1])

    @property
    def g(self) -> int:
        return self.tau2.size + 1

    def matrix(self) -> np.ndarray:
        g = self.g
        out = np.empty((g, g), dtype=complex)
        out[:-1, :-1] = self.tau1
        out[-1, :-1] = self.tau2
        out[:-1, -1] = self.tau2
        out[-1, -1] = self.tau3
        return out

    def in_siegel_space(self, tol: float = SIEGEL_TOLERANCE) -> bool:
        return in_siegel_space(self.matrix(), tol)


def in_siegel_space(tau, tol: float = SIEGEL_TOLERANCE) -> bool:
    tau = np.asarray(tau, dtype=complex)
    if not np.allclose(tau, tau.T, atol=tol):
        return False
    return bool(np.linalg.eigvalsh(tau.imag).min() > tol)


@dataclass(frozen=True)
class ParabolicElement:
    """One of the generators g1..g4 of the stabiliser of the line l0 = (0, ..., 0, 1).

    payload by kind: ``g1`` -> 2(g-1) square integer matrix (A B; C D),
    ``g2`` -> sign +-1, ``g3`` -> (M, N) integer vectors, ``g4`` -> integer S.
    """

    kind: str
    payload: object

    def __post_init__(self):
        if self.kind not in ("g1", "g2", "g3", "g4"):
            raise ValueError(f"unknown parabolic generator {self.kind!r}")
        if self.kind == "g1":
            gamma = [[int(x) for x in row] for row in self.payload]
            if not is_symplectic(gamma):
                raise ValueError("g1 payload is not symplectic")
        if self.kind == "g2" and self.payload not in (1, -1):
            raise ValueError("g2 payload must be +1 or -1")

    def full_matrix(self, g: int) -> list[list[int]]:
        """The element as a 2g x 2g integer symplectic matrix."""
        h = g - 1
        out = identity(2 * g)
        if self.kind == "g1":
            gamma = [[int(x) for x in row] for row in self.payload]
            if len(gamma) != 2 * h:
                raise ValueError("g1 payload has the wrong size")
            idx = list(range(h)) + [g + i for i in range(h)]
            for a, i in enumerate(idx):
                for b, j in enumerate(idx):
                    out[i][j] = gamma[a][b]
        elif self.kind == "g2":
            out[h][h] = out[2 * g - 1][2 * g - 1] = int(self.payload)
        elif self.kind == "g3":
            M, N = (list(map(int, v)) for v in self.payload)
            for i in range(h):
                out[h][i] = M[i]           # row of A
                out[h][g + i] = N[i]       # row of B
                out[i][2 * g - 1] = N[i]   # column of B
                out[g + i][2 * g - 1] = -M[i]  # column of D
        else:
            out[h][2 * g - 1] = int(self.payload)
        return out


def symplectic_form(g: int) -> list[list[int]]:
    J = [[0] * (2 * g) for _ in range(2 * g)]
    for i in range(g):
        J[i][g + i] = 1
        J[g + i][i] = -1
    return J


def is_symplectic(gamma: Sequence[Sequence[int]]) -> bool:
    n = len(gamma)
    if n % 2 or any(len(r) != n for r in gamma):
        return False
    J = symplectic_form(n // 2)
    return mat_mul(mat_mul(transpose(gamma), J), gamma) == J


def symplectic_act(gamma, tau) -> np.ndarray:
    """tau -> (A tau + B)(C tau + D)^-1."""
    gamma = np.asarray(gamma, dtype=float)
    g = gamma.shape[0] // 2
    A, B, C, D = gamma[:g, :g], gamma[:g, g:], gamma[g:, :g], gamma[g:, g:]
    tau = np.asarray(tau, dtype=complex)
    return (A @ tau + B) @ np.linalg.inv(C @ tau + D)


def parabolic_act(el: ParabolicElement, p: BlockPeriodPoint, tol: float = SIEGEL_TOLERANCE) -> BlockPeriodPoint:
    if not p.in_siegel_space(tol):
        raise ValueError("point is not in the Siegel upper half space")
    t1, t2, t3 = p.tau1, p.tau2, p.tau3
    if el.kind == "g1":
        gamma = np.asarray(el.payload, dtype=float)
        h = t2.size
        A, B, C, D = gamma[:h, :h], gamma[:h, h:], gamma[h:, :h], gamma[h:, h:]
        ctd = C @ t1 + D
        if abs(np.linalg.det(ctd)) < tol:
            raise ValueError("C tau1 + D is singular")
        ctd_inv = np.linalg.inv(ctd)
        new = BlockPeriodPoint((A @ t1 + B) @ ctd_inv, t2 @ ctd_inv, t3 - t2 @ ctd_inv @ C @ t2)
    elif el.kind == "g2":
        new = BlockPeriodPoint(t1, el.payload * t2, t3)
    elif el.kind == "g3":
        M, N = (np.asarray(v, dtype=float) for v in el.payload)
        mt2 = M @ t2
        new = BlockPeriodPoint(t1, t2 + M @ t1 + N, t3 + M @ t1 @ M + mt2 + mt2 + N @ M)
    else:
        new = BlockPeriodPoint(t1, t2, t3 + el.payload)
    if not new.in_siegel_space(tol):
        raise ArithmeticError("image left the Siegel upper half space")
    return new


def boundary_coordinate(p: BlockPeriodPoint, n: int) -> complex:
    """t_3 = exp(2 pi i tau_3 / n), the coordinate whose vanishing defines the boundary."""
    return cmath.exp(2j * cmath.pi * p.tau3 / n)
