"""Composite computations that rebuild the main results from the library operations.

Each function returns a :class:`RunReport` whose ``passed`` flag is the
conjunction of its individual checks; every intermediate value is kept.
"""

from __future__ import annotations

from fractions import Fraction

from .charts import (
    boundary_projection,
    chart_embedding,
    chart_inverse_reference,
    dual_chart,
    invert,
    lambda_boundary_map,
    CHART_VARS_G3,
)
from .divisor import DivisorClass, canonical_class, general_type_table, nef_test
from .exactfan import standard_cone
from .report import RunReport
from .strata import boundary_degree, check_minus_nD_nef, fiber_type, g2_restriction_ledger, group_order_psl2
from .theta import SectionSpec, characteristics, check_extension

ANCHORS = {
    "nef": "nef cone of A*_g(n): b >= 0 and a - 12b/n >= 0",
    "witness_modular": "test curve X(1) x {A}: L.C = 1/12, D.C = 1",
    "witness_fiber": "D restricted to a boundary fiber is -(2/n)H",
    "canonical": "K = (g+1)L - D",
    "general_type": "K = ((g+1) - 2^{g-2}(2^g+1)/(n 2^{2g-5}))L + [Theta_null]/(n 2^{2g-5})",
    "charts": "torus chart of the standard cone sigma_3 and its boundary projection to sigma_2",
    "fibers": "fibers of the boundary fibration over A*_2(n) at points of type I, II, IIIa, IIIb",
    "genus2": "deg_X(n)(aL - bB) = mu(n)(a/12 - b/n) and -nD|D = 2 pull L_X(n) + 2 sum L_ij",
    "extension": "theta products extend over the boundary when n = 0 mod 8p^2",
}

TARGETS = ("nef-boundary", "general-type-table", "fiber-counts", "genus2-ledger", "extension-certificate")
TARGET_ALIASES = {
    "thm0.2-boundary": "nef-boundary",
    "thm1.1-table": "general-type-table",
    "prop2.4-counts": "fiber-counts",
    "g2-proof-ledger": "genus2-ledger",
    "prop2.5-certificate": "extension-certificate",
}

GRID_GENERA = (2, 3)
GRID_LEVELS = (1, 3, 4, 5)
GRID_B = (Fraction(0), Fraction(1), Fraction(2), Fraction(5, 7))
GRID_DELTA = Fraction(1, 1000)


def nef_boundary_cases(genera=GRID_GENERA, levels=GRID_LEVELS, bs=GRID_B, delta=GRID_DELTA):
    """``(g, n, a, b, expected)`` on and just off both walls of the cone."""
    cases = []
    for g in genera:
        for n in levels:
            for b in bs:
                wall = 12 * b / n
                cases.append((g, n, wall, b, True))
                cases.append((g, n, wall + delta, b, True))
                cases.append((g, n, wall - delta, b, False))
            cases.append((g, n, Fraction(1), -delta, False))
            cases.append((g, n, Fraction(1), Fraction(0), True))
    return cases


def nef_boundary(g: int | None = None, n: int | None = None) -> RunReport:
    rows = []
    ok = True
    for cg, cn, a, b, expected in nef_boundary_cases():
        v = nef_test(DivisorClass.from_ab(cg, cn, a, b))
        good = v.is_nef == expected and (v.is_nef or (v.witness is not None and v.witness_value < 0))
        ok &= good
        rows.append({"g": cg, "n": cn, "a": a, "b": b, "expected_nef": expected, "verdict": v, "agrees": good})
    outputs = {"grid": rows}
    if g is not None and n is not None:
        k = nef_test(canonical_class(g, n))
        outputs["canonical_class"] = {"verdict": k, "margin": k.margin, "strictly_positive": k.margin > 0 and k.cls.b > 0}
    return RunReport(
        "reproduce nef-boundary",
        {"g": g, "n": n},
        outputs,
        [ANCHORS["nef"], ANCHORS["witness_modular"], ANCHORS["witness_fiber"], ANCHORS["canonical"]],
        passed=ok,
    )


def general_type() -> RunReport:
    cells = general_type_table()
    checks = []
    ok = True
    for c in cells:
        if c.exception is None:
            good = c.positive
        elif (c.g, c.n0) == (7, 1):
            good = c.coefficient == Fraction(-1, 16)
        else:
            good = True  # flagged; the sign alone does not decide this cell
        ok &= good
        checks.append({"cell": c, "check_passed": good})
    return RunReport("reproduce general-type-table", {}, {"table": checks}, [ANCHORS["general_type"]], passed=ok)


def fiber_counts(levels=(3, 4, 5)) -> RunReport:
    rows = {}
    ok = True
    for n in levels:
        a = fiber_type("IIIa", n)
        b = fiber_type("IIIb", n)
        good = (
            a.total == n * n
            and b.total == 3 * n * n
            and b.count("P2") == 2 * n * n
            and b.count("P2-blown-up-3") == n * n
        )
        ok &= good
        rows[str(n)] = {"IIIa": a.total, "IIIb": b.total, "IIIb_split": [b.count("P2"), b.count("P2-blown-up-3")], "agrees": good}
    kummer = {str(n): fiber_type("IIIb", n).count("P2") for n in (2, 1)}
    ok &= kummer == {"2": 8, "1": 2}
    return RunReport(
        "reproduce fiber-counts",
        {"levels": list(levels)},
        {"levels": rows, "kummer_IIIb": kummer},
        [ANCHORS["fibers"]],
        passed=ok,
    )


def genus2_ledger(levels=(1, 2, 3, 4)) -> RunReport:
    mu3 = group_order_psl2(3)
    deg = boundary_degree(12, 1, 3)
    reports = [check_minus_nD_nef(n) for n in levels]
    ok = mu3 == 12 and deg == 8
    ok &= all(r.section_degree == 0 and r.fiber_degree == 2 * r.n * r.n for r in reports)
    restriction = g2_restriction_ledger(12, 1, 3)
    ok &= restriction.nonnegative
    return RunReport(
        "reproduce genus2-ledger",
        {"levels": list(levels)},
        {
            "mu": {str(n): group_order_psl2(n) for n in levels},
            "boundary_degree(12,1,3)": deg,
            "normal_bundle": reports,
            "restriction(12,1,3)": restriction,
        },
        [ANCHORS["genus2"]],
        passed=ok,
    )


def extension_certificate(ps=(1, 2, 3), chart_grid=tuple((0, m) for m in range(-2, 3)), box_radius: int = 2) -> RunReport:
    rows = []
    ok = True
    for p in ps:
        n = 8 * p * p
        for ch in characteristics(p):
            rep = check_extension(SectionSpec([ch], n), chart_grid, box_radius)
            ok &= rep.passed
            rows.append(
                {
                    "p": p,
                    "n": n,
                    "m_prime": list(ch.m_prime),
                    "min_exponents": [c.min_exponent for c in rep.charts],
                    "passed": rep.passed,
                }
            )
    return RunReport(
        "reproduce extension-certificate",
        {"p": list(ps), "charts": [list(c) for c in chart_grid], "box_radius": box_radius},
        {"characteristics": rows, "count": len(rows)},
        [ANCHORS["extension"]],
        passed=ok,
    )


def chart_identities() -> RunReport:
    inv = invert(chart_embedding(3))
    ref = chart_inverse_reference()
    rows = {v: inv.row(v) == ref.row(v) for v in ref.target_vars}
    t33 = inv.row("t33") == {"T3": 1, "T4": 1, "T5": 1}
    dual = dual_chart(standard_cone(3), CHART_VARS_G3) == chart_embedding(3)
    boundary = lambda_boundary_map() == boundary_projection()
    checks = {
        "chart_embedding_from_rays": dual,
        "inverse_rows": rows,
        "t33 = T3 T4 T5": t33,
        "boundary_projection": boundary,
    }
    ok = dual and all(rows.values()) and t33 and boundary
    return RunReport(
        "charts --verify",
        {},
        {"checks": checks, "inverse": inv, "boundary_projection": lambda_boundary_map()},
        [ANCHORS["charts"]],
        passed=ok,
    )


def run_target(target: str, **kw) -> RunReport:
    target = TARGET_ALIASES.get(target, target)
    if target == "nef-boundary":
        return nef_boundary(kw.get("g"), kw.get("n"))
    if target == "general-type-table":
        return general_type()
    if target == "fiber-counts":
        n = kw.get("n")
        return fiber_counts((n,) if n else (3, 4, 5))
    if target == "genus2-ledger":
        return genus2_ledger()
    if target == "extension-certificate":
        kwargs = {}
        if kw.get("box_radius"):
            kwargs["box_radius"] = kw["box_radius"]
        return extension_certificate(**kwargs)
    raise ValueError(f"unknown target {target!r}; choose from {', '.join(TARGETS + tuple(TARGET_ALIASES))}")
