"""Command-line entry point.

Exit codes: 0 when the computation passes, 1 on a mathematical failure
(not nef, failed certificate, inconclusive search), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import reproduce
from .divisor import (
    DivisorClass,
    canonical_class,
    general_type_coefficient,
    general_type_n0,
    GENERAL_TYPE_EXCEPTIONS,
    humbert_decompose,
    nef_test,
    restrict_to_boundary,
)
from .exactfan import to_fraction
from .report import RunReport, dumps, render_text
from .strata import (
    ResourceBoundExceeded,
    check_minus_nD_nef,
    enumerate_cusps,
    fiber_type,
    satake_strata,
    shioda_model,
)
from .theta import (
    DEFAULT_COMPARE_TOLERANCE,
    DEFAULT_TAIL_TOLERANCE,
    InconclusiveValuation,
    SectionSpec,
    ThetaCharacteristic,
    characteristics,
    check_extension,
    quasi_periodicity_residual,
    theta_numeric,
    valuation,
)


class UsageError(ValueError):
    pass


def _frac(text: str) -> Fraction:
    try:
        return to_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _complex_matrix(text: str) -> np.ndarray:
    rows = [[complex(x.strip().replace(" ", "")) for x in row.split(",")] for row in text.split(";")]
    return np.array(rows, dtype=complex)


def _complex_vector(text: str) -> np.ndarray:
    return np.array([complex(x.strip()) for x in text.split(",")], dtype=complex)


def _load_json(text: str):
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    return json.loads(text)


def _spec_from_json(data: dict) -> tuple[SectionSpec, str, int]:
    chars = []
    for entry in data["characteristics"]:
        if isinstance(entry, dict):
            chars.append(ThetaCharacteristic(entry["m_prime"], entry.get("m_dblprime")))
        else:
            chars.append(ThetaCharacteristic(entry))
    spec = SectionSpec(chars, int(data["level"]), int(data.get("power", 1)))
    return spec, data.get("variable", "T2"), int(data.get("box_radius", 3))


# ---------------------------------------------------------------------------
# commands


def cmd_nef_check(args) -> RunReport:
    c = DivisorClass.from_ab(args.g, args.n, args.a, args.b)
    v = nef_test(c)
    return RunReport(
        "nef-check",
        {"g": args.g, "n": args.n, "a": args.a, "b": args.b},
        v,
        [reproduce.ANCHORS["nef"]],
        passed=v.is_nef,
    )


def cmd_k_class(args) -> RunReport:
    k = canonical_class(args.g, args.n)
    v = nef_test(k)
    out = {
        "class": k,
        "verdict": v,
        "strictly_positive": v.margin > 0,
        "restriction": restrict_to_boundary(k) if args.g in (2, 3) else None,
    }
    if args.g == 2:
        out["humbert"] = humbert_decompose(k)
    return RunReport(
        "k-class", {"g": args.g, "n": args.n}, out, [reproduce.ANCHORS["canonical"], reproduce.ANCHORS["nef"]], passed=v.is_nef
    )


def cmd_general_type(args) -> RunReport:
    if args.table:
        rep = reproduce.general_type()
        rep.command = "general-type --table"
        return rep
    if args.g is None or args.n is None:
        raise UsageError("general-type needs --g and --n, or --table")
    coeff = general_type_coefficient(args.g, args.n)
    out = {
        "coefficient": coeff,
        "positive": coeff > 0,
        "n0": general_type_n0(args.g),
        "in_table_range": args.n >= general_type_n0(args.g),
        "exception": GENERAL_TYPE_EXCEPTIONS.get((args.g, args.n)),
    }
    return RunReport("general-type", {"g": args.g, "n": args.n}, out, [reproduce.ANCHORS["general_type"]], passed=True)


def cmd_charts(args) -> RunReport:
    rep = reproduce.chart_identities()
    if not args.verify:
        rep.command = "charts"
    return rep


def cmd_theta(args) -> RunReport:
    if args.theta_cmd == "order":
        spec, variable, radius = _spec_from_json(_load_json(args.input))
        if args.box_radius is not None:
            radius = args.box_radius
        try:
            val = valuation(spec, variable, radius)
        except InconclusiveValuation as exc:
            return RunReport(
                "theta order",
                {"spec": spec, "variable": variable, "box_radius": radius},
                {"certified": False, "error": str(exc)},
                [reproduce.ANCHORS["extension"]],
                passed=False,
            )
        return RunReport(
            "theta order",
            {"spec": spec, "variable": variable, "box_radius": radius},
            val,
            [reproduce.ANCHORS["extension"]],
        )
    if args.theta_cmd == "extension":
        radius = args.box_radius or 2
        charts = [(0, m) for m in range(-args.charts, args.charts + 1)]
        if args.input:
            spec, _, _ = _spec_from_json(_load_json(args.input))
            specs = [spec]
        else:
            specs = [SectionSpec([ch], 8 * args.p**2) for ch in characteristics(args.p)]
        reports = [check_extension(s, charts, radius) for s in specs]
        return RunReport(
            "theta extension",
            {"p": args.p, "charts": charts, "box_radius": radius},
            {"reports": reports},
            [reproduce.ANCHORS["extension"]],
            passed=all(r.passed for r in reports),
        )
    if args.theta_cmd == "numeric":
        tol = args.tolerance if args.tolerance is not None else DEFAULT_TAIL_TOLERANCE
        tau = _complex_matrix(args.tau)
        h = tau.shape[0]
        z = _complex_vector(args.z) if args.z else np.zeros(h, dtype=complex)
        ch = ThetaCharacteristic(args.m_prime or [0] * h, args.m_dblprime)
        val = theta_numeric(tau, z, ch, args.radius, tol)
        return RunReport(
            "theta numeric",
            {"tau": [[complex(x) for x in row] for row in tau], "z": [complex(x) for x in z], "characteristic": ch},
            val,
            [],
            exact=False,
        )
    if args.theta_cmd == "quasi":
        tol = args.tolerance if args.tolerance is not None else DEFAULT_COMPARE_TOLERANCE
        samples = quasi_periodicity_samples(args.samples, args.seed)
        worst = max(s["residual"] for s in samples)
        return RunReport(
            "theta quasi",
            {"samples": args.samples, "seed": args.seed, "tolerance": tol},
            {"worst_residual": worst, "samples": samples},
            [],
            exact=False,
            passed=worst < tol,
        )
    raise UsageError("unknown theta subcommand")


def random_period_point(rng: np.random.Generator, h: int = 2) -> tuple[np.ndarray, np.ndarray]:
    a = rng.normal(size=(h, h))
    y = a @ a.T + 0.5 * np.eye(h)
    x = rng.normal(size=(h, h))
    tau = (x + x.T) / 2 + 1j * y
    z = rng.normal(size=h) + 1j * rng.normal(size=h)
    return tau, z


def quasi_periodicity_samples(count: int, seed: int | None) -> list[dict]:
    """Randomised lattice-shift residuals with ``k, k'`` in ``n Z^2``, ``n`` in {4, 8}."""
    rng = np.random.default_rng(seed)
    out = []
    half = [Fraction(0), Fraction(1, 2)]
    for _ in range(count):
        tau, z = random_period_point(rng)
        n = int(rng.choice([4, 8]))
        k = [int(x) * n for x in rng.integers(-1, 2, 2)]
        kp = [int(x) * n for x in rng.integers(-1, 2, 2)]
        ch = ThetaCharacteristic([half[i] for i in rng.integers(0, 2, 2)], [half[i] for i in rng.integers(0, 2, 2)])
        res = quasi_periodicity_residual(tau, z, ch, k, kp)
        out.append({"n": n, "k": k, "kprime": kp, "characteristic": ch, "residual": res})
    return out


def cmd_strata(args) -> RunReport:
    strata = satake_strata(args.g, args.n)
    return RunReport("strata", {"g": args.g, "n": args.n}, {"strata": strata}, [reproduce.ANCHORS["fibers"]])


def cmd_cusps(args) -> RunReport:
    return RunReport("cusps", {"g": args.g, "n": args.n}, enumerate_cusps(args.g, args.n), [])


def cmd_shioda(args) -> RunReport:
    model = shioda_model(args.n)
    check = check_minus_nD_nef(args.n)
    return RunReport(
        "shioda",
        {"n": args.n},
        {"model": model, "minus_nD": check},
        [reproduce.ANCHORS["genus2"]],
        passed=check.nef_on_model,
    )


def cmd_fiber_type(args) -> RunReport:
    return RunReport(
        "fiber-type", {"point_type": args.point_type, "n": args.n}, fiber_type(args.point_type, args.n), [reproduce.ANCHORS["fibers"]]
    )


def cmd_reproduce(args) -> RunReport:
    return reproduce.run_target(args.target, g=args.g, n=args.n, box_radius=args.box_radius)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--box-radius", type=int, default=None)
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="nefcone", description="Nef cones of level-n Voronoi compactifications.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("nef-check", parents=[common], help="test aL - bD for nefness")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=_frac, required=True)
    p.add_argument("--b", type=_frac, required=True)
    p.set_defaults(func=cmd_nef_check)

    p = sub.add_parser("k-class", parents=[common], help="canonical class and its nef verdict")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_k_class)

    p = sub.add_parser("general-type", parents=[common], help="coefficient of L after eliminating D")
    p.add_argument("--g", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--table", action="store_true")
    p.set_defaults(func=cmd_general_type)

    p = sub.add_parser("charts", parents=[common], help="torus chart identities")
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_charts)

    p = sub.add_parser("theta", parents=[common], help="theta exponent calculus and numerics")
    tsub = p.add_subparsers(dest="theta_cmd", required=True)
    t = tsub.add_parser("order", parents=[common])
    t.add_argument("--input", required=True, help="JSON text or @file with characteristics, level, variable, box_radius")
    t = tsub.add_parser("extension", parents=[common])
    t.add_argument("--p", type=int, default=1)
    t.add_argument("--charts", type=int, default=2, help="check charts nu_0m for |m| <= this")
    t.add_argument("--input", default=None)
    t = tsub.add_parser("numeric", parents=[common])
    t.add_argument("--tau", required=True, help="rows separated by ';', entries by ',' (Python complex syntax)")
    t.add_argument("--z", default=None)
    t.add_argument("--m-prime", nargs="+", type=_frac, default=None)
    t.add_argument("--m-dblprime", nargs="+", type=_frac, default=None)
    t.add_argument("--radius", type=int, default=None)
    t = tsub.add_parser("quasi", parents=[common])
    t.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("strata", parents=[common], help="Satake strata")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_strata)

    p = sub.add_parser("shioda", parents=[common], help="Shioda surface intersection model")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_shioda)

    p = sub.add_parser("fiber-type", parents=[common], help="fiber inventory over a boundary point")
    p.add_argument("point_type", choices=["I", "II", "IIIa", "IIIb"])
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_fiber_type)

    p = sub.add_parser("cusps", parents=[common], help="count primitive vectors mod n")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_cusps)

    p = sub.add_parser("reproduce", parents=[common], help="rebuild a main result")
    p.add_argument("target", choices=list(reproduce.TARGETS) + list(reproduce.TARGET_ALIASES))
    p.add_argument("--g", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except (UsageError, ValueError, KeyError, ResourceBoundExceeded) as exc:
        parser.print_usage(sys.stderr)
        print(f"nefcone: error: {exc}", file=sys.stderr)
        return 2
    print(dumps(report) if args.json else render_text(report))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
