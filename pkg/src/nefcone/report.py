"""Run reports and deterministic JSON serialization."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


def jsonable(obj: Any) -> Any:
    """Convert library values to plain JSON; rationals become ``"p/q"`` strings."""
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [jsonable(x) for x in obj]
        return sorted(items, key=json.dumps) if isinstance(obj, (set, frozenset)) else items
    if hasattr(obj, "item"):  # numpy scalar
        return jsonable(obj.item())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2)


@dataclass
class RunReport:
    command: str
    inputs: dict
    outputs: Any
    citations: list[str] = field(default_factory=list)
    exact: bool = True
    passed: bool = True

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "citations": self.citations,
            "exact": self.exact,
            "passed": self.passed,
        }


def render_text(obj: Any, indent: int = 0) -> str:
    """Plain-text view of the JSON form."""
    data = jsonable(obj)
    pad = "  " * indent
    lines: list[str] = []
    if isinstance(data, dict):
        for k in sorted(data):
            v = data[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
    elif isinstance(data, list):
        if not any(isinstance(x, dict) for x in data):
            lines.append(pad + json.dumps(data))
        else:
            for x in data:
                lines.append(f"{pad}-")
                lines.append(render_text(x, indent + 1))
    else:
        lines.append(pad + json.dumps(data))
    return "\n".join(lines)
