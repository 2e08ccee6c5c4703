"""JSON metric files: ``{"n", "h", "A", "H", "formal_functions"}``."""
from __future__ import annotations

import json
from typing import IO

from .symexpr import ExprParseError, parse_expr
from .walker import WalkerMetric


class MetricFormatError(ValueError):
    pass


def metric_from_dict(data: dict) -> WalkerMetric:
    if not isinstance(data, dict):
        raise MetricFormatError("metric file must contain a JSON object")
    try:
        n = int(data["n"])
    except (KeyError, TypeError, ValueError):
        raise MetricFormatError("metric needs an integer field 'n'") from None
    functions = list(data.get("formal_functions", []))
    names = functions or None

    def ex(text):
        if not isinstance(text, (str, int)):
            raise MetricFormatError(f"expressions must be strings, got {text!r}")
        return parse_expr(str(text), names)

    if "H" not in data:
        raise MetricFormatError("metric needs a field 'H'")
    H = ex(data["H"])
    h = data.get("h")
    A = data.get("A")
    h_e = None if h is None else [[ex(x) for x in row] for row in h]
    A_e = None if A is None else [ex(x) for x in A]
    return WalkerMetric.build(n, H, h=h_e, A=A_e, functions=functions)


def metric_to_dict(m: WalkerMetric) -> dict:
    names = list(m.functions) or None
    s = lambda e: e.to_string(names)  # noqa: E731
    return {
        "n": m.n,
        "h": [[s(x) for x in row] for row in m.h],
        "A": [s(x) for x in m.A],
        "H": s(m.H),
        "formal_functions": list(m.functions),
    }


def load_metric(fp: IO[str]) -> WalkerMetric:
    try:
        data = json.load(fp)
    except json.JSONDecodeError as exc:
        raise MetricFormatError(f"invalid JSON: {exc}") from None
    return metric_from_dict(data)


def loads_metric(text: str) -> WalkerMetric:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MetricFormatError(f"invalid JSON: {exc}") from None
    return metric_from_dict(data)


def dumps_metric(m: WalkerMetric) -> str:
    return json.dumps(metric_to_dict(m), indent=2, sort_keys=True)


__all__ = ["MetricFormatError", "ExprParseError", "metric_from_dict", "metric_to_dict",
           "load_metric", "loads_metric", "dumps_metric"]
