"""JSON instance files and CSV result rows.

Values are written as exact ``"p/q"`` strings. On input, strings such as
``"1/3"`` or ``"0.25"`` and bare JSON numbers are all read exactly: JSON
decimals are parsed straight into :class:`~fractions.Fraction`.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Any

import jsonschema

from .core import (
    FullProfile,
    Instance,
    Matching,
    OptimalCandidate,
    OrdinalProfile,
    TopValues,
    Truncated,
    TruncatedProfile,
    ValuationProfile,
    as_rat,
    fmt_ratio,
)


class SchemaError(ValueError):
    """An instance file does not follow the documented format."""


_VALUE = {
    "oneOf": [
        {"type": "string", "pattern": r"^\s*[+-]?(\d+(/\d+)?|\d*\.\d+|\d+\.\d*)\s*$"},
        {"type": "number"},
    ]
}
_ROW = {"type": "array", "items": _VALUE}
_MATRIX = {"type": "array", "items": _ROW}


def _pred(kind: str, required: dict) -> dict:
    return {
        "type": "object",
        "properties": {"type": {"const": kind}, **required},
        "required": ["type", *required],
        "additionalProperties": False,
    }


INSTANCE_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "properties": {
        "flavor": {"enum": ["voting", "matching"]},
        "n": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 1},
        "rankings": {"type": "array", "minItems": 1, "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
        "prediction": {
            "oneOf": [
                _pred("optimal_candidate", {"candidate": {"type": "integer", "minimum": 0}}),
                _pred("full", {"values": _MATRIX}),
                _pred("top_values", {"values": _ROW}),
                _pred("truncated", {"k": {"type": "integer", "minimum": 1}, "values": _MATRIX}),
            ]
        },
        "truth": _MATRIX,
        "meta": {"type": "object"},
    },
    "required": ["flavor", "n", "m", "rankings", "prediction"],
    "additionalProperties": False,
}

_VALIDATOR = jsonschema.Draft7Validator(INSTANCE_SCHEMA)


def _fmt(x) -> str:
    return fmt_ratio(Fraction(x))


def _rows(matrix) -> list[list[str]]:
    return [[_fmt(v) for v in row] for row in matrix]


def instance_to_dict(inst: Instance) -> dict[str, Any]:
    p = inst.prediction
    if isinstance(p, OptimalCandidate):
        pred = {"type": "optimal_candidate", "candidate": p.index}
    elif isinstance(p, FullProfile):
        pred = {"type": "full", "values": _rows(p.profile.values)}
    elif isinstance(p, TopValues):
        pred = {"type": "top_values", "values": [_fmt(v) for v in p.values]}
    else:
        pred = {"type": "truncated", "k": p.profile.k, "values": _rows(p.profile.values)}
    doc: dict[str, Any] = {
        "flavor": inst.flavor,
        "n": inst.n,
        "m": inst.m,
        "rankings": [list(r) for r in inst.ordinal.rankings],
        "prediction": pred,
    }
    if inst.truth is not None:
        doc["truth"] = _rows(inst.truth.values)
    if inst.meta:
        doc["meta"] = inst.meta
    return doc


def render_instance(inst: Instance) -> str:
    """Canonical text: fixed key order, two-space indent, trailing newline."""
    return json.dumps(instance_to_dict(inst), indent=2, ensure_ascii=False) + "\n"


def instance_from_dict(doc: Any) -> Instance:
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise SchemaError(f"{where}: {e.message}")
    n, m = doc["n"], doc["m"]
    rankings = doc["rankings"]
    if len(rankings) != n or any(len(r) != m for r in rankings):
        raise SchemaError(f"rankings must be {n} lists of length {m}")
    try:
        ordinal = OrdinalProfile(rankings)
        p = doc["prediction"]
        kind = p["type"]
        if kind == "optimal_candidate":
            pred = OptimalCandidate(p["candidate"])
        elif kind == "full":
            pred = FullProfile(ValuationProfile([[as_rat(v) for v in row] for row in p["values"]]))
        elif kind == "top_values":
            pred = TopValues(tuple(as_rat(v) for v in p["values"]))
        else:
            pred = Truncated(TruncatedProfile(p["k"], [[as_rat(v) for v in row] for row in p["values"]]))
        truth = None
        if "truth" in doc:
            truth = ValuationProfile([[as_rat(v) for v in row] for row in doc["truth"]])
        return Instance(doc["flavor"], ordinal, pred, truth, dict(doc.get("meta", {})))
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise SchemaError(str(exc)) from exc


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    return instance_from_dict(doc)


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def save_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_instance(inst))


# --------------------------------------------------------------------------
# result rows


@dataclass(frozen=True)
class ResultRow:
    """One CSV line. Empty strings mark fields that do not apply.

    ``bound_satisfied`` is ``"1"`` exactly when ``ratio <= bound``, ``"0"``
    when the bound is violated and empty when no bound applies.
    """

    instance_id: str
    mechanism: str
    param: str
    outcome: str
    true_welfare: str
    optimal_welfare: str
    ratio: str
    ratio_class: str
    eta: str
    rho: str
    bound: str
    bound_satisfied: str


RESULT_COLUMNS = tuple(f.name for f in fields(ResultRow))


def fmt_outcome(outcome) -> str:
    if isinstance(outcome, Matching):
        return " ".join(str(x) for x in outcome.item_of)
    return str(outcome)


def make_row(instance_id, mechanism, param, outcome, true_welfare, optimal_welfare, ratio, ratio_class, eta=None, rho=None, bound=None) -> ResultRow:
    def opt(x):
        return "" if x is None else fmt_ratio(x)

    satisfied = "" if bound is None else ("1" if ratio <= bound else "0")
    return ResultRow(
        str(instance_id),
        mechanism,
        param,
        fmt_outcome(outcome),
        fmt_ratio(true_welfare),
        fmt_ratio(optimal_welfare),
        fmt_ratio(ratio),
        ratio_class,
        opt(eta),
        opt(rho),
        opt(bound),
        satisfied,
    )


def rows_to_csv(rows, header: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(RESULT_COLUMNS)
    for r in rows:
        w.writerow([getattr(r, c) for c in RESULT_COLUMNS])
    return buf.getvalue()
