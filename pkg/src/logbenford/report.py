"""CSV and JSON emission.  Floats carry 12 significant digits in both formats."""
from __future__ import annotations

import io
import json
from dataclasses import asdict
from typing import Any, Sequence

from .asymptotics import AsymptoticCheck
from .density import DensityReport, OscillationStats
from .tables import MODES, TableResult

CSV_HEADER = ("x", "count", "raw_sum", "norm_loglog", "norm_mertens", "expected")


def fmt(v: float | None) -> str:
    if v is None:
        return "unknown"
    return format(v, ".12g")


def num(v: float | None) -> float | None:
    """The JSON-side value: the same 12 significant digits the CSV prints."""
    return None if v is None else float(fmt(v))


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]], comments: Sequence[str] = ()) -> str:
    out = io.StringIO()
    for line in comments:
        out.write(f"# {line}\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) if isinstance(v, float) or v is None else str(v) for v in row) + "\n")
    return out.getvalue()


def _json(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def density_csv(report: DensityReport) -> str:
    rows = [
        (r.x, r.count, r.raw_sum, r.norm_loglog, r.norm_mertens, report.expected)
        for r in report.rows
    ]
    return _csv(CSV_HEADER, rows)


def density_dict(report: DensityReport) -> dict[str, Any]:
    return {
        "spec": str(report.spec),
        "digit_string": str(report.ds),
        "base": report.ds.base,
        "rows": [
            {
                "x": r.x,
                "count": r.count,
                "raw_sum": num(r.raw_sum),
                "norm_loglog": num(r.norm_loglog),
                "norm_mertens": num(r.norm_mertens),
                "expected": num(report.expected),
            }
            for r in report.rows
        ],
        "expected": num(report.expected),
        "fitted_offset": num(report.fitted_offset),
        "fitted_slope": num(report.fitted_slope),
    }


def density_json(report: DensityReport) -> str:
    return _json(density_dict(report))


ASYM_HEADER = ("b", "S", "n", "lhs_log", "rhs_log", "exponent", "rel_error")


def asym_csv(checks: Sequence[AsymptoticCheck]) -> str:
    return _csv(ASYM_HEADER, [tuple(asdict(c).values()) for c in checks])


def asym_json(checks: Sequence[AsymptoticCheck]) -> str:
    rows = [{k: num(v) if isinstance(v, float) else v for k, v in asdict(c).items()} for c in checks]
    return _json({"kind": "asymptotic", "rows": rows})


def oscillation_csv(stats: OscillationStats) -> str:
    comments = [f"min_ratio={fmt(stats.min_ratio)} max_ratio={fmt(stats.max_ratio)}"]
    return _csv(("x", "ratio"), list(zip(stats.x_values, stats.ratios)), comments)


def oscillation_json(stats: OscillationStats, extra: dict[str, Any] | None = None) -> str:
    obj = dict(extra or {})
    obj.update(
        {
            "rows": [{"x": x, "ratio": num(r)} for x, r in zip(stats.x_values, stats.ratios)],
            "min_ratio": num(stats.min_ratio),
            "max_ratio": num(stats.max_ratio),
        }
    )
    return _json(obj)


def table_csv(result: TableResult) -> str:
    best = result.best_mode
    comments = [
        f"{result.table.id}: {result.table.title}",
        f"matching normalization: {best} (max |diff| {fmt(result.max_deviation(best))}, "
        f"all cells by truncation: {'yes' if result.all_truncated(best) else 'no'})",
    ]
    header = ("d", "x", "published", "norm_loglog", "norm_mertens", "diff_loglog", "diff_mertens")
    rows = [
        (c.d, c.x, c.published, c.loglog, c.mertens, c.loglog - c.published, c.mertens - c.published)
        for c in result.cells
    ]
    rows += [
        (d, "expected", result.table.expected[d], v, v, v - result.table.expected[d], v - result.table.expected[d])
        for d, v in result.expected.items()
    ]
    return _csv(header, rows, comments)


def table_json(result: TableResult) -> str:
    best = result.best_mode
    return _json(
        {
            "table": result.table.id,
            "title": result.table.title,
            "matching_normalization": best,
            "max_deviation": {m: num(result.max_deviation(m)) for m in MODES},
            "all_truncated": {m: result.all_truncated(m) for m in MODES},
            "cells": [
                {
                    "d": c.d,
                    "x": c.x,
                    "published": c.published,
                    "norm_loglog": num(c.loglog),
                    "norm_mertens": num(c.mertens),
                }
                for c in result.cells
            ],
            "expected": [
                {"d": d, "published": result.table.expected[d], "computed": num(v)}
                for d, v in result.expected.items()
            ],
        }
    )
