"""Aggregation of per-item results into the benchmark report.

Aggregation is a pure function of the per-item dicts, so re-running it over a
persisted ``items.jsonl`` reproduces the report exactly.  Split averages are
item-weighted; the overall average is the unweighted mean of the two split
averages, with an item-weighted variant reported alongside (the two differ
whenever the splits have different sizes).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import EmptyResults
from ..vqa.types import CLOSED_TYPES, OPEN_TYPES, QuestionType

_CLOSED_VALUES = {t.value for t in CLOSED_TYPES}
_OPEN_VALUES = {t.value for t in OPEN_TYPES}


@dataclass(frozen=True)
class EvalReport:
    per_type: dict
    lite_avg: float | None
    hard_avg: float | None
    overall_avg: float | None
    overall_avg_item_weighted: float | None
    symbol_code: dict | None
    n_items: int
    n_errored: int

    def as_dict(self) -> dict:
        return {
            "per_type": self.per_type,
            "lite_avg": self.lite_avg,
            "hard_avg": self.hard_avg,
            "overall_avg": self.overall_avg,
            "overall_avg_item_weighted": self.overall_avg_item_weighted,
            "symbol_code": self.symbol_code,
            "n_items": self.n_items,
            "n_errored": self.n_errored,
        }


def _type_rows(items: Sequence[dict]) -> dict:
    rows: dict[str, dict] = {}
    for item in items:
        qtype = item["question_type"]
        row = rows.setdefault(
            qtype, {"n": 0, "n_scored": 0, "n_errored": 0, "accuracy": None, "_sum": 0.0}
        )
        row["n"] += 1
        if item.get("error"):
            row["n_errored"] += 1
        if item["kind"] == "closed":
            # errored closed items stay in the denominator
            row["n_scored"] += 1
            row["_sum"] += 100.0 if item["correct"] else 0.0
        elif item["kind"] == "open":
            if item.get("judge") is not None:
                row["n_scored"] += 1
                row["_sum"] += item["judge"]["total"]
        elif item["kind"] == "symbol_code":
            if item.get("score") is not None:
                row["n_scored"] += 1
                row["_sum"] += 100.0 if item["score"]["match"] else 0.0
    for row in rows.values():
        if row["n_scored"]:
            row["accuracy"] = row["_sum"] / row["n_scored"]
        del row["_sum"]
    return rows


def _split_average(rows: dict, type_values: set[str]) -> tuple[float | None, int]:
    """Item-weighted average over one split; returns (avg, scored item count)."""
    total, n = 0.0, 0
    for qtype, row in rows.items():
        if qtype in type_values and row["accuracy"] is not None:
            total += row["accuracy"] * row["n_scored"]
            n += row["n_scored"]
    return (total / n if n else None), n


def aggregate_report(items: Sequence[dict]) -> EvalReport:
    items = list(items)
    if not items:
        raise EmptyResults("no evaluation items to aggregate")
    rows = _type_rows(items)

    lite_avg, lite_n = _split_average(rows, _CLOSED_VALUES)
    hard_avg, hard_n = _split_average(rows, _OPEN_VALUES)
    split_avgs = [a for a in (lite_avg, hard_avg) if a is not None]
    overall = sum(split_avgs) / len(split_avgs) if split_avgs else None
    weighted = None
    if lite_n + hard_n:
        weighted = ((lite_avg or 0.0) * lite_n + (hard_avg or 0.0) * hard_n) / (lite_n + hard_n)

    symbol = None
    code_value = QuestionType.VISUAL_GUIDANCE_CODE.value
    if code_value in rows:
        row = rows[code_value]
        symbol = {
            "n": row["n"],
            "n_scored": row["n_scored"],
            "match_rate": row["accuracy"],
        }

    per_type = {
        qtype: {k: v for k, v in row.items()}
        for qtype, row in sorted(rows.items())
        if qtype != code_value
    }
    return EvalReport(
        per_type=per_type,
        lite_avg=lite_avg,
        hard_avg=hard_avg,
        overall_avg=overall,
        overall_avg_item_weighted=weighted,
        symbol_code=symbol,
        n_items=len(items),
        n_errored=sum(1 for i in items if i.get("error")),
    )


def render_text_report(report: EvalReport) -> str:
    lines = [f"{'question type':<28} {'n':>5} {'scored':>6} {'err':>4} {'accuracy':>9}"]
    for qtype, row in report.per_type.items():
        acc = f"{row['accuracy']:8.2f}%" if row["accuracy"] is not None else "      --"
        lines.append(
            f"{qtype:<28} {row['n']:>5} {row['n_scored']:>6} {row['n_errored']:>4} {acc}"
        )
    lines.append("-" * 56)

    def fmt(x):
        return f"{x:.2f}%" if x is not None else "--"

    lines.append(f"closed-ended (lite) average: {fmt(report.lite_avg)}")
    lines.append(f"open-ended (hard) average:   {fmt(report.hard_avg)}")
    lines.append(f"overall (mean of splits):    {fmt(report.overall_avg)}")
    lines.append(f"overall (item weighted):     {fmt(report.overall_avg_item_weighted)}")
    if report.symbol_code:
        lines.append(
            f"symbol-code match rate:      {fmt(report.symbol_code['match_rate'])} "
            f"({report.symbol_code['n_scored']}/{report.symbol_code['n']})"
        )
    lines.append(f"items: {report.n_items}, errored: {report.n_errored}")
    return "\n".join(lines)


def write_items_jsonl(items: Iterable[dict], path: str | Path) -> None:
    with open(path, "w") as fh:
        for item in items:
            fh.write(json.dumps(item, sort_keys=True) + "\n")


def read_items_jsonl(path: str | Path) -> list[dict]:
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                out.append(json.loads(line))
    return out
