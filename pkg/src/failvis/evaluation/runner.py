"""Benchmark run orchestration and persistence.

A run directory holds ``config.json`` (endpoint settings as logged, seed,
counts), ``items.jsonl`` (every per-item result, append-only order), and
``report.json`` / ``report.txt``.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from ..endpoints import ChatEndpoint, ChatMessage, ModelEndpointConfig
from ..errors import EndpointError
from ..vqa.types import (
    CLOSED_TYPES,
    OPEN_TYPES,
    QuestionType,
    VqaPair,
    read_pairs_jsonl,
)
from .closed import run_closed_eval
from .judge import run_open_eval
from .report import EvalReport, aggregate_report, render_text_report, write_items_jsonl
from .symbol_score import score_symbol_code


def eval_symbol_code_item(
    pair: VqaPair, endpoint: ChatEndpoint, media_root: Path | None = None
) -> dict:
    from ..symbols import parse_symbol_code

    item = {
        "pair_id": pair.id,
        "question_type": pair.question_type.value,
        "kind": "symbol_code",
        "expected": pair.symbol_code_answer,
        "response": None,
        "score": None,
        "error": None,
    }
    images: tuple[bytes, ...] = ()
    if media_root is not None:
        images = tuple((media_root / rel).read_bytes() for rel in pair.media)
    try:
        response = endpoint.complete([ChatMessage("user", pair.prompt, images=images)])
    except EndpointError as exc:
        item["error"] = str(exc)
        item["score"] = {"match": False, "reason": "EndpointError"}
        return item
    item["response"] = response
    truth = parse_symbol_code(pair.symbol_code_answer)
    frame_size = pair.frame_size or (640, 480)
    item["score"] = score_symbol_code(response, truth, frame_size).as_dict()
    return item


def run_symbol_code_eval(
    pairs: Sequence[VqaPair],
    endpoint: ChatEndpoint,
    media_root: str | Path | None = None,
    max_workers: int = 1,
) -> list[dict]:
    media_root = Path(media_root) if media_root is not None else None
    if max_workers <= 1:
        return [eval_symbol_code_item(p, endpoint, media_root) for p in pairs]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(lambda p: eval_symbol_code_item(p, endpoint, media_root), pairs))


def evaluate_pairs(
    pairs: Sequence[VqaPair],
    endpoint: ChatEndpoint,
    judge_endpoint: ChatEndpoint | None = None,
    judge_scale: float = 100.0,
    media_root: str | Path | None = None,
    max_workers: int = 1,
) -> tuple[list[dict], EvalReport]:
    """Dispatch each pair to its evaluator and aggregate.

    Open-ended pairs are skipped (with a note) when no judge endpoint is
    configured.
    """
    closed = [p for p in pairs if p.question_type in CLOSED_TYPES]
    open_ended = [p for p in pairs if p.question_type in OPEN_TYPES]
    code = [p for p in pairs if p.question_type is QuestionType.VISUAL_GUIDANCE_CODE]

    items: list[dict] = []
    items.extend(run_closed_eval(closed, endpoint, media_root, max_workers))
    if open_ended:
        if judge_endpoint is None:
            raise EndpointError("open-ended pairs present but no judge endpoint configured")
        items.extend(
            run_open_eval(open_ended, endpoint, judge_endpoint, judge_scale, media_root, max_workers)
        )
    items.extend(run_symbol_code_eval(code, endpoint, media_root, max_workers))
    return items, aggregate_report(items)


def load_bench_pairs(bench_dir: str | Path) -> list[VqaPair]:
    """Read every pair under ``<bench_dir>/bench/*.jsonl`` (or the directory's
    own ``*.jsonl`` files when there is no ``bench/`` subdirectory)."""
    bench_dir = Path(bench_dir)
    side = bench_dir / "bench"
    files = sorted((side if side.is_dir() else bench_dir).glob("*.jsonl"))
    pairs: list[VqaPair] = []
    for f in files:
        pairs.extend(read_pairs_jsonl(f))
    return pairs


def run_benchmark(
    bench_dir: str | Path,
    endpoint: ChatEndpoint,
    endpoint_config: ModelEndpointConfig,
    out_dir: str | Path,
    judge_endpoint: ChatEndpoint | None = None,
    judge_config: ModelEndpointConfig | None = None,
    judge_scale: float = 100.0,
    media_root: str | Path | None = None,
    max_items: int | None = None,
) -> EvalReport:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pairs = load_bench_pairs(bench_dir)
    if max_items is not None:
        pairs = pairs[:max_items]

    started_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
    items, report = evaluate_pairs(
        pairs,
        endpoint,
        judge_endpoint,
        judge_scale,
        media_root,
        max_workers=endpoint_config.max_in_flight,
    )
    # run metadata lives here; the report itself stays a pure function of the
    # per-item log so it can be recomputed bit for bit
    (out_dir / "config.json").write_text(
        json.dumps(
            {
                "bench_dir": str(bench_dir),
                "endpoint": endpoint_config.log_dict(),
                "judge_endpoint": judge_config.log_dict() if judge_config else None,
                "judge_scale": judge_scale,
                "n_pairs": len(pairs),
                "started_at": started_at,
                "finished_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            },
            indent=2,
            sort_keys=True,
        )
    )
    write_items_jsonl(items, out_dir / "items.jsonl")
    (out_dir / "report.json").write_text(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    (out_dir / "report.txt").write_text(render_text_report(report) + "\n")
    return report
