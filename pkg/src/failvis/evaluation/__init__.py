"""Benchmark evaluation: closed/open scoring, symbol-code matching, reports."""

from .closed import (
    closed_accuracy,
    closed_prompt_text,
    eval_closed_item,
    extract_choice,
    run_closed_eval,
)
from .judge import (
    DIMENSIONS,
    JUDGE_PROMPT,
    JudgeScore,
    eval_open_item,
    judge_answer,
    parse_judge_response,
    run_open_eval,
)
from .report import (
    EvalReport,
    aggregate_report,
    read_items_jsonl,
    render_text_report,
    write_items_jsonl,
)
from .runner import (
    eval_symbol_code_item,
    evaluate_pairs,
    load_bench_pairs,
    run_benchmark,
    run_symbol_code_eval,
)
from .symbol_score import POINT_TOLERANCE_FRACTION, SymbolCodeScore, score_symbol_code

__all__ = [
    "DIMENSIONS",
    "EvalReport",
    "JUDGE_PROMPT",
    "JudgeScore",
    "POINT_TOLERANCE_FRACTION",
    "SymbolCodeScore",
    "aggregate_report",
    "closed_accuracy",
    "closed_prompt_text",
    "eval_closed_item",
    "eval_open_item",
    "eval_symbol_code_item",
    "evaluate_pairs",
    "extract_choice",
    "judge_answer",
    "load_bench_pairs",
    "parse_judge_response",
    "read_items_jsonl",
    "render_text_report",
    "run_benchmark",
    "run_closed_eval",
    "run_open_eval",
    "run_symbol_code_eval",
    "score_symbol_code",
    "write_items_jsonl",
]
