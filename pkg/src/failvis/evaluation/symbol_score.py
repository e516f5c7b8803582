"""Scoring for generated symbol code against a reference symbol set.

A generated code block matches when it parses, has the same multiset of
symbol kinds, every symbol's categorical attributes (color, rotation
direction, gripper state, arm) line up under the minimal-total-distance
assignment within each kind, and every matched anchor point lies within 10%
of the frame diagonal of its reference point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations

from ..errors import SymbolSemanticError, SymbolSyntaxError
from ..symbols import SymbolInstance, SymbolSet, find_symbol_code, parse_symbol_code

POINT_TOLERANCE_FRACTION = 0.10


@dataclass(frozen=True)
class SymbolCodeScore:
    match: bool
    reason: str | None = None
    point_errors: tuple[float, ...] = ()
    tolerance: float = 0.0

    def as_dict(self) -> dict:
        return {
            "match": self.match,
            "reason": self.reason,
            "point_errors": list(self.point_errors),
            "tolerance": self.tolerance,
        }


def _attrs(sym: SymbolInstance) -> tuple:
    return (sym.color, sym.rotation_dir, sym.gripper_state, sym.arm)


def _point_cost(a: SymbolInstance, b: SymbolInstance) -> list[float]:
    errors = [math.dist(a.start, b.start)]
    if a.end is not None and b.end is not None:
        errors.append(math.dist(a.end, b.end))
    return errors


def _best_assignment(
    truth_group: list[SymbolInstance], gen_group: list[SymbolInstance]
) -> list[tuple[SymbolInstance, SymbolInstance]] | None:
    """Minimal-total-distance pairing among attribute-equal candidates.

    Returns ``None`` when no attribute-respecting perfect matching exists.
    Groups are small (one frame of hand-drawn symbols), so brute force is fine.
    """
    best, best_cost = None, math.inf
    for perm in permutations(gen_group):
        if any(_attrs(t) != _attrs(g) for t, g in zip(truth_group, perm)):
            continue
        cost = sum(sum(_point_cost(t, g)) for t, g in zip(truth_group, perm))
        if cost < best_cost:
            best, best_cost = list(zip(truth_group, perm)), cost
    return best


def score_symbol_code(
    generated: str, truth: SymbolSet, frame_size: tuple[int, int]
) -> SymbolCodeScore:
    width, height = frame_size
    tolerance = POINT_TOLERANCE_FRACTION * math.hypot(width, height)
    try:
        parsed = parse_symbol_code(generated, frame_size=frame_size)
    except (SymbolSyntaxError, SymbolSemanticError):
        block = find_symbol_code(generated)
        if block is None:
            return SymbolCodeScore(False, "ParseFail", tolerance=tolerance)
        try:
            parsed = parse_symbol_code(block, frame_size=frame_size)
        except (SymbolSyntaxError, SymbolSemanticError):
            return SymbolCodeScore(False, "ParseFail", tolerance=tolerance)

    if parsed.purpose is not truth.purpose:
        return SymbolCodeScore(False, "PurposeMismatch", tolerance=tolerance)

    by_kind_truth: dict = {}
    by_kind_gen: dict = {}
    for sym in truth.symbols:
        by_kind_truth.setdefault(sym.kind, []).append(sym)
    for sym in parsed.symbols:
        by_kind_gen.setdefault(sym.kind, []).append(sym)
    if {k: len(v) for k, v in by_kind_truth.items()} != {
        k: len(v) for k, v in by_kind_gen.items()
    }:
        return SymbolCodeScore(False, "KindMismatch", tolerance=tolerance)

    all_errors: list[float] = []
    for kind, truth_group in by_kind_truth.items():
        assignment = _best_assignment(truth_group, by_kind_gen[kind])
        if assignment is None:
            return SymbolCodeScore(False, "AttributeMismatch", tolerance=tolerance)
        for t, g in assignment:
            all_errors.extend(_point_cost(t, g))
    if any(err > tolerance for err in all_errors):
        return SymbolCodeScore(
            False, "PointOutOfTolerance", tuple(all_errors), tolerance
        )
    return SymbolCodeScore(True, None, tuple(all_errors), tolerance)
