"""Symbol and symbol-set validation.

Violations are returned as data rather than raised: the annotation API
surfaces them verbatim to the drawing UI, and the codec turns the error-level
ones into :class:`~failvis.errors.SymbolSemanticError` when parsing.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..errors import ValidationError
from .types import (
    ARM_REQUIRED_KINDS,
    END_REQUIRED_KINDS,
    Arm,
    SymbolInstance,
    SymbolKind,
    SymbolSet,
)


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    symbol_index: int | None = None
    severity: Severity = Severity.ERROR

    def as_dict(self) -> dict:
        return {
            "code": self.code,
            "message": self.message,
            "symbol_index": self.symbol_index,
            "severity": self.severity.value,
        }


def _field_rules(sym: SymbolInstance) -> list[tuple[str, bool, bool]]:
    """(field name, present, allowed-for-kind) triples; required fields listed first."""
    k = sym.kind
    return [
        ("color", sym.color is not None, k is SymbolKind.STRAIGHT_ARROW),
        ("rotation_dir", sym.rotation_dir is not None, k is SymbolKind.SEMI_CIRCULAR_ARROW),
        ("gripper_state", sym.gripper_state is not None, k is SymbolKind.GRIPPER_STATE),
        ("end", sym.end is not None, k in END_REQUIRED_KINDS),
    ]


def instance_violations(sym: SymbolInstance, index: int | None = None) -> list[Violation]:
    """Check the conditional-field rules of a single symbol (no frame bounds)."""
    out: list[Violation] = []
    for name, present, allowed in _field_rules(sym):
        if allowed and not present:
            out.append(
                Violation(
                    "MissingField",
                    f"{sym.kind.value} requires {name}",
                    index,
                )
            )
        elif present and not allowed:
            out.append(
                Violation(
                    "ForbiddenField",
                    f"{sym.kind.value} does not take {name}",
                    index,
                )
            )
    if sym.magnitude is not None and sym.kind is not SymbolKind.STRAIGHT_ARROW:
        out.append(
            Violation("ForbiddenField", f"{sym.kind.value} does not take magnitude", index)
        )
    if sym.kind is SymbolKind.STRAIGHT_ARROW and sym.end is not None and sym.end == sym.start:
        out.append(Violation("DegenerateArrow", "straight arrow start equals end", index))
    if sym.kind in ARM_REQUIRED_KINDS and sym.arm is Arm.NONE:
        out.append(
            Violation("MissingArm", f"{sym.kind.value} must address a left or right arm", index)
        )
    if sym.frame_index < 0:
        out.append(Violation("NegativeFrameIndex", "frame index must be >= 0", index))
    return out


def _bounds_violations(
    sym: SymbolInstance, index: int, frame_width: int, frame_height: int
) -> list[Violation]:
    out: list[Violation] = []
    points = [("start", sym.start)] + ([("end", sym.end)] if sym.end is not None else [])
    for name, (x, y) in points:
        if not (0 <= x < frame_width and 0 <= y < frame_height):
            out.append(
                Violation(
                    "CoordinateOutOfBounds",
                    f"{name}=({x},{y}) outside {frame_width}x{frame_height} frame",
                    index,
                )
            )
    return out


def set_violations(sset: SymbolSet) -> list[Violation]:
    """Set-level rules: shared frame index, per-arm cardinality, color reuse."""
    out: list[Violation] = []
    state_seen: dict[tuple[SymbolKind, Arm], int] = {}
    arrow_colors_seen: set[tuple[Arm, str]] = set()
    for i, sym in enumerate(sset.symbols):
        if sym.frame_index != sset.frame_index:
            out.append(
                Violation(
                    "FrameIndexMismatch",
                    f"symbol frame {sym.frame_index} != set frame {sset.frame_index}",
                    i,
                )
            )
        if sym.kind in (SymbolKind.GRIPPER_STATE, SymbolKind.PROHIBITION):
            key = (sym.kind, sym.arm)
            if key in state_seen:
                out.append(
                    Violation(
                        "DuplicateStateSymbol",
                        f"more than one {sym.kind.value} for arm={sym.arm.value}",
                        i,
                    )
                )
            state_seen[key] = i
        if sym.kind is SymbolKind.STRAIGHT_ARROW and sym.color is not None:
            key2 = (sym.arm, sym.color.value)
            if key2 in arrow_colors_seen:
                # Allowed, but usually a drawing slip: one axis, two arrows.
                out.append(
                    Violation(
                        "DuplicateArrowColor",
                        f"multiple {sym.color.value} arrows for arm={sym.arm.value}",
                        i,
                        Severity.WARNING,
                    )
                )
            arrow_colors_seen.add(key2)
    return out


def validate_symbols(
    sset: SymbolSet, frame_width: int, frame_height: int
) -> list[Violation]:
    """Full validation of a symbol set against a frame of the given size.

    Returns an empty list iff every instance-level and set-level invariant
    holds.  Warning-severity findings do not make a set invalid.
    """
    if frame_width <= 0 or frame_height <= 0:
        raise ValueError("frame dimensions must be positive")
    out: list[Violation] = []
    for i, sym in enumerate(sset.symbols):
        out.extend(instance_violations(sym, i))
        out.extend(_bounds_violations(sym, i, frame_width, frame_height))
    out.extend(set_violations(sset))
    return out


def errors_only(violations: list[Violation]) -> list[Violation]:
    return [v for v in violations if v.severity is Severity.ERROR]


def check_valid(sset: SymbolSet, frame_width: int, frame_height: int) -> None:
    """Raise :class:`ValidationError` when error-level violations exist."""
    bad = errors_only(validate_symbols(sset, frame_width, frame_height))
    if bad:
        raise ValidationError(
            "; ".join(v.message for v in bad),
            violations=bad,
        )
