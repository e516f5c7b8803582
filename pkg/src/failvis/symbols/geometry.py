"""Geometric queries over symbol sets: bounding boxes and target points."""

from __future__ import annotations

from ..errors import EmptySetError, NoTargetError
from ..geometry import Rect
from .style import GLYPH_RADIUS
from .types import SymbolInstance, SymbolKind, SymbolSet


def symbol_bbox(sset: SymbolSet, glyph_radius: int = GLYPH_RADIUS) -> Rect:
    """Minimal axis-aligned rectangle covering every symbol footprint.

    Each anchor point (start, and end where present) is padded by the fixed
    glyph radius, which bounds every rendered glyph; shafts and dashes lie in
    the hull of their padded endpoints.  The rectangle is clamped at the frame
    origin (coordinates never go negative); the caller clamps the far edge
    against its frame when needed.
    """
    if not sset.symbols:
        raise EmptySetError("bounding box of an empty symbol set")
    xs, ys = [], []
    for sym in sset.symbols:
        points = [sym.start] + ([sym.end] if sym.end is not None else [])
        for x, y in points:
            xs.extend((x - glyph_radius, x + glyph_radius))
            ys.extend((y - glyph_radius, y + glyph_radius))
    return Rect(max(0, min(xs)), max(0, min(ys)), max(xs), max(ys))


def target_point(sym: SymbolInstance) -> tuple[int, int]:
    """Pixel the symbol directs the end-effector toward.

    Straight arrows and dual crosshairs point at their end; a crosshair marks
    its own position.  State symbols and rotation arrows carry no target.
    """
    if sym.kind is SymbolKind.CROSSHAIR:
        return sym.start
    if sym.kind in (SymbolKind.STRAIGHT_ARROW, SymbolKind.DUAL_CROSSHAIRS):
        if sym.end is None:
            raise NoTargetError(f"{sym.kind.value} without end point")
        return sym.end
    raise NoTargetError(f"{sym.kind.value} has no target point")
