"""Deterministic rasterization of symbol sets onto RGB frames.

Frames travel through the toolkit as ``numpy`` arrays of shape ``(H, W, 3)``
and dtype ``uint8``.  Rendering never touches pixels outside a symbol's
footprint and the same inputs always produce byte-identical output; an empty
set is the identity transform.
"""

from __future__ import annotations

import io
import math

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from ..errors import ImageFormatError, ValidationError
from .style import DEFAULT_STYLE, RenderStyle
from .types import GripperState, RotationDir, SymbolInstance, SymbolKind, SymbolSet
from .validation import errors_only, validate_symbols

_FONT = ImageFont.load_default()


def check_frame(frame: np.ndarray) -> np.ndarray:
    if not isinstance(frame, np.ndarray):
        raise ImageFormatError(f"frame must be a numpy array, got {type(frame).__name__}")
    if frame.ndim != 3 or frame.shape[2] != 3 or frame.dtype != np.uint8:
        raise ImageFormatError(f"frame must be uint8 (H, W, 3), got {frame.dtype} {frame.shape}")
    return frame


def encode_png(frame: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(check_frame(frame)).save(buf, format="PNG")
    return buf.getvalue()


def decode_png(data: bytes) -> np.ndarray:
    try:
        img = Image.open(io.BytesIO(data)).convert("RGB")
    except Exception as exc:
        raise ImageFormatError(f"cannot decode image: {exc}") from exc
    return np.asarray(img)


def _unit(dx: float, dy: float) -> tuple[float, float]:
    norm = math.hypot(dx, dy)
    if norm == 0:
        return (1.0, 0.0)
    return (dx / norm, dy / norm)


def _arrow_head(draw: ImageDraw.ImageDraw, tip, direction, length: int, rgb) -> None:
    ux, uy = direction
    bx, by = tip[0] - ux * length, tip[1] - uy * length
    px, py = -uy, ux
    half = length * 0.6
    pts = [
        (round(tip[0]), round(tip[1])),
        (round(bx + px * half), round(by + py * half)),
        (round(bx - px * half), round(by - py * half)),
    ]
    draw.polygon(pts, fill=rgb)


def _dashed_line(draw, a, b, style: RenderStyle, rgb) -> None:
    ax, ay = a
    bx, by = b
    total = math.hypot(bx - ax, by - ay)
    if total == 0:
        return
    ux, uy = (bx - ax) / total, (by - ay) / total
    pos = 0.0
    while pos < total:
        seg_end = min(pos + style.dash_on, total)
        draw.line(
            [
                (round(ax + ux * pos), round(ay + uy * pos)),
                (round(ax + ux * seg_end), round(ay + uy * seg_end)),
            ],
            fill=rgb,
            width=style.line_width,
        )
        pos = seg_end + style.dash_off


def _draw_crosshair(draw, center, style: RenderStyle) -> None:
    x, y = center
    r = style.glyph_radius
    inner = r * 2 // 3
    rgb = style.marker_rgb
    draw.ellipse([x - inner, y - inner, x + inner, y + inner], outline=rgb, width=style.line_width)
    draw.line([(x - r, y), (x + r, y)], fill=rgb, width=style.line_width)
    draw.line([(x, y - r), (x, y + r)], fill=rgb, width=style.line_width)


def _draw_straight_arrow(draw, sym: SymbolInstance, style: RenderStyle) -> None:
    rgb = style.axis_rgb(sym.color)
    draw.line([sym.start, sym.end], fill=rgb, width=style.line_width)
    direction = _unit(sym.end[0] - sym.start[0], sym.end[1] - sym.start[1])
    _arrow_head(draw, sym.end, direction, style.arrow_head_len, rgb)


def _draw_semi_circular_arrow(draw, sym: SymbolInstance, style: RenderStyle) -> None:
    x, y = sym.start
    # arc radius leaves room for the arrowhead's half-width so the whole
    # glyph stays inside the fixed footprint radius
    r = style.glyph_radius - 8
    rgb = style.marker_rgb
    box = [x - r, y - r, x + r, y + r]
    # 270-degree arc from the top of the circle to its left point (PIL angles
    # run clockwise from 3 o'clock in image coordinates).
    draw.arc(box, start=-90, end=180, fill=rgb, width=style.line_width)
    if sym.rotation_dir is RotationDir.CLOCKWISE:
        tip = (x - r, y)          # left point, moving upward = clockwise
        direction = (0.0, -1.0)
    else:
        tip = (x, y - r)          # top point, moving leftward = counterclockwise
        direction = (-1.0, 0.0)
    _arrow_head(draw, tip, direction, style.arrow_head_len, rgb)


def _draw_badge(draw, sym: SymbolInstance, style: RenderStyle) -> None:
    x, y = sym.start
    on = sym.gripper_state is GripperState.ON
    fill = style.on_fill if on else style.off_fill
    label = "ON" if on else "OFF"
    box = [x - style.badge_half_w, y - style.badge_half_h, x + style.badge_half_w, y + style.badge_half_h]
    draw.rectangle(box, fill=fill, outline=style.text_rgb)
    tw = draw.textlength(label, font=_FONT)
    draw.text((x - tw / 2, y - 6), label, fill=style.text_rgb, font=_FONT)


def _draw_prohibition(draw, sym: SymbolInstance, style: RenderStyle) -> None:
    x, y = sym.start
    r = style.glyph_radius
    rgb = style.prohibition_rgb
    draw.ellipse([x - r, y - r, x + r, y + r], outline=rgb, width=style.line_width + 1)
    off = round(r / math.sqrt(2))
    draw.line([(x - off, y - off), (x + off, y + off)], fill=rgb, width=style.line_width + 1)


def _draw_rewind(draw, sym: SymbolInstance, style: RenderStyle) -> None:
    x, y = sym.start
    r = style.glyph_radius
    rgb = style.rewind_rgb
    h = r // 2
    for tip_x in (x - r + 2, x):
        draw.polygon(
            [(tip_x, y), (tip_x + h, y - h), (tip_x + h, y + h)],
            fill=rgb,
        )


def _draw_dual_crosshairs(draw, sym: SymbolInstance, style: RenderStyle) -> None:
    _dashed_line(draw, sym.start, sym.end, style, style.marker_rgb)
    _draw_crosshair(draw, sym.start, style)
    _draw_crosshair(draw, sym.end, style)


_DRAWERS = {
    SymbolKind.STRAIGHT_ARROW: _draw_straight_arrow,
    SymbolKind.SEMI_CIRCULAR_ARROW: _draw_semi_circular_arrow,
    SymbolKind.DUAL_CROSSHAIRS: _draw_dual_crosshairs,
    SymbolKind.CROSSHAIR: lambda d, s, st: _draw_crosshair(d, s.start, st),
    SymbolKind.GRIPPER_STATE: _draw_badge,
    SymbolKind.PROHIBITION: _draw_prohibition,
    SymbolKind.REWIND: _draw_rewind,
}


def render_overlay(
    frame: np.ndarray, sset: SymbolSet, style: RenderStyle = DEFAULT_STYLE
) -> np.ndarray:
    """Return a new frame with the symbol set drawn on top.

    The set must validate against the frame dimensions; an empty set returns
    an identical copy of the input.
    """
    check_frame(frame)
    h, w = frame.shape[:2]
    bad = errors_only(validate_symbols(sset, w, h))
    if bad:
        raise ValidationError("symbol set invalid for frame", violations=bad)
    img = Image.fromarray(frame.copy())
    if sset.symbols:
        draw = ImageDraw.Draw(img)
        for sym in sset.symbols:
            _DRAWERS[sym.kind](draw, sym, style)
    return np.asarray(img)
