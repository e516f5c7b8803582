"""Glyph geometry constants and render palette.

The same constants drive the server-side renderer, bounding boxes, and the
web client's canvas preview (served through ``GET /style``), so the preview
and the authoritative render always agree on glyph footprints.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .types import AxisColor

# Fixed footprint half-size of every point glyph, px.  Bounding boxes pad each
# anchor point by this radius.
GLYPH_RADIUS = 24

# Arrowhead length, px.
ARROW_HEAD_LEN = 12


@dataclass(frozen=True)
class RenderStyle:
    # Axis colors are built from one dominant and one residual channel value,
    # e.g. red = (primary, secondary, secondary).
    primary: int = 224
    secondary: int = 32
    line_width: int = 3
    glyph_radius: int = GLYPH_RADIUS
    arrow_head_len: int = ARROW_HEAD_LEN
    dash_on: int = 6
    dash_off: int = 5
    badge_half_w: int = 24
    badge_half_h: int = 12
    marker_rgb: tuple[int, int, int] = (224, 224, 32)       # crosshairs + dashes
    on_fill: tuple[int, int, int] = (32, 144, 64)
    off_fill: tuple[int, int, int] = (176, 96, 32)
    prohibition_rgb: tuple[int, int, int] = (224, 32, 32)
    rewind_rgb: tuple[int, int, int] = (32, 96, 224)
    text_rgb: tuple[int, int, int] = (255, 255, 255)

    def axis_rgb(self, color: AxisColor) -> tuple[int, int, int]:
        p, s = self.primary, self.secondary
        if color is AxisColor.RED:
            return (p, s, s)
        if color is AxisColor.GREEN:
            return (s, p, s)
        return (s, s, p)

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_STYLE = RenderStyle()
