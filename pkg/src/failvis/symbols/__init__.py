"""Visual guidance symbol language: types, codec, validation, rendering."""

from .codec import emit_symbol_code, find_symbol_code, parse_symbol_code
from .geometry import symbol_bbox, target_point
from .render import decode_png, encode_png, render_overlay
from .style import ARROW_HEAD_LEN, DEFAULT_STYLE, GLYPH_RADIUS, RenderStyle
from .types import (
    ARM_REQUIRED_KINDS,
    AXIS_BY_COLOR,
    CATEGORY_BY_KIND,
    END_REQUIRED_KINDS,
    Arm,
    AxisColor,
    GripperState,
    Magnitude,
    RotationDir,
    SymbolCategory,
    SymbolInstance,
    SymbolKind,
    SymbolPurpose,
    SymbolSet,
)
from .validation import (
    Severity,
    Violation,
    check_valid,
    errors_only,
    instance_violations,
    set_violations,
    validate_symbols,
)

__all__ = [
    "ARM_REQUIRED_KINDS",
    "ARROW_HEAD_LEN",
    "AXIS_BY_COLOR",
    "Arm",
    "AxisColor",
    "CATEGORY_BY_KIND",
    "DEFAULT_STYLE",
    "END_REQUIRED_KINDS",
    "GLYPH_RADIUS",
    "GripperState",
    "Magnitude",
    "RenderStyle",
    "RotationDir",
    "Severity",
    "SymbolCategory",
    "SymbolInstance",
    "SymbolKind",
    "SymbolPurpose",
    "SymbolSet",
    "Violation",
    "check_valid",
    "decode_png",
    "emit_symbol_code",
    "encode_png",
    "errors_only",
    "find_symbol_code",
    "instance_violations",
    "parse_symbol_code",
    "render_overlay",
    "set_violations",
    "symbol_bbox",
    "target_point",
    "validate_symbols",
]
