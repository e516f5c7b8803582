"""Symbol-code codec: the line-oriented text form of a :class:`SymbolSet`.

This is the stable wire format used for annotation storage, model training
targets, and live guidance generation.  A code block is a header line followed
by one line per symbol, in drawing order::

    frame=12 purpose=correction
    straight_arrow(arm=left, color=green, start=(410,300), end=(470,300), mag=significant)
    gripper_state(arm=left, state=off, start=(312,151))

Grammar (canonical form; the parser additionally tolerates extra whitespace,
blank lines, and mixed case in tokens):

* header: ``frame=<int> purpose=<avoidance|correction>``
* symbol: ``<kind>(<key>=<value>, ...)`` where kind is one of
  ``straight_arrow``, ``semi_circular_arrow``, ``dual_crosshairs``,
  ``crosshair``, ``gripper_state``, ``prohibition``, ``rewind``
* keys appear in the fixed order ``arm, color, dir, state, start, end, mag``;
  ``arm`` and ``start`` are always present, the others only when the kind
  carries them
* points are ``(<int>,<int>)`` with no interior spaces

``emit_symbol_code`` is deterministic and injective over valid sets;
``parse_symbol_code`` is its exact inverse on canonical output.  Every line
ends with a newline, including the last.
"""

from __future__ import annotations

import re

from ..errors import SymbolSemanticError, SymbolSyntaxError, ValidationError
from .types import (
    Arm,
    AxisColor,
    GripperState,
    Magnitude,
    RotationDir,
    SymbolInstance,
    SymbolKind,
    SymbolPurpose,
    SymbolSet,
)
from .validation import errors_only, instance_violations, set_violations

_HEADER_RE = re.compile(
    r"^\s*frame\s*=\s*(\d+)\s+purpose\s*=\s*([a-zA-Z_]+)\s*$", re.IGNORECASE
)
_SYMBOL_RE = re.compile(r"^\s*([a-zA-Z_]+)\s*\(\s*(.*?)\s*\)\s*$")
_ARG_RE = re.compile(
    r"^\s*([a-zA-Z_]+)\s*=\s*(\(\s*-?\d+\s*,\s*-?\d+\s*\)|[a-zA-Z_]+)\s*$"
)
_POINT_RE = re.compile(r"^\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)$")


def _split_args(body: str) -> list[str]:
    """Split 'a=1, b=(2,3)' on commas that sit outside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p for p in parts if p.strip()]

_KIND_BY_TOKEN = {k.value: k for k in SymbolKind}

# Canonical key order for emission; maps key token -> SymbolInstance field.
_KEY_FIELDS = (
    ("arm", "arm"),
    ("color", "color"),
    ("dir", "rotation_dir"),
    ("state", "gripper_state"),
    ("start", "start"),
    ("end", "end"),
    ("mag", "magnitude"),
)
_FIELD_BY_KEY = dict(_KEY_FIELDS)

_ENUM_BY_KEY = {
    "arm": Arm,
    "color": AxisColor,
    "dir": RotationDir,
    "state": GripperState,
    "mag": Magnitude,
}


def _fmt_value(key: str, value) -> str:
    if key in ("start", "end"):
        return f"({value[0]},{value[1]})"
    return value.value


def emit_symbol_code(sset: SymbolSet) -> str:
    """Serialize a valid symbol set to canonical symbol code."""
    bad = errors_only(
        [v for i, s in enumerate(sset.symbols) for v in instance_violations(s, i)]
        + set_violations(sset)
    )
    if bad:
        raise ValidationError("cannot emit invalid symbol set", violations=bad)
    lines = [f"frame={sset.frame_index} purpose={sset.purpose.value}"]
    for sym in sset.symbols:
        parts = []
        for key, field in _KEY_FIELDS:
            value = getattr(sym, field)
            if value is None:
                continue
            parts.append(f"{key}={_fmt_value(key, value)}")
        lines.append(f"{sym.kind.value}({', '.join(parts)})")
    return "".join(line + "\n" for line in lines)


def _parse_value(key: str, raw: str, line_no: int):
    if key in ("start", "end"):
        m = _POINT_RE.match(raw)
        if not m:
            raise SymbolSyntaxError(f"{key} expects a point '(x,y)', got {raw!r}", line_no)
        return (int(m.group(1)), int(m.group(2)))
    enum_cls = _ENUM_BY_KEY.get(key)
    if enum_cls is None:
        raise SymbolSyntaxError(f"unknown key {key!r}", line_no)
    try:
        return enum_cls(raw.lower())
    except ValueError:
        raise SymbolSemanticError(
            f"line {line_no}: {raw!r} is not a valid {key} value"
        ) from None


def _parse_symbol_line(line: str, line_no: int, frame_index: int) -> SymbolInstance:
    m = _SYMBOL_RE.match(line)
    if not m:
        raise SymbolSyntaxError(f"expected '<kind>(key=value, ...)', got {line.strip()!r}", line_no)
    kind_token, arg_body = m.group(1).lower(), m.group(2)
    kind = _KIND_BY_TOKEN.get(kind_token)
    if kind is None:
        raise SymbolSyntaxError(f"unknown symbol kind {kind_token!r}", line_no)

    fields: dict = {}
    for chunk in _split_args(arg_body):
        am = _ARG_RE.match(chunk)
        if not am:
            raise SymbolSyntaxError(f"malformed argument {chunk.strip()!r}", line_no)
        key = am.group(1).lower()
        if key not in _FIELD_BY_KEY:
            raise SymbolSyntaxError(f"unknown key {key!r}", line_no)
        field = _FIELD_BY_KEY[key]
        if field in fields:
            raise SymbolSyntaxError(f"duplicate key {key!r}", line_no)
        fields[field] = _parse_value(key, am.group(2), line_no)

    if "start" not in fields:
        raise SymbolSemanticError(f"line {line_no}: {kind_token} missing start point")
    sym = SymbolInstance(kind=kind, frame_index=frame_index, **fields)
    problems = errors_only(instance_violations(sym))
    if problems:
        raise SymbolSemanticError(f"line {line_no}: " + "; ".join(v.message for v in problems))
    return sym


def parse_symbol_code(
    code: str, frame_size: tuple[int, int] | None = None
) -> SymbolSet:
    """Parse symbol code into a validated :class:`SymbolSet`.

    Conditional-field and set-level rules are always enforced; coordinate
    bounds are only checked when ``frame_size=(width, height)`` is supplied.
    Raises :class:`SymbolSyntaxError` on malformed lines (with line number)
    and :class:`SymbolSemanticError` on field-rule breaches.
    """
    numbered = [
        (i + 1, line) for i, line in enumerate(code.splitlines()) if line.strip()
    ]
    if not numbered:
        raise SymbolSyntaxError("empty symbol code", 1)
    head_no, head = numbered[0]
    hm = _HEADER_RE.match(head)
    if not hm:
        raise SymbolSyntaxError(
            f"expected header 'frame=<int> purpose=<avoidance|correction>', got {head.strip()!r}",
            head_no,
        )
    frame_index = int(hm.group(1))
    try:
        purpose = SymbolPurpose(hm.group(2).lower())
    except ValueError:
        raise SymbolSemanticError(
            f"line {head_no}: unknown purpose {hm.group(2)!r}"
        ) from None

    symbols = [
        _parse_symbol_line(line, line_no, frame_index) for line_no, line in numbered[1:]
    ]
    sset = SymbolSet(frame_index=frame_index, purpose=purpose, symbols=tuple(symbols))

    problems = errors_only(set_violations(sset))
    if frame_size is not None:
        from .validation import validate_symbols

        problems = errors_only(validate_symbols(sset, frame_size[0], frame_size[1]))
    if problems:
        raise SymbolSemanticError("; ".join(v.message for v in problems))
    return sset


_CODE_LINE_RE = re.compile(
    r"^\s*(frame\s*=\s*\d+\s+purpose\s*=\s*[a-zA-Z_]+|[a-zA-Z_]+\s*\(.*\))\s*$"
)


def find_symbol_code(text: str) -> str | None:
    """Extract the first symbol-code block embedded in free-form model output.

    Scans for a header line and collects the contiguous run of symbol lines
    that follows (fenced code markers are ignored).  Returns the block text,
    or ``None`` when no header is present.
    """
    lines = text.splitlines()
    start = None
    for i, line in enumerate(lines):
        if _HEADER_RE.match(line.strip().strip("`")):
            start = i
            break
    if start is None:
        return None
    block = [lines[start].strip().strip("`")]
    for line in lines[start + 1 :]:
        stripped = line.strip().strip("`")
        if not stripped:
            continue
        if _SYMBOL_RE.match(stripped) and stripped.split("(")[0].strip().lower() in _KIND_BY_TOKEN:
            block.append(stripped)
        else:
            break
    return "".join(line + "\n" for line in block)
