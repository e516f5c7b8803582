"""Parsing of structured diagnosis responses.

The supervisor asks its model for three labeled lines (Detection /
Localization / Guidance) followed by an optional symbol-code block.  Parsing
also handles free-form verdicts ("The task is proceeding correctly.") through
a phrase list, so off-format but unambiguous replies still work.
"""

from __future__ import annotations

import re

from ..annotation.commands import parse_guidance_text
from ..errors import ResponseParseError, SymbolSemanticError, SymbolSyntaxError
from ..symbols import find_symbol_code, parse_symbol_code
from .types import DiagnosisResponse

_DETECTION_LINE_RE = re.compile(r"^\s*detection\s*:\s*(.+)$", re.IGNORECASE | re.MULTILINE)
_GUIDANCE_LINE_RE = re.compile(r"^\s*guidance\s*:\s*(.+)$", re.IGNORECASE | re.MULTILINE)

_NO_FAILURE_PHRASES = (
    "no failure",
    "no failures",
    "proceeding correctly",
    "task is proceeding",
    "completed successfully",
    "no correction needed",
    "not failing",
    "going well",
)
_FAILURE_PHRASES = ("failure detected", "failing", "failed", "failure")


def _verdict(text: str) -> bool:
    """True when the text reports a failure; raises when no verdict is found."""
    m = _DETECTION_LINE_RE.search(text)
    scope = m.group(1) if m else text
    lowered = scope.lower()
    if any(p in lowered for p in _NO_FAILURE_PHRASES):
        return False
    if any(p in lowered for p in _FAILURE_PHRASES):
        return True
    raise ResponseParseError("no detection verdict found in response")


def parse_cot_response(text: str) -> DiagnosisResponse:
    """Turn a diagnosis reply into a :class:`DiagnosisResponse`.

    A failure verdict must come with at least one vocabulary command; an
    embedded symbol-code block, when present, must parse.
    """
    failed = _verdict(text)
    if not failed:
        return DiagnosisResponse(failed=False, cot_text=text)

    m = _GUIDANCE_LINE_RE.search(text)
    commands = tuple(parse_guidance_text(m.group(1) if m else text))
    if not commands and m is not None:
        # labeled line had nothing usable: scan the whole reply before giving up
        commands = tuple(parse_guidance_text(text))
    if not commands:
        raise ResponseParseError("failure reported but no command matches the vocabulary")

    symbol_set = None
    block = find_symbol_code(text)
    if block is not None:
        try:
            symbol_set = parse_symbol_code(block)
        except (SymbolSyntaxError, SymbolSemanticError) as exc:
            raise ResponseParseError(f"embedded symbol code invalid: {exc}") from exc

    return DiagnosisResponse(
        failed=True, cot_text=text, low_level_commands=commands, symbol_set=symbol_set
    )
