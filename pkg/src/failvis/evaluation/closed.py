"""Closed-ended (multiple choice) evaluation."""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

from ..endpoints import ChatEndpoint, ChatMessage
from ..errors import EndpointError
from ..vqa.templates import CLOSED_ANSWER_NOTE
from ..vqa.types import OPTION_LETTERS, VqaPair, letter_for

_LETTER_RE = re.compile(r"\b([A-D])\b")


def extract_choice(response: str, options: Sequence[str]) -> str | None:
    """Pull the chosen option letter out of a free-form response.

    Rules, first match wins: (1) the first standalone uppercase letter within
    range of the option list; (2) the longest option text quoted verbatim in
    the response.  Returns ``None`` (unparseable, scored incorrect) otherwise.
    """
    valid = OPTION_LETTERS[: len(options)]
    for m in _LETTER_RE.finditer(response):
        if m.group(1) in valid:
            return m.group(1)
    quoted = [(len(text), -i) for i, text in enumerate(options) if text and text in response]
    if quoted:
        _, neg_index = max(quoted)
        return letter_for(-neg_index)
    return None


def closed_prompt_text(pair: VqaPair) -> str:
    lines = [pair.prompt, "", "Options:"]
    for i, option in enumerate(pair.options):
        lines.append(f"{letter_for(i)}. {option}")
    lines += ["", CLOSED_ANSWER_NOTE]
    return "\n".join(lines)


def _load_media(pair: VqaPair, media_root: Path | None) -> tuple[bytes, ...]:
    if media_root is None:
        return ()
    return tuple((media_root / rel).read_bytes() for rel in pair.media)


def eval_closed_item(pair: VqaPair, endpoint: ChatEndpoint, media_root: Path | None = None) -> dict:
    item = {
        "pair_id": pair.id,
        "question_type": pair.question_type.value,
        "kind": "closed",
        "expected": pair.answer,
        "response": None,
        "extracted": None,
        "correct": False,
        "error": None,
    }
    try:
        response = endpoint.complete(
            [ChatMessage("user", closed_prompt_text(pair), images=_load_media(pair, media_root))]
        )
    except EndpointError as exc:
        # conservative: an errored call stays in the denominator
        item["error"] = str(exc)
        return item
    item["response"] = response
    item["extracted"] = extract_choice(response, pair.options)
    item["correct"] = item["extracted"] == pair.answer
    return item


def run_closed_eval(
    pairs: Sequence[VqaPair],
    endpoint: ChatEndpoint,
    media_root: str | Path | None = None,
    max_workers: int = 1,
) -> list[dict]:
    """Evaluate every closed pair; results keep the input order."""
    media_root = Path(media_root) if media_root is not None else None
    if max_workers <= 1:
        return [eval_closed_item(p, endpoint, media_root) for p in pairs]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(lambda p: eval_closed_item(p, endpoint, media_root), pairs))


def closed_accuracy(items: Sequence[dict]) -> float:
    if not items:
        return 0.0
    return 100.0 * sum(1 for i in items if i["correct"]) / len(items)
