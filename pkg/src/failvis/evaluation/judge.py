"""Open-ended evaluation with a judge endpoint.

The judge compares a model answer against the reference along three
dimensions — semantic similarity, content completeness, functional
equivalence — each on a 0..scale integer range (default 0..100), and the item
score is their exact mean.  A malformed judge reply gets one retry with a
stricter format reminder; if that also fails the item is flagged and excluded
from the average (but counted in the report).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from ..endpoints import ChatEndpoint, ChatMessage
from ..errors import EndpointError, JudgeParseError
from ..jsonutil import extract_json_object
from ..vqa.types import VqaPair

DIMENSIONS = ("semantic_similarity", "content_completeness", "functional_equivalence")

JUDGE_PROMPT = """You grade a model's answer about a robot manipulation episode against a reference answer.

Score three dimensions, each an integer from 0 to {scale}:
- semantic_similarity: do the two texts convey the same meaning and intent, ignoring wording differences?
- content_completeness: are all critical details of the reference present (which gripper, movement directions, command specifics)?
- functional_equivalence: would the described actions achieve the same manipulation outcome?

Reply with ONLY a JSON object shaped like
{{"semantic_similarity": 0, "content_completeness": 0, "functional_equivalence": 0}}.

Question:
{question}

Reference answer:
{truth}

Model answer:
{answer}"""

JUDGE_RETRY_REMINDER = (
    "Your previous reply could not be parsed. Respond with ONLY the JSON object "
    '{"semantic_similarity": <int>, "content_completeness": <int>, '
    '"functional_equivalence": <int>} and nothing else.'
)


@dataclass(frozen=True)
class JudgeScore:
    semantic_similarity: float
    content_completeness: float
    functional_equivalence: float
    judge_raw: str = ""

    @property
    def total(self) -> float:
        return (
            self.semantic_similarity + self.content_completeness + self.functional_equivalence
        ) / 3

    def as_dict(self) -> dict:
        return {
            "semantic_similarity": self.semantic_similarity,
            "content_completeness": self.content_completeness,
            "functional_equivalence": self.functional_equivalence,
            "total": self.total,
            "judge_raw": self.judge_raw,
        }


def parse_judge_response(text: str, scale: float = 100.0) -> JudgeScore:
    """Extract the three dimensions; raises :class:`JudgeParseError` when the
    reply is not a JSON object with in-range numbers."""
    obj = extract_json_object(text)
    if obj is None:
        raise JudgeParseError("judge reply is not a JSON object")
    values = []
    for dim in DIMENSIONS:
        value = obj.get(dim)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise JudgeParseError(f"judge reply missing numeric {dim}")
        if not (0 <= value <= scale):
            raise JudgeParseError(f"{dim}={value} outside 0..{scale:g}")
        values.append(float(value) * (100.0 / scale))
    return JudgeScore(*values, judge_raw=text)


def judge_answer(
    judge_endpoint: ChatEndpoint,
    question: str,
    truth: str,
    answer: str,
    scale: float = 100.0,
) -> JudgeScore:
    prompt = JUDGE_PROMPT.format(scale=int(scale), question=question, truth=truth, answer=answer)
    first = judge_endpoint.complete([ChatMessage("user", prompt)])
    try:
        return parse_judge_response(first, scale)
    except JudgeParseError:
        retry = judge_endpoint.complete(
            [
                ChatMessage("user", prompt),
                ChatMessage("assistant", first),
                ChatMessage("user", JUDGE_RETRY_REMINDER),
            ]
        )
        return parse_judge_response(retry, scale)


def _load_media(pair: VqaPair, media_root: Path | None) -> tuple[bytes, ...]:
    if media_root is None:
        return ()
    return tuple((media_root / rel).read_bytes() for rel in pair.media)


def eval_open_item(
    pair: VqaPair,
    endpoint: ChatEndpoint,
    judge_endpoint: ChatEndpoint,
    scale: float = 100.0,
    media_root: Path | None = None,
) -> dict:
    item = {
        "pair_id": pair.id,
        "question_type": pair.question_type.value,
        "kind": "open",
        "expected": pair.answer,
        "response": None,
        "judge": None,
        "error": None,
    }
    try:
        response = endpoint.complete(
            [ChatMessage("user", pair.prompt, images=_load_media(pair, media_root))]
        )
    except EndpointError as exc:
        item["error"] = f"endpoint: {exc}"
        return item
    item["response"] = response
    try:
        score = judge_answer(judge_endpoint, pair.prompt, pair.answer, response, scale)
    except (JudgeParseError, EndpointError) as exc:
        item["error"] = f"judge: {exc}"
        return item
    item["judge"] = score.as_dict()
    return item


def run_open_eval(
    pairs: Sequence[VqaPair],
    endpoint: ChatEndpoint,
    judge_endpoint: ChatEndpoint,
    scale: float = 100.0,
    media_root: str | Path | None = None,
    max_workers: int = 1,
) -> list[dict]:
    media_root = Path(media_root) if media_root is not None else None
    if max_workers <= 1:
        return [eval_open_item(p, endpoint, judge_endpoint, scale, media_root) for p in pairs]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(
            pool.map(
                lambda p: eval_open_item(p, endpoint, judge_endpoint, scale, media_root), pairs
            )
        )
