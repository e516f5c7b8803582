"""Question/answer pair model for the benchmark generator."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping


class QuestionType(str, Enum):
    # closed-ended (multiple choice, keyframe-grounded guidance)
    FAILURE_DETECTION = "failure_detection"
    FAILURE_KEYFRAME_LOC = "failure_keyframe_loc"
    FAILURE_SUBTASK_LOC = "failure_subtask_loc"
    FAILURE_TYPE_ID = "failure_type_id"
    LOW_LEVEL_AVOIDANCE = "low_level_avoidance"
    LOW_LEVEL_CORRECTION = "low_level_correction"
    # open-ended (free text, judged)
    LOW_LEVEL_AVOIDANCE_COT = "low_level_avoidance_cot"
    LOW_LEVEL_CORRECTION_COT = "low_level_correction_cot"
    FAILURE_REASON = "failure_reason"
    HIGH_LEVEL_AVOIDANCE = "high_level_avoidance"
    HIGH_LEVEL_CORRECTION = "high_level_correction"
    # special: symbol-code generation, scored by the code matcher
    VISUAL_GUIDANCE_CODE = "visual_guidance_code"


CLOSED_TYPES: tuple[QuestionType, ...] = (
    QuestionType.FAILURE_DETECTION,
    QuestionType.FAILURE_KEYFRAME_LOC,
    QuestionType.FAILURE_SUBTASK_LOC,
    QuestionType.FAILURE_TYPE_ID,
    QuestionType.LOW_LEVEL_AVOIDANCE,
    QuestionType.LOW_LEVEL_CORRECTION,
)

OPEN_TYPES: tuple[QuestionType, ...] = (
    QuestionType.LOW_LEVEL_AVOIDANCE_COT,
    QuestionType.LOW_LEVEL_CORRECTION_COT,
    QuestionType.FAILURE_REASON,
    QuestionType.HIGH_LEVEL_AVOIDANCE,
    QuestionType.HIGH_LEVEL_CORRECTION,
)

BENCHMARK_TYPES = CLOSED_TYPES + OPEN_TYPES  # the 11 scored types

OPTION_LETTERS = "ABCD"


def letter_for(index: int) -> str:
    return OPTION_LETTERS[index]


def option_index(letter: str) -> int:
    return OPTION_LETTERS.index(letter)


@dataclass(frozen=True)
class CotAnswer:
    """Ordered detection -> localization -> guidance answer."""

    detection: str
    localization: str
    guidance: str

    def render(self) -> str:
        return (
            f"Detection: {self.detection}\n"
            f"Localization: {self.localization}\n"
            f"Guidance: {self.guidance}"
        )


@dataclass(frozen=True)
class VqaPair:
    id: str
    question_type: QuestionType
    trajectory_id: str
    prompt: str
    media: tuple[str, ...] = ()
    options: tuple[str, ...] | None = None
    answer: str = ""
    cot_answer: CotAnswer | None = None
    symbol_code_answer: str | None = None
    option_seed: int | None = None
    frame_size: tuple[int, int] | None = None

    def __post_init__(self):
        if self.question_type in CLOSED_TYPES:
            if self.options is None:
                raise ValueError(f"{self.question_type.value} requires options")
            expected = 2 if self.question_type is QuestionType.FAILURE_DETECTION else 4
            if len(self.options) != expected:
                raise ValueError(
                    f"{self.question_type.value} takes {expected} options, got {len(self.options)}"
                )
            if len(set(self.options)) != len(self.options):
                raise ValueError("options must be distinct")
            if self.answer not in OPTION_LETTERS[: len(self.options)]:
                raise ValueError(f"answer letter {self.answer!r} out of range")
        elif self.options is not None:
            raise ValueError(f"{self.question_type.value} does not take options")

    @property
    def truth_text(self) -> str:
        """Ground-truth text: the selected option for closed pairs, the answer
        itself otherwise."""
        if self.options is not None:
            return self.options[option_index(self.answer)]
        return self.answer


def pair_to_dict(pair: VqaPair) -> dict:
    return {
        "id": pair.id,
        "question_type": pair.question_type.value,
        "trajectory_id": pair.trajectory_id,
        "prompt": pair.prompt,
        "media": list(pair.media),
        "options": list(pair.options) if pair.options is not None else None,
        "answer": pair.answer,
        "cot_answer": (
            {
                "detection": pair.cot_answer.detection,
                "localization": pair.cot_answer.localization,
                "guidance": pair.cot_answer.guidance,
            }
            if pair.cot_answer
            else None
        ),
        "symbol_code_answer": pair.symbol_code_answer,
        "option_seed": pair.option_seed,
        "frame_size": list(pair.frame_size) if pair.frame_size else None,
    }


def pair_from_dict(d: Mapping) -> VqaPair:
    cot = d.get("cot_answer")
    return VqaPair(
        id=d["id"],
        question_type=QuestionType(d["question_type"]),
        trajectory_id=d["trajectory_id"],
        prompt=d["prompt"],
        media=tuple(d.get("media", ())),
        options=tuple(d["options"]) if d.get("options") is not None else None,
        answer=d.get("answer", ""),
        cot_answer=CotAnswer(**cot) if cot else None,
        symbol_code_answer=d.get("symbol_code_answer"),
        option_seed=d.get("option_seed"),
        frame_size=tuple(d["frame_size"]) if d.get("frame_size") else None,
    )


def write_pairs_jsonl(pairs, path) -> None:
    with open(path, "w") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair_to_dict(pair), sort_keys=True) + "\n")


def read_pairs_jsonl(path) -> list[VqaPair]:
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                out.append(pair_from_dict(json.loads(line)))
    return out
