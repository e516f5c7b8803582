"""Distractor candidate pools aggregated over a collection of annotations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ..annotation.records import AnnotationRecord


@dataclass(frozen=True)
class AnnotationPools:
    """Dataset-wide candidate values for closed-ended distractors.

    ``keyframe_timestamps`` collects failure keyframe times and
    ``subtask_texts`` every subtask description; a record falls back to these
    when its own sample list or plan is too small to supply three distractors.
    """

    keyframe_timestamps: tuple[float, ...] = ()
    subtask_texts: tuple[str, ...] = ()

    @classmethod
    def from_records(cls, records: Iterable[AnnotationRecord]) -> "AnnotationPools":
        stamps: list[float] = []
        subtasks: list[str] = []
        seen_ts: set[float] = set()
        seen_sub: set[str] = set()
        for rec in records:
            kf = rec.diagnosis.failure_keyframe
            if kf is not None and kf.timestamp_s not in seen_ts:
                seen_ts.add(kf.timestamp_s)
                stamps.append(kf.timestamp_s)
            for s in rec.subtask_plan.subtasks:
                if s not in seen_sub:
                    seen_sub.add(s)
                    subtasks.append(s)
        return cls(keyframe_timestamps=tuple(stamps), subtask_texts=tuple(subtasks))
