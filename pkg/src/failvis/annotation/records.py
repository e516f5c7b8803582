"""Annotation record model and its JSON serialization.

An :class:`AnnotationRecord` carries everything one trajectory accumulates on
its way through the three annotation stages: the subtask plan, the failure
diagnosis, corrective guidance (commands + symbol sets + texts), and the
stage marker.  Records are immutable values; stage operations in
``pipeline.py`` return new instances.

Serialized form is one JSON document per trajectory with a schema version;
symbol sets are embedded as symbol-code text (the codec is the canonical
serialization).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping

from .. import SCHEMA_VERSION
from ..store import FrameOrigin, FrameRef, PlanProvenance, SubtaskPlan
from ..symbols import SymbolSet, emit_symbol_code, parse_symbol_code
from .commands import LowLevelCommand


class FailureType(str, Enum):
    """The four failure classes distinguished by the diagnosis tasks."""

    TASK_PLANNING = "task_planning"
    GRIPPER_6D_POSE = "gripper_6d_pose"
    GRIPPER_STATE = "gripper_state"
    HUMAN_INTERVENTION = "human_intervention"

    @property
    def display_name(self) -> str:
        return _FAILURE_TYPE_NAMES[self]


_FAILURE_TYPE_NAMES = {
    FailureType.TASK_PLANNING: "Task planning",
    FailureType.GRIPPER_6D_POSE: "Gripper 6d-pose",
    FailureType.GRIPPER_STATE: "Gripper state",
    FailureType.HUMAN_INTERVENTION: "Human intervention",
}


class AnnotationStage(str, Enum):
    STAGE1_DONE = "stage1_done"
    STAGE2_DONE = "stage2_done"
    STAGE3_DRAFT = "stage3_draft"
    FINALIZED = "finalized"


_STAGE_ORDER = {
    AnnotationStage.STAGE1_DONE: 1,
    AnnotationStage.STAGE2_DONE: 2,
    AnnotationStage.STAGE3_DRAFT: 3,
    AnnotationStage.FINALIZED: 4,
}


def stage_rank(stage: AnnotationStage) -> int:
    return _STAGE_ORDER[stage]


@dataclass(frozen=True)
class FailureDiagnosis:
    success: bool
    failure_keyframe: FrameRef | None = None
    failure_subtask_index: int | None = None
    failure_type: FailureType | None = None
    failure_reason: str | None = None


@dataclass(frozen=True)
class CorrectiveGuidance:
    low_level_avoidance: tuple[LowLevelCommand, ...] = ()
    low_level_correction: tuple[LowLevelCommand, ...] = ()
    avoidance_symbols: SymbolSet | None = None
    correction_symbols: SymbolSet | None = None
    high_level_avoidance: str | None = None
    high_level_correction: str | None = None

    def is_empty(self) -> bool:
        return not (
            self.low_level_avoidance
            or self.low_level_correction
            or self.avoidance_symbols
            or self.correction_symbols
            or self.high_level_avoidance
            or self.high_level_correction
        )


@dataclass(frozen=True)
class DraftTexts:
    failure_reason: str = ""
    high_level_avoidance: str = ""
    high_level_correction: str = ""


@dataclass(frozen=True)
class AnnotationRecord:
    trajectory_id: str
    subtask_plan: SubtaskPlan
    diagnosis: FailureDiagnosis
    guidance: CorrectiveGuidance = field(default_factory=CorrectiveGuidance)
    stage: AnnotationStage = AnnotationStage.STAGE1_DONE
    annotator_id: str = ""
    created_at: str = ""
    updated_at: str = ""

    def advanced(self, stage: AnnotationStage, at: str, **changes) -> "AnnotationRecord":
        return replace(self, stage=stage, updated_at=at, **changes)


# -- serialization ----------------------------------------------------------


def _frame_ref_to_dict(ref: FrameRef | None) -> dict | None:
    if ref is None:
        return None
    return {
        "trajectory_id": ref.trajectory_id,
        "frame_index": ref.frame_index,
        "timestamp_s": ref.timestamp_s,
        "origin": ref.origin.value,
    }


def _frame_ref_from_dict(d: Mapping | None) -> FrameRef | None:
    if d is None:
        return None
    return FrameRef(
        trajectory_id=d["trajectory_id"],
        frame_index=d["frame_index"],
        timestamp_s=d["timestamp_s"],
        origin=FrameOrigin(d["origin"]),
    )


def _symbols_to_code(sset: SymbolSet | None) -> str | None:
    return None if sset is None else emit_symbol_code(sset)


def _symbols_from_code(code: str | None) -> SymbolSet | None:
    return None if code is None else parse_symbol_code(code)


def record_to_dict(rec: AnnotationRecord) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "trajectory_id": rec.trajectory_id,
        "subtask_plan": {
            "trajectory_id": rec.subtask_plan.trajectory_id,
            "subtasks": list(rec.subtask_plan.subtasks),
            "provenance": rec.subtask_plan.provenance.value,
        },
        "diagnosis": {
            "success": rec.diagnosis.success,
            "failure_keyframe": _frame_ref_to_dict(rec.diagnosis.failure_keyframe),
            "failure_subtask_index": rec.diagnosis.failure_subtask_index,
            "failure_type": rec.diagnosis.failure_type.value if rec.diagnosis.failure_type else None,
            "failure_reason": rec.diagnosis.failure_reason,
        },
        "guidance": {
            "low_level_avoidance": [c.as_dict() for c in rec.guidance.low_level_avoidance],
            "low_level_correction": [c.as_dict() for c in rec.guidance.low_level_correction],
            "avoidance_symbols": _symbols_to_code(rec.guidance.avoidance_symbols),
            "correction_symbols": _symbols_to_code(rec.guidance.correction_symbols),
            "high_level_avoidance": rec.guidance.high_level_avoidance,
            "high_level_correction": rec.guidance.high_level_correction,
        },
        "stage": rec.stage.value,
        "annotator_id": rec.annotator_id,
        "created_at": rec.created_at,
        "updated_at": rec.updated_at,
    }


def record_from_dict(d: Mapping) -> AnnotationRecord:
    plan = d["subtask_plan"]
    diag = d["diagnosis"]
    guid = d["guidance"]
    return AnnotationRecord(
        trajectory_id=d["trajectory_id"],
        subtask_plan=SubtaskPlan(
            trajectory_id=plan["trajectory_id"],
            subtasks=tuple(plan["subtasks"]),
            provenance=PlanProvenance(plan["provenance"]),
        ),
        diagnosis=FailureDiagnosis(
            success=diag["success"],
            failure_keyframe=_frame_ref_from_dict(diag["failure_keyframe"]),
            failure_subtask_index=diag["failure_subtask_index"],
            failure_type=FailureType(diag["failure_type"]) if diag["failure_type"] else None,
            failure_reason=diag["failure_reason"],
        ),
        guidance=CorrectiveGuidance(
            low_level_avoidance=tuple(
                LowLevelCommand.from_dict(c) for c in guid["low_level_avoidance"]
            ),
            low_level_correction=tuple(
                LowLevelCommand.from_dict(c) for c in guid["low_level_correction"]
            ),
            avoidance_symbols=_symbols_from_code(guid["avoidance_symbols"]),
            correction_symbols=_symbols_from_code(guid["correction_symbols"]),
            high_level_avoidance=guid["high_level_avoidance"],
            high_level_correction=guid["high_level_correction"],
        ),
        stage=AnnotationStage(d["stage"]),
        annotator_id=d.get("annotator_id", ""),
        created_at=d.get("created_at", ""),
        updated_at=d.get("updated_at", ""),
    )
