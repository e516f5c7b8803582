"""Three-stage annotation workflow.

Stage 1 fixes the diagnosis facts (success flag, failure keyframe, failing
subtask, failure type) through simple form inputs.  Stage 2 attaches
corrective guidance: low-level commands plus symbol sets drawn on frames.
Stage 3 drafts the free-text fields — the failure reason and the high-level
avoidance/correction advice — with help from a vision-language endpoint, and a
human finalizes.  Drafts are never auto-finalized: ``finalize`` is a separate,
explicit step even when the drafts are accepted unedited.

Stage transitions are monotone; every operation is a pure function of the
stored record plus its arguments (callers supply timestamps), so replaying an
operation log reproduces the same final record byte for byte.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from ..endpoints import ChatEndpoint, ChatMessage
from ..jsonutil import extract_json_object
from ..errors import (
    ArmMismatch,
    EndpointError,
    FrameMismatch,
    ImmutableError,
    IncompleteAnnotation,
    KeyframeNotInSampleList,
    NotFoundError,
    ResponseParseError,
    SubtaskIndexOutOfRange,
    SuccessContradiction,
    ValidationError,
)
from ..store import FrameRef, PlanProvenance, SubtaskPlan, TrajectoryStore
from ..symbols import (
    SymbolPurpose,
    SymbolSet,
    emit_symbol_code,
    encode_png,
    errors_only,
    render_overlay,
    validate_symbols,
)
from .commands import LowLevelCommand, render_commands
from .records import (
    AnnotationRecord,
    AnnotationStage,
    CorrectiveGuidance,
    DraftTexts,
    FailureDiagnosis,
    FailureType,
    record_from_dict,
    record_to_dict,
)


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class AnnotationStore:
    """One JSON document per trajectory, plus subtask plans, on disk."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        (self.root / "plans").mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _record_path(self, trajectory_id: str) -> Path:
        return self.root / f"{trajectory_id}.json"

    def _plan_path(self, trajectory_id: str) -> Path:
        return self.root / "plans" / f"{trajectory_id}.json"

    def save_record(self, rec: AnnotationRecord) -> None:
        with self._lock:
            path = self._record_path(rec.trajectory_id)
            tmp = path.with_suffix(".json.tmp")
            tmp.write_text(json.dumps(record_to_dict(rec), indent=2, sort_keys=True))
            tmp.replace(path)

    def get_record(self, trajectory_id: str) -> AnnotationRecord:
        path = self._record_path(trajectory_id)
        if not path.exists():
            raise NotFoundError(f"no annotation record for {trajectory_id!r}")
        return record_from_dict(json.loads(path.read_text()))

    def has_record(self, trajectory_id: str) -> bool:
        return self._record_path(trajectory_id).exists()

    def list_records(self) -> list[AnnotationRecord]:
        return [
            record_from_dict(json.loads(p.read_text()))
            for p in sorted(self.root.glob("*.json"))
        ]

    def save_plan(self, plan: SubtaskPlan) -> None:
        with self._lock:
            path = self._plan_path(plan.trajectory_id)
            tmp = path.with_suffix(".json.tmp")
            tmp.write_text(
                json.dumps(
                    {
                        "trajectory_id": plan.trajectory_id,
                        "subtasks": list(plan.subtasks),
                        "provenance": plan.provenance.value,
                    },
                    indent=2,
                )
            )
            tmp.replace(path)

    def get_plan(self, trajectory_id: str) -> SubtaskPlan:
        path = self._plan_path(trajectory_id)
        if not path.exists():
            raise NotFoundError(f"no subtask plan for {trajectory_id!r}")
        d = json.loads(path.read_text())
        return SubtaskPlan(
            trajectory_id=d["trajectory_id"],
            subtasks=tuple(d["subtasks"]),
            provenance=PlanProvenance(d["provenance"]),
        )

    def has_plan(self, trajectory_id: str) -> bool:
        return self._plan_path(trajectory_id).exists()


DECOMPOSE_PROMPT = (
    "Break the robot manipulation instruction below into a short ordered list "
    "of subtasks, one step per line, numbered 1., 2., ...  Keep each step a "
    "single imperative clause.\n\nInstruction: {instruction}"
)

ASSIST_SYSTEM_PROMPT = (
    "You help document robot manipulation failures. You receive one annotated "
    "keyframe (guidance symbols drawn on it) and the structured facts below. "
    "Reply with a JSON object with exactly these string keys: "
    '"failure_reason", "high_level_avoidance", "high_level_correction".'
)


def parse_numbered_list(text: str) -> list[str]:
    items = []
    for line in text.splitlines():
        m = re.match(r"^\s*(?:\d+[.)]|[-*])\s+(.*\S)\s*$", line)
        if m:
            items.append(m.group(1))
    if not items:
        items = [line.strip() for line in text.splitlines() if line.strip()]
    return items


class AnnotationWorkflow:
    """Stage operations over one trajectory store + annotation store pair."""

    def __init__(self, store: TrajectoryStore, annotations: AnnotationStore):
        self.store = store
        self.annotations = annotations

    # -- plans ---------------------------------------------------------------

    def decompose_task(
        self, trajectory_id: str, endpoint: ChatEndpoint
    ) -> SubtaskPlan:
        """Ask an endpoint to split the task instruction into subtasks."""
        rec = self.store.get(trajectory_id)
        try:
            text = endpoint.complete(
                [ChatMessage("user", DECOMPOSE_PROMPT.format(instruction=rec.task_instruction))]
            )
        except EndpointError:
            raise
        subtasks = parse_numbered_list(text)
        if not subtasks:
            raise EndpointError("decomposition endpoint returned no usable steps")
        plan = SubtaskPlan(
            trajectory_id=trajectory_id,
            subtasks=tuple(subtasks),
            provenance=PlanProvenance.MODEL_DECOMPOSED,
        )
        self.annotations.save_plan(plan)
        return plan

    def set_manual_plan(self, trajectory_id: str, subtasks: Sequence[str]) -> SubtaskPlan:
        """Store a hand-written or hand-edited plan."""
        self.store.get(trajectory_id)  # existence check
        plan = SubtaskPlan(
            trajectory_id=trajectory_id,
            subtasks=tuple(subtasks),
            provenance=PlanProvenance.MANUALLY_EDITED,
        )
        self.annotations.save_plan(plan)
        return plan

    # -- stage 1 ---------------------------------------------------------------

    def record_stage1(
        self,
        trajectory_id: str,
        *,
        annotator_id: str = "",
        success: bool,
        keyframe_ts: float | None = None,
        subtask_index: int | None = None,
        failure_type: FailureType | None = None,
        at: str | None = None,
    ) -> AnnotationRecord:
        plan = self.annotations.get_plan(trajectory_id)
        self._reject_if_finalized(trajectory_id)
        at = at or _now_iso()

        if success:
            if keyframe_ts is not None or subtask_index is not None or failure_type is not None:
                raise SuccessContradiction(
                    "successful trajectory cannot carry failure fields"
                )
            diagnosis = FailureDiagnosis(success=True)
        else:
            if keyframe_ts is None or subtask_index is None or failure_type is None:
                raise SuccessContradiction(
                    "failed trajectory requires keyframe, subtask index, and failure type"
                )
            if not (0 <= subtask_index < len(plan.subtasks)):
                raise SubtaskIndexOutOfRange(
                    f"subtask index {subtask_index} outside plan of {len(plan.subtasks)}"
                )
            keyframe = self._resolve_keyframe(trajectory_id, keyframe_ts)
            diagnosis = FailureDiagnosis(
                success=False,
                failure_keyframe=keyframe,
                failure_subtask_index=subtask_index,
                failure_type=failure_type,
            )

        rec = AnnotationRecord(
            trajectory_id=trajectory_id,
            subtask_plan=plan,
            diagnosis=diagnosis,
            stage=AnnotationStage.STAGE1_DONE,
            annotator_id=annotator_id,
            created_at=at,
            updated_at=at,
        )
        self.annotations.save_record(rec)
        return rec

    def _resolve_keyframe(self, trajectory_id: str, timestamp_s: float) -> FrameRef:
        refs = self.store.sample_frames(trajectory_id)
        for ref in refs:
            if abs(ref.timestamp_s - timestamp_s) < 1e-9:
                return ref
        raise KeyframeNotInSampleList(
            f"{timestamp_s} s is not in the sample list of {trajectory_id!r} "
            "(register it as a keyframe first)"
        )

    # -- stage 2 ---------------------------------------------------------------

    def record_stage2(
        self,
        trajectory_id: str,
        *,
        low_level_avoidance: Sequence[LowLevelCommand] = (),
        low_level_correction: Sequence[LowLevelCommand] = (),
        avoidance_symbols: SymbolSet | None = None,
        correction_symbols: SymbolSet | None = None,
        at: str | None = None,
    ) -> AnnotationRecord:
        rec = self.annotations.get_record(trajectory_id)
        self._require_stage(rec, AnnotationStage.STAGE1_DONE, AnnotationStage.STAGE2_DONE)
        at = at or _now_iso()

        guidance = CorrectiveGuidance(
            low_level_avoidance=tuple(low_level_avoidance),
            low_level_correction=tuple(low_level_correction),
            avoidance_symbols=avoidance_symbols,
            correction_symbols=correction_symbols,
        )
        if rec.diagnosis.success:
            if not guidance.is_empty():
                raise SuccessContradiction("successful trajectory takes no guidance")
        else:
            self._check_guidance(trajectory_id, rec, guidance)

        rec = rec.advanced(AnnotationStage.STAGE2_DONE, at, guidance=guidance)
        self.annotations.save_record(rec)
        return rec

    def _check_guidance(
        self, trajectory_id: str, rec: AnnotationRecord, guidance: CorrectiveGuidance
    ) -> None:
        width, height = self.store.frame_size(trajectory_id)
        keyframe = rec.diagnosis.failure_keyframe
        sample_indices = {r.frame_index for r in self.store.sample_frames(trajectory_id)}

        for sset, wanted in (
            (guidance.avoidance_symbols, SymbolPurpose.AVOIDANCE),
            (guidance.correction_symbols, SymbolPurpose.CORRECTION),
        ):
            if sset is None:
                continue
            if sset.purpose is not wanted:
                raise ValidationError(f"symbol set purpose must be {wanted.value}")
            bad = errors_only(validate_symbols(sset, width, height))
            if bad:
                raise ValidationError("symbol set invalid", violations=bad)
            if wanted is SymbolPurpose.AVOIDANCE and sset.frame_index != keyframe.frame_index:
                raise FrameMismatch(
                    f"avoidance symbols on frame {sset.frame_index}, "
                    f"failure keyframe is {keyframe.frame_index}"
                )
            if wanted is SymbolPurpose.CORRECTION:
                if sset.frame_index < keyframe.frame_index:
                    raise FrameMismatch(
                        f"correction symbols on frame {sset.frame_index} precede "
                        f"keyframe {keyframe.frame_index}"
                    )
                if sset.frame_index not in sample_indices:
                    raise FrameMismatch(
                        f"correction frame {sset.frame_index} is not a sampled frame"
                    )

        for cmds, sset, label in (
            (guidance.low_level_avoidance, guidance.avoidance_symbols, "avoidance"),
            (guidance.low_level_correction, guidance.correction_symbols, "correction"),
        ):
            if not cmds or sset is None or not sset.symbols:
                continue
            symbol_arms = {s.arm for s in sset.symbols}
            for cmd in cmds:
                if cmd.arm not in symbol_arms:
                    raise ArmMismatch(
                        f"{label} command arm {cmd.arm.value} matches no symbol arm"
                    )

    # -- stage 3 ---------------------------------------------------------------

    def vlm_assist_stage3(
        self, trajectory_id: str, endpoint: ChatEndpoint, at: str | None = None
    ) -> AnnotationRecord:
        """Request draft texts from an endpoint; store them at Stage3Draft."""
        rec = self.annotations.get_record(trajectory_id)
        self._require_stage(rec, AnnotationStage.STAGE2_DONE, AnnotationStage.STAGE3_DRAFT)
        messages = self.build_assist_request(trajectory_id, rec)
        text = endpoint.complete(messages)
        obj = extract_json_object(text)
        if obj is None:
            raise ResponseParseError("assist response is not a JSON object")
        missing = [
            k
            for k in ("failure_reason", "high_level_avoidance", "high_level_correction")
            if not isinstance(obj.get(k), str)
        ]
        if missing:
            raise ResponseParseError(f"assist response missing fields: {missing}")
        drafts = DraftTexts(
            failure_reason=obj["failure_reason"],
            high_level_avoidance=obj["high_level_avoidance"],
            high_level_correction=obj["high_level_correction"],
        )
        return self.record_stage3_drafts(trajectory_id, drafts, at=at)

    def build_assist_request(
        self, trajectory_id: str, rec: AnnotationRecord | None = None
    ) -> list[ChatMessage]:
        """The exact request `vlm_assist_stage3` sends (exposed for tests)."""
        rec = rec or self.annotations.get_record(trajectory_id)
        traj = self.store.get(trajectory_id)
        lines = [f"Task: {traj.task_instruction}"]
        lines.append("Subtasks: " + " | ".join(rec.subtask_plan.subtasks))
        images: tuple[bytes, ...] = ()
        if rec.diagnosis.success:
            lines.append("Outcome: task completed successfully.")
        else:
            d = rec.diagnosis
            lines.append(
                f"Outcome: failed during subtask {d.failure_subtask_index + 1} "
                f"({rec.subtask_plan.subtasks[d.failure_subtask_index]}) "
                f"at t={d.failure_keyframe.timestamp_s:g} s; "
                f"failure type: {d.failure_type.display_name}."
            )
            overlay_set = rec.guidance.avoidance_symbols
            if overlay_set is None and (
                rec.guidance.correction_symbols is not None
                and rec.guidance.correction_symbols.frame_index
                == d.failure_keyframe.frame_index
            ):
                overlay_set = rec.guidance.correction_symbols
            frame = self.store.frame_image(trajectory_id, d.failure_keyframe.frame_index)
            if overlay_set is not None:
                frame = render_overlay(frame, overlay_set)
                lines.append("Symbol code:\n" + emit_symbol_code(overlay_set).rstrip())
            images = (encode_png(frame),)
            if rec.guidance.low_level_avoidance:
                lines.append(
                    "Avoidance commands: " + render_commands(rec.guidance.low_level_avoidance)
                )
            if rec.guidance.low_level_correction:
                lines.append(
                    "Correction commands: " + render_commands(rec.guidance.low_level_correction)
                )
        return [
            ChatMessage("system", ASSIST_SYSTEM_PROMPT),
            ChatMessage("user", "\n".join(lines), images=images),
        ]

    def record_stage3_drafts(
        self, trajectory_id: str, drafts: DraftTexts, at: str | None = None
    ) -> AnnotationRecord:
        """Store draft texts (assist output or hand-written) at Stage3Draft."""
        rec = self.annotations.get_record(trajectory_id)
        self._require_stage(rec, AnnotationStage.STAGE2_DONE, AnnotationStage.STAGE3_DRAFT)
        if rec.diagnosis.success and (
            drafts.failure_reason or drafts.high_level_avoidance or drafts.high_level_correction
        ):
            raise SuccessContradiction("successful trajectory takes no failure texts")
        at = at or _now_iso()
        rec = rec.advanced(
            AnnotationStage.STAGE3_DRAFT,
            at,
            diagnosis=replace(rec.diagnosis, failure_reason=drafts.failure_reason or None),
            guidance=replace(
                rec.guidance,
                high_level_avoidance=drafts.high_level_avoidance or None,
                high_level_correction=drafts.high_level_correction or None,
            ),
        )
        self.annotations.save_record(rec)
        return rec

    # -- finalize ----------------------------------------------------------------

    def finalize(
        self,
        trajectory_id: str,
        *,
        failure_reason: str | None = None,
        high_level_avoidance: str | None = None,
        high_level_correction: str | None = None,
        at: str | None = None,
    ) -> AnnotationRecord:
        """Human sign-off.  Explicit text arguments override the stage-3 drafts."""
        rec = self.annotations.get_record(trajectory_id)
        if rec.stage is AnnotationStage.FINALIZED:
            raise ImmutableError(f"{trajectory_id!r} already finalized")
        if rec.stage is not AnnotationStage.STAGE3_DRAFT:
            raise IncompleteAnnotation(f"cannot finalize from stage {rec.stage.value}")
        at = at or _now_iso()

        diagnosis = rec.diagnosis
        guidance = rec.guidance
        if not rec.diagnosis.success:
            reason = failure_reason if failure_reason is not None else diagnosis.failure_reason
            avoid = (
                high_level_avoidance
                if high_level_avoidance is not None
                else guidance.high_level_avoidance
            )
            correct = (
                high_level_correction
                if high_level_correction is not None
                else guidance.high_level_correction
            )
            missing = [
                name
                for name, value in (
                    ("failure_reason", reason),
                    ("high_level_avoidance", avoid),
                    ("high_level_correction", correct),
                )
                if not (value and value.strip())
            ]
            if missing:
                raise IncompleteAnnotation(f"missing texts: {missing}")
            diagnosis = replace(diagnosis, failure_reason=reason)
            guidance = replace(
                guidance, high_level_avoidance=avoid, high_level_correction=correct
            )

        rec = rec.advanced(
            AnnotationStage.FINALIZED, at, diagnosis=diagnosis, guidance=guidance
        )
        self.annotations.save_record(rec)
        return rec

    # -- helpers -------------------------------------------------------------------

    def _reject_if_finalized(self, trajectory_id: str) -> None:
        if self.annotations.has_record(trajectory_id):
            if self.annotations.get_record(trajectory_id).stage is AnnotationStage.FINALIZED:
                raise ImmutableError(f"{trajectory_id!r} already finalized")

    @staticmethod
    def _require_stage(rec: AnnotationRecord, *allowed: AnnotationStage) -> None:
        if rec.stage is AnnotationStage.FINALIZED:
            raise ImmutableError(f"{rec.trajectory_id!r} already finalized")
        if rec.stage not in allowed:
            names = ", ".join(s.value for s in allowed)
            raise IncompleteAnnotation(
                f"operation requires stage in ({names}), record is at {rec.stage.value}"
            )
