"""Question/answer pair generation from finalized annotation records.

Generation is a pure function of (records, pools, seed): option order and
distractor choices come from a per-pair RNG seeded by hashing the master seed
with the trajectory id and question type, so regenerating a dataset always
yields identical pairs.  Successful trajectories contribute a failure-detection
pair only; failed trajectories contribute every applicable type.
"""

from __future__ import annotations

import hashlib
import math
import random
from typing import Iterable, Sequence

from ..annotation.commands import (
    LowLevelCommand,
    dynamic_command_pool,
    instantiate_static_pool,
    load_static_pool,
    render_commands,
)
from ..annotation.records import AnnotationRecord, AnnotationStage, FailureType
from ..errors import InsufficientPool, MissingSymbols, NotAFailure
from ..store import TrajectoryStore
from ..symbols import SymbolPurpose, emit_symbol_code
from .pools import AnnotationPools
from .templates import PROMPTS, VISUAL_GUIDANCE_PROMPTS, numbered_subtasks
from .types import (
    CLOSED_TYPES,
    OPEN_TYPES,
    CotAnswer,
    QuestionType,
    VqaPair,
    letter_for,
)

_DIAGNOSIS_TYPES = (
    QuestionType.FAILURE_DETECTION,
    QuestionType.FAILURE_KEYFRAME_LOC,
    QuestionType.FAILURE_SUBTASK_LOC,
    QuestionType.FAILURE_TYPE_ID,
)

_LOW_LEVEL_CLOSED = (QuestionType.LOW_LEVEL_AVOIDANCE, QuestionType.LOW_LEVEL_CORRECTION)


def derive_seed(master_seed: int, *parts: str) -> int:
    digest = hashlib.sha256((f"{master_seed}:" + ":".join(parts)).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def render_timestamp(ts: float) -> str:
    """Timestamps are offered at the sampling grid's 1 s resolution."""
    return f"{int(math.floor(ts + 0.5))} s"


def gen_low_level_distractors(
    truth: Sequence[LowLevelCommand],
    static_pool: Sequence[LowLevelCommand],
    dynamic_pool: Sequence[LowLevelCommand],
    seed: int,
) -> list[str]:
    """Three distractor texts for a low-level guidance question.

    Candidates come from the static pool of common commands plus the dynamic
    pool of every renderable command; all candidates must address the truth's
    active arm (its first command's arm) and none may equal the truth text.
    """
    if not truth:
        raise InsufficientPool("truth command list is empty")
    arm = truth[0].arm
    truth_text = render_commands(truth)
    candidates: list[str] = []
    seen: set[str] = set()
    for cmd in list(static_pool) + list(dynamic_pool):
        if cmd.arm is not arm:
            continue
        text = render_commands([cmd])
        if text == truth_text or text in seen:
            continue
        seen.add(text)
        candidates.append(text)
    if len(candidates) < 3:
        raise InsufficientPool(
            f"only {len(candidates)} arm-matched distractor candidates available"
        )
    return random.Random(seed).sample(sorted(candidates), 3)


class VqaGenerator:
    def __init__(
        self,
        store: TrajectoryStore,
        pools: AnnotationPools,
        seed: int,
        static_pool_templates: list[dict] | None = None,
    ):
        self.store = store
        self.pools = pools
        self.seed = seed
        self._static_templates = (
            static_pool_templates if static_pool_templates is not None else load_static_pool()
        )

    # -- entry points ---------------------------------------------------------

    def pairs_for_record(self, rec: AnnotationRecord) -> list[VqaPair]:
        """Every applicable pair for one finalized record."""
        self._require_finalized(rec)
        if rec.diagnosis.success:
            return [self.gen_closed(rec, QuestionType.FAILURE_DETECTION)]
        pairs = [self.gen_closed(rec, t) for t in _DIAGNOSIS_TYPES]
        for qtype in _LOW_LEVEL_CLOSED:
            if self._commands_for(rec, qtype):
                pairs.append(self.gen_low_level_closed(rec, qtype))
        for qtype in OPEN_TYPES:
            if self._open_type_applicable(rec, qtype):
                pairs.append(self.gen_open(rec, qtype))
        for purpose in (SymbolPurpose.AVOIDANCE, SymbolPurpose.CORRECTION):
            if self._symbols_for(rec, purpose) is not None:
                pairs.append(self.gen_visual_guidance(rec, purpose))
        return pairs

    def generate(self, records: Iterable[AnnotationRecord]) -> list[VqaPair]:
        out: list[VqaPair] = []
        for rec in records:
            out.extend(self.pairs_for_record(rec))
        return out

    # -- closed-ended -----------------------------------------------------------

    def gen_closed(self, rec: AnnotationRecord, qtype: QuestionType) -> VqaPair:
        """Multiple-choice pair for the four diagnosis types."""
        self._require_finalized(rec)
        if qtype not in _DIAGNOSIS_TYPES:
            raise ValueError(f"gen_closed handles diagnosis types, not {qtype.value}")
        if qtype is QuestionType.FAILURE_DETECTION:
            truth = (
                "The task was completed successfully."
                if rec.diagnosis.success
                else "The task was not completed."
            )
            distractors = [
                "The task was not completed."
                if rec.diagnosis.success
                else "The task was completed successfully."
            ]
        elif qtype is QuestionType.FAILURE_KEYFRAME_LOC:
            truth = render_timestamp(rec.diagnosis.failure_keyframe.timestamp_s)
            own = [
                render_timestamp(r.timestamp_s)
                for r in self.store.sample_frames(rec.trajectory_id)
            ]
            pool = [render_timestamp(t) for t in self.pools.keyframe_timestamps]
            distractors = self._pick_distractors(rec, qtype, truth, own, pool)
        elif qtype is QuestionType.FAILURE_SUBTASK_LOC:
            truth = rec.subtask_plan.subtasks[rec.diagnosis.failure_subtask_index]
            own = list(rec.subtask_plan.subtasks)
            distractors = self._pick_distractors(
                rec, qtype, truth, own, list(self.pools.subtask_texts)
            )
        else:  # FAILURE_TYPE_ID: the other three classes, all of them
            truth = rec.diagnosis.failure_type.display_name
            distractors = [
                t.display_name for t in FailureType if t is not rec.diagnosis.failure_type
            ]
        return self._assemble_closed(rec, qtype, truth, distractors)

    def gen_low_level_closed(self, rec: AnnotationRecord, qtype: QuestionType) -> VqaPair:
        """Multiple-choice pair for low-level guidance, using hybrid sampling."""
        self._require_finalized(rec)
        truth_cmds = self._commands_for(rec, qtype)
        if not truth_cmds:
            raise MissingSymbols(f"record has no {qtype.value} commands")
        arm = truth_cmds[0].arm
        seed = derive_seed(self.seed, rec.trajectory_id, qtype.value, "distractors")
        distractors = gen_low_level_distractors(
            truth_cmds,
            instantiate_static_pool(self._static_templates, arm),
            dynamic_command_pool(arm),
            seed,
        )
        return self._assemble_closed(rec, qtype, render_commands(truth_cmds), distractors)

    def _pick_distractors(
        self,
        rec: AnnotationRecord,
        qtype: QuestionType,
        truth: str,
        own_candidates: list[str],
        pool_candidates: list[str],
    ) -> list[str]:
        """Prefer the record's own candidate list; fall back to the dataset pool."""

        def distinct(cands: list[str]) -> list[str]:
            seen, out = set(), []
            for c in cands:
                if c != truth and c not in seen:
                    seen.add(c)
                    out.append(c)
            return out

        own = distinct(own_candidates)
        source = own if len(own) >= 3 else distinct(pool_candidates)
        if len(source) < 3:
            raise InsufficientPool(
                f"{qtype.value}: {len(source)} distractor candidates for {rec.trajectory_id}"
            )
        seed = derive_seed(self.seed, rec.trajectory_id, qtype.value, "distractors")
        return random.Random(seed).sample(source, 3)

    def _assemble_closed(
        self, rec: AnnotationRecord, qtype: QuestionType, truth: str, distractors: list[str]
    ) -> VqaPair:
        options = [truth] + list(distractors)
        seed = derive_seed(self.seed, rec.trajectory_id, qtype.value, "options")
        random.Random(seed).shuffle(options)
        answer = letter_for(options.index(truth))
        return VqaPair(
            id=f"{rec.trajectory_id}:{qtype.value}",
            question_type=qtype,
            trajectory_id=rec.trajectory_id,
            prompt=self._prompt(rec, qtype),
            media=self._media_for(rec, qtype),
            options=tuple(options),
            answer=answer,
            option_seed=seed,
        )

    # -- open-ended ------------------------------------------------------------

    def gen_open(self, rec: AnnotationRecord, qtype: QuestionType) -> VqaPair:
        """Free-text pair; CoT types package detection -> localization -> guidance."""
        self._require_finalized(rec)
        if qtype not in OPEN_TYPES:
            raise ValueError(f"{qtype.value} is not an open-ended type")
        if rec.diagnosis.success:
            raise NotAFailure("open-ended types apply to failed trajectories only")
        cot = None
        if qtype is QuestionType.FAILURE_REASON:
            answer = rec.diagnosis.failure_reason
        elif qtype is QuestionType.HIGH_LEVEL_AVOIDANCE:
            answer = rec.guidance.high_level_avoidance
        elif qtype is QuestionType.HIGH_LEVEL_CORRECTION:
            answer = rec.guidance.high_level_correction
        else:
            cmds = self._commands_for(
                rec,
                QuestionType.LOW_LEVEL_AVOIDANCE
                if qtype is QuestionType.LOW_LEVEL_AVOIDANCE_COT
                else QuestionType.LOW_LEVEL_CORRECTION,
            )
            if not cmds:
                raise MissingSymbols(f"record has no commands for {qtype.value}")
            d = rec.diagnosis
            cot = CotAnswer(
                detection="Failure detected.",
                localization=(
                    f"The failure starts around {render_timestamp(d.failure_keyframe.timestamp_s)}, "
                    f"during subtask {d.failure_subtask_index + 1}: "
                    f"{rec.subtask_plan.subtasks[d.failure_subtask_index]}."
                ),
                guidance=render_commands(cmds),
            )
            answer = cot.render()
        return VqaPair(
            id=f"{rec.trajectory_id}:{qtype.value}",
            question_type=qtype,
            trajectory_id=rec.trajectory_id,
            prompt=self._prompt(rec, qtype),
            media=self._media_for(rec, qtype),
            answer=answer,
            cot_answer=cot,
        )

    def gen_visual_guidance(self, rec: AnnotationRecord, purpose: SymbolPurpose) -> VqaPair:
        """Symbol-code generation pair; the answer is the canonical code."""
        self._require_finalized(rec)
        sset = self._symbols_for(rec, purpose)
        if sset is None:
            raise MissingSymbols(f"record has no {purpose.value} symbols")
        width, height = self.store.frame_size(rec.trajectory_id)
        code = emit_symbol_code(sset)
        prompt = VISUAL_GUIDANCE_PROMPTS[purpose.value].format(
            instruction=self._instruction(rec), width=width, height=height
        )
        return VqaPair(
            id=f"{rec.trajectory_id}:{QuestionType.VISUAL_GUIDANCE_CODE.value}:{purpose.value}",
            question_type=QuestionType.VISUAL_GUIDANCE_CODE,
            trajectory_id=rec.trajectory_id,
            prompt=prompt,
            media=(self.store.frame_relpath(rec.trajectory_id, sset.frame_index),),
            answer=code,
            symbol_code_answer=code,
            frame_size=(width, height),
        )

    # -- helpers ------------------------------------------------------------------

    def _instruction(self, rec: AnnotationRecord) -> str:
        return self.store.get(rec.trajectory_id).task_instruction

    def _prompt(self, rec: AnnotationRecord, qtype: QuestionType) -> str:
        return PROMPTS[qtype].format(
            instruction=self._instruction(rec),
            subtasks=numbered_subtasks(rec.subtask_plan.subtasks),
        )

    def _media_for(self, rec: AnnotationRecord, qtype: QuestionType) -> tuple[str, ...]:
        tid = rec.trajectory_id
        if qtype in _LOW_LEVEL_CLOSED:
            # grounded on the failure keyframe
            return (self.store.frame_relpath(tid, rec.diagnosis.failure_keyframe.frame_index),)
        # diagnosis and open-ended types see the full sampled sequence and no
        # keyframe hint
        return tuple(
            self.store.frame_relpath(tid, r.frame_index)
            for r in self.store.sample_frames(tid)
        )

    @staticmethod
    def _commands_for(rec: AnnotationRecord, qtype: QuestionType) -> tuple[LowLevelCommand, ...]:
        if qtype in (QuestionType.LOW_LEVEL_AVOIDANCE, QuestionType.LOW_LEVEL_AVOIDANCE_COT):
            return rec.guidance.low_level_avoidance
        return rec.guidance.low_level_correction

    @staticmethod
    def _symbols_for(rec: AnnotationRecord, purpose: SymbolPurpose):
        if purpose is SymbolPurpose.AVOIDANCE:
            return rec.guidance.avoidance_symbols
        return rec.guidance.correction_symbols

    def _open_type_applicable(self, rec: AnnotationRecord, qtype: QuestionType) -> bool:
        if qtype is QuestionType.LOW_LEVEL_AVOIDANCE_COT:
            return bool(rec.guidance.low_level_avoidance)
        if qtype is QuestionType.LOW_LEVEL_CORRECTION_COT:
            return bool(rec.guidance.low_level_correction)
        if qtype is QuestionType.HIGH_LEVEL_AVOIDANCE:
            return rec.guidance.high_level_avoidance is not None
        if qtype is QuestionType.HIGH_LEVEL_CORRECTION:
            return rec.guidance.high_level_correction is not None
        return rec.diagnosis.failure_reason is not None

    @staticmethod
    def _require_finalized(rec: AnnotationRecord) -> None:
        if rec.stage is not AnnotationStage.FINALIZED:
            raise ValueError(
                f"record {rec.trajectory_id!r} is at {rec.stage.value}; generation "
                "requires finalized records"
            )
