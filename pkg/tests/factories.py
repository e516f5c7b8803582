"""Builders for annotated trajectory corpora used across test modules."""

from __future__ import annotations

import random
from pathlib import Path

import numpy as np
from PIL import Image

from failvis.annotation import (
    AnnotationStore,
    AnnotationWorkflow,
    CommandVerb,
    DraftTexts,
    FailureType,
    LowLevelCommand,
    MoveDirection,
)
from failvis.store import Source, TrajectoryRecord, TrajectoryStore
from failvis.symbols import (
    Arm,
    AxisColor,
    Magnitude,
    SymbolInstance,
    SymbolKind,
    SymbolPurpose,
    SymbolSet,
)

FRAME_W, FRAME_H = 96, 72


def write_frames(path: Path, n: int, seed: int, w: int = FRAME_W, h: int = FRAME_H) -> Path:
    path.mkdir(parents=True, exist_ok=True)
    rs = np.random.RandomState(seed)
    for i in range(n):
        Image.fromarray(rs.randint(0, 256, size=(h, w, 3), dtype=np.uint8)).save(
            path / f"{i:06d}.png"
        )
    return path


def build_corpus(
    root: Path,
    n_records: int = 8,
    seed: int = 0,
    success_every: int = 4,
    n_tasks: int = 5,
):
    """Create a store with ``n_records`` finalized annotations.

    Every ``success_every``-th record is a success; the rest are failures with
    avoidance/correction commands, symbol sets, and finalized texts.
    Returns (store, workflow, records).
    """
    rng = random.Random(seed)
    store = TrajectoryStore(root / "data")
    workflow = AnnotationWorkflow(store, AnnotationStore(root / "data" / "annotations"))
    media_root = root / "media_src"
    records = []

    for i in range(n_records):
        tid = f"traj-{i:04d}"
        duration = rng.choice([4.0, 5.0, 6.0, 8.0])
        fps = 2.0
        media = write_frames(media_root / tid, int(duration * fps) + 1, seed=seed * 1000 + i)
        store.ingest(
            TrajectoryRecord(
                id=tid,
                task_id=1 + (i % n_tasks),
                task_instruction=f"Task {1 + (i % n_tasks)}: place object {i} into the target bin",
                source=Source.TELEOPERATION if i % 2 == 0 else Source.POLICY_ROLLOUT,
                duration_s=duration,
                fps_native=fps,
                head_video="head",
                success=(i % success_every == 0),
            ),
            media,
        )
        workflow.set_manual_plan(
            tid, [f"Approach object {i}", f"Grasp object {i}", "Place it in the bin"]
        )
        success = i % success_every == 0
        if success:
            workflow.record_stage1(tid, success=True, at="t1")
            workflow.record_stage2(tid, at="t2")
            workflow.record_stage3_drafts(tid, DraftTexts(), at="t3")
            records.append(workflow.finalize(tid, at="t4"))
            continue

        keyframe_ts = float(rng.randrange(1, int(duration)))
        workflow.record_stage1(
            tid,
            success=False,
            keyframe_ts=keyframe_ts,
            subtask_index=rng.randrange(3),
            failure_type=rng.choice(list(FailureType)),
            at="t1",
        )
        refs = store.sample_frames(tid)
        kf_index = next(r.frame_index for r in refs if r.timestamp_s == keyframe_ts)
        arm = rng.choice([Arm.LEFT, Arm.RIGHT])
        avoid_set = SymbolSet(
            kf_index,
            SymbolPurpose.AVOIDANCE,
            (
                SymbolInstance(
                    SymbolKind.STRAIGHT_ARROW,
                    kf_index,
                    (5 + i % 20, 20),
                    end=(45 + i % 20, 20),
                    color=rng.choice(list(AxisColor)),
                    arm=arm,
                    magnitude=Magnitude.SLIGHT,
                ),
            ),
        )
        correct_index = refs[-1].frame_index
        correct_set = SymbolSet(
            correct_index,
            SymbolPurpose.CORRECTION,
            (
                SymbolInstance(SymbolKind.CROSSHAIR, correct_index, (40, 40)),
                SymbolInstance(
                    SymbolKind.STRAIGHT_ARROW,
                    correct_index,
                    (15, 50),
                    end=(70, 50),
                    color=AxisColor.BLUE,
                    arm=arm,
                ),
            ),
        )
        workflow.record_stage2(
            tid,
            low_level_avoidance=[
                LowLevelCommand(
                    arm, CommandVerb.MOVE,
                    direction=rng.choice(list(MoveDirection)),
                    magnitude=Magnitude.SLIGHT,
                )
            ],
            low_level_correction=[
                LowLevelCommand(arm, CommandVerb.MOVE, direction=MoveDirection.UP),
                LowLevelCommand(arm, CommandVerb.OPEN_GRIPPER),
            ],
            avoidance_symbols=avoid_set,
            correction_symbols=correct_set,
            at="t2",
        )
        workflow.record_stage3_drafts(
            tid,
            DraftTexts(
                failure_reason=f"The gripper drifted off target while handling object {i}.",
                high_level_avoidance="Line up above the target before descending.",
                high_level_correction="Back off, re-align with the target, and retry the grasp.",
            ),
            at="t3",
        )
        records.append(workflow.finalize(tid, at="t4"))
    return store, workflow, records
