"""Train/bench splits and dataset export.

Bench trajectories are sampled (seeded) from the bench task ids up to the
budget; designated out-of-distribution tasks contribute nothing to training —
their trajectories either enter the bench or are dropped.  No trajectory
appears in both splits.  The manifest is a pure function of (records, spec,
seed): regenerating it yields identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import SpecInfeasible
from ..store import TrajectoryRecord, TrajectoryStore
from .types import QuestionType, VqaPair, write_pairs_jsonl


@dataclass(frozen=True)
class SplitSpec:
    bench_task_ids: frozenset[int]
    ood_task_ids: frozenset[int] = frozenset()
    bench_trajectory_budget: int = 500

    def __post_init__(self):
        object.__setattr__(self, "bench_task_ids", frozenset(self.bench_task_ids))
        object.__setattr__(self, "ood_task_ids", frozenset(self.ood_task_ids))
        if not self.ood_task_ids <= self.bench_task_ids:
            raise ValueError("ood_task_ids must be a subset of bench_task_ids")
        if self.bench_trajectory_budget <= 0:
            raise ValueError("bench_trajectory_budget must be positive")

    def canonical_dict(self) -> dict:
        return {
            "bench_task_ids": sorted(self.bench_task_ids),
            "ood_task_ids": sorted(self.ood_task_ids),
            "bench_trajectory_budget": self.bench_trajectory_budget,
        }

    @property
    def spec_hash(self) -> str:
        return hashlib.sha256(
            json.dumps(self.canonical_dict(), sort_keys=True, separators=(",", ":")).encode()
        ).hexdigest()


@dataclass(frozen=True)
class Split:
    train_ids: tuple[str, ...]
    bench_ids: tuple[str, ...]


def build_split(
    records: Sequence[TrajectoryRecord], spec: SplitSpec, seed: int
) -> Split:
    """Partition trajectories into train and bench sets.

    Raises :class:`SpecInfeasible` when no available trajectory belongs to a
    bench task.
    """
    bench_eligible = sorted(r.id for r in records if r.task_id in spec.bench_task_ids)
    if not bench_eligible:
        raise SpecInfeasible("no trajectory belongs to any bench task")
    rng = random.Random(seed)
    k = min(spec.bench_trajectory_budget, len(bench_eligible))
    bench_ids = tuple(sorted(rng.sample(bench_eligible, k)))
    bench_set = set(bench_ids)
    train_ids = tuple(
        sorted(
            r.id
            for r in records
            if r.id not in bench_set and r.task_id not in spec.ood_task_ids
        )
    )
    return Split(train_ids=train_ids, bench_ids=bench_ids)


def split_manifest(
    records: Sequence[TrajectoryRecord],
    spec: SplitSpec,
    seed: int,
    split: Split,
    pair_counts: dict[str, dict[str, int]] | None = None,
) -> dict:
    by_id = {r.id: r for r in records}

    def side(ids: tuple[str, ...]) -> dict:
        tasks = sorted({by_id[i].task_id for i in ids})
        return {"trajectories": len(ids), "task_ids": tasks, "trajectory_ids": list(ids)}

    manifest = {
        "seed": seed,
        "spec": spec.canonical_dict(),
        "spec_hash": spec.spec_hash,
        "train": side(split.train_ids),
        "bench": side(split.bench_ids),
    }
    if pair_counts is not None:
        manifest["pair_counts"] = pair_counts
    return manifest


def write_dataset(
    out_dir: str | Path,
    pairs: Iterable[VqaPair],
    split: Split,
    manifest_base: dict,
) -> dict:
    """Write one JSON-lines file per split per question type plus the manifest.

    Returns the final manifest (with pair counts filled in).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_set, bench_set = set(split.train_ids), set(split.bench_ids)
    grouped: dict[tuple[str, QuestionType], list[VqaPair]] = {}
    for pair in pairs:
        if pair.trajectory_id in bench_set:
            side = "bench"
        elif pair.trajectory_id in train_set:
            side = "train"
        else:
            continue
        grouped.setdefault((side, pair.question_type), []).append(pair)

    counts: dict[str, dict[str, int]] = {"train": {}, "bench": {}}
    for (side, qtype), group in sorted(grouped.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
        side_dir = out_dir / side
        side_dir.mkdir(exist_ok=True)
        group = sorted(group, key=lambda p: p.id)
        write_pairs_jsonl(group, side_dir / f"{qtype.value}.jsonl")
        counts[side][qtype.value] = len(group)

    manifest = dict(manifest_base)
    manifest["pair_counts"] = counts
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return manifest


def materialize_media(store: TrajectoryStore, pairs: Iterable[VqaPair]) -> int:
    """Extract every frame referenced by the pairs; returns the frame count."""
    seen: set[str] = set()
    for pair in pairs:
        for rel in pair.media:
            if rel in seen:
                continue
            seen.add(rel)
            parts = Path(rel)
            tid = parts.parts[1]
            index = int(parts.stem)
            store.frame_path(tid, index)
    return len(seen)
