"""Split construction: OOD exclusion, disjointness, manifest determinism."""

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from failvis.errors import SpecInfeasible
from failvis.store import Source, TrajectoryRecord
from failvis.vqa import (
    AnnotationPools,
    SplitSpec,
    VqaGenerator,
    build_split,
    split_manifest,
    write_dataset,
)

from .factories import build_corpus


def _records(n=40, n_tasks=10, seed=0):
    rng = random.Random(seed)
    out = []
    for i in range(n):
        out.append(
            TrajectoryRecord(
                id=f"t{i:03d}",
                task_id=1 + rng.randrange(n_tasks),
                task_instruction="x",
                source=Source.TELEOPERATION,
                duration_s=5.0,
                fps_native=2.0,
                head_video="head",
                success=False,
            )
        )
    return out


def test_ood_tasks_never_in_train():
    records = _records()
    spec = SplitSpec(bench_task_ids=frozenset({9, 10}), ood_task_ids=frozenset({10}),
                     bench_trajectory_budget=5)
    split = build_split(records, spec, seed=7)
    by_id = {r.id: r for r in records}
    assert all(by_id[tid].task_id != 10 for tid in split.train_ids)
    assert all(by_id[tid].task_id in {9, 10} for tid in split.bench_ids)


def test_split_disjoint_and_budget():
    records = _records()
    spec = SplitSpec(bench_task_ids=frozenset({1, 2, 3}), bench_trajectory_budget=4)
    split = build_split(records, spec, seed=1)
    assert len(split.bench_ids) == 4
    assert set(split.bench_ids) & set(split.train_ids) == set()


def test_non_ood_bench_tasks_may_train():
    records = _records()
    spec = SplitSpec(bench_task_ids=frozenset({1}), bench_trajectory_budget=1)
    split = build_split(records, spec, seed=0)
    by_id = {r.id: r for r in records}
    leftover_task1 = [t for t in split.train_ids if by_id[t].task_id == 1]
    assert leftover_task1  # other task-1 trajectories still train


def test_spec_validation():
    with pytest.raises(ValueError):
        SplitSpec(bench_task_ids=frozenset({1}), ood_task_ids=frozenset({2}))
    with pytest.raises(ValueError):
        SplitSpec(bench_task_ids=frozenset({1}), bench_trajectory_budget=0)


def test_spec_infeasible():
    records = _records(n_tasks=5)
    spec = SplitSpec(bench_task_ids=frozenset({77}), bench_trajectory_budget=2)
    with pytest.raises(SpecInfeasible):
        build_split(records, spec, seed=0)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_split_properties_random_specs(seed):
    rng = random.Random(seed)
    records = _records(n=rng.randrange(5, 60), n_tasks=rng.randrange(2, 12), seed=seed)
    tasks = sorted({r.task_id for r in records})
    bench_tasks = frozenset(rng.sample(tasks, rng.randrange(1, len(tasks) + 1)))
    ood = frozenset(t for t in bench_tasks if rng.random() < 0.4)
    spec = SplitSpec(bench_task_ids=bench_tasks, ood_task_ids=ood,
                     bench_trajectory_budget=rng.randrange(1, 30))
    split = build_split(records, spec, seed=seed)
    by_id = {r.id: r for r in records}
    assert set(split.train_ids).isdisjoint(split.bench_ids)
    assert all(by_id[t].task_id not in ood for t in split.train_ids)
    # same inputs, same split
    assert build_split(records, spec, seed=seed) == split


def test_manifest_regenerates_identically(tmp_path):
    store, _, annotations = build_corpus(tmp_path, n_records=8, seed=5)
    records = store.list_records()
    spec = SplitSpec(bench_task_ids=frozenset({1, 2}), ood_task_ids=frozenset({2}),
                     bench_trajectory_budget=3)
    pools = AnnotationPools.from_records(annotations)
    generator = VqaGenerator(store, pools, seed=11)
    pairs = generator.generate(annotations)

    def run(out):
        split = build_split(records, spec, seed=11)
        base = split_manifest(records, spec, 11, split)
        return write_dataset(tmp_path / out, pairs, split, base)

    m1, m2 = run("export1"), run("export2")
    assert json.dumps(m1, sort_keys=True) == json.dumps(m2, sort_keys=True)
    b1 = (tmp_path / "export1" / "manifest.json").read_bytes()
    b2 = (tmp_path / "export2" / "manifest.json").read_bytes()
    assert b1 == b2


def test_write_dataset_files_per_type(tmp_path):
    store, _, annotations = build_corpus(tmp_path, n_records=8, seed=6)
    records = store.list_records()
    spec = SplitSpec(bench_task_ids=frozenset({1}), bench_trajectory_budget=2)
    pools = AnnotationPools.from_records(annotations)
    pairs = VqaGenerator(store, pools, seed=1).generate(annotations)
    split = build_split(records, spec, seed=1)
    manifest = write_dataset(
        tmp_path / "out", pairs, split, split_manifest(records, spec, 1, split)
    )
    for side in ("train", "bench"):
        for qtype, count in manifest["pair_counts"][side].items():
            path = tmp_path / "out" / side / f"{qtype}.jsonl"
            assert path.exists()
            assert len(path.read_text().splitlines()) == count
