"""Trajectory store: ingest semantics, sampling rule, statistics."""

import math
import random

import numpy as np
import pytest
from PIL import Image

from failvis.errors import DuplicateIdError, MediaDecodeError, NotFoundError, TimestampOutOfRange
from failvis.store import (
    DURATION_BINS,
    FrameOrigin,
    Source,
    TrajectoryRecord,
    TrajectoryStore,
    merge_sample_list,
    uniform_timestamps,
)


def make_media(tmp_path, name="media", n_frames=12, fps=2.0, w=64, h=48, seed=0):
    """Frame-directory media: native indices 0..n_frames-1."""
    d = tmp_path / name
    d.mkdir(exist_ok=True)
    rs = np.random.RandomState(seed)
    for i in range(n_frames):
        arr = rs.randint(0, 256, size=(h, w, 3), dtype=np.uint8)
        Image.fromarray(arr).save(d / f"{i:06d}.png")
    return d


def make_record(tid="traj-1", duration=5.0, fps=2.0, success=False, task_id=7):
    return TrajectoryRecord(
        id=tid,
        task_id=task_id,
        task_instruction="Put the cube into the bowl",
        source=Source.TELEOPERATION,
        duration_s=duration,
        fps_native=fps,
        head_video="head",
        success=success,
    )


@pytest.fixture
def store(tmp_path):
    return TrajectoryStore(tmp_path / "data")


def test_ingest_and_get(store, tmp_path):
    media = make_media(tmp_path)
    tid = store.ingest(make_record(), media)
    assert tid == "traj-1"
    rec = store.get(tid)
    assert rec.task_instruction.startswith("Put the cube")
    assert [r.id for r in store.list_records()] == ["traj-1"]


def test_ingest_idempotent(store, tmp_path):
    media = make_media(tmp_path)
    store.ingest(make_record(), media)
    store.ingest(make_record(), media)
    assert len(store.list_records()) == 1


def test_ingest_conflict(store, tmp_path):
    media = make_media(tmp_path, seed=0)
    store.ingest(make_record(), media)
    other = make_media(tmp_path, name="media2", seed=9)
    with pytest.raises(DuplicateIdError):
        store.ingest(make_record(), other)


def test_ingest_rejects_empty_media(store, tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    with pytest.raises(MediaDecodeError):
        store.ingest(make_record(), empty)


def test_record_validation():
    with pytest.raises(ValueError):
        make_record(duration=0)
    with pytest.raises(ValueError):
        make_record(task_id=0)
    with pytest.raises(ValueError):
        TrajectoryRecord(
            id="x", task_id=1, task_instruction="", source=Source.TELEOPERATION,
            duration_s=1, fps_native=1, head_video="h",
            wrist_videos=("a", "b", "c"),
        )


def test_sampling_basic_counts(store, tmp_path):
    media = make_media(tmp_path, n_frames=16)
    store.ingest(make_record(duration=7.4), media)
    refs = store.sample_frames("traj-1")
    assert len(refs) == 8
    assert [r.timestamp_s for r in refs] == [float(t) for t in range(8)]
    assert all(r.origin is FrameOrigin.UNIFORM_SAMPLE for r in refs)


def test_sampling_merges_keyframe(store, tmp_path):
    media = make_media(tmp_path)
    store.ingest(make_record(duration=5.0), media)
    refs = store.sample_frames("traj-1", extra_keyframes=[2.0])
    assert len(refs) == 6
    at2 = [r for r in refs if r.timestamp_s == 2.0]
    assert len(at2) == 1 and at2[0].origin is FrameOrigin.KEYFRAME


def test_sampling_keyframe_off_grid(store, tmp_path):
    media = make_media(tmp_path)
    store.ingest(make_record(duration=5.0, fps=15.0), media)
    refs = store.sample_frames("traj-1", extra_keyframes=[2.6])
    assert len(refs) == 7
    kf = [r for r in refs if r.origin is FrameOrigin.KEYFRAME]
    assert [r.timestamp_s for r in kf] == [2.6]
    assert kf[0].frame_index == round(2.6 * 15.0)


def test_sampling_keyframe_absorbs_close_uniform_sample():
    # fps 2 -> collapse window 0.5 s: keyframe 2.6 swallows the uniform t=3
    refs = merge_sample_list("t", 5.0, 2.0, [2.6])
    stamps = [(r.timestamp_s, r.origin) for r in refs]
    assert (2.6, FrameOrigin.KEYFRAME) in stamps
    assert all(t != 3.0 for t, _ in stamps)
    assert len(refs) == 6


def test_sampling_out_of_range_keyframe(store, tmp_path):
    media = make_media(tmp_path)
    store.ingest(make_record(duration=5.0), media)
    with pytest.raises(TimestampOutOfRange):
        store.sample_frames("traj-1", extra_keyframes=[9.0])


def test_registered_keyframes_persist(store, tmp_path):
    media = make_media(tmp_path)
    store.ingest(make_record(duration=5.0), media)
    store.register_keyframe("traj-1", 3.4)
    refs = store.sample_frames("traj-1")
    assert any(r.origin is FrameOrigin.KEYFRAME and r.timestamp_s == 3.4 for r in refs)


def test_sample_frames_unknown_id(store):
    with pytest.raises(NotFoundError):
        store.sample_frames("nope")


def test_sample_list_sorted_unique():
    rng = random.Random(5)
    for _ in range(200):
        duration = rng.uniform(0.5, 30.0)
        fps = rng.choice([1.0, 2.0, 15.0, 30.0])
        kfs = [rng.uniform(0, duration) for _ in range(rng.randrange(4))]
        refs = merge_sample_list("t", duration, fps, kfs)
        stamps = [r.timestamp_s for r in refs]
        assert stamps == sorted(stamps)
        indices = [r.frame_index for r in refs]
        assert all(b > a for a, b in zip(indices, indices[1:]))
        for t in kfs:
            assert any(
                r.origin is FrameOrigin.KEYFRAME and abs(r.timestamp_s - t) < 1.0 / fps
                for r in refs
            )


def test_uniform_grid_rule():
    assert uniform_timestamps(7.4) == [0, 1, 2, 3, 4, 5, 6, 7]
    assert uniform_timestamps(5.0) == [0, 1, 2, 3, 4, 5]
    assert uniform_timestamps(0.3) == [0]


def test_frame_image_and_caching(store, tmp_path):
    media = make_media(tmp_path)
    store.ingest(make_record(duration=5.0), media)
    img = store.frame_image("traj-1", 4)
    assert img.shape == (48, 64, 3)
    path = store.frame_path("traj-1", 4)
    assert path.exists()
    # cached read is byte-identical
    assert np.array_equal(store.frame_image("traj-1", 4), img)
    # exact source pixels preserved (PNG is lossless)
    with Image.open(media / "000004.png") as src:
        assert np.array_equal(np.asarray(src.convert("RGB")), img)


def test_frame_index_clamped_to_available(store, tmp_path):
    media = make_media(tmp_path, n_frames=4)
    store.ingest(make_record(duration=5.0), media)
    img = store.frame_image("traj-1", 10)  # past the end: clamps to frame 3
    with Image.open(media / "000003.png") as src:
        assert np.array_equal(np.asarray(src.convert("RGB")), img)


def test_stats_empty(store):
    stats = store.dataset_stats()
    assert stats.total == 0
    assert stats.duration_histogram == [0] * len(DURATION_BINS)


def test_stats_against_brute_force(store, tmp_path):
    rng = random.Random(11)
    durations = [rng.uniform(0.5, 30.0) for _ in range(10)]
    for i, dur in enumerate(durations):
        media = make_media(tmp_path, name=f"m{i}", seed=i)
        store.ingest(
            make_record(tid=f"t{i}", duration=dur, success=(i % 3 == 0), task_id=1 + i % 5),
            media,
        )
    stats = store.dataset_stats()
    assert stats.total == 10
    # brute-force bin loop
    expected = [0] * len(DURATION_BINS)
    for dur in durations:
        for j, (lo, hi) in enumerate(DURATION_BINS):
            if dur >= lo and (hi is None or dur < hi):
                expected[j] += 1
    assert stats.duration_histogram == expected
    assert sum(stats.duration_histogram) == stats.total
    assert stats.success_count == sum(1 for i in range(10) if i % 3 == 0)


def test_stats_failure_type_join(store, tmp_path):
    media = make_media(tmp_path)
    store.ingest(make_record(), media)
    stats = store.dataset_stats(failure_types={"traj-1": "Gripper 6d-pose"})
    assert stats.by_failure_type == {"Gripper 6d-pose": 1}


def test_video_media_ingest_and_extraction(store, tmp_path):
    cv2 = pytest.importorskip("cv2")
    path = tmp_path / "head.avi"
    writer = cv2.VideoWriter(
        str(path), cv2.VideoWriter_fourcc(*"MJPG"), 2.0, (64, 48)
    )
    if not writer.isOpened():
        pytest.skip("no video codec available")
    for i in range(12):
        writer.write(np.full((48, 64, 3), i * 20, dtype=np.uint8))
    writer.release()

    store.ingest(make_record(tid="vid-1", duration=5.0, fps=2.0), path)
    img = store.frame_image("vid-1", 6)
    assert img.shape == (48, 64, 3)
    # MJPG is lossy; the flat gray level should still be close
    assert abs(int(img[10, 10].mean()) - 120) < 12
    # index past the end clamps to the last frame
    tail = store.frame_image("vid-1", 99)
    assert abs(int(tail[10, 10].mean()) - 220) < 12


def test_concurrent_ingest_and_reads(store, tmp_path):
    import threading

    media = make_media(tmp_path, n_frames=8)
    errors = []

    def ingest(i):
        try:
            store.ingest(make_record(tid=f"c{i}", duration=3.0), media)
        except Exception as exc:  # pragma: no cover - failure path
            errors.append(exc)

    threads = [threading.Thread(target=ingest, args=(i,)) for i in range(8)]
    # duplicate ingests of the same id race against distinct ids
    threads += [threading.Thread(target=ingest, args=(0,)) for _ in range(4)]
    for t in threads:
        t.start()
    readers = [threading.Thread(target=store.list_records) for _ in range(4)]
    for r in readers:
        r.start()
    for t in threads + readers:
        t.join()
    assert errors == []
    ids = sorted(r.id for r in store.list_records())
    assert ids == [f"c{i}" for i in range(8)]
    # every listed record is fully readable (no partial ingest visible)
    for tid in ids:
        assert store.get(tid).duration_s == 3.0
