"""Trajectory store: ingest, frame sampling, and dataset statistics.

On-disk layout (stable, documented in the README)::

    <root>/
      index.jsonl                  # one line per trajectory, for cheap queries
      trajectories/<id>/
        meta.json                  # record + media descriptor + keyframes
        media/head/...             # source video file or frame-image directory
        media/wrist0/, wrist1/     # optional wrist views
        frames/000123.png          # lazily extracted frames, named by native index

Media is accepted either as a container video (decoded through OpenCV, which
is imported lazily) or as a directory of frame images whose file stems are
native frame indices.  Frame extraction is lazy and cached; sampled frames are
stored as PNG so byte-exact reads are possible.
"""

from __future__ import annotations

import hashlib
import json
import math
import shutil
import threading
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from PIL import Image

from .errors import (
    DuplicateIdError,
    MediaDecodeError,
    NotFoundError,
    TimestampOutOfRange,
)

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp"}

# Duration histogram bin edges, seconds; the last bin is open-ended.
DURATION_BINS: tuple[tuple[float, float | None], ...] = (
    (0, 4), (4, 8), (8, 12), (12, 16), (16, 20), (20, 24), (24, None),
)


class Source(str, Enum):
    TELEOPERATION = "teleoperation"
    POLICY_ROLLOUT = "policy_rollout"


class FrameOrigin(str, Enum):
    UNIFORM_SAMPLE = "uniform_sample"
    KEYFRAME = "keyframe"


class PlanProvenance(str, Enum):
    MODEL_DECOMPOSED = "model_decomposed"
    MANUALLY_EDITED = "manually_edited"


@dataclass(frozen=True)
class TrajectoryRecord:
    id: str
    task_id: int
    task_instruction: str
    source: Source
    duration_s: float
    fps_native: float
    head_video: str
    wrist_videos: tuple[str, ...] = ()
    success: bool = False

    def __post_init__(self):
        if not self.id:
            raise ValueError("trajectory id must be non-empty")
        if not (1 <= self.task_id <= 100):
            raise ValueError(f"task_id {self.task_id} outside the 1-100 namespace")
        if self.duration_s <= 0:
            raise ValueError("duration_s must be > 0")
        if self.fps_native <= 0:
            raise ValueError("fps_native must be > 0")
        if len(self.wrist_videos) > 2:
            raise ValueError("at most 2 wrist videos")
        if not isinstance(self.wrist_videos, tuple):
            object.__setattr__(self, "wrist_videos", tuple(self.wrist_videos))


@dataclass(frozen=True)
class FrameRef:
    """One sampled frame.  ``frame_index`` is the native frame number."""

    trajectory_id: str
    frame_index: int
    timestamp_s: float
    origin: FrameOrigin


@dataclass(frozen=True)
class SubtaskPlan:
    trajectory_id: str
    subtasks: tuple[str, ...]
    provenance: PlanProvenance

    def __post_init__(self):
        if not isinstance(self.subtasks, tuple):
            object.__setattr__(self, "subtasks", tuple(self.subtasks))
        if not self.subtasks:
            raise ValueError("subtask plan must be non-empty")


@dataclass
class DatasetStats:
    total: int
    success_count: int
    failure_count: int
    by_source: dict[str, int]
    by_failure_type: dict[str, int]
    duration_histogram: list[int]  # aligned with DURATION_BINS

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "success_count": self.success_count,
            "failure_count": self.failure_count,
            "by_source": self.by_source,
            "by_failure_type": self.by_failure_type,
            "duration_bins": [
                {"lo": lo, "hi": hi, "count": n}
                for (lo, hi), n in zip(DURATION_BINS, self.duration_histogram)
            ],
        }


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _record_to_dict(rec: TrajectoryRecord) -> dict:
    return {
        "id": rec.id,
        "task_id": rec.task_id,
        "task_instruction": rec.task_instruction,
        "source": rec.source.value,
        "duration_s": rec.duration_s,
        "fps_native": rec.fps_native,
        "head_video": rec.head_video,
        "wrist_videos": list(rec.wrist_videos),
        "success": rec.success,
    }


def _record_from_dict(d: Mapping) -> TrajectoryRecord:
    return TrajectoryRecord(
        id=d["id"],
        task_id=d["task_id"],
        task_instruction=d["task_instruction"],
        source=Source(d["source"]),
        duration_s=d["duration_s"],
        fps_native=d["fps_native"],
        head_video=d["head_video"],
        wrist_videos=tuple(d.get("wrist_videos", ())),
        success=d["success"],
    )


def _hash_media(path: Path) -> str:
    digest = hashlib.sha256()
    if path.is_dir():
        for f in sorted(path.rglob("*")):
            if f.is_file():
                digest.update(f.name.encode())
                digest.update(f.read_bytes())
    else:
        digest.update(path.read_bytes())
    return digest.hexdigest()


def uniform_timestamps(duration_s: float) -> list[float]:
    """1 fps sampling grid anchored at t=0 (inclusive)."""
    return [float(t) for t in range(int(math.floor(duration_s)) + 1)]


def merge_sample_list(
    trajectory_id: str,
    duration_s: float,
    fps_native: float,
    keyframes: Sequence[float],
) -> list[FrameRef]:
    """Merge the uniform grid with keyframe timestamps.

    The merged list is sorted by timestamp; two entries closer than one native
    frame interval collapse into one, keyframe origin winning.  Native frame
    numbers are derived by half-up rounding of ``t * fps_native``.
    """
    entries = [(t, FrameOrigin.UNIFORM_SAMPLE) for t in uniform_timestamps(duration_s)]
    for t in keyframes:
        if not (0 <= t <= duration_s):
            raise TimestampOutOfRange(
                f"keyframe {t} s outside 0..{duration_s} s for {trajectory_id}"
            )
        entries.append((float(t), FrameOrigin.KEYFRAME))
    # keyframes sort first on ties so they win the collapse below
    entries.sort(key=lambda e: (e[0], 0 if e[1] is FrameOrigin.KEYFRAME else 1))
    eps = 1.0 / fps_native
    merged: list[tuple[float, FrameOrigin]] = []
    for t, origin in entries:
        if merged and t - merged[-1][0] < eps:
            if origin is FrameOrigin.KEYFRAME and merged[-1][1] is not FrameOrigin.KEYFRAME:
                # keyframe wins: it replaces the nearby uniform ref outright so
                # the annotator's exact pick is what gets extracted
                merged[-1] = (t, FrameOrigin.KEYFRAME)
            continue
        merged.append((t, origin))
    return [
        FrameRef(
            trajectory_id=trajectory_id,
            frame_index=int(math.floor(t * fps_native + 0.5)),
            timestamp_s=t,
            origin=origin,
        )
        for t, origin in merged
    ]


class TrajectoryStore:
    """Shared store service.  Reads are lock-free over immutable files; all
    mutations (ingest, keyframe registration) are serialized by one lock and
    land via atomic renames, so readers never observe partial records."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        (self.root / "trajectories").mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    # -- paths -------------------------------------------------------------

    def _dir(self, trajectory_id: str) -> Path:
        return self.root / "trajectories" / trajectory_id

    def _meta_path(self, trajectory_id: str) -> Path:
        return self._dir(trajectory_id) / "meta.json"

    def _index_path(self) -> Path:
        return self.root / "index.jsonl"

    def _load_meta(self, trajectory_id: str) -> dict:
        path = self._meta_path(trajectory_id)
        if not path.exists():
            raise NotFoundError(f"unknown trajectory {trajectory_id!r}")
        return json.loads(path.read_text())

    def _write_meta(self, trajectory_id: str, meta: dict) -> None:
        path = self._meta_path(trajectory_id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(meta, indent=2, sort_keys=True))
        tmp.replace(path)

    # -- ingest ------------------------------------------------------------

    def ingest(
        self,
        meta: TrajectoryRecord,
        head_media: str | Path,
        wrist_media: Sequence[str | Path] = (),
    ) -> str:
        """Persist a trajectory.  Idempotent for identical id+content; an id
        collision with different content raises :class:`DuplicateIdError`."""
        head_media = Path(head_media)
        if not head_media.exists():
            raise MediaDecodeError(f"media path {head_media} does not exist")
        self._probe_media(head_media)
        content_hash = hashlib.sha256(
            (
                _canonical_json(_record_to_dict(meta))
                + _hash_media(head_media)
                + "".join(_hash_media(Path(w)) for w in wrist_media)
            ).encode()
        ).hexdigest()

        with self._lock:
            existing = None
            if self._meta_path(meta.id).exists():
                existing = self._load_meta(meta.id)
            if existing is not None:
                if existing["content_hash"] != content_hash:
                    raise DuplicateIdError(
                        f"trajectory {meta.id!r} already ingested with different content"
                    )
                return meta.id

            tdir = self._dir(meta.id)
            media_kind = "frames" if head_media.is_dir() else "video"
            head_dest = tdir / "media" / "head"
            head_dest.parent.mkdir(parents=True, exist_ok=True)
            if head_media.is_dir():
                shutil.copytree(head_media, head_dest)
                head_rel = "media/head"
            else:
                head_dest.mkdir(parents=True, exist_ok=True)
                shutil.copy2(head_media, head_dest / head_media.name)
                head_rel = f"media/head/{head_media.name}"
            wrist_rels = []
            for i, w in enumerate(wrist_media):
                w = Path(w)
                wdest = tdir / "media" / f"wrist{i}"
                if w.is_dir():
                    shutil.copytree(w, wdest)
                    wrist_rels.append(f"media/wrist{i}")
                else:
                    wdest.mkdir(parents=True, exist_ok=True)
                    shutil.copy2(w, wdest / w.name)
                    wrist_rels.append(f"media/wrist{i}/{w.name}")
            (tdir / "frames").mkdir(exist_ok=True)

            self._write_meta(
                meta.id,
                {
                    "record": _record_to_dict(meta),
                    "content_hash": content_hash,
                    "media": {"kind": media_kind, "head": head_rel, "wrists": wrist_rels},
                    "registered_keyframes": [],
                },
            )
            with self._index_path().open("a") as fh:
                fh.write(_canonical_json(_record_to_dict(meta)) + "\n")
        return meta.id

    @staticmethod
    def _probe_media(path: Path) -> None:
        if path.is_dir():
            frames = [f for f in path.iterdir() if f.suffix.lower() in _IMAGE_SUFFIXES]
            if not frames:
                raise MediaDecodeError(f"{path} contains no frame images")
            try:
                with Image.open(sorted(frames)[0]) as img:
                    img.verify()
            except Exception as exc:
                raise MediaDecodeError(f"cannot decode frame in {path}: {exc}") from exc
        else:
            try:
                import cv2
            except ImportError as exc:
                raise MediaDecodeError("video ingest requires opencv-python") from exc
            cap = cv2.VideoCapture(str(path))
            ok = cap.isOpened()
            cap.release()
            if not ok:
                raise MediaDecodeError(f"cannot open video {path}")

    # -- queries -----------------------------------------------------------

    def get(self, trajectory_id: str) -> TrajectoryRecord:
        return _record_from_dict(self._load_meta(trajectory_id)["record"])

    def exists(self, trajectory_id: str) -> bool:
        return self._meta_path(trajectory_id).exists()

    def list_records(
        self,
        *,
        success: bool | None = None,
        source: Source | None = None,
        task_ids: set[int] | None = None,
    ) -> list[TrajectoryRecord]:
        path = self._index_path()
        if not path.exists():
            return []
        out = []
        for line in path.read_text().splitlines():
            if not line.strip():
                continue
            rec = _record_from_dict(json.loads(line))
            if success is not None and rec.success != success:
                continue
            if source is not None and rec.source != source:
                continue
            if task_ids is not None and rec.task_id not in task_ids:
                continue
            out.append(rec)
        return out

    # -- keyframes and sampling ---------------------------------------------

    def register_keyframe(self, trajectory_id: str, timestamp_s: float) -> None:
        """Add an annotator-selected keyframe to the trajectory's sample list."""
        with self._lock:
            meta = self._load_meta(trajectory_id)
            duration = meta["record"]["duration_s"]
            if not (0 <= timestamp_s <= duration):
                raise TimestampOutOfRange(
                    f"keyframe {timestamp_s} s outside 0..{duration} s"
                )
            kfs = meta["registered_keyframes"]
            if timestamp_s not in kfs:
                kfs.append(float(timestamp_s))
                kfs.sort()
                self._write_meta(trajectory_id, meta)

    def registered_keyframes(self, trajectory_id: str) -> list[float]:
        return list(self._load_meta(trajectory_id)["registered_keyframes"])

    def sample_frames(
        self, trajectory_id: str, extra_keyframes: Sequence[float] = ()
    ) -> list[FrameRef]:
        """Sampled frame list: 1 fps uniform grid plus registered and ad-hoc
        keyframes, sorted, deduplicated within one native frame interval."""
        meta = self._load_meta(trajectory_id)
        rec = _record_from_dict(meta["record"])
        keyframes = list(meta["registered_keyframes"]) + [float(t) for t in extra_keyframes]
        return merge_sample_list(trajectory_id, rec.duration_s, rec.fps_native, keyframes)

    # -- frame access --------------------------------------------------------

    @staticmethod
    def frame_relpath(trajectory_id: str, frame_index: int) -> str:
        """Store-relative path a frame will occupy once extracted (pure)."""
        return f"trajectories/{trajectory_id}/frames/{frame_index:06d}.png"

    def frame_path(self, trajectory_id: str, frame_index: int) -> Path:
        """Path of the extracted PNG for a native frame index (extracts lazily)."""
        tdir = self._dir(trajectory_id)
        if not tdir.exists():
            raise NotFoundError(f"unknown trajectory {trajectory_id!r}")
        out = tdir / "frames" / f"{frame_index:06d}.png"
        if out.exists():
            return out
        frame = self._extract_frame(trajectory_id, frame_index)
        tmp = out.with_suffix(".png.tmp")
        Image.fromarray(frame).save(tmp, format="PNG")
        tmp.replace(out)
        return out

    def frame_image(self, trajectory_id: str, frame_index: int) -> np.ndarray:
        path = self.frame_path(trajectory_id, frame_index)
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"))

    def frame_size(self, trajectory_id: str) -> tuple[int, int]:
        """(width, height) of the head camera frames."""
        img = self.frame_image(trajectory_id, self.sample_frames(trajectory_id)[0].frame_index)
        return (img.shape[1], img.shape[0])

    def _extract_frame(self, trajectory_id: str, frame_index: int) -> np.ndarray:
        meta = self._load_meta(trajectory_id)
        media = meta["media"]
        src = self._dir(trajectory_id) / media["head"]
        if media["kind"] == "frames":
            by_index = {}
            for f in src.iterdir():
                if f.suffix.lower() in _IMAGE_SUFFIXES:
                    try:
                        by_index[int(f.stem)] = f
                    except ValueError:
                        continue
            if not by_index:
                raise MediaDecodeError(f"no indexed frames under {src}")
            # Clamp to the nearest available index at or below the request,
            # falling back to the first frame (sparse sources are allowed).
            candidates = [i for i in by_index if i <= frame_index]
            chosen = max(candidates) if candidates else min(by_index)
            with Image.open(by_index[chosen]) as img:
                return np.asarray(img.convert("RGB"))
        return self._extract_video_frame(src, frame_index)

    @staticmethod
    def _extract_video_frame(path: Path, frame_index: int) -> np.ndarray:
        try:
            import cv2
        except ImportError as exc:
            raise MediaDecodeError("video decode requires opencv-python") from exc
        cap = cv2.VideoCapture(str(path))
        try:
            if not cap.isOpened():
                raise MediaDecodeError(f"cannot open video {path}")
            total = int(cap.get(cv2.CAP_PROP_FRAME_COUNT))
            idx = min(frame_index, max(0, total - 1))
            cap.set(cv2.CAP_PROP_POS_FRAMES, idx)
            ok, bgr = cap.read()
            if not ok:
                raise MediaDecodeError(f"cannot read frame {idx} from {path}")
            return np.ascontiguousarray(bgr[:, :, ::-1])
        finally:
            cap.release()

    # -- statistics -----------------------------------------------------------

    def dataset_stats(
        self,
        *,
        success: bool | None = None,
        source: Source | None = None,
        task_ids: set[int] | None = None,
        failure_types: Mapping[str, str] | None = None,
    ) -> DatasetStats:
        """Counts and a duration histogram over the filtered trajectory set.

        ``failure_types`` optionally maps trajectory id to a failure-type name
        (joined in from annotation records) to fill the per-type counts.
        """
        records = self.list_records(success=success, source=source, task_ids=task_ids)
        histogram = [0] * len(DURATION_BINS)
        by_source: dict[str, int] = {}
        by_type: dict[str, int] = {}
        n_success = 0
        for rec in records:
            for i, (lo, hi) in enumerate(DURATION_BINS):
                if rec.duration_s >= lo and (hi is None or rec.duration_s < hi):
                    histogram[i] += 1
                    break
            by_source[rec.source.value] = by_source.get(rec.source.value, 0) + 1
            if rec.success:
                n_success += 1
            elif failure_types and rec.id in failure_types:
                name = failure_types[rec.id]
                by_type[name] = by_type.get(name, 0) + 1
        return DatasetStats(
            total=len(records),
            success_count=n_success,
            failure_count=len(records) - n_success,
            by_source=by_source,
            by_failure_type=by_type,
            duration_histogram=histogram,
        )
