"""Observation masking for symbol-following correction.

The head-camera region of interest is the symbol bounding box expanded by a
50-pixel margin on every side, clamped to the frame, with each dimension
raised to at least 50 pixels (centered growth, shifted back inside the frame
when the growth hits an edge, capped at the frame size).  Pixels outside the
ROI are zeroed.  Wrist views are kept for the guided arm and zeroed for the
idle arm.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatch, EmptySetError
from ..geometry import Rect
from ..symbols import Arm, SymbolSet, symbol_bbox
from .types import MaskSpec, Observation, WristPolicy

ROI_MARGIN_PX = 50
ROI_MIN_DIM_PX = 50


def _expand_axis(lo: int, hi: int, size: int, margin: int, min_dim: int) -> tuple[int, int]:
    lo, hi = lo - margin, hi + margin
    lo, hi = max(0, lo), min(size - 1, hi)
    want = min(min_dim, size)
    width = hi - lo + 1
    if width < want:
        need = want - width
        lo -= need // 2
        hi += need - need // 2
        if lo < 0:
            hi += -lo
            lo = 0
        if hi > size - 1:
            lo -= hi - (size - 1)
            hi = size - 1
        lo = max(0, lo)
    return lo, hi


def expand_roi(
    bbox: Rect,
    frame_size: tuple[int, int],
    margin: int = ROI_MARGIN_PX,
    min_dim: int = ROI_MIN_DIM_PX,
) -> Rect:
    width, height = frame_size
    x0, x1 = _expand_axis(bbox.x0, bbox.x1, width, margin, min_dim)
    y0, y1 = _expand_axis(bbox.y0, bbox.y1, height, margin, min_dim)
    return Rect(x0, y0, x1, y1)


def build_vsf_mask(
    symbol_set: SymbolSet, frame_size: tuple[int, int], guided_arm: Arm
) -> MaskSpec:
    """Mask spec for a symbol set drawn on a frame of the given (width, height)."""
    if not symbol_set.symbols:
        raise EmptySetError("cannot build a mask from an empty symbol set")
    roi = expand_roi(symbol_bbox(symbol_set), frame_size)
    return MaskSpec(
        head_roi=roi,
        wrist_left=WristPolicy.KEEP if guided_arm is Arm.LEFT else WristPolicy.ZERO_ALL,
        wrist_right=WristPolicy.KEEP if guided_arm is Arm.RIGHT else WristPolicy.ZERO_ALL,
    )


def apply_head_mask(frame: np.ndarray, roi: Rect) -> np.ndarray:
    h, w = frame.shape[:2]
    if not (0 <= roi.x0 <= roi.x1 < w and 0 <= roi.y0 <= roi.y1 < h):
        raise DimensionMismatch(f"roi {roi.as_tuple()} outside {w}x{h} frame")
    out = np.zeros_like(frame)
    out[roi.y0 : roi.y1 + 1, roi.x0 : roi.x1 + 1] = frame[
        roi.y0 : roi.y1 + 1, roi.x0 : roi.x1 + 1
    ]
    return out


def apply_mask(obs: Observation, mask: MaskSpec) -> Observation:
    """Mask one observation; ROI pixels are byte-identical to the input."""

    def wrist(frame: np.ndarray | None, policy: WristPolicy) -> np.ndarray | None:
        if frame is None:
            return None
        return frame if policy is WristPolicy.KEEP else np.zeros_like(frame)

    return Observation(
        time_s=obs.time_s,
        head=apply_head_mask(obs.head, mask.head_roi),
        wrist_left=wrist(obs.wrist_left, mask.wrist_left),
        wrist_right=wrist(obs.wrist_right, mask.wrist_right),
    )
