"""Bounding boxes and target points."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from failvis.errors import EmptySetError, NoTargetError
from failvis.geometry import Rect
from failvis.symbols import (
    Arm,
    AxisColor,
    SymbolInstance,
    SymbolKind,
    SymbolPurpose,
    SymbolSet,
    symbol_bbox,
    target_point,
)

from .helpers import random_symbol_set


def test_single_crosshair_bbox():
    sset = SymbolSet(
        0, SymbolPurpose.AVOIDANCE, (SymbolInstance(SymbolKind.CROSSHAIR, 0, (100, 100)),)
    )
    assert symbol_bbox(sset) == Rect(76, 76, 124, 124)


def test_bbox_union_with_origin_clamp():
    arrow = SymbolInstance(
        SymbolKind.STRAIGHT_ARROW, 0, (10, 10), end=(200, 50), color=AxisColor.RED, arm=Arm.LEFT
    )
    mark = SymbolInstance(SymbolKind.CROSSHAIR, 0, (300, 300))
    sset = SymbolSet(0, SymbolPurpose.AVOIDANCE, (arrow, mark))
    # brute-force union of per-point footprints, clamped at the origin
    xs, ys = [], []
    for pt in [(10, 10), (200, 50), (300, 300)]:
        xs += [pt[0] - 24, pt[0] + 24]
        ys += [pt[1] - 24, pt[1] + 24]
    expected = Rect(max(0, min(xs)), max(0, min(ys)), max(xs), max(ys))
    assert symbol_bbox(sset) == expected
    assert expected.x0 == 0 and expected.x1 == 324 and expected.y1 == 324


def test_bbox_empty_set():
    with pytest.raises(EmptySetError):
        symbol_bbox(SymbolSet(0, SymbolPurpose.AVOIDANCE))


@settings(max_examples=150)
@given(st.integers(min_value=0, max_value=10_000_000))
def test_bbox_monotone_under_subset(seed):
    rng = random.Random(seed)
    sset = random_symbol_set(rng)
    if not sset.symbols:
        return
    box = symbol_bbox(sset)
    k = rng.randrange(1, len(sset.symbols) + 1)
    subset = SymbolSet(sset.frame_index, sset.purpose, sset.symbols[:k])
    assert box.covers(symbol_bbox(subset))


def test_bbox_invariant_to_reordering():
    rng = random.Random(42)
    for _ in range(50):
        sset = random_symbol_set(rng)
        if not sset.symbols:
            continue
        shuffled = list(sset.symbols)
        rng.shuffle(shuffled)
        other = SymbolSet(sset.frame_index, sset.purpose, tuple(shuffled))
        assert symbol_bbox(sset) == symbol_bbox(other)


def test_target_points():
    mark = SymbolInstance(SymbolKind.CROSSHAIR, 0, (321, 144))
    assert target_point(mark) == (321, 144)
    arrow = SymbolInstance(
        SymbolKind.STRAIGHT_ARROW, 0, (0, 0), end=(50, 60), color=AxisColor.BLUE, arm=Arm.LEFT
    )
    assert target_point(arrow) == (50, 60)
    dual = SymbolInstance(SymbolKind.DUAL_CROSSHAIRS, 0, (5, 5), end=(9, 9))
    assert target_point(dual) == (9, 9)


def test_no_target_for_state_symbols():
    bad = SymbolInstance(SymbolKind.PROHIBITION, 0, (5, 5), arm=Arm.LEFT)
    with pytest.raises(NoTargetError):
        target_point(bad)
