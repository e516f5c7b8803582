"""Shared test fixtures: random generators for symbol sets and tiny frames."""

from __future__ import annotations

import random

import numpy as np

from failvis.symbols import (
    Arm,
    AxisColor,
    GripperState,
    Magnitude,
    RotationDir,
    SymbolInstance,
    SymbolKind,
    SymbolPurpose,
    SymbolSet,
)

FRAME_W, FRAME_H = 640, 480


def random_point(rng: random.Random, w: int = FRAME_W, h: int = FRAME_H) -> tuple[int, int]:
    return (rng.randrange(w), rng.randrange(h))


def random_symbol(
    rng: random.Random,
    frame_index: int,
    kind: SymbolKind | None = None,
    w: int = FRAME_W,
    h: int = FRAME_H,
) -> SymbolInstance:
    kind = kind or rng.choice(list(SymbolKind))
    start = random_point(rng, w, h)
    end = None
    color = rotation = state = mag = None
    arm = rng.choice([Arm.LEFT, Arm.RIGHT])
    if kind is SymbolKind.STRAIGHT_ARROW:
        end = random_point(rng, w, h)
        while end == start:
            end = random_point(rng, w, h)
        color = rng.choice(list(AxisColor))
        mag = rng.choice([None, Magnitude.SLIGHT, Magnitude.SIGNIFICANT])
    elif kind is SymbolKind.SEMI_CIRCULAR_ARROW:
        rotation = rng.choice(list(RotationDir))
    elif kind is SymbolKind.DUAL_CROSSHAIRS:
        end = random_point(rng, w, h)
        arm = rng.choice(list(Arm))
    elif kind is SymbolKind.GRIPPER_STATE:
        state = rng.choice(list(GripperState))
    elif kind in (SymbolKind.CROSSHAIR, SymbolKind.REWIND):
        arm = rng.choice(list(Arm))
    return SymbolInstance(
        kind=kind,
        frame_index=frame_index,
        start=start,
        end=end,
        color=color,
        rotation_dir=rotation,
        gripper_state=state,
        arm=arm,
        magnitude=mag,
    )


def random_symbol_set(
    rng: random.Random,
    max_symbols: int = 6,
    w: int = FRAME_W,
    h: int = FRAME_H,
    frame_index: int | None = None,
) -> SymbolSet:
    frame_index = rng.randrange(600) if frame_index is None else frame_index
    purpose = rng.choice(list(SymbolPurpose))
    symbols: list[SymbolInstance] = []
    used_state_slots: set[tuple[SymbolKind, Arm]] = set()
    for _ in range(rng.randrange(max_symbols + 1)):
        for _attempt in range(10):
            sym = random_symbol(rng, frame_index, w=w, h=h)
            slot = (sym.kind, sym.arm)
            if sym.kind in (SymbolKind.GRIPPER_STATE, SymbolKind.PROHIBITION):
                if slot in used_state_slots:
                    continue
                used_state_slots.add(slot)
            symbols.append(sym)
            break
    return SymbolSet(frame_index=frame_index, purpose=purpose, symbols=tuple(symbols))


def flat_frame(w: int = FRAME_W, h: int = FRAME_H, value: int = 128) -> np.ndarray:
    return np.full((h, w, 3), value, dtype=np.uint8)


def noise_frame(rng_seed: int, w: int = FRAME_W, h: int = FRAME_H) -> np.ndarray:
    rs = np.random.RandomState(rng_seed)
    return rs.randint(0, 256, size=(h, w, 3), dtype=np.uint8)
