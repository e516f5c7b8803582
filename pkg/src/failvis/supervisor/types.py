"""Supervisor domain types: config, diagnosis, masks, correction commands."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..annotation.commands import LowLevelCommand
from ..endpoints import ModelEndpointConfig
from ..geometry import Rect
from ..symbols import Arm, SymbolSet


class CorrectionMode(str, Enum):
    VSF = "vsf"  # masked observation + overlay, policy follows the symbols
    PMC = "pmc"  # low-level controller drives to the symbol's target point


class WristPolicy(str, Enum):
    KEEP = "keep"
    ZERO_ALL = "zero_all"


@dataclass(frozen=True)
class SupervisorConfig:
    query_interval_chunks: int = 6
    history_window_s: float = 5.0
    history_fps: float = 1.0
    mode: CorrectionMode = CorrectionMode.VSF
    endpoint: ModelEndpointConfig | None = None

    def __post_init__(self):
        if self.query_interval_chunks < 1:
            raise ValueError("query_interval_chunks must be >= 1")
        if self.history_window_s <= 0:
            raise ValueError("history_window_s must be > 0")
        if self.history_fps <= 0:
            raise ValueError("history_fps must be > 0")


@dataclass(frozen=True)
class DiagnosisResponse:
    failed: bool
    cot_text: str = ""
    low_level_commands: tuple[LowLevelCommand, ...] = ()
    symbol_set: SymbolSet | None = None

    def __post_init__(self):
        if not self.failed and (self.low_level_commands or self.symbol_set is not None):
            raise ValueError("a no-failure diagnosis carries no guidance")


@dataclass(frozen=True)
class MaskSpec:
    head_roi: Rect
    wrist_left: WristPolicy = WristPolicy.ZERO_ALL
    wrist_right: WristPolicy = WristPolicy.ZERO_ALL

    def wrist_policy(self, arm: Arm) -> WristPolicy:
        return self.wrist_left if arm is Arm.LEFT else self.wrist_right


@dataclass(frozen=True)
class PmcTarget:
    arm: Arm | None
    point: tuple[int, int]
    grasp_requested: bool = False


@dataclass(frozen=True)
class Observation:
    time_s: float
    head: np.ndarray
    wrist_left: np.ndarray | None = None
    wrist_right: np.ndarray | None = None


@dataclass(frozen=True)
class CorrectionCommand:
    """Dispatch payload for the policy adapter.

    VSF commands carry a mask; PMC commands carry a target point, except for
    the hold-still fallback used when no symbol in the set has a target (the
    textual prompt then tells the arm to stay put).
    """

    mode: CorrectionMode
    overlay_frame: np.ndarray
    textual_prompt: str
    mask: MaskSpec | None = None
    pmc_target: PmcTarget | None = None
    pmc_fallback_hold: bool = False

    def __post_init__(self):
        if self.mode is CorrectionMode.VSF:
            if self.mask is None or self.pmc_target is not None or self.pmc_fallback_hold:
                raise ValueError("VSF command requires a mask and no PMC payload")
        else:
            if self.mask is not None:
                raise ValueError("PMC command carries no mask")
            if (self.pmc_target is not None) == self.pmc_fallback_hold:
                raise ValueError("PMC command needs a target xor the hold fallback")
