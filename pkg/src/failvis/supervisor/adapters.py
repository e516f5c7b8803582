"""Scripted adapters and diagnosis endpoints for offline runs and tests."""

from __future__ import annotations

import time
from typing import Sequence

import numpy as np

from ..endpoints import ChatMessage
from .types import CorrectionCommand, Observation


def _frame(step: int, width: int, height: int) -> np.ndarray:
    # content varies by step so request windows are distinguishable
    return np.full((height, width, 3), step % 251, dtype=np.uint8)


class ScriptedAdapter:
    """Deterministic policy stand-in.

    One action chunk per step, 1 s of wall time per step.  When
    ``fail_at_step`` is set the scenario reports a failure from that step on,
    clearing (by default) once a correction command is delivered.
    ``raise_at_step`` simulates an adapter fault.
    """

    def __init__(
        self,
        total_steps: int,
        frame_width: int = 96,
        frame_height: int = 72,
        step_dt: float = 1.0,
        fail_at_step: int | None = None,
        clears_on_delivery: bool = True,
        raise_at_step: int | None = None,
        sleep_per_step_s: float = 0.0,
    ):
        self.total_steps = total_steps
        self.frame_width = frame_width
        self.frame_height = frame_height
        self.step_dt = step_dt
        self.fail_at_step = fail_at_step
        self.clears_on_delivery = clears_on_delivery
        self.raise_at_step = raise_at_step
        # wall-clock pacing; lets background diagnosis threads interleave the
        # way a real control loop would
        self.sleep_per_step_s = sleep_per_step_s
        self.delivered: list[CorrectionCommand] = []
        self._step = 0
        self._corrected = False

    @property
    def failing(self) -> bool:
        if self.fail_at_step is None or self._corrected:
            return False
        return self._step >= self.fail_at_step

    def next_observation(self) -> Observation:
        self._step += 1
        if self.raise_at_step is not None and self._step >= self.raise_at_step:
            raise RuntimeError("scripted adapter fault")
        if self.sleep_per_step_s > 0:
            time.sleep(self.sleep_per_step_s)
        return Observation(
            time_s=self._step * self.step_dt,
            head=_frame(self._step, self.frame_width, self.frame_height),
        )

    @property
    def chunk_counter(self) -> int:
        return self._step

    def deliver(self, command: CorrectionCommand) -> None:
        self.delivered.append(command)
        if self.clears_on_delivery:
            self._corrected = True

    @property
    def task_done(self) -> bool:
        return False


NO_FAILURE_REPLY = "Detection: no failure\nLocalization: n/a\nGuidance: n/a"

FAILURE_REPLY_TEMPLATE = (
    "Detection: failure detected\n"
    "Localization: the gripper drifted off target in the last second\n"
    "Guidance: Move the left gripper to the right slightly; Close the left gripper\n"
    "{code}"
)


def scripted_failure_code(frame_width: int, frame_height: int) -> str:
    x = min(20, frame_width - 2)
    y = min(20, frame_height - 2)
    return (
        "frame=0 purpose=correction\n"
        f"straight_arrow(arm=left, color=green, start=({x},{y}), "
        f"end=({min(x + 30, frame_width - 1)},{y}))\n"
        f"crosshair(start=({min(x + 40, frame_width - 1)},{min(y + 10, frame_height - 1)}))\n"
    )


class ScriptedDiagnosisEndpoint:
    """Replies in lockstep with a scripted adapter's failure flag."""

    def __init__(self, adapter: ScriptedAdapter):
        self.adapter = adapter
        self.calls = 0

    def complete(self, messages: Sequence[ChatMessage]) -> str:
        self.calls += 1
        if self.adapter.failing:
            code = scripted_failure_code(self.adapter.frame_width, self.adapter.frame_height)
            return FAILURE_REPLY_TEMPLATE.format(code=code)
        return NO_FAILURE_REPLY


def build_scenario(name: str, total_steps: int = 60) -> tuple[ScriptedAdapter, ScriptedDiagnosisEndpoint]:
    """Named scenarios for the CLI: ``never_fail``, ``fail_once``, ``adapter_fault``."""
    if name == "never_fail":
        adapter = ScriptedAdapter(total_steps)
    elif name == "fail_once":
        adapter = ScriptedAdapter(total_steps, fail_at_step=max(2, total_steps // 4))
    elif name == "adapter_fault":
        adapter = ScriptedAdapter(total_steps, raise_at_step=3)
    else:
        raise ValueError(f"unknown scenario {name!r}")
    return adapter, ScriptedDiagnosisEndpoint(adapter)
