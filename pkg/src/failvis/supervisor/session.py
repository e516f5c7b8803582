"""Supervision session: interval polling, diagnosis, correction dispatch.

State machine: MONITORING -> DIAGNOSING (while a request is evaluated) ->
CORRECTING (after a correction is dispatched) -> MONITORING (at the next
scheduled diagnosis that reports no failure).  A diagnosis request fires only
when the adapter's action-chunk counter has advanced by at least the
configured interval since the previous request, and it carries the head-camera
frames of the past ``history_window_s`` seconds sampled at ``history_fps``.

The session never mutates observations except through masking/overlay, and
the log records every request, response, command, and transition, so a run
can be replayed against its recorded responses to reproduce the exact same
transitions.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from ..annotation.commands import CommandVerb, render_commands
from ..endpoints import ChatEndpoint, ChatMessage
from ..errors import (
    AdapterError,
    EndpointError,
    NoTargetError,
    ResponseParseError,
    ValidationError,
)
from ..symbols import (
    Arm,
    SymbolKind,
    SymbolSet,
    encode_png,
    errors_only,
    render_overlay,
    target_point,
    validate_symbols,
)
from ..vqa.templates import SYMBOL_CODE_FORMAT
from .cot import parse_cot_response
from .masking import build_vsf_mask
from .types import (
    CorrectionCommand,
    CorrectionMode,
    DiagnosisResponse,
    MaskSpec,
    Observation,
    PmcTarget,
    SupervisorConfig,
    WristPolicy,
)
from ..geometry import Rect


class SupervisorState(str, Enum):
    MONITORING = "monitoring"
    DIAGNOSING = "diagnosing"
    CORRECTING = "correcting"


class PolicyAdapter(Protocol):
    """Integration point for a robot, simulator, or scripted scenario."""

    def next_observation(self) -> Observation: ...

    @property
    def chunk_counter(self) -> int: ...

    def deliver(self, command: CorrectionCommand) -> None: ...

    @property
    def task_done(self) -> bool: ...


DIAGNOSIS_SYSTEM_PROMPT = (
    "You supervise a robot manipulation policy. You receive the head-camera "
    "frames of the last few seconds in chronological order. Decide whether the "
    "task is failing. Reply in exactly three labeled lines:\n"
    "Detection: <failure detected | no failure>\n"
    "Localization: <when and where the problem starts>\n"
    "Guidance: <end-effector commands, e.g. 'Move the left gripper to the "
    "right slightly'>\n"
    "If a failure is detected, append a symbol-code block drawing the guidance "
    "on the latest frame.\n" + SYMBOL_CODE_FORMAT
)


@dataclass
class SessionLog:
    entries: list[dict] = field(default_factory=list)

    def add(self, step: int, time_s: float, kind: str, **payload) -> None:
        self.entries.append({"step": step, "time_s": time_s, "kind": kind, **payload})

    def of_kind(self, kind: str) -> list[dict]:
        return [e for e in self.entries if e["kind"] == kind]

    def transitions(self) -> list[tuple[str, str]]:
        return [(e["from"], e["to"]) for e in self.of_kind("transition")]

    def responses(self) -> list[str]:
        return [e["text"] for e in self.of_kind("response")]

    def __len__(self) -> int:
        return len(self.entries)

    def write_jsonl(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            for entry in self.entries:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")

    @classmethod
    def read_jsonl(cls, path: str | Path) -> "SessionLog":
        log = cls()
        with open(path) as fh:
            for line in fh:
                if line.strip():
                    log.entries.append(json.loads(line))
        return log


def select_window_frames(
    history: Sequence[tuple[float, np.ndarray]],
    now: float,
    window_s: float,
    fps: float,
) -> list[tuple[float, np.ndarray]]:
    """At most ``window_s * fps`` frames from the past window, newest per
    1/fps bucket, in chronological order."""
    buckets: dict[int, tuple[float, np.ndarray]] = {}
    for t, frame in history:
        age = now - t
        if 0 <= age < window_s:
            b = int(math.floor(age * fps))
            if b not in buckets or t > buckets[b][0]:
                buckets[b] = (t, frame)
    return [buckets[b] for b in sorted(buckets, reverse=True)]


def build_pmc_command_target(
    symbol_set: SymbolSet, needs_grasp: bool, default_arm: Arm | None = None
) -> PmcTarget:
    """Target point of the highest-priority symbol in the set.

    Priority: dual crosshairs (explicit alignment) over crosshair (marked
    target) over straight arrow (motion endpoint); ties go to drawing order.
    """
    priority = {
        SymbolKind.DUAL_CROSSHAIRS: 3,
        SymbolKind.CROSSHAIR: 2,
        SymbolKind.STRAIGHT_ARROW: 1,
    }
    best, best_rank = None, 0
    for sym in symbol_set.symbols:
        rank = priority.get(sym.kind, 0)
        if rank > best_rank:
            best, best_rank = sym, rank
    if best is None:
        raise NoTargetError("no symbol in the set has a target point")
    arm = best.arm if best.arm is not Arm.NONE else default_arm
    return PmcTarget(arm=arm, point=target_point(best), grasp_requested=needs_grasp)


class SupervisorSession:
    def __init__(
        self,
        config: SupervisorConfig,
        endpoint: ChatEndpoint,
        task_instruction: str = "",
    ):
        self.config = config
        self.endpoint = endpoint
        self.task_instruction = task_instruction
        self.state = SupervisorState.MONITORING
        self.log = SessionLog()
        self._history: list[tuple[float, np.ndarray]] = []
        self._last_query_chunk = 0
        self._step = 0
        self._now = 0.0
        self._pre_diagnosis_state = SupervisorState.MONITORING

    # -- observation intake ---------------------------------------------------

    def observe(self, obs: Observation, chunk_counter: int) -> None:
        self._step += 1
        self._now = obs.time_s
        self._history.append((obs.time_s, obs.head))
        horizon = obs.time_s - 2 * self.config.history_window_s
        self._history = [(t, f) for t, f in self._history if t >= horizon]
        self.log.add(self._step, obs.time_s, "step", chunk=chunk_counter)

    # -- polling ------------------------------------------------------------------

    def poll_due(self, chunk_counter: int) -> bool:
        return (
            chunk_counter - self._last_query_chunk >= self.config.query_interval_chunks
        )

    def start_request(self, now: float, chunk_counter: int) -> list[ChatMessage]:
        """Mark the cadence, log the request, and build its messages."""
        self._last_query_chunk = chunk_counter
        frames = select_window_frames(
            self._history, now, self.config.history_window_s, self.config.history_fps
        )
        self._pre_diagnosis_state = self.state
        self._transition(SupervisorState.DIAGNOSING)
        self.log.add(
            self._step,
            now,
            "request",
            chunk=chunk_counter,
            frame_times=[t for t, _ in frames],
        )
        return self._request_messages(frames)

    def fail_request(self, exc: Exception, now: float) -> None:
        """Endpoint failure: log it and resume; the policy is never blocked."""
        self.log.add(self._step, now, "endpoint_error", error=str(exc))
        self._transition(self._pre_diagnosis_state)

    def complete_request(self, text: str, now: float) -> DiagnosisResponse | None:
        self.log.add(self._step, now, "response", text=text)
        try:
            return parse_cot_response(text)
        except ResponseParseError as exc:
            # no intervention on an unusable reply; the policy keeps running
            self.log.add(self._step, now, "parse_error", error=str(exc))
            self._transition(self._pre_diagnosis_state)
            return None

    def poll_and_diagnose(self, now: float, chunk_counter: int) -> DiagnosisResponse | None:
        """Issue a diagnosis request if the chunk cadence allows; returns the
        parsed response, or None when no request was due or it was unusable."""
        if not self.poll_due(chunk_counter):
            return None
        messages = self.start_request(now, chunk_counter)
        try:
            text = self.endpoint.complete(messages)
        except EndpointError as exc:
            self.fail_request(exc, now)
            return None
        return self.complete_request(text, now)

    def _request_messages(self, frames: list[tuple[float, np.ndarray]]) -> list[ChatMessage]:
        images = tuple(encode_png(frame) for _, frame in frames)
        text = (
            f"Task instruction: {self.task_instruction}\n"
            f"The {len(images)} attached frames cover the past "
            f"{self.config.history_window_s:g} seconds in chronological order."
        )
        return [
            ChatMessage("system", DIAGNOSIS_SYSTEM_PROMPT),
            ChatMessage("user", text, images=images),
        ]

    # -- correction -------------------------------------------------------------------

    def build_correction(
        self, diagnosis: DiagnosisResponse, head_frame: np.ndarray
    ) -> CorrectionCommand | None:
        """Turn a failure diagnosis into a dispatchable command.

        Returns None (and logs why) when the symbol set does not validate
        against the frame.
        """
        h, w = head_frame.shape[:2]
        symbols = diagnosis.symbol_set
        if symbols is not None and errors_only(validate_symbols(symbols, w, h)):
            self.log.add(self._step, self._now, "invalid_symbols")
            return None
        guided_arm = diagnosis.low_level_commands[0].arm
        prompt = render_commands(diagnosis.low_level_commands)
        overlay = render_overlay(head_frame, symbols) if symbols is not None else head_frame.copy()

        if self.config.mode is CorrectionMode.VSF:
            if symbols is not None and symbols.symbols:
                mask = build_vsf_mask(symbols, (w, h), guided_arm)
            else:
                # no symbols to focus on: keep the full head view
                mask = MaskSpec(
                    head_roi=Rect(0, 0, w - 1, h - 1),
                    wrist_left=WristPolicy.KEEP if guided_arm is Arm.LEFT else WristPolicy.ZERO_ALL,
                    wrist_right=WristPolicy.KEEP if guided_arm is Arm.RIGHT else WristPolicy.ZERO_ALL,
                )
            return CorrectionCommand(
                mode=CorrectionMode.VSF,
                overlay_frame=overlay,
                textual_prompt=prompt,
                mask=mask,
            )

        needs_grasp = any(
            c.verb is CommandVerb.CLOSE_GRIPPER for c in diagnosis.low_level_commands
        )
        try:
            target = build_pmc_command_target(symbols, needs_grasp, guided_arm) if symbols else None
        except NoTargetError:
            target = None
        if target is None:
            # nothing to drive toward: tell the arm to stay put
            hold = f"Hold the {guided_arm.value} arm still"
            return CorrectionCommand(
                mode=CorrectionMode.PMC,
                overlay_frame=overlay,
                textual_prompt=hold,
                pmc_fallback_hold=True,
            )
        return CorrectionCommand(
            mode=CorrectionMode.PMC,
            overlay_frame=overlay,
            textual_prompt=prompt,
            pmc_target=target,
        )

    # -- state -----------------------------------------------------------------------------

    def _transition(self, to: SupervisorState) -> None:
        if to is self.state:
            return
        self.log.add(self._step, self._now, "transition", **{"from": self.state.value, "to": to.value})
        self.state = to

    def handle_diagnosis(
        self, diagnosis: DiagnosisResponse, obs: Observation, adapter: PolicyAdapter
    ) -> None:
        if not diagnosis.failed:
            self._transition(SupervisorState.MONITORING)
            return
        command = self.build_correction(diagnosis, obs.head)
        if command is None:
            self._transition(SupervisorState.MONITORING)
            return
        adapter.deliver(command)
        self.log.add(
            self._step,
            self._now,
            "command",
            mode=command.mode.value,
            prompt=command.textual_prompt,
            roi=command.mask.head_roi.as_tuple() if command.mask else None,
            target=command.pmc_target.point if command.pmc_target else None,
            fallback_hold=command.pmc_fallback_hold,
        )
        self._transition(SupervisorState.CORRECTING)


def poll_and_diagnose(
    session: SupervisorSession, now: float, chunk_counter: int
) -> DiagnosisResponse | None:
    return session.poll_and_diagnose(now, chunk_counter)


def run_session(
    config: SupervisorConfig,
    adapter: PolicyAdapter,
    endpoint: ChatEndpoint,
    max_steps: int,
    task_instruction: str = "",
    background_diagnosis: bool = False,
) -> SessionLog:
    """Drive the supervision loop against an adapter.

    Ends at ``max_steps`` or when the adapter reports the task done; adapter
    failures abort the session, and the raised :class:`AdapterError` carries
    the partial log.

    With ``background_diagnosis`` the endpoint call runs on a worker thread so
    observation delivery is never blocked by a slow model; at most one request
    is outstanding, and its result is handled at the step it completes.  The
    default synchronous mode trades that for replay-identical logs.
    """
    session = SupervisorSession(config, endpoint, task_instruction)
    log = session.log
    executor = ThreadPoolExecutor(max_workers=1) if background_diagnosis else None
    pending: Future[str] | None = None
    try:
        for step in range(1, max_steps + 1):
            if adapter.task_done:
                log.add(session._step, session._now, "done", reason="task_done")
                break
            try:
                obs = adapter.next_observation()
            except Exception as exc:
                log.add(session._step + 1, session._now, "abort", error=str(exc))
                error = AdapterError(f"adapter failed at step {step}: {exc}")
                error.log = log
                raise error from exc
            session.observe(obs, adapter.chunk_counter)

            if executor is None:
                diagnosis = session.poll_and_diagnose(obs.time_s, adapter.chunk_counter)
                if diagnosis is not None:
                    session.handle_diagnosis(diagnosis, obs, adapter)
                continue

            if pending is not None and pending.done():
                try:
                    text = pending.result()
                except EndpointError as exc:
                    session.fail_request(exc, obs.time_s)
                else:
                    diagnosis = session.complete_request(text, obs.time_s)
                    if diagnosis is not None:
                        session.handle_diagnosis(diagnosis, obs, adapter)
                pending = None
            if pending is None and session.poll_due(adapter.chunk_counter):
                messages = session.start_request(obs.time_s, adapter.chunk_counter)
                pending = executor.submit(endpoint.complete, messages)
        else:
            log.add(session._step, session._now, "done", reason="max_steps")
    finally:
        if executor is not None:
            executor.shutdown(wait=False, cancel_futures=True)
    return log
