"""Closed vocabulary of low-level guidance commands.

Each command renders to a fixed English sentence ("Move the left gripper to
the right slightly") and parses back from it, which lets distractor sampling,
exact-match option checks, and live response parsing all share one source of
truth.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from ..symbols.types import Arm, Magnitude, RotationDir


class CommandVerb(str, Enum):
    MOVE = "move"
    ROTATE = "rotate"
    OPEN_GRIPPER = "open_gripper"
    CLOSE_GRIPPER = "close_gripper"
    HOLD_STILL = "hold_still"
    RESET_TO_INITIAL = "reset_to_initial"


class MoveDirection(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    FORWARD = "forward"
    BACKWARD = "backward"
    UP = "up"
    DOWN = "down"


_DIRECTION_PHRASE = {
    MoveDirection.LEFT: "to the left",
    MoveDirection.RIGHT: "to the right",
    MoveDirection.FORWARD: "forward",
    MoveDirection.BACKWARD: "backward",
    MoveDirection.UP: "upward",
    MoveDirection.DOWN: "downward",
}
_MAGNITUDE_ADVERB = {Magnitude.SLIGHT: "slightly", Magnitude.SIGNIFICANT: "significantly"}


@dataclass(frozen=True)
class LowLevelCommand:
    arm: Arm
    verb: CommandVerb
    direction: MoveDirection | None = None
    rotation: RotationDir | None = None
    magnitude: Magnitude | None = None

    def __post_init__(self):
        if self.arm not in (Arm.LEFT, Arm.RIGHT):
            raise ValueError("command arm must be left or right")
        if self.verb is CommandVerb.MOVE:
            if self.direction is None:
                raise ValueError("move command requires a direction")
        elif self.direction is not None:
            raise ValueError(f"{self.verb.value} does not take a direction")
        if self.verb is CommandVerb.ROTATE:
            if self.rotation is None:
                raise ValueError("rotate command requires a rotation direction")
        elif self.rotation is not None:
            raise ValueError(f"{self.verb.value} does not take a rotation")
        if self.magnitude is not None and self.verb is not CommandVerb.MOVE:
            raise ValueError("magnitude applies to move commands only")

    def as_dict(self) -> dict:
        return {
            "arm": self.arm.value,
            "verb": self.verb.value,
            "direction": self.direction.value if self.direction else None,
            "rotation": self.rotation.value if self.rotation else None,
            "magnitude": self.magnitude.value if self.magnitude else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LowLevelCommand":
        return cls(
            arm=Arm(d["arm"]),
            verb=CommandVerb(d["verb"]),
            direction=MoveDirection(d["direction"]) if d.get("direction") else None,
            rotation=RotationDir(d["rotation"]) if d.get("rotation") else None,
            magnitude=Magnitude(d["magnitude"]) if d.get("magnitude") else None,
        )


def render_command(cmd: LowLevelCommand) -> str:
    """Deterministic sentence for a command."""
    arm = cmd.arm.value
    if cmd.verb is CommandVerb.MOVE:
        text = f"Move the {arm} gripper {_DIRECTION_PHRASE[cmd.direction]}"
        if cmd.magnitude is not None:
            text += f" {_MAGNITUDE_ADVERB[cmd.magnitude]}"
        return text
    if cmd.verb is CommandVerb.ROTATE:
        return f"Rotate the {arm} gripper {cmd.rotation.value}"
    if cmd.verb is CommandVerb.OPEN_GRIPPER:
        return f"Open the {arm} gripper"
    if cmd.verb is CommandVerb.CLOSE_GRIPPER:
        return f"Close the {arm} gripper"
    if cmd.verb is CommandVerb.HOLD_STILL:
        return f"Hold the {arm} arm still"
    return f"Move the {arm} arm back to its initial pose"


def render_commands(cmds) -> str:
    return "; ".join(render_command(c) for c in cmds)


# Searched (not anchored) so commands embedded in longer sentences still parse,
# e.g. "Then hold the left arm still".  Reset is tried before plain move since
# both start with "move the <arm> arm/gripper".
_RESET_RE = re.compile(r"\bmove the (left|right) arm back to its initial pose\b")
_MOVE_RE = re.compile(
    r"\bmove the (left|right) gripper (to the left|to the right|forward|backward|upward|downward)"
    r"(?: (slightly|significantly))?\b"
)
_ROTATE_RE = re.compile(r"\brotate the (left|right) gripper (clockwise|counterclockwise)\b")
_OPEN_RE = re.compile(r"\bopen the (left|right) gripper\b")
_CLOSE_RE = re.compile(r"\bclose the (left|right) gripper\b")
_HOLD_RE = re.compile(r"\bhold the (left|right) arm still\b")

_PHRASE_TO_DIRECTION = {v: k for k, v in _DIRECTION_PHRASE.items()}
_ADVERB_TO_MAGNITUDE = {v: k for k, v in _MAGNITUDE_ADVERB.items()}


def parse_command_text(text: str) -> LowLevelCommand | None:
    """Inverse of :func:`render_command`; returns None when the sentence is
    not in the vocabulary."""
    s = text.strip().rstrip(".").strip().lower()
    m = _RESET_RE.search(s)
    if m:
        return LowLevelCommand(arm=Arm(m.group(1)), verb=CommandVerb.RESET_TO_INITIAL)
    m = _MOVE_RE.search(s)
    if m:
        return LowLevelCommand(
            arm=Arm(m.group(1)),
            verb=CommandVerb.MOVE,
            direction=_PHRASE_TO_DIRECTION[m.group(2)],
            magnitude=_ADVERB_TO_MAGNITUDE[m.group(3)] if m.group(3) else None,
        )
    m = _ROTATE_RE.search(s)
    if m:
        return LowLevelCommand(
            arm=Arm(m.group(1)), verb=CommandVerb.ROTATE, rotation=RotationDir(m.group(2))
        )
    for regex, verb in (
        (_OPEN_RE, CommandVerb.OPEN_GRIPPER),
        (_CLOSE_RE, CommandVerb.CLOSE_GRIPPER),
        (_HOLD_RE, CommandVerb.HOLD_STILL),
    ):
        m = regex.search(s)
        if m:
            return LowLevelCommand(arm=Arm(m.group(1)), verb=verb)
    return None


def parse_guidance_text(text: str) -> list[LowLevelCommand]:
    """Split free-form guidance into vocabulary commands.

    Sentences are separated by ';', '.', or newlines; sentences outside the
    vocabulary are skipped.
    """
    out = []
    for chunk in re.split(r"[;.\n]+", text):
        cmd = parse_command_text(chunk)
        if cmd is not None:
            out.append(cmd)
    return out


def dynamic_command_pool(arm: Arm) -> list[LowLevelCommand]:
    """Every renderable command for one arm."""
    cmds: list[LowLevelCommand] = []
    for direction in MoveDirection:
        for mag in (None, Magnitude.SLIGHT, Magnitude.SIGNIFICANT):
            cmds.append(
                LowLevelCommand(arm=arm, verb=CommandVerb.MOVE, direction=direction, magnitude=mag)
            )
    for rot in RotationDir:
        cmds.append(LowLevelCommand(arm=arm, verb=CommandVerb.ROTATE, rotation=rot))
    for verb in (
        CommandVerb.OPEN_GRIPPER,
        CommandVerb.CLOSE_GRIPPER,
        CommandVerb.HOLD_STILL,
        CommandVerb.RESET_TO_INITIAL,
    ):
        cmds.append(LowLevelCommand(arm=arm, verb=verb))
    return cmds


def load_static_pool(path: str | Path | None = None) -> list[dict]:
    """Static distractor pool: verb templates instantiated per arm at sampling
    time.  Ships as a data file so the pool can grow without code changes."""
    if path is not None:
        return json.loads(Path(path).read_text())
    data = resources.files("failvis").joinpath("data/static_commands.json").read_text()
    return json.loads(data)


def instantiate_static_pool(templates: list[dict], arm: Arm) -> list[LowLevelCommand]:
    out = []
    for t in templates:
        out.append(
            LowLevelCommand(
                arm=arm,
                verb=CommandVerb(t["verb"]),
                direction=MoveDirection(t["direction"]) if t.get("direction") else None,
                rotation=RotationDir(t["rotation"]) if t.get("rotation") else None,
                magnitude=Magnitude(t["magnitude"]) if t.get("magnitude") else None,
            )
        )
    return out
