"""Domain types for the visual guidance symbol language.

Seven glyph kinds, grouped in three categories:

* Motion (``STRAIGHT_ARROW``, ``SEMI_CIRCULAR_ARROW``) — translate or rotate
  an end-effector.  Straight arrows carry an axis color: red maps to the
  forward/backward axis, green to left/right, blue to up/down.
* Spatial relation (``DUAL_CROSSHAIRS``, ``CROSSHAIR``) — point out a target
  object or an alignment between two targets.
* State (``GRIPPER_STATE``, ``PROHIBITION``, ``REWIND``) — desired gripper
  state (on = closed, off = open), halt, or return to an earlier state.

All types are immutable values; every operation over them is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class SymbolKind(str, Enum):
    STRAIGHT_ARROW = "straight_arrow"
    SEMI_CIRCULAR_ARROW = "semi_circular_arrow"
    DUAL_CROSSHAIRS = "dual_crosshairs"
    CROSSHAIR = "crosshair"
    GRIPPER_STATE = "gripper_state"
    PROHIBITION = "prohibition"
    REWIND = "rewind"


class SymbolCategory(str, Enum):
    MOTION = "motion"
    SPATIAL_RELATION = "spatial_relation"
    STATE = "state"


CATEGORY_BY_KIND: dict[SymbolKind, SymbolCategory] = {
    SymbolKind.STRAIGHT_ARROW: SymbolCategory.MOTION,
    SymbolKind.SEMI_CIRCULAR_ARROW: SymbolCategory.MOTION,
    SymbolKind.DUAL_CROSSHAIRS: SymbolCategory.SPATIAL_RELATION,
    SymbolKind.CROSSHAIR: SymbolCategory.SPATIAL_RELATION,
    SymbolKind.GRIPPER_STATE: SymbolCategory.STATE,
    SymbolKind.PROHIBITION: SymbolCategory.STATE,
    SymbolKind.REWIND: SymbolCategory.STATE,
}


class AxisColor(str, Enum):
    """Straight-arrow color; each color names one motion axis."""

    RED = "red"        # forward / backward
    GREEN = "green"    # left / right
    BLUE = "blue"      # up / down


AXIS_BY_COLOR: dict[AxisColor, str] = {
    AxisColor.RED: "forward-backward",
    AxisColor.GREEN: "left-right",
    AxisColor.BLUE: "up-down",
}


class RotationDir(str, Enum):
    CLOCKWISE = "clockwise"
    COUNTERCLOCKWISE = "counterclockwise"


class GripperState(str, Enum):
    ON = "on"    # close the gripper
    OFF = "off"  # open the gripper


class Arm(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    NONE = "none"  # object-only symbols


class Magnitude(str, Enum):
    SLIGHT = "slight"
    SIGNIFICANT = "significant"


class SymbolPurpose(str, Enum):
    AVOIDANCE = "avoidance"    # anchored at the impending-failure keyframe
    CORRECTION = "correction"  # anchored at or after the failure keyframe


# Kinds that must address a specific end-effector (arm may not be NONE).
ARM_REQUIRED_KINDS = frozenset(
    {
        SymbolKind.STRAIGHT_ARROW,
        SymbolKind.SEMI_CIRCULAR_ARROW,
        SymbolKind.GRIPPER_STATE,
        SymbolKind.PROHIBITION,
    }
)

# Kinds whose geometry is a start point plus an end point.
END_REQUIRED_KINDS = frozenset({SymbolKind.STRAIGHT_ARROW, SymbolKind.DUAL_CROSSHAIRS})


@dataclass(frozen=True)
class SymbolInstance:
    """One drawn symbol.

    ``start``/``end`` are pixel points ``(x, y)``.  ``frame_index`` is the
    native frame number of the sampled frame the symbol is drawn on.
    Conditional fields follow the kind: ``color`` and ``magnitude`` belong to
    straight arrows, ``rotation_dir`` to semi-circular arrows,
    ``gripper_state`` to gripper-state badges, ``end`` to straight arrows and
    dual crosshairs.  Violations are reported by
    :func:`failvis.symbols.validation.instance_violations`, not raised here.
    """

    kind: SymbolKind
    frame_index: int
    start: tuple[int, int]
    end: tuple[int, int] | None = None
    color: AxisColor | None = None
    rotation_dir: RotationDir | None = None
    gripper_state: GripperState | None = None
    arm: Arm = Arm.NONE
    magnitude: Magnitude | None = None


@dataclass(frozen=True)
class SymbolSet:
    """An ordered group of symbols drawn on one frame for one purpose."""

    frame_index: int
    purpose: SymbolPurpose
    symbols: tuple[SymbolInstance, ...] = field(default_factory=tuple)

    def __post_init__(self):
        # Accept lists for convenience; store a tuple so the value is hashable.
        if not isinstance(self.symbols, tuple):
            object.__setattr__(self, "symbols", tuple(self.symbols))

    def __len__(self) -> int:
        return len(self.symbols)
