"""Prompt templates for the eleven question types plus symbol-code generation.

Placeholders: ``{instruction}`` (task instruction), ``{subtasks}`` (numbered
plan), ``{width}``/``{height}`` (frame size for code generation).
"""

from __future__ import annotations

from .types import QuestionType

_FRAMES_INTRO = (
    "You are shown frames sampled at one frame per second from a robot "
    "manipulation episode.\nTask instruction: {instruction}\n"
)

_KEYFRAME_INTRO = (
    "You are shown one frame from a robot manipulation episode.\n"
    "Task instruction: {instruction}\n"
)

CLOSED_ANSWER_NOTE = "Answer with the letter of the single best option."

PROMPTS: dict[QuestionType, str] = {
    QuestionType.FAILURE_DETECTION: _FRAMES_INTRO
    + "Did the robot complete the task successfully?",
    QuestionType.FAILURE_KEYFRAME_LOC: _FRAMES_INTRO
    + "The episode fails. At what time does the impending failure first become visible?",
    QuestionType.FAILURE_SUBTASK_LOC: _FRAMES_INTRO
    + "The task is decomposed into subtasks:\n{subtasks}\n"
    + "In which subtask does the failure first occur?",
    QuestionType.FAILURE_TYPE_ID: _FRAMES_INTRO
    + "The episode fails. Which category best describes the failure?",
    QuestionType.LOW_LEVEL_AVOIDANCE: _KEYFRAME_INTRO
    + "The frame shows the moment just before an impending failure. "
    + "Which end-effector command would best avoid the failure?",
    QuestionType.LOW_LEVEL_CORRECTION: _KEYFRAME_INTRO
    + "The frame shows the robot after a failure has occurred. "
    + "Which end-effector command would best recover from the failure?",
    QuestionType.FAILURE_REASON: _FRAMES_INTRO
    + "The episode fails. Explain the root cause of the failure in detail.",
    QuestionType.HIGH_LEVEL_AVOIDANCE: _FRAMES_INTRO
    + "The episode fails. Give high-level strategic advice the robot should "
    + "have followed to avoid the failure.",
    QuestionType.HIGH_LEVEL_CORRECTION: _FRAMES_INTRO
    + "The episode fails. Give high-level strategic advice for recovering "
    + "from the failure.",
    QuestionType.LOW_LEVEL_AVOIDANCE_COT: _FRAMES_INTRO
    + "Decide whether the task is heading toward failure, locate when and in "
    + "which subtask the problem starts, then give end-effector commands that "
    + "would avoid it.\nSubtasks:\n{subtasks}\n"
    + "Answer in exactly three labeled lines:\n"
    + "Detection: <failure detected | no failure>\n"
    + "Localization: <when and where>\n"
    + "Guidance: <commands>",
    QuestionType.LOW_LEVEL_CORRECTION_COT: _FRAMES_INTRO
    + "Decide whether the task has failed, locate when and in which subtask "
    + "the failure starts, then give end-effector commands that would recover "
    + "from it.\nSubtasks:\n{subtasks}\n"
    + "Answer in exactly three labeled lines:\n"
    + "Detection: <failure detected | no failure>\n"
    + "Localization: <when and where>\n"
    + "Guidance: <commands>",
}

# Compact description of the symbol-code format, embedded in code-generation
# prompts so any endpoint can produce parseable output.
SYMBOL_CODE_FORMAT = (
    "Symbol code format: first line 'frame=<int> purpose=<avoidance|correction>', "
    "then one line per symbol: kind(key=value, ...). Kinds: straight_arrow "
    "(arm, color=red|green|blue for forward-backward|left-right|up-down, start, "
    "end, optional mag=slight|significant), semi_circular_arrow (arm, "
    "dir=clockwise|counterclockwise, start), dual_crosshairs (start, end), "
    "crosshair (start), gripper_state (arm, state=on|off, start), prohibition "
    "(arm, start), rewind (start). Points are written (x,y) in pixels, origin "
    "top-left."
)

VISUAL_GUIDANCE_PROMPTS = {
    "avoidance": _KEYFRAME_INTRO
    + "The frame shows the moment just before an impending failure. Draw "
    + "corrective guidance that avoids the failure by emitting symbol code.\n"
    + SYMBOL_CODE_FORMAT
    + "\nThe frame is {width}x{height} pixels. Reply with the code block only.",
    "correction": _KEYFRAME_INTRO
    + "The frame shows the robot after a failure has occurred. Draw guidance "
    + "that recovers from the failure by emitting symbol code.\n"
    + SYMBOL_CODE_FORMAT
    + "\nThe frame is {width}x{height} pixels. Reply with the code block only.",
}


def numbered_subtasks(subtasks) -> str:
    return "\n".join(f"{i + 1}. {s}" for i, s in enumerate(subtasks))
