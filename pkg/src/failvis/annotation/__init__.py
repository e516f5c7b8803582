"""Failure annotation: command vocabulary, record model, staged workflow."""

from .commands import (
    CommandVerb,
    LowLevelCommand,
    MoveDirection,
    dynamic_command_pool,
    instantiate_static_pool,
    load_static_pool,
    parse_command_text,
    parse_guidance_text,
    render_command,
    render_commands,
)
from .pipeline import (
    ASSIST_SYSTEM_PROMPT,
    AnnotationStore,
    AnnotationWorkflow,
    extract_json_object,
    parse_numbered_list,
)
from .records import (
    AnnotationRecord,
    AnnotationStage,
    CorrectiveGuidance,
    DraftTexts,
    FailureDiagnosis,
    FailureType,
    record_from_dict,
    record_to_dict,
    stage_rank,
)

__all__ = [
    "ASSIST_SYSTEM_PROMPT",
    "AnnotationRecord",
    "AnnotationStage",
    "AnnotationStore",
    "AnnotationWorkflow",
    "CommandVerb",
    "CorrectiveGuidance",
    "DraftTexts",
    "FailureDiagnosis",
    "FailureType",
    "LowLevelCommand",
    "MoveDirection",
    "dynamic_command_pool",
    "extract_json_object",
    "instantiate_static_pool",
    "load_static_pool",
    "parse_command_text",
    "parse_guidance_text",
    "parse_numbered_list",
    "record_from_dict",
    "record_to_dict",
    "render_command",
    "render_commands",
    "stage_rank",
]
