"""Live policy-correction supervisor: polling, masking, command dispatch."""

from .adapters import (
    NO_FAILURE_REPLY,
    ScriptedAdapter,
    ScriptedDiagnosisEndpoint,
    build_scenario,
    scripted_failure_code,
)
from .cot import parse_cot_response
from .masking import (
    ROI_MARGIN_PX,
    ROI_MIN_DIM_PX,
    apply_head_mask,
    apply_mask,
    build_vsf_mask,
    expand_roi,
)
from .session import (
    DIAGNOSIS_SYSTEM_PROMPT,
    PolicyAdapter,
    SessionLog,
    SupervisorSession,
    SupervisorState,
    build_pmc_command_target,
    poll_and_diagnose,
    run_session,
    select_window_frames,
)
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

__all__ = [
    "CorrectionCommand",
    "CorrectionMode",
    "DIAGNOSIS_SYSTEM_PROMPT",
    "DiagnosisResponse",
    "MaskSpec",
    "NO_FAILURE_REPLY",
    "Observation",
    "PmcTarget",
    "PolicyAdapter",
    "ROI_MARGIN_PX",
    "ROI_MIN_DIM_PX",
    "ScriptedAdapter",
    "ScriptedDiagnosisEndpoint",
    "SessionLog",
    "SupervisorConfig",
    "SupervisorSession",
    "SupervisorState",
    "WristPolicy",
    "apply_head_mask",
    "apply_mask",
    "build_pmc_command_target",
    "build_scenario",
    "build_vsf_mask",
    "expand_roi",
    "parse_cot_response",
    "poll_and_diagnose",
    "run_session",
    "scripted_failure_code",
    "select_window_frames",
]
