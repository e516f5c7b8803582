"""Request bodies for the annotation API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class LeaseBody(BaseModel):
    annotator_id: str = Field(min_length=1)


class KeyframeBody(BaseModel):
    timestamp_s: float


class PlanBody(BaseModel):
    subtasks: list[str] = Field(min_length=1)


class Stage1Body(BaseModel):
    success: bool
    keyframe_ts: float | None = None
    subtask_index: int | None = None
    failure_type: str | None = None


class CommandBody(BaseModel):
    arm: str
    verb: str
    direction: str | None = None
    rotation: str | None = None
    magnitude: str | None = None


class Stage2Body(BaseModel):
    low_level_avoidance: list[CommandBody] = []
    low_level_correction: list[CommandBody] = []
    avoidance_code: str | None = None
    correction_code: str | None = None


class Stage3Body(BaseModel):
    failure_reason: str = ""
    high_level_avoidance: str = ""
    high_level_correction: str = ""


class FinalizeBody(BaseModel):
    failure_reason: str | None = None
    high_level_avoidance: str | None = None
    high_level_correction: str | None = None


class SymbolCheckBody(BaseModel):
    code: str
    width: int = Field(gt=0)
    height: int = Field(gt=0)


class ExportBody(BaseModel):
    name: str = Field(min_length=1, pattern=r"^[A-Za-z0-9_\-]+$")
    bench_task_ids: list[int]
    ood_task_ids: list[int] = []
    bench_trajectory_budget: int = 500
    seed: int = 0
    materialize_frames: bool = False


class EndpointBody(BaseModel):
    base_url: str
    model_name: str
    api_key_env_var: str | None = None
    temperature: float = 0.0
    max_new_tokens: int = 2048
    timeout_s: float = 60.0
    max_retries: int = 3
    max_in_flight: int = 4


class EvalRunBody(BaseModel):
    run_id: str = Field(min_length=1, pattern=r"^[A-Za-z0-9_\-]+$")
    export_name: str
    endpoint: EndpointBody
    judge_endpoint: EndpointBody | None = None
    judge_scale: float = 100.0
    max_items: int | None = None
