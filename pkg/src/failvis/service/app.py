"""HTTP API for the annotation front-end and automation.

Every endpoint is a thin validated wrapper over the library operations:
validation failures surface the library's violation list verbatim with
status 422, lease conflicts give 409, unknown ids 404.  Responses carry the
serialization schema version.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import Depends, FastAPI, Header, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .. import SCHEMA_VERSION
from ..annotation import (
    AnnotationStore,
    AnnotationWorkflow,
    DraftTexts,
    FailureType,
    LowLevelCommand,
    record_to_dict,
)
from ..endpoints import ChatEndpoint, HttpChatEndpoint, ModelEndpointConfig
from ..errors import (
    ArmMismatch,
    DuplicateIdError,
    EndpointError,
    FailvisError,
    FrameMismatch,
    ImmutableError,
    IncompleteAnnotation,
    InsufficientPool,
    KeyframeNotInSampleList,
    LeaseConflict,
    NotFoundError,
    ResponseParseError,
    SpecInfeasible,
    SubtaskIndexOutOfRange,
    SuccessContradiction,
    SymbolSemanticError,
    SymbolSyntaxError,
    TimestampOutOfRange,
    ValidationError,
)
from ..evaluation import run_benchmark
from ..store import TrajectoryStore
from ..symbols import (
    DEFAULT_STYLE,
    emit_symbol_code,
    errors_only,
    parse_symbol_code,
    symbol_bbox,
    validate_symbols,
)
from ..vqa import (
    AnnotationPools,
    SplitSpec,
    VqaGenerator,
    build_split,
    materialize_media,
    split_manifest,
    write_dataset,
)
from .leases import LeaseManager
from .schemas import (
    EvalRunBody,
    ExportBody,
    FinalizeBody,
    KeyframeBody,
    LeaseBody,
    PlanBody,
    Stage1Body,
    Stage2Body,
    Stage3Body,
    SymbolCheckBody,
)

_STATUS_BY_ERROR: list[tuple[type, int]] = [
    (NotFoundError, 404),
    (LeaseConflict, 409),
    (ImmutableError, 409),
    (DuplicateIdError, 409),
    (ValidationError, 422),
    (SymbolSyntaxError, 422),
    (SymbolSemanticError, 422),
    (FrameMismatch, 422),
    (ArmMismatch, 422),
    (SuccessContradiction, 422),
    (SubtaskIndexOutOfRange, 422),
    (KeyframeNotInSampleList, 422),
    (IncompleteAnnotation, 422),
    (TimestampOutOfRange, 422),
    (InsufficientPool, 422),
    (SpecInfeasible, 422),
    (EndpointError, 502),
    (ResponseParseError, 502),
]


def _status_for(exc: FailvisError) -> int:
    for cls, status in _STATUS_BY_ERROR:
        if isinstance(exc, cls):
            return status
    return 500


def versioned(payload: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, **payload}


def create_app(
    data_root: str | Path,
    assist_endpoint: ChatEndpoint | None = None,
    decompose_endpoint: ChatEndpoint | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    data_root = Path(data_root)
    store = TrajectoryStore(data_root)
    annotations = AnnotationStore(data_root / "annotations")
    workflow = AnnotationWorkflow(store, annotations)
    leases = LeaseManager()
    app = FastAPI(title="failvis annotation service")

    @app.exception_handler(FailvisError)
    async def _failvis_error(request: Request, exc: FailvisError):
        body = {"error": type(exc).__name__, "detail": str(exc)}
        if isinstance(exc, ValidationError) and exc.violations:
            body["violations"] = [v.as_dict() for v in exc.violations]
        return JSONResponse(status_code=_status_for(exc), content=versioned(body))

    def require_lease(
        trajectory_id: str, x_lease_token: str | None = Header(default=None)
    ) -> str:
        if not x_lease_token:
            raise LeaseConflict("mutating calls require an X-Lease-Token header")
        leases.validate(trajectory_id, x_lease_token)
        return x_lease_token

    # -- discovery ----------------------------------------------------------

    @app.get("/health")
    def health():
        return versioned({"status": "ok"})

    @app.get("/style")
    def style():
        return versioned({"style": DEFAULT_STYLE.as_dict()})

    @app.get("/stats")
    def stats():
        failure_types = {}
        for rec in annotations.list_records():
            if rec.diagnosis.failure_type is not None:
                failure_types[rec.trajectory_id] = rec.diagnosis.failure_type.display_name
        return versioned({"stats": store.dataset_stats(failure_types=failure_types).as_dict()})

    # -- trajectories ---------------------------------------------------------

    @app.get("/trajectories")
    def list_trajectories(success: bool | None = None, task_id: int | None = None):
        records = store.list_records(
            success=success, task_ids={task_id} if task_id is not None else None
        )
        out = []
        for rec in records:
            stage = None
            if annotations.has_record(rec.id):
                stage = annotations.get_record(rec.id).stage.value
            out.append(
                {
                    "id": rec.id,
                    "task_id": rec.task_id,
                    "task_instruction": rec.task_instruction,
                    "source": rec.source.value,
                    "duration_s": rec.duration_s,
                    "fps_native": rec.fps_native,
                    "success": rec.success,
                    "annotation_stage": stage,
                }
            )
        return versioned({"trajectories": out})

    @app.get("/trajectories/{trajectory_id}")
    def get_trajectory(trajectory_id: str):
        rec = store.get(trajectory_id)
        width, height = store.frame_size(trajectory_id)
        return versioned(
            {
                "id": rec.id,
                "task_id": rec.task_id,
                "task_instruction": rec.task_instruction,
                "source": rec.source.value,
                "duration_s": rec.duration_s,
                "fps_native": rec.fps_native,
                "success": rec.success,
                "frame_width": width,
                "frame_height": height,
                "wrist_views": len(rec.wrist_videos),
                "registered_keyframes": store.registered_keyframes(trajectory_id),
            }
        )

    @app.get("/trajectories/{trajectory_id}/frames")
    def sample_list(trajectory_id: str):
        refs = store.sample_frames(trajectory_id)
        return versioned(
            {
                "frames": [
                    {
                        "frame_index": r.frame_index,
                        "timestamp_s": r.timestamp_s,
                        "origin": r.origin.value,
                    }
                    for r in refs
                ]
            }
        )

    @app.get("/trajectories/{trajectory_id}/frames/{frame_index}")
    def frame_png(trajectory_id: str, frame_index: int):
        path = store.frame_path(trajectory_id, frame_index)
        return Response(
            content=path.read_bytes(),
            media_type="image/png",
            headers={"X-Schema-Version": str(SCHEMA_VERSION)},
        )

    # -- leases ------------------------------------------------------------------

    @app.post("/trajectories/{trajectory_id}/lease")
    def acquire_lease(trajectory_id: str, body: LeaseBody):
        store.get(trajectory_id)
        lease = leases.acquire(trajectory_id, body.annotator_id)
        return versioned({"token": lease.token, "expires_at": lease.expires_at})

    @app.post("/trajectories/{trajectory_id}/lease/renew")
    def renew_lease(trajectory_id: str, x_lease_token: str = Header()):
        lease = leases.renew(trajectory_id, x_lease_token)
        return versioned({"token": lease.token, "expires_at": lease.expires_at})

    @app.delete("/trajectories/{trajectory_id}/lease")
    def release_lease(trajectory_id: str, x_lease_token: str = Header()):
        leases.release(trajectory_id, x_lease_token)
        return versioned({"released": True})

    # -- annotation flow -------------------------------------------------------------

    @app.post("/trajectories/{trajectory_id}/keyframes")
    def add_keyframe(
        trajectory_id: str, body: KeyframeBody, token: str = Depends(require_lease)
    ):
        store.register_keyframe(trajectory_id, body.timestamp_s)
        return sample_list(trajectory_id)

    @app.put("/trajectories/{trajectory_id}/plan")
    def put_plan(trajectory_id: str, body: PlanBody, token: str = Depends(require_lease)):
        plan = workflow.set_manual_plan(trajectory_id, body.subtasks)
        return versioned(
            {"subtasks": list(plan.subtasks), "provenance": plan.provenance.value}
        )

    @app.post("/trajectories/{trajectory_id}/decompose")
    def decompose(trajectory_id: str, token: str = Depends(require_lease)):
        if decompose_endpoint is None:
            raise EndpointError("no decomposition endpoint configured")
        plan = workflow.decompose_task(trajectory_id, decompose_endpoint)
        return versioned(
            {"subtasks": list(plan.subtasks), "provenance": plan.provenance.value}
        )

    @app.get("/annotations/{trajectory_id}")
    def get_annotation(trajectory_id: str):
        return versioned({"record": record_to_dict(annotations.get_record(trajectory_id))})

    @app.put("/trajectories/{trajectory_id}/stage1")
    def put_stage1(trajectory_id: str, body: Stage1Body, token: str = Depends(require_lease)):
        rec = workflow.record_stage1(
            trajectory_id,
            annotator_id=leases.validate(trajectory_id, token).annotator_id,
            success=body.success,
            keyframe_ts=body.keyframe_ts,
            subtask_index=body.subtask_index,
            failure_type=FailureType(body.failure_type) if body.failure_type else None,
        )
        return versioned({"record": record_to_dict(rec)})

    @app.put("/trajectories/{trajectory_id}/stage2")
    def put_stage2(trajectory_id: str, body: Stage2Body, token: str = Depends(require_lease)):
        def commands(items):
            return [LowLevelCommand.from_dict(c.model_dump()) for c in items]

        rec = workflow.record_stage2(
            trajectory_id,
            low_level_avoidance=commands(body.low_level_avoidance),
            low_level_correction=commands(body.low_level_correction),
            avoidance_symbols=(
                parse_symbol_code(body.avoidance_code) if body.avoidance_code else None
            ),
            correction_symbols=(
                parse_symbol_code(body.correction_code) if body.correction_code else None
            ),
        )
        response = {"record": record_to_dict(rec)}
        # echo the canonical serialization so clients can verify round-trip
        if rec.guidance.avoidance_symbols is not None:
            response["avoidance_code"] = emit_symbol_code(rec.guidance.avoidance_symbols)
        if rec.guidance.correction_symbols is not None:
            response["correction_code"] = emit_symbol_code(rec.guidance.correction_symbols)
        return versioned(response)

    @app.post("/trajectories/{trajectory_id}/assist-stage3")
    def assist_stage3(trajectory_id: str, token: str = Depends(require_lease)):
        if assist_endpoint is None:
            raise EndpointError("no assist endpoint configured")
        rec = workflow.vlm_assist_stage3(trajectory_id, assist_endpoint)
        return versioned({"record": record_to_dict(rec)})

    @app.put("/trajectories/{trajectory_id}/stage3")
    def put_stage3(trajectory_id: str, body: Stage3Body, token: str = Depends(require_lease)):
        rec = workflow.record_stage3_drafts(
            trajectory_id,
            DraftTexts(
                failure_reason=body.failure_reason,
                high_level_avoidance=body.high_level_avoidance,
                high_level_correction=body.high_level_correction,
            ),
        )
        return versioned({"record": record_to_dict(rec)})

    @app.post("/trajectories/{trajectory_id}/finalize")
    def finalize(trajectory_id: str, body: FinalizeBody, token: str = Depends(require_lease)):
        rec = workflow.finalize(
            trajectory_id,
            failure_reason=body.failure_reason,
            high_level_avoidance=body.high_level_avoidance,
            high_level_correction=body.high_level_correction,
        )
        return versioned({"record": record_to_dict(rec)})

    # -- symbol utilities ----------------------------------------------------------------

    @app.post("/symbols/check")
    def symbols_check(body: SymbolCheckBody):
        sset = parse_symbol_code(body.code)
        violations = validate_symbols(sset, body.width, body.height)
        payload = {
            "canonical_code": emit_symbol_code(sset) if not errors_only(violations) else None,
            "violations": [v.as_dict() for v in violations],
            "bbox": symbol_bbox(sset).as_tuple() if sset.symbols else None,
        }
        return versioned(payload)

    # -- export and evaluation ---------------------------------------------------------------

    @app.post("/export")
    def export(body: ExportBody):
        finalized = [r for r in annotations.list_records() if r.stage.value == "finalized"]
        annotated_ids = {r.trajectory_id for r in finalized}
        records = [r for r in store.list_records() if r.id in annotated_ids]
        spec = SplitSpec(
            bench_task_ids=frozenset(body.bench_task_ids),
            ood_task_ids=frozenset(body.ood_task_ids),
            bench_trajectory_budget=body.bench_trajectory_budget,
        )
        pools = AnnotationPools.from_records(finalized)
        generator = VqaGenerator(store, pools, seed=body.seed)
        pairs = generator.generate(finalized)
        split = build_split(records, spec, body.seed)
        out_dir = data_root / "exports" / body.name
        manifest = write_dataset(
            out_dir, pairs, split, split_manifest(records, spec, body.seed, split)
        )
        if body.materialize_frames:
            materialize_media(store, pairs)
        return versioned({"export": body.name, "manifest": manifest})

    @app.post("/eval-run")
    def eval_run(body: EvalRunBody):
        bench_dir = data_root / "exports" / body.export_name
        if not bench_dir.exists():
            raise NotFoundError(f"unknown export {body.export_name!r}")
        out_dir = data_root / "eval_runs" / body.run_id
        from ..evaluation import load_bench_pairs

        materialize_media(store, load_bench_pairs(bench_dir))
        config = ModelEndpointConfig(**body.endpoint.model_dump())
        judge_cfg = (
            ModelEndpointConfig(**body.judge_endpoint.model_dump())
            if body.judge_endpoint
            else None
        )
        report = run_benchmark(
            bench_dir,
            HttpChatEndpoint(config),
            config,
            out_dir,
            judge_endpoint=HttpChatEndpoint(judge_cfg) if judge_cfg else None,
            judge_config=judge_cfg,
            judge_scale=body.judge_scale,
            media_root=data_root,
            max_items=body.max_items,
        )
        return versioned({"run_id": body.run_id, "report": report.as_dict()})

    @app.get("/eval-runs/{run_id}/report")
    def eval_report(run_id: str):
        path = data_root / "eval_runs" / run_id / "report.json"
        if not path.exists():
            raise NotFoundError(f"no report for run {run_id!r}")
        return versioned({"run_id": run_id, "report": json.loads(path.read_text())})

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
