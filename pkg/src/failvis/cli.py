"""Command-line interface.

Subcommands mirror the toolkit's workflows: ingest trajectories, inspect
sampling and statistics, render symbol code onto frames, export VQA datasets,
run benchmark evaluations, drive a supervision session, and serve the
annotation API.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .endpoints import HttpChatEndpoint, ModelEndpointConfig
from .store import Source, TrajectoryRecord, TrajectoryStore


@click.group()
def main():
    """Failure annotation, benchmarking, and supervision toolkit."""


# -- store commands ------------------------------------------------------------


@main.command()
@click.option("--data-root", type=click.Path(path_type=Path), required=True)
@click.option("--meta", "meta_path", type=click.Path(exists=True, path_type=Path), required=True,
              help="JSON file with the trajectory record fields.")
@click.option("--media", type=click.Path(exists=True, path_type=Path), required=True,
              help="Head-camera video file or frame directory.")
@click.option("--wrist", "wrists", type=click.Path(exists=True, path_type=Path), multiple=True)
def ingest(data_root: Path, meta_path: Path, media: Path, wrists):
    """Ingest one trajectory into the store."""
    raw = json.loads(meta_path.read_text())
    raw["source"] = Source(raw["source"])
    record = TrajectoryRecord(**raw)
    store = TrajectoryStore(data_root)
    tid = store.ingest(record, media, wrists)
    click.echo(f"ingested {tid}")


@main.command()
@click.option("--data-root", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--id", "trajectory_id", required=True)
@click.option("--keyframe", "keyframes", type=float, multiple=True)
def sample(data_root: Path, trajectory_id: str, keyframes):
    """Print the sampled frame list for a trajectory."""
    store = TrajectoryStore(data_root)
    for ref in store.sample_frames(trajectory_id, list(keyframes)):
        click.echo(f"{ref.timestamp_s:8.2f}s  frame {ref.frame_index:6d}  {ref.origin.value}")


@main.command()
@click.option("--data-root", type=click.Path(exists=True, path_type=Path), required=True)
def stats(data_root: Path):
    """Dataset statistics (counts and duration histogram)."""
    from .annotation import AnnotationStore

    store = TrajectoryStore(data_root)
    annotations = AnnotationStore(Path(data_root) / "annotations")
    failure_types = {
        r.trajectory_id: r.diagnosis.failure_type.display_name
        for r in annotations.list_records()
        if r.diagnosis.failure_type is not None
    }
    click.echo(json.dumps(store.dataset_stats(failure_types=failure_types).as_dict(), indent=2))


@main.command()
@click.option("--frame", "frame_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--code", "code_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
def render(frame_path: Path, code_path: Path, out_path: Path):
    """Render a symbol-code file onto a frame image."""
    from .symbols import decode_png, encode_png, parse_symbol_code, render_overlay

    frame = decode_png(frame_path.read_bytes())
    sset = parse_symbol_code(code_path.read_text())
    out_path.write_bytes(encode_png(render_overlay(frame, sset)))
    click.echo(f"wrote {out_path}")


# -- dataset export ---------------------------------------------------------------


def _int_set(text: str) -> frozenset[int]:
    return frozenset(int(x) for x in text.split(",") if x.strip())


@main.command()
@click.option("--data-root", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--name", required=True)
@click.option("--bench-tasks", required=True, help="Comma-separated task ids, e.g. 43,44,45")
@click.option("--ood-tasks", default="", help="Subset of bench tasks that are fully held out.")
@click.option("--budget", type=int, default=500)
@click.option("--seed", type=int, default=0)
@click.option("--materialize/--no-materialize", default=False,
              help="Extract every referenced frame now.")
def export(data_root: Path, name: str, bench_tasks: str, ood_tasks: str, budget: int,
           seed: int, materialize: bool):
    """Generate VQA pairs from finalized annotations and write a split."""
    from .annotation import AnnotationStore
    from .vqa import (
        AnnotationPools,
        SplitSpec,
        VqaGenerator,
        build_split,
        materialize_media,
        split_manifest,
        write_dataset,
    )

    store = TrajectoryStore(data_root)
    annotations = AnnotationStore(Path(data_root) / "annotations")
    finalized = [r for r in annotations.list_records() if r.stage.value == "finalized"]
    if not finalized:
        raise click.ClickException("no finalized annotation records to export")
    records = [r for r in store.list_records() if r.id in {a.trajectory_id for a in finalized}]
    spec = SplitSpec(
        bench_task_ids=_int_set(bench_tasks),
        ood_task_ids=_int_set(ood_tasks),
        bench_trajectory_budget=budget,
    )
    generator = VqaGenerator(store, AnnotationPools.from_records(finalized), seed=seed)
    pairs = generator.generate(finalized)
    split = build_split(records, spec, seed)
    manifest = write_dataset(
        Path(data_root) / "exports" / name,
        pairs,
        split,
        split_manifest(records, spec, seed, split),
    )
    if materialize:
        n = materialize_media(store, pairs)
        click.echo(f"materialized {n} frames")
    click.echo(json.dumps(manifest["pair_counts"], indent=2))


# -- evaluation ---------------------------------------------------------------------


@main.group()
def eval():
    """Benchmark evaluation commands."""


@eval.command("run")
@click.option("--bench", "bench_dir", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--endpoint", "endpoint_cfg", type=click.Path(exists=True, path_type=Path),
              required=True)
@click.option("--judge", "judge_cfg", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--media-root", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--judge-scale", type=float, default=100.0)
@click.option("--max-items", type=int, default=None)
def eval_run(bench_dir, endpoint_cfg, judge_cfg, out_dir, media_root, judge_scale, max_items):
    """Run a benchmark directory against an endpoint."""
    from .evaluation import render_text_report, run_benchmark

    config = ModelEndpointConfig.from_json_file(endpoint_cfg)
    judge_config = ModelEndpointConfig.from_json_file(judge_cfg) if judge_cfg else None
    report = run_benchmark(
        bench_dir,
        HttpChatEndpoint(config),
        config,
        out_dir,
        judge_endpoint=HttpChatEndpoint(judge_config) if judge_config else None,
        judge_config=judge_config,
        judge_scale=judge_scale,
        media_root=media_root,
        max_items=max_items,
    )
    click.echo(render_text_report(report))


@eval.command("report")
@click.option("--items", "items_path", type=click.Path(exists=True, path_type=Path), required=True)
def eval_report(items_path):
    """Re-aggregate a persisted items.jsonl into a report."""
    from .evaluation import aggregate_report, read_items_jsonl, render_text_report

    click.echo(render_text_report(aggregate_report(read_items_jsonl(items_path))))


# -- supervision --------------------------------------------------------------------------


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path),
              required=True)
@click.option("--adapter", "adapter_spec", default="scripted:never_fail",
              help="Adapter to drive, e.g. scripted:fail_once")
@click.option("--max-steps", type=int, default=60)
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
@click.option("--task", "task_instruction", default="")
def supervise(config_path, adapter_spec, max_steps, out_path, task_instruction):
    """Run a supervision session over a scripted adapter."""
    from .supervisor import CorrectionMode, SupervisorConfig, build_scenario, run_session

    raw = json.loads(Path(config_path).read_text())
    endpoint_cfg = raw.pop("endpoint", None)
    if "mode" in raw:
        raw["mode"] = CorrectionMode(raw["mode"])
    config = SupervisorConfig(
        **raw,
        endpoint=ModelEndpointConfig(**endpoint_cfg) if endpoint_cfg else None,
    )

    kind, _, scenario = adapter_spec.partition(":")
    if kind != "scripted":
        raise click.ClickException("only scripted:<scenario> adapters are built in")
    adapter, scripted_endpoint = build_scenario(scenario or "never_fail", max_steps)
    endpoint = (
        HttpChatEndpoint(config.endpoint) if config.endpoint is not None else scripted_endpoint
    )
    log = run_session(config, adapter, endpoint, max_steps, task_instruction)
    if out_path:
        log.write_jsonl(out_path)
        click.echo(f"wrote {out_path}")
    requests = log.of_kind("request")
    commands = log.of_kind("command")
    click.echo(
        f"steps: {len(log.of_kind('step'))}, diagnosis requests: {len(requests)}, "
        f"corrections: {len(commands)}"
    )


# -- service ----------------------------------------------------------------------------------


@main.command()
@click.option("--data-root", type=click.Path(path_type=Path), required=True)
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8600)
@click.option("--assist-endpoint", "assist_cfg", type=click.Path(exists=True, path_type=Path),
              default=None)
@click.option("--decompose-endpoint", "decompose_cfg",
              type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--ui-dir", type=click.Path(path_type=Path), default=None)
def serve(data_root, host, port, assist_cfg, decompose_cfg, ui_dir):
    """Serve the annotation API (and the UI bundle when present)."""
    import uvicorn

    from .service import create_app

    def endpoint_from(cfg_path):
        if cfg_path is None:
            return None
        return HttpChatEndpoint(ModelEndpointConfig.from_json_file(cfg_path))

    app = create_app(
        data_root,
        assist_endpoint=endpoint_from(assist_cfg),
        decompose_endpoint=endpoint_from(decompose_cfg),
        ui_dir=ui_dir,
    )
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
