"""CLI smoke tests through click's runner."""

import json

import numpy as np
from click.testing import CliRunner
from PIL import Image

from failvis.cli import main

from .factories import build_corpus, write_frames


def test_ingest_sample_stats(tmp_path):
    media = write_frames(tmp_path / "media", n=10, seed=0)
    meta = {
        "id": "cli-1",
        "task_id": 2,
        "task_instruction": "Pull the drawer open",
        "source": "teleoperation",
        "duration_s": 4.0,
        "fps_native": 2.0,
        "head_video": "head",
        "success": True,
    }
    meta_path = tmp_path / "meta.json"
    meta_path.write_text(json.dumps(meta))
    runner = CliRunner()
    data_root = tmp_path / "data"

    result = runner.invoke(
        main, ["ingest", "--data-root", str(data_root), "--meta", str(meta_path),
               "--media", str(media)]
    )
    assert result.exit_code == 0, result.output
    assert "ingested cli-1" in result.output

    result = runner.invoke(
        main, ["sample", "--data-root", str(data_root), "--id", "cli-1", "--keyframe", "2.6"]
    )
    assert result.exit_code == 0, result.output
    assert "keyframe" in result.output

    result = runner.invoke(main, ["stats", "--data-root", str(data_root)])
    assert result.exit_code == 0
    assert json.loads(result.output)["total"] == 1


def test_render_command(tmp_path):
    frame = np.full((48, 64, 3), 30, dtype=np.uint8)
    frame_path = tmp_path / "frame.png"
    Image.fromarray(frame).save(frame_path)
    code_path = tmp_path / "code.txt"
    code_path.write_text("frame=0 purpose=avoidance\ncrosshair(start=(30,24))\n")
    out_path = tmp_path / "out.png"
    result = CliRunner().invoke(
        main,
        ["render", "--frame", str(frame_path), "--code", str(code_path), "--out", str(out_path)],
    )
    assert result.exit_code == 0, result.output
    with Image.open(out_path) as img:
        assert not np.array_equal(np.asarray(img), frame)


def test_export_command(tmp_path):
    build_corpus(tmp_path, n_records=8, seed=9)
    result = CliRunner().invoke(
        main,
        [
            "export", "--data-root", str(tmp_path / "data"), "--name", "b1",
            "--bench-tasks", "1,2", "--ood-tasks", "2", "--budget", "2", "--seed", "3",
        ],
    )
    assert result.exit_code == 0, result.output
    manifest = json.loads((tmp_path / "data" / "exports" / "b1" / "manifest.json").read_text())
    assert manifest["spec"]["ood_task_ids"] == [2]


def test_supervise_command(tmp_path):
    cfg = tmp_path / "supervisor.json"
    cfg.write_text(json.dumps({"query_interval_chunks": 6, "mode": "vsf"}))
    out = tmp_path / "log.jsonl"
    result = CliRunner().invoke(
        main,
        ["supervise", "--config", str(cfg), "--adapter", "scripted:fail_once",
         "--max-steps", "30", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    assert "diagnosis requests: 5" in result.output
    assert "corrections: 1" in result.output
    assert out.exists()


def test_eval_report_command(tmp_path):
    items = [
        {"pair_id": "a", "question_type": "failure_detection", "kind": "closed",
         "correct": True, "error": None},
        {"pair_id": "b", "question_type": "failure_detection", "kind": "closed",
         "correct": False, "error": None},
    ]
    path = tmp_path / "items.jsonl"
    path.write_text("\n".join(json.dumps(i) for i in items) + "\n")
    result = CliRunner().invoke(main, ["eval", "report", "--items", str(path)])
    assert result.exit_code == 0, result.output
    assert "50.00%" in result.output
