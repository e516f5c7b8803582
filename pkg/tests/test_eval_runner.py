"""File-based benchmark runs: export, evaluate, persist, re-aggregate."""

import json

from failvis.endpoints import CallableEndpoint, ModelEndpointConfig
from failvis.evaluation import (
    aggregate_report,
    closed_prompt_text,
    load_bench_pairs,
    read_items_jsonl,
    run_benchmark,
)
from failvis.vqa import (
    CLOSED_TYPES,
    AnnotationPools,
    QuestionType,
    SplitSpec,
    VqaGenerator,
    build_split,
    split_manifest,
    write_dataset,
)

from .factories import build_corpus

JUDGE_REPLY = json.dumps(
    {"semantic_similarity": 80, "content_completeness": 70, "functional_equivalence": 90}
)


def _export(tmp_path, seed=3):
    store, _, annotations = build_corpus(tmp_path, n_records=8, seed=seed)
    records = store.list_records()
    pools = AnnotationPools.from_records(annotations)
    pairs = VqaGenerator(store, pools, seed=seed).generate(annotations)
    spec = SplitSpec(bench_task_ids=frozenset({1, 2}), bench_trajectory_budget=3)
    split = build_split(records, spec, seed)
    out = tmp_path / "export"
    write_dataset(out, pairs, split, split_manifest(records, spec, seed, split))
    return out


def test_run_benchmark_end_to_end(tmp_path):
    bench_dir = _export(tmp_path)
    pairs = load_bench_pairs(bench_dir)
    assert pairs

    answers = {}
    for pair in pairs:
        if pair.question_type in CLOSED_TYPES:
            answers[closed_prompt_text(pair)] = pair.answer
        elif pair.question_type is QuestionType.VISUAL_GUIDANCE_CODE:
            answers[pair.prompt] = pair.symbol_code_answer
        else:
            answers[pair.prompt] = pair.answer  # echo the reference text

    endpoint = CallableEndpoint(lambda messages: answers[messages[-1].text])
    judge = CallableEndpoint(lambda messages: JUDGE_REPLY)
    config = ModelEndpointConfig(base_url="mock://", model_name="oracle")

    out_dir = tmp_path / "run1"
    report = run_benchmark(
        bench_dir,
        endpoint,
        config,
        out_dir,
        judge_endpoint=judge,
        judge_config=config,
    )
    assert report.lite_avg == 100.0
    assert report.hard_avg == 80.0  # mean of the fixed judge dims
    assert report.symbol_code["match_rate"] == 100.0

    # artifacts present and self-consistent
    saved = json.loads((out_dir / "report.json").read_text())
    items = read_items_jsonl(out_dir / "items.jsonl")
    assert len(items) == len(pairs)
    recomputed = aggregate_report(items)
    assert json.dumps(saved, sort_keys=True) == json.dumps(
        recomputed.as_dict(), sort_keys=True
    )
    run_config = json.loads((out_dir / "config.json").read_text())
    assert run_config["endpoint"]["temperature"] == 0.0
    assert run_config["endpoint"]["max_new_tokens"] == 2048
    assert "started_at" in run_config and "finished_at" in run_config
    assert (out_dir / "report.txt").read_text().strip()


def test_run_benchmark_max_items(tmp_path):
    bench_dir = _export(tmp_path, seed=4)
    endpoint = CallableEndpoint(lambda messages: "A")
    judge = CallableEndpoint(lambda messages: JUDGE_REPLY)
    config = ModelEndpointConfig(base_url="mock://", model_name="m")
    report = run_benchmark(
        bench_dir, endpoint, config, tmp_path / "run2",
        judge_endpoint=judge, judge_config=config, max_items=5,
    )
    assert report.n_items == 5
