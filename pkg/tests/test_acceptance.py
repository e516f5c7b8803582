"""Acceptance suite: one test per contract-level criterion.

Each test prints a `[ACCEPTANCE] <criterion>: PASS/FAIL` line (visible with
``pytest -s`` or in the captured output section).  Run the whole file with::

    pytest tests/test_acceptance.py -v -s
"""

import functools
import hashlib
import json
import random
import time

import numpy as np
import pytest

from failvis.annotation import (
    CommandVerb,
    LowLevelCommand,
    MoveDirection,
    dynamic_command_pool,
    instantiate_static_pool,
    load_static_pool,
    render_commands,
)
from failvis.endpoints import CallableEndpoint, ChatMessage, HttpChatEndpoint, ModelEndpointConfig, ReplayEndpoint
from failvis.evaluation import (
    JudgeScore,
    aggregate_report,
    closed_accuracy,
    closed_prompt_text,
    read_items_jsonl,
    run_closed_eval,
    run_open_eval,
    run_symbol_code_eval,
    write_items_jsonl,
)
from failvis.geometry import Rect
from failvis.store import FrameOrigin, merge_sample_list, uniform_timestamps
from failvis.supervisor import (
    ScriptedAdapter,
    SupervisorConfig,
    apply_head_mask,
    build_scenario,
    expand_roi,
    run_session,
)
from failvis.symbols import (
    DEFAULT_STYLE,
    Arm,
    AxisColor,
    Magnitude,
    SymbolInstance,
    SymbolKind,
    SymbolPurpose,
    SymbolSet,
    emit_symbol_code,
    parse_symbol_code,
    render_overlay,
)
from failvis.vqa import (
    CLOSED_TYPES,
    AnnotationPools,
    QuestionType,
    SplitSpec,
    VqaGenerator,
    VqaPair,
    build_split,
    split_manifest,
    write_dataset,
)

from .factories import build_corpus
from .helpers import flat_frame, noise_frame, random_symbol_set
from .mock_server import CapturingChatServer
from .test_supervisor_masking import oracle_roi


def criterion(name):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                result = fn(*args, **kwargs)
            except BaseException:
                print(f"[ACCEPTANCE] {name}: FAIL")
                raise
            print(f"[ACCEPTANCE] {name}: PASS")
            return result

        return wrapper

    return deco


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("acceptance_corpus")
    return build_corpus(root, n_records=80, seed=7, success_every=10)


@pytest.fixture(scope="module")
def benchmark_pairs(corpus):
    store, _, records = corpus
    generator = VqaGenerator(store, AnnotationPools.from_records(records), seed=2026)
    return generator.generate(records)


# -- 1. symbol codec round-trip ------------------------------------------------

@criterion("codec 10k fuzzed round-trips, <10s")
def test_codec_fuzzed_round_trip():
    rng = random.Random(20260810)
    started = time.monotonic()
    for _ in range(10_000):
        sset = random_symbol_set(rng)
        text = emit_symbol_code(sset)
        parsed = parse_symbol_code(text)
        assert parsed == sset
        assert emit_symbol_code(parsed) == text
    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"codec fuzz took {elapsed:.1f}s"


# -- 2. renderer determinism, identity, axis colors ------------------------------

@criterion("renderer identity, determinism, axis-color probes")
def test_renderer_contract():
    frame = noise_frame(1)
    empty = render_overlay(frame, SymbolSet(0, SymbolPurpose.AVOIDANCE))
    assert empty.tobytes() == frame.tobytes()

    rng = random.Random(8)
    for _ in range(20):
        sset = random_symbol_set(rng, frame_index=0)
        first = render_overlay(frame, sset)
        second = render_overlay(frame, sset)
        assert hashlib.sha256(first.tobytes()).digest() == hashlib.sha256(second.tobytes()).digest()

    # red = forward/backward axis, green = left/right, blue = up/down
    for color, channel in ((AxisColor.RED, 0), (AxisColor.GREEN, 1), (AxisColor.BLUE, 2)):
        base = flat_frame(value=0)
        arrow = SymbolInstance(
            SymbolKind.STRAIGHT_ARROW, 0, (10, 10), end=(100, 10), color=color, arm=Arm.LEFT
        )
        out = render_overlay(base, SymbolSet(0, SymbolPurpose.CORRECTION, (arrow,)))
        probe = out[10, 55]
        assert probe[channel] == DEFAULT_STYLE.primary
        assert all(probe[c] == DEFAULT_STYLE.secondary for c in range(3) if c != channel)


# -- 3. frame sampling rule --------------------------------------------------------

@criterion("sampling rule vs brute-force oracle (100 random durations)")
def test_sampling_rule_against_oracle():
    rng = random.Random(33)
    for _ in range(100):
        duration = rng.uniform(0.2, 40.0)
        fps = rng.choice([1.0, 2.0, 10.0, 15.0, 30.0])
        keyframes = sorted(rng.uniform(0.0, duration) for _ in range(rng.randrange(0, 5)))

        refs = merge_sample_list("t", duration, fps, keyframes)

        # brute-force oracle: explicit uniform loop, then greedy collapse
        t, grid = 0.0, []
        while t <= duration:
            grid.append((t, "uniform"))
            t += 1.0
        assert len(grid) == int(np.floor(duration)) + 1
        entries = grid + [(k, "keyframe") for k in keyframes]
        entries.sort(key=lambda e: (e[0], 0 if e[1] == "keyframe" else 1))
        merged = []
        for stamp, origin in entries:
            if merged and stamp - merged[-1][0] < 1.0 / fps:
                if origin == "keyframe" and merged[-1][1] != "keyframe":
                    merged[-1] = (stamp, origin)
                continue
            merged.append((stamp, origin))

        assert len(refs) == len(merged)
        for ref, (stamp, origin) in zip(refs, merged):
            assert ref.timestamp_s == stamp
            assert (ref.origin is FrameOrigin.KEYFRAME) == (origin == "keyframe")
        assert uniform_timestamps(duration) == [e[0] for e in grid]


# -- 4. VSF mask geometry -------------------------------------------------------------

@criterion("VSF roi vs independent oracle (1000 cases) + mask pixel probes")
def test_vsf_mask_geometry():
    rng = random.Random(55)
    for _ in range(1000):
        w = rng.randrange(60, 1400)
        h = rng.randrange(60, 1000)
        x0 = rng.randrange(w)
        y0 = rng.randrange(h)
        bbox = Rect(x0, y0, min(w - 1, x0 + rng.randrange(w)), min(h - 1, y0 + rng.randrange(h)))
        roi = expand_roi(bbox, (w, h))
        assert roi == oracle_roi(bbox, w, h)
        assert roi.width >= min(50, w) and roi.height >= min(50, h)

    frame = noise_frame(2, w=200, h=160)
    roi = Rect(30, 40, 120, 100)
    masked = apply_head_mask(frame, roi)
    inside = np.zeros(frame.shape[:2], dtype=bool)
    inside[roi.y0 : roi.y1 + 1, roi.x0 : roi.x1 + 1] = True
    assert np.array_equal(masked[inside], frame[inside])
    assert not masked[~inside].any()
    # exact boundary probes
    assert np.array_equal(masked[40, 30], frame[40, 30])
    assert not masked[40, 29].any() and not masked[39, 30].any()
    assert np.array_equal(masked[100, 120], frame[100, 120])
    assert not masked[100, 121].any() and not masked[101, 120].any()


# -- 5. distractor contract --------------------------------------------------------------

@criterion("distractors: 10k seeded runs unique/truth-free/arm-matched; all 4 failure types")
def test_distractor_contract(corpus, benchmark_pairs):
    from failvis.vqa import gen_low_level_distractors

    rng = random.Random(99)
    static_templates = load_static_pool()
    for seed in range(10_000):
        arm = rng.choice([Arm.LEFT, Arm.RIGHT])
        dynamic = dynamic_command_pool(arm)
        truth = [rng.choice(dynamic)]
        texts = gen_low_level_distractors(
            truth, instantiate_static_pool(static_templates, arm), dynamic, seed
        )
        truth_text = render_commands(truth)
        assert len(set(texts)) == 3
        assert truth_text not in texts
        assert all(f" {arm.value} " in t for t in texts)

    type_pairs = [p for p in benchmark_pairs if p.question_type is QuestionType.FAILURE_TYPE_ID]
    assert type_pairs
    expected = {"Task planning", "Gripper 6d-pose", "Gripper state", "Human intervention"}
    for pair in type_pairs:
        assert set(pair.options) == expected


# -- 6. oracle and random endpoint eval ------------------------------------------------------

@criterion("oracle endpoint: closed accuracy 100% and symbol-code match 100% on 500+ pairs")
def test_oracle_eval(benchmark_pairs):
    closed = [p for p in benchmark_pairs if p.question_type in CLOSED_TYPES]
    code = [p for p in benchmark_pairs if p.question_type is QuestionType.VISUAL_GUIDANCE_CODE]
    assert len(closed) + len(code) >= 500

    truth_by_prompt = {closed_prompt_text(p): p.answer for p in closed}
    oracle = CallableEndpoint(lambda messages: truth_by_prompt[messages[-1].text])
    items = run_closed_eval(closed, oracle)
    assert closed_accuracy(items) == 100.0

    code_by_prompt = {p.prompt: p.symbol_code_answer for p in code}
    code_oracle = CallableEndpoint(lambda messages: code_by_prompt[messages[-1].text])
    code_items = run_symbol_code_eval(code, code_oracle)
    assert all(item["score"]["match"] for item in code_items)
    report = aggregate_report(items + code_items)
    assert report.symbol_code["match_rate"] == 100.0


@criterion("uniform-random endpoint: 4-option accuracy in [23%, 27%] at n=10,000")
def test_random_endpoint_near_chance():
    pairs = [
        VqaPair(
            id=f"r{i}",
            question_type=QuestionType.FAILURE_TYPE_ID,
            trajectory_id=f"t{i}",
            prompt=f"synthetic question {i}",
            options=("w", "x", "y", "z"),
            answer="ABCD"[i % 4],
        )
        for i in range(10_000)
    ]
    rng = random.Random(424242)
    endpoint = CallableEndpoint(lambda messages: rng.choice("ABCD"))
    accuracy = closed_accuracy(run_closed_eval(pairs, endpoint))
    assert 23.0 <= accuracy <= 27.0, f"random accuracy {accuracy:.2f}%"


# -- 7. judge arithmetic and report reproducibility ---------------------------------------------

@criterion("judge totals are exact means; report recomputes bit-for-bit from item logs")
def test_judge_arithmetic_and_report_reproducibility(tmp_path):
    assert JudgeScore(60, 90, 30).total == 60.0
    cases = [(0, 0, 0), (100, 100, 100), (1, 2, 3), (33, 66, 99), (7, 11, 13)]
    for s, c, f in cases:
        assert JudgeScore(s, c, f).total == (s + c + f) / 3

    open_pairs = [
        VqaPair(
            id=f"o{i}",
            question_type=QuestionType.FAILURE_REASON,
            trajectory_id=f"t{i}",
            prompt=f"why did episode {i} fail?",
            answer=f"reason {i}",
        )
        for i in range(40
        )
    ]
    closed_pairs = [
        VqaPair(
            id=f"c{i}",
            question_type=QuestionType.FAILURE_DETECTION,
            trajectory_id=f"t{i}",
            prompt=f"did episode {i} succeed?",
            options=("yes", "no"),
            answer="A" if i % 2 else "B",
        )
        for i in range(60)
    ]
    model = CallableEndpoint(lambda messages: "A")
    scores = iter([(60, 90, 30)] * 40)

    def judge_fn(messages):
        s, c, f = next(scores)
        return json.dumps(
            {"semantic_similarity": s, "content_completeness": c, "functional_equivalence": f}
        )

    items = run_closed_eval(closed_pairs, model) + run_open_eval(
        open_pairs, model, CallableEndpoint(judge_fn)
    )
    assert all(i["judge"]["total"] == 60.0 for i in items if i["kind"] == "open")

    report = aggregate_report(items)
    path = tmp_path / "items.jsonl"
    write_items_jsonl(items, path)
    recomputed = aggregate_report(read_items_jsonl(path))
    as_json = lambda r: json.dumps(r.as_dict(), sort_keys=True).encode()
    assert as_json(report) == as_json(recomputed)

    # lite/hard/overall arithmetic holds exactly
    lite_correct = sum(1 for i in items if i["kind"] == "closed" and i["correct"])
    assert report.lite_avg == 100.0 * lite_correct / 60
    assert report.hard_avg == 60.0
    assert report.overall_avg == (report.lite_avg + report.hard_avg) / 2


# -- 8. model-config compliance -----------------------------------------------------------------

@criterion("every outbound eval request pins temperature 0 and max 2,048 tokens")
def test_model_config_compliance():
    pairs = [
        VqaPair(
            id=f"m{i}",
            question_type=QuestionType.FAILURE_DETECTION,
            trajectory_id=f"t{i}",
            prompt=f"question {i}",
            options=("yes", "no"),
            answer="A",
        )
        for i in range(6)
    ]
    with CapturingChatServer(reply="A") as server:
        config = ModelEndpointConfig(base_url=server.base_url, model_name="probe")
        endpoint = HttpChatEndpoint(config)
        run_closed_eval(pairs, endpoint)
        endpoint.complete([ChatMessage("user", "one more direct call")])
        assert len(server.requests) == 7
        for request in server.requests:
            assert request["body"]["temperature"] == 0
            assert request["body"]["max_tokens"] == 2048


# -- 9. supervisor cadence, windowing, correction, replay ----------------------------------------

@criterion("supervisor: 10 requests over 60 chunks, <=5 frames of past 5s, one correction, replayable")
def test_supervisor_contract():
    adapter, endpoint = build_scenario("never_fail", total_steps=60)
    config = SupervisorConfig(query_interval_chunks=6, history_window_s=5.0, history_fps=1.0)
    log = run_session(config, adapter, endpoint, max_steps=60)
    requests = log.of_kind("request")
    assert len(requests) == 10
    for request in requests:
        times = request["frame_times"]
        assert 1 <= len(times) <= 5
        now = float(request["chunk"])  # scripted adapter: 1 chunk and 1 s per step
        assert all(0 <= now - t < 5.0 for t in times)
    assert log.of_kind("command") == []

    adapter2, endpoint2 = build_scenario("fail_once", total_steps=60)
    log2 = run_session(config, adapter2, endpoint2, max_steps=60)
    assert len(adapter2.delivered) == 1
    assert log2.transitions().count(("diagnosing", "correcting")) == 1

    replay_adapter = ScriptedAdapter(total_steps=60)
    replay_log = run_session(
        config, replay_adapter, ReplayEndpoint(log2.responses()), max_steps=60
    )
    assert replay_log.transitions() == log2.transitions()
    assert [e["chunk"] for e in replay_log.of_kind("request")] == [
        e["chunk"] for e in log2.of_kind("request")
    ]


# -- 10. split integrity ---------------------------------------------------------------------------

@criterion("splits: no OOD leakage over random specs; manifests regenerate identically")
def test_split_integrity(corpus, benchmark_pairs, tmp_path):
    store, _, annotations = corpus
    records = store.list_records()
    tasks = sorted({r.task_id for r in records})
    rng = random.Random(77)
    by_id = {r.id: r for r in records}
    for _ in range(200):
        bench_tasks = frozenset(rng.sample(tasks, rng.randrange(1, len(tasks) + 1)))
        ood = frozenset(t for t in bench_tasks if rng.random() < 0.5)
        spec = SplitSpec(
            bench_task_ids=bench_tasks,
            ood_task_ids=ood,
            bench_trajectory_budget=rng.randrange(1, 40),
        )
        seed = rng.randrange(10**6)
        split = build_split(records, spec, seed)
        assert set(split.train_ids).isdisjoint(split.bench_ids)
        assert all(by_id[tid].task_id not in ood for tid in split.train_ids)
        assert build_split(records, spec, seed) == split

    spec = SplitSpec(
        bench_task_ids=frozenset({1, 2}), ood_task_ids=frozenset({2}), bench_trajectory_budget=10
    )
    split = build_split(records, spec, seed=5)

    def write(name):
        manifest = write_dataset(
            tmp_path / name,
            benchmark_pairs,
            split,
            split_manifest(records, spec, 5, split),
        )
        return (tmp_path / name / "manifest.json").read_bytes(), manifest

    bytes1, _ = write("m1")
    bytes2, _ = write("m2")
    assert bytes1 == bytes2
