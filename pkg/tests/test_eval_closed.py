"""Closed-ended evaluation: choice extraction, accuracy paths."""

import random

import pytest

from failvis.endpoints import CallableEndpoint
from failvis.errors import EndpointError
from failvis.evaluation import (
    closed_accuracy,
    closed_prompt_text,
    extract_choice,
    run_closed_eval,
)
from failvis.vqa import QuestionType, VqaPair


def _pair(i, options=("alpha", "beta", "gamma", "delta"), answer="A"):
    return VqaPair(
        id=f"p{i}",
        question_type=QuestionType.FAILURE_TYPE_ID,
        trajectory_id=f"t{i}",
        prompt=f"Question {i}: which category?",
        options=tuple(options),
        answer=answer,
    )


def test_extract_standalone_letter():
    assert extract_choice("The answer is B.", ["a", "b", "c", "d"]) == "B"
    assert extract_choice("B", ["a", "b", "c", "d"]) == "B"
    assert extract_choice("(C)", ["a", "b", "c", "d"]) == "C"


def test_extract_first_letter_wins():
    assert extract_choice("It could be A or B", ["a", "b", "c", "d"]) == "A"


def test_extract_ignores_out_of_range_letters():
    # two-option question: D is not a valid choice, the quoted text is
    assert extract_choice("D seems wrong; the task was completed",
                          ["the task was completed", "the task failed"]) == "A"


def test_extract_option_text_longest_match():
    options = ["move left", "move left slightly", "hold still", "open gripper"]
    response = "I would move left slightly to fix this."
    assert extract_choice(response, options) == "B"


def test_extract_unparseable():
    assert extract_choice("no idea", ["alpha", "beta", "gamma", "delta"]) is None
    assert extract_choice("", ["alpha", "beta"]) is None


def test_lowercase_letters_not_treated_as_choices():
    # 'a' here is an article, not a choice of option A
    assert extract_choice("that is a tricky one: beta", ["alpha", "beta", "gamma", "delta"]) == "B"


def test_prompt_text_contains_lettered_options():
    text = closed_prompt_text(_pair(0))
    assert "A. alpha" in text and "D. delta" in text
    assert text.index("Question 0") < text.index("Options:")


def test_oracle_endpoint_scores_100():
    pairs = [_pair(i, answer="ABCD"[i % 4]) for i in range(40)]
    truth = {closed_prompt_text(p): p.answer for p in pairs}
    endpoint = CallableEndpoint(lambda messages: truth[messages[-1].text])
    items = run_closed_eval(pairs, endpoint)
    assert closed_accuracy(items) == 100.0


def test_fixed_wrong_endpoint_scores_0():
    pairs = [_pair(i, answer="A") for i in range(20)]
    endpoint = CallableEndpoint(lambda messages: "B")
    items = run_closed_eval(pairs, endpoint)
    assert closed_accuracy(items) == 0.0


def test_random_endpoint_near_chance():
    rng = random.Random(7)
    pairs = [_pair(i, answer="ABCD"[i % 4]) for i in range(4000)]
    endpoint = CallableEndpoint(lambda messages: rng.choice("ABCD"))
    items = run_closed_eval(pairs, endpoint, max_workers=1)
    acc = closed_accuracy(items)
    assert 22.0 <= acc <= 28.0


def test_endpoint_error_counts_against_accuracy():
    pairs = [_pair(i, answer="A") for i in range(4)]
    calls = {"n": 0}

    def flaky(messages):
        calls["n"] += 1
        if calls["n"] == 2:
            raise EndpointError("boom")
        return "A"

    items = run_closed_eval(pairs, CallableEndpoint(flaky))
    assert closed_accuracy(items) == 75.0
    errored = [i for i in items if i["error"]]
    assert len(errored) == 1 and errored[0]["correct"] is False


def test_concurrent_run_preserves_order():
    pairs = [_pair(i, answer="A") for i in range(16)]
    truth = {closed_prompt_text(p): p.id for p in pairs}
    endpoint = CallableEndpoint(lambda messages: "A")
    items = run_closed_eval(pairs, endpoint, max_workers=4)
    assert [i["pair_id"] for i in items] == [p.id for p in pairs]
