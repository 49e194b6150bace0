from __future__ import annotations

import json
from pathlib import Path

import pytest

from cotscope import ScoredTrace, TraceRecord

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# worked example reused across modules: closed think block, a short
# summary sentence, then a marked final answer
EXAMPLE_RESPONSE = "<think>abc</think> The sum is x. **Final Answer** \\boxed{116}"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fixture_records() -> list[TraceRecord]:
    with open(FIXTURES / "verification_traces.jsonl", encoding="utf-8") as fp:
        return [TraceRecord.from_dict(json.loads(line)) for line in fp if line.strip()]


def make_record(**overrides) -> TraceRecord:
    base = dict(
        problem_id="p1",
        dataset_id="ds",
        sample_index=0,
        prompt="What is 2+2?",
        gold_answer="4",
        response="The answer is \\boxed{4}",
    )
    base.update(overrides)
    return TraceRecord(**base)


def make_scored(**overrides) -> ScoredTrace:
    base = dict(
        problem_id="p1",
        dataset_id="ds",
        sample_index=0,
        correct=True,
        length_total=100,
        length_first_correct=100,
        reward_correctness=1.0,
        reward_length_penalty=0.0,
        reward_total=1.0,
        intermediate_correct_count=1,
    )
    base.update(overrides)
    if not base["correct"]:
        if "reward_correctness" not in overrides:
            base["reward_correctness"] = 0.0
        if "reward_length_penalty" not in overrides:
            base["reward_length_penalty"] = 0.0
        if "length_first_correct" not in overrides:
            base["length_first_correct"] = None
    if "reward_total" not in overrides:
        base["reward_total"] = base["reward_correctness"] - base["reward_length_penalty"]
    return ScoredTrace(**base)
