"""Core record types, validation, and the JSONL interchange schema.

All types are frozen dataclasses: construct once, share freely across
threads. JSONL is the canonical interchange format; unknown fields on a
line are kept in ``extra`` and written back on serialization, so files
produced by newer tools survive a round trip through this one. Optional
fields that are absent are omitted from output, never written as null.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable, Iterator, TextIO

from .errors import ConfigError

_RECORD_FIELDS = (
    "problem_id",
    "dataset_id",
    "sample_index",
    "prompt",
    "gold_answer",
    "response",
    "token_count",
    "difficulty",
    "tags",
)

_SCORED_FIELDS = (
    "problem_id",
    "dataset_id",
    "sample_index",
    "correct",
    "length_total",
    "length_first_correct",
    "reward_correctness",
    "reward_length_penalty",
    "reward_total",
    "intermediate_correct_count",
    "difficulty",
)


@dataclass(frozen=True)
class Violation:
    """One validation finding: the offending field and the broken rule."""

    field: str
    rule: str

    def __str__(self) -> str:
        return f"{self.field}: {self.rule}"


@dataclass(frozen=True)
class TraceRecord:
    """One sampled model response to one problem.

    ``token_count`` is optional; when absent the tokenizer in use
    computes a length, when present it is trusted as the total length
    in the tokenizer's own units. ``difficulty`` is a 1..5 rating.
    """

    problem_id: str
    dataset_id: str
    sample_index: int
    prompt: str = ""
    gold_answer: str = ""
    response: str = ""
    token_count: int | None = None
    difficulty: int | None = None
    tags: dict[str, str] | None = None
    extra: dict[str, Any] = field(default_factory=dict, repr=False, compare=True)

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.problem_id, self.dataset_id, self.sample_index)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "problem_id": self.problem_id,
            "dataset_id": self.dataset_id,
            "sample_index": self.sample_index,
            "prompt": self.prompt,
            "gold_answer": self.gold_answer,
            "response": self.response,
        }
        if self.token_count is not None:
            out["token_count"] = self.token_count
        if self.difficulty is not None:
            out["difficulty"] = self.difficulty
        if self.tags is not None:
            out["tags"] = dict(self.tags)
        for k, v in self.extra.items():
            out.setdefault(k, v)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TraceRecord":
        d = dict(data)
        try:
            problem_id = str(d.pop("problem_id"))
            dataset_id = str(d.pop("dataset_id"))
            sample_index = d.pop("sample_index")
        except KeyError as exc:
            raise ValueError(f"record is missing required field {exc.args[0]!r}") from None
        if isinstance(sample_index, bool) or not isinstance(sample_index, int):
            raise ValueError("sample_index must be an integer")
        prompt = str(d.pop("prompt", ""))
        gold_answer = str(d.pop("gold_answer", ""))
        response = str(d.pop("response", ""))
        token_count = d.pop("token_count", None)
        if token_count is not None and (isinstance(token_count, bool) or not isinstance(token_count, int)):
            raise ValueError("token_count must be an integer when present")
        difficulty = d.pop("difficulty", None)
        if difficulty is not None and (isinstance(difficulty, bool) or not isinstance(difficulty, int)):
            raise ValueError("difficulty must be an integer when present")
        tags = d.pop("tags", None)
        if tags is not None:
            if not isinstance(tags, dict):
                raise ValueError("tags must be an object when present")
            tags = {str(k): str(v) for k, v in tags.items()}
        return cls(
            problem_id=problem_id,
            dataset_id=dataset_id,
            sample_index=sample_index,
            prompt=prompt,
            gold_answer=gold_answer,
            response=response,
            token_count=token_count,
            difficulty=difficulty,
            tags=tags,
            extra=d,
        )


def validate_record(record: TraceRecord, seen_keys: set[tuple[str, str, int]] | None = None) -> list[Violation]:
    """Check one record against the schema rules.

    Validation reports, it never raises. Pass a mutable ``seen_keys``
    set across calls to also catch duplicate keys within a batch.
    """
    out: list[Violation] = []
    if record.sample_index < 0:
        out.append(Violation("sample_index", "must be >= 0"))
    if record.token_count is not None:
        if record.token_count < 0:
            out.append(Violation("token_count", "must be >= 0 when present"))
        elif record.response and record.token_count < 1:
            out.append(Violation("token_count", "must be >= 1 for a non-empty response"))
    if record.difficulty is not None and not 1 <= record.difficulty <= 5:
        out.append(Violation("difficulty", "must be in 1..5 when present"))
    if seen_keys is not None:
        if record.key in seen_keys:
            out.append(
                Violation(
                    "sample_index",
                    f"duplicate (problem_id, dataset_id, sample_index) {record.key!r}",
                )
            )
        seen_keys.add(record.key)
    return out


def validate_records(records: Iterable[TraceRecord]) -> list[tuple[TraceRecord, list[Violation]]]:
    """Validate a batch, including key uniqueness across the batch."""
    seen: set[tuple[str, str, int]] = set()
    out = []
    for record in records:
        violations = validate_record(record, seen)
        if violations:
            out.append((record, violations))
    return out


class SegmentKind(str, Enum):
    THINK = "think"
    SUMMARY = "summary"
    FINAL_ANSWER = "final_answer"
    OTHER = "other"


@dataclass(frozen=True)
class Segment:
    """A half-open region of a response: [start, end) in characters.

    Token indices follow the same half-open convention and are counted
    with the built-in word tokenizer over the corresponding prefixes.
    """

    kind: SegmentKind
    start: int
    end: int
    token_start: int
    token_end: int

    def text(self, response: str) -> str:
        return response[self.start : self.end]


@dataclass(frozen=True)
class AnswerSpan:
    """One extracted answer occurrence, ordered by its end offset."""

    raw: str
    normalized: str
    end: int
    token_end: int


@dataclass(frozen=True)
class ScoredTrace:
    """Per-trace scoring result.

    ``length_first_correct`` is the token length of the shortest prefix
    that already contains a correct answer occurrence; it is present
    whenever any occurrence matches gold, even if the final answer does
    not. ``correct`` reflects the final answer plus the format gate.
    """

    problem_id: str
    dataset_id: str
    sample_index: int
    correct: bool
    length_total: int
    length_first_correct: int | None
    reward_correctness: float
    reward_length_penalty: float
    reward_total: float
    intermediate_correct_count: int
    difficulty: int | None = None
    extra: dict[str, Any] = field(default_factory=dict, repr=False)

    @property
    def record_ref(self) -> tuple[str, str, int]:
        return (self.problem_id, self.dataset_id, self.sample_index)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "problem_id": self.problem_id,
            "dataset_id": self.dataset_id,
            "sample_index": self.sample_index,
            "correct": self.correct,
            "length_total": self.length_total,
        }
        if self.length_first_correct is not None:
            out["length_first_correct"] = self.length_first_correct
        out["reward_correctness"] = self.reward_correctness
        out["reward_length_penalty"] = self.reward_length_penalty
        out["reward_total"] = self.reward_total
        out["intermediate_correct_count"] = self.intermediate_correct_count
        if self.difficulty is not None:
            out["difficulty"] = self.difficulty
        for k, v in self.extra.items():
            out.setdefault(k, v)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ScoredTrace":
        d = dict(data)
        lfc = d.pop("length_first_correct", None)
        difficulty = d.pop("difficulty", None)
        try:
            return cls(
                problem_id=str(d.pop("problem_id")),
                dataset_id=str(d.pop("dataset_id")),
                sample_index=int(d.pop("sample_index")),
                correct=bool(d.pop("correct")),
                length_total=int(d.pop("length_total")),
                length_first_correct=int(lfc) if lfc is not None else None,
                reward_correctness=float(d.pop("reward_correctness")),
                reward_length_penalty=float(d.pop("reward_length_penalty")),
                reward_total=float(d.pop("reward_total")),
                intermediate_correct_count=int(d.pop("intermediate_correct_count")),
                difficulty=int(difficulty) if difficulty is not None else None,
                extra=d,
            )
        except KeyError as exc:
            raise ValueError(f"scored record is missing required field {exc.args[0]!r}") from None


def validate_scored(scored: ScoredTrace) -> list[Violation]:
    """Shared invariant checker for scored traces, used everywhere one is produced."""
    out: list[Violation] = []
    if scored.length_total < 0:
        out.append(Violation("length_total", "must be >= 0"))
    lfc = scored.length_first_correct
    if lfc is not None and not 1 <= lfc <= scored.length_total:
        out.append(Violation("length_first_correct", "must satisfy 1 <= value <= length_total"))
    if scored.correct and lfc is None:
        out.append(Violation("length_first_correct", "must be present when correct"))
    if not 0.0 <= scored.reward_length_penalty < 1.0:
        out.append(Violation("reward_length_penalty", "must be in [0, 1)"))
    if (not scored.correct or lfc is None) and scored.reward_length_penalty != 0.0:
        out.append(Violation("reward_length_penalty", "must be 0 without a correct prefix"))
    if scored.intermediate_correct_count < 0:
        out.append(Violation("intermediate_correct_count", "must be >= 0"))
    if scored.difficulty is not None and not 1 <= scored.difficulty <= 5:
        out.append(Violation("difficulty", "must be in 1..5 when present"))
    return out


@dataclass(frozen=True)
class RewardConfig:
    """Knobs for the reward schemes and group advantage computation.

    ``lambda_`` is written as ``lambda`` in config files. Cutoffs for
    the hard and soft baselines have no defaults; the schemes that need
    them reject a config where they are missing.
    """

    lambda_: float = 1.0
    hard_cutoff: int | None = None
    soft_l_max: int | None = None
    soft_l_cache: int | None = None
    twyn_beta: float = 0.5
    advantage_epsilon: float = 1e-6
    group_size: int = 8

    def __post_init__(self) -> None:
        if self.lambda_ < 0:
            raise ConfigError("lambda must be >= 0")
        if not 0.0 <= self.twyn_beta <= 1.0:
            raise ConfigError("twyn_beta must be in [0, 1]")
        if self.advantage_epsilon <= 0:
            raise ConfigError("advantage_epsilon must be > 0")
        if self.group_size < 1:
            raise ConfigError("group_size must be >= 1")
        if self.hard_cutoff is not None and self.hard_cutoff < 1:
            raise ConfigError("hard_cutoff must be >= 1")
        if self.soft_l_max is not None and self.soft_l_cache is not None and not self.soft_l_cache < self.soft_l_max:
            raise ConfigError("soft_l_cache must be < soft_l_max")


@dataclass(frozen=True)
class SampleGroup:
    """All scored samples of one problem plus their rewards and advantages."""

    problem_id: str
    members: tuple[ScoredTrace, ...]
    rewards: tuple[float, ...]
    advantages: tuple[float, ...]

    def __post_init__(self) -> None:
        if not len(self.members) == len(self.rewards) == len(self.advantages):
            raise ValueError("members, rewards, and advantages must have equal length")


@dataclass(frozen=True)
class RunMetrics:
    """Dataset-level metrics for one run."""

    dataset_id: str
    n_problems: int
    accuracy: float
    mean_tokens: float
    t_max: int
    oaa_points: tuple[tuple[int, float], ...]
    auc_oaa: float
    per_difficulty: dict[int, dict[str, float]] | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "dataset_id": self.dataset_id,
            "n_problems": self.n_problems,
            "accuracy": self.accuracy,
            "mean_tokens": self.mean_tokens,
            "t_max": self.t_max,
            "oaa_points": [[t, v] for t, v in self.oaa_points],
            "auc_oaa": self.auc_oaa,
        }
        if self.per_difficulty is not None:
            out["per_difficulty"] = {str(k): dict(v) for k, v in sorted(self.per_difficulty.items())}
        return out


@dataclass(frozen=True)
class CorpusStats:
    """Summary of one corpus build."""

    problems_in: int
    problems_kept: int
    samples_in: int
    mean_tokens_in: float
    mean_tokens_out: float
    reduction_fraction: float
    records_skipped: int = 0
    malformed_lines: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "problems_in": self.problems_in,
            "problems_kept": self.problems_kept,
            "samples_in": self.samples_in,
            "mean_tokens_in": self.mean_tokens_in,
            "mean_tokens_out": self.mean_tokens_out,
            "reduction_fraction": self.reduction_fraction,
            "records_skipped": self.records_skipped,
            "malformed_lines": self.malformed_lines,
        }


def record_to_json(record: TraceRecord) -> str:
    return json.dumps(record.to_dict(), ensure_ascii=False)


def scored_to_json(scored: ScoredTrace) -> str:
    return json.dumps(scored.to_dict(), ensure_ascii=False)


def read_jsonl(fp: TextIO) -> Iterator[dict[str, Any]]:
    """Yield one object per non-blank line; malformed lines raise ValueError."""
    for lineno, line in enumerate(fp, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if not isinstance(obj, dict):
            raise ValueError(f"line {lineno}: expected an object")
        yield obj


def read_trace_records(fp: TextIO) -> Iterator[TraceRecord]:
    for obj in read_jsonl(fp):
        yield TraceRecord.from_dict(obj)


def read_scored_traces(fp: TextIO) -> Iterator[ScoredTrace]:
    for obj in read_jsonl(fp):
        yield ScoredTrace.from_dict(obj)


def with_gold_answer(record: TraceRecord, gold: str) -> TraceRecord:
    return replace(record, gold_answer=gold)
