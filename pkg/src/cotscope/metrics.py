"""Aggregation, overthinking-adjusted accuracy, and run comparison.

Overthinking-adjusted accuracy at a budget t credits a problem's
accuracy only when its mean response length stays strictly under t.
The area under that curve, normalized by a reference budget t_max,
summarizes the accuracy/length trade-off in one number that is never
above plain accuracy. The area is computed exactly: the curve is a
step function of t, so each problem contributes its accuracy times the
number of integer budgets in [1, t_max] that exceed its mean length.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DatasetMismatch, DuplicateSample, EmptyBaseline, InputError
from .records import RunMetrics, ScoredTrace


@dataclass(frozen=True)
class ProblemAggregate:
    """Per-problem accuracy and mean length over its samples."""

    problem_id: str
    dataset_id: str
    n_samples: int
    accuracy: float
    mean_tokens: float
    difficulty: int | None = None


@dataclass(frozen=True)
class MethodPoint:
    """One method's position on the accuracy/length plane for one dataset."""

    method_id: str
    dataset_id: str
    accuracy: float
    mean_tokens: float


@dataclass(frozen=True)
class LengthSummary:
    """Distribution summary for one split of response lengths."""

    split: str
    count: int
    mean: float | None
    median: float | None
    p10: float | None
    p90: float | None
    buckets: tuple[tuple[int, int, int], ...]


@dataclass(frozen=True)
class CountHistogram:
    """Frequencies of intermediate correct-answer counts."""

    frequencies: dict[int, int]
    mean: float | None


@dataclass(frozen=True)
class StratumStats:
    n_problems: int
    accuracy: float
    mean_tokens: float
    mean_intermediate_correct: float


def aggregate_problems(scored: Iterable[ScoredTrace]) -> list[ProblemAggregate]:
    """Group samples by problem, in first-appearance order.

    A repeated (problem_id, dataset_id, sample_index) aborts with the
    offending key; silently averaging duplicates would skew accuracy.
    """
    order: list[tuple[str, str]] = []
    acc: dict[tuple[str, str], list] = {}
    seen: set[tuple[str, str, int]] = set()
    for s in scored:
        if s.record_ref in seen:
            raise DuplicateSample(f"duplicate sample {s.record_ref!r}")
        seen.add(s.record_ref)
        key = (s.dataset_id, s.problem_id)
        if key not in acc:
            order.append(key)
            acc[key] = [0, 0, 0, None]  # n, n_correct, sum_tokens, difficulty
        row = acc[key]
        row[0] += 1
        row[1] += 1 if s.correct else 0
        row[2] += s.length_total
        if row[3] is None and s.difficulty is not None:
            row[3] = s.difficulty
    out = []
    for dataset_id, problem_id in order:
        n, n_correct, sum_tokens, difficulty = acc[(dataset_id, problem_id)]
        out.append(
            ProblemAggregate(
                problem_id=problem_id,
                dataset_id=dataset_id,
                n_samples=n,
                accuracy=n_correct / n,
                mean_tokens=sum_tokens / n,
                difficulty=difficulty,
            )
        )
    return out


def dataset_accuracy(aggregates: Sequence[ProblemAggregate]) -> float:
    """Unweighted mean of per-problem accuracy."""
    if not aggregates:
        raise InputError("no problems to aggregate")
    return math.fsum(a.accuracy for a in aggregates) / len(aggregates)


def oaa_at(aggregates: Sequence[ProblemAggregate], t: int) -> float:
    """Accuracy credited only to problems whose mean length is under t."""
    if not aggregates:
        return 0.0
    return math.fsum(a.accuracy for a in aggregates if a.mean_tokens < t) / len(aggregates)


def auc_oaa(aggregates: Sequence[ProblemAggregate], t_max: int) -> float:
    """Exact mean of the budget-adjusted accuracy over budgets 1..t_max.

    A problem with mean length m is counted at the integer budgets
    t > m, of which [1, t_max] contains max(0, t_max - floor(m)); the
    area follows in closed form without a per-budget loop.
    """
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    n = len(aggregates)
    if n == 0:
        return 0.0
    tokens = np.array([a.mean_tokens for a in aggregates], dtype=np.float64)
    accuracy = np.array([a.accuracy for a in aggregates], dtype=np.float64)
    counted = np.clip(t_max - np.floor(tokens), 0.0, None)
    return float(np.dot(accuracy, counted)) / (n * t_max)


def oaa_grid(aggregates: Sequence[ProblemAggregate], t_max: int, n_points: int = 101) -> list[tuple[int, float]]:
    """Sample the curve at evenly spaced integer budgets, always with 0 and t_max."""
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    ts = sorted({0, t_max} | {round(i * t_max / (n_points - 1)) for i in range(n_points)})
    return [(t, oaa_at(aggregates, t)) for t in ts]


def t_max_from_baseline(entries: Iterable[tuple[str, str, float]], dataset_id: str | None = None) -> int:
    """Reference budget: the baseline run's mean length, rounded, at least 1.

    ``entries`` are (dataset_id, problem_id, length) triples; lengths
    are first averaged within a problem so sample counts do not skew
    the reference.
    """
    sums: dict[tuple[str, str], list] = {}
    for ds, pid, length in entries:
        if dataset_id is not None and ds != dataset_id:
            raise DatasetMismatch(f"baseline contains dataset {ds!r}, expected {dataset_id!r}")
        row = sums.setdefault((ds, pid), [0, 0.0])
        row[0] += 1
        row[1] += length
    if not sums:
        raise EmptyBaseline("baseline run has no records")
    means = [total / n for n, total in sums.values()]
    return max(1, round(math.fsum(means) / len(means)))


def run_metrics(
    scored: Iterable[ScoredTrace],
    *,
    t_max: int,
    grid_points: int = 101,
    per_sample: bool = False,
) -> RunMetrics:
    """Dataset metrics for one run at a given reference budget.

    With ``per_sample`` each sample stands alone instead of being
    averaged into its problem first; useful for sensitivity checks.
    """
    items = list(scored)
    if not items:
        raise InputError("no scored records")
    dataset_ids = sorted({s.dataset_id for s in items})
    if len(dataset_ids) != 1:
        raise DatasetMismatch(f"expected one dataset, found {dataset_ids}")
    if per_sample:
        aggregates = [
            ProblemAggregate(
                problem_id=f"{s.problem_id}#{s.sample_index}",
                dataset_id=s.dataset_id,
                n_samples=1,
                accuracy=1.0 if s.correct else 0.0,
                mean_tokens=float(s.length_total),
                difficulty=s.difficulty,
            )
            for s in items
        ]
    else:
        aggregates = aggregate_problems(items)
    strata = difficulty_strata(aggregates, items)
    rated = {
        level: {
            "accuracy": st.accuracy,
            "mean_tokens": st.mean_tokens,
            "mean_intermediate_correct": st.mean_intermediate_correct,
        }
        for level, st in strata.items()
        if level is not None
    }
    return RunMetrics(
        dataset_id=dataset_ids[0],
        n_problems=len(aggregates),
        accuracy=dataset_accuracy(aggregates),
        mean_tokens=math.fsum(a.mean_tokens for a in aggregates) / len(aggregates),
        t_max=t_max,
        oaa_points=tuple(oaa_grid(aggregates, t_max, grid_points)),
        auc_oaa=auc_oaa(aggregates, t_max),
        per_difficulty=rated or None,
    )


def length_distribution(
    scored: Iterable[ScoredTrace],
    *,
    split_by_correctness: bool = True,
    bucket_width: int = 512,
) -> list[LengthSummary]:
    """Length histograms, optionally split into correct and incorrect."""
    if bucket_width < 1:
        raise ValueError("bucket_width must be >= 1")
    items = list(scored)
    if split_by_correctness:
        splits = [
            ("correct", [s.length_total for s in items if s.correct]),
            ("incorrect", [s.length_total for s in items if not s.correct]),
        ]
    else:
        splits = [("all", [s.length_total for s in items])]
    out = []
    for name, lengths in splits:
        if not lengths:
            out.append(LengthSummary(name, 0, None, None, None, None, ()))
            continue
        arr = np.array(lengths, dtype=np.float64)
        buckets: dict[int, int] = {}
        for length in lengths:
            buckets[length // bucket_width] = buckets.get(length // bucket_width, 0) + 1
        out.append(
            LengthSummary(
                split=name,
                count=len(lengths),
                mean=float(arr.mean()),
                median=float(np.percentile(arr, 50)),
                p10=float(np.percentile(arr, 10)),
                p90=float(np.percentile(arr, 90)),
                buckets=tuple(
                    (idx * bucket_width, (idx + 1) * bucket_width, buckets[idx]) for idx in sorted(buckets)
                ),
            )
        )
    return out


def intermediate_answer_distribution(scored: Iterable[ScoredTrace]) -> CountHistogram:
    counts: dict[int, int] = {}
    total = 0
    n = 0
    for s in scored:
        counts[s.intermediate_correct_count] = counts.get(s.intermediate_correct_count, 0) + 1
        total += s.intermediate_correct_count
        n += 1
    return CountHistogram(
        frequencies=dict(sorted(counts.items())),
        mean=total / n if n else None,
    )


def difficulty_strata(
    aggregates: Sequence[ProblemAggregate], scored: Iterable[ScoredTrace]
) -> dict[int | None, StratumStats]:
    """Per-difficulty accuracy, length, and intermediate-answer stats.

    Problems without a rating fall into the None stratum. Intermediate
    counts are averaged within each problem first, like the other two
    figures, so problems weigh equally regardless of sample count.
    """
    inter: dict[tuple[str, str], list] = {}
    for s in scored:
        row = inter.setdefault((s.dataset_id, s.problem_id), [0, 0])
        row[0] += 1
        row[1] += s.intermediate_correct_count
    levels: dict[int | None, list[ProblemAggregate]] = {}
    for agg in aggregates:
        levels.setdefault(agg.difficulty, []).append(agg)
    out: dict[int | None, StratumStats] = {}
    for level in sorted(levels, key=lambda x: (x is None, x)):
        rows = levels[level]
        means = []
        for agg in rows:
            row = inter.get((agg.dataset_id, agg.problem_id))
            means.append(row[1] / row[0] if row else 0.0)
        out[level] = StratumStats(
            n_problems=len(rows),
            accuracy=math.fsum(a.accuracy for a in rows) / len(rows),
            mean_tokens=math.fsum(a.mean_tokens for a in rows) / len(rows),
            mean_intermediate_correct=math.fsum(means) / len(means),
        )
    return out


def dominates(a: MethodPoint, b: MethodPoint) -> bool:
    """True when a is at least as accurate and at most as long, one strictly."""
    return (
        a.accuracy >= b.accuracy
        and a.mean_tokens <= b.mean_tokens
        and (a.accuracy > b.accuracy or a.mean_tokens < b.mean_tokens)
    )


@dataclass(frozen=True)
class DominanceResult:
    points: tuple[MethodPoint, ...]
    matrix: dict[tuple[str, str], bool]
    classification: dict[str, str]
    reference: str | None


def dominance(points: Sequence[MethodPoint], reference: str | None = None) -> DominanceResult:
    """Pairwise dominance over one dataset's method points.

    With a reference method, every other method is classified as
    dominating it, dominated by it, or incomparable.
    """
    ids = [p.method_id for p in points]
    if len(set(ids)) != len(ids):
        raise ValueError("each method may appear only once")
    by_id: Mapping[str, MethodPoint] = {p.method_id: p for p in points}
    if reference is not None and reference not in by_id:
        raise ValueError(f"reference {reference!r} is not among the points")
    matrix = {
        (a.method_id, b.method_id): dominates(a, b)
        for a in points
        for b in points
        if a.method_id != b.method_id
    }
    classification: dict[str, str] = {}
    if reference is not None:
        ref = by_id[reference]
        for p in points:
            if p.method_id == reference:
                classification[p.method_id] = "reference"
            elif dominates(p, ref):
                classification[p.method_id] = "dominates_reference"
            elif dominates(ref, p):
                classification[p.method_id] = "dominated_by_reference"
            else:
                classification[p.method_id] = "incomparable"
    return DominanceResult(
        points=tuple(points), matrix=matrix, classification=classification, reference=reference
    )


def macro_average(values: Iterable[float]) -> float:
    """Unweighted mean across datasets."""
    vals = list(values)
    if not vals:
        raise ValueError("macro_average needs at least one value")
    return math.fsum(vals) / len(vals)


def length_reduction(reference_mean: float, candidate_mean: float) -> float:
    """Fractional drop in mean length relative to a reference run."""
    if reference_mean <= 0:
        raise ValueError("reference mean must be positive")
    return (reference_mean - candidate_mean) / reference_mean
