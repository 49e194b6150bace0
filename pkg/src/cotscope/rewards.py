"""Reward schemes over scored traces, and group-relative advantages.

The adaptive scheme pays full reward for a correct answer and subtracts
a penalty equal to the fraction of the response generated after the
first correct answer occurrence, so a trace that answers early and then
keeps going is paid less than one that stops. Self-correction costs
nothing: if the first correct occurrence is the final answer itself the
penalty is zero. Four baselines are included for comparison: a hard
length cutoff, a soft cached-length ramp, group length normalization,
and rank-based discounting among correct group members.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import ConfigError, DomainError
from .records import RewardConfig, SampleGroup, ScoredTrace


class RewardScheme(str, Enum):
    ADAPTIVE = "adaptive"
    HARD_LENGTH = "hard_length"
    SOFT_LENGTH = "soft_length"
    NORMALIZED_LENGTH = "normalized_length"
    TWYN = "twyn"


GROUP_SCHEMES = (RewardScheme.NORMALIZED_LENGTH, RewardScheme.TWYN)


@dataclass(frozen=True)
class RewardBreakdown:
    """One trace's reward under one scheme.

    ``r_l`` is the adaptive length penalty and stays 0 for the other
    schemes; their intermediates live in ``details``.
    """

    scheme: RewardScheme
    r_c: float
    r_l: float
    total: float
    details: dict[str, float]


def correctness_reward(scored: ScoredTrace) -> float:
    """Binary credit; the format gate was applied when the trace was scored."""
    return 1.0 if scored.correct else 0.0


def adaptive_length_penalty(length_total: int, length_first_correct: int | None, correct: bool) -> float:
    """Fraction of the response after the first correct answer occurrence.

    Returns 0 for incorrect traces and for traces with no correct
    occurrence, so the penalty never rewards wrong answers for brevity.
    """
    if not correct or length_first_correct is None:
        return 0.0
    if length_total < 1:
        raise DomainError("length_total must be >= 1 for a correct trace")
    if length_first_correct > length_total:
        raise DomainError(
            f"length_first_correct {length_first_correct} exceeds length_total {length_total}"
        )
    return (length_total - length_first_correct) / length_total


def adaptive_reward(scored: ScoredTrace, cfg: RewardConfig | None = None) -> RewardBreakdown:
    cfg = cfg or RewardConfig()
    r_c = correctness_reward(scored)
    r_l = adaptive_length_penalty(scored.length_total, scored.length_first_correct, scored.correct)
    return RewardBreakdown(
        scheme=RewardScheme.ADAPTIVE,
        r_c=r_c,
        r_l=r_l,
        total=r_c - cfg.lambda_ * r_l,
        details={"lambda": cfg.lambda_},
    )


def hard_length_reward(scored: ScoredTrace, cutoff: int) -> RewardBreakdown:
    """Full reward iff correct and within the cutoff, else nothing."""
    if cutoff < 1:
        raise ConfigError("hard_cutoff must be >= 1")
    within = scored.length_total <= cutoff
    total = 1.0 if (scored.correct and within) else 0.0
    return RewardBreakdown(
        scheme=RewardScheme.HARD_LENGTH,
        r_c=total,
        r_l=0.0,
        total=total,
        details={"cutoff": float(cutoff), "within_cutoff": 1.0 if within else 0.0},
    )


def soft_length_reward(scored: ScoredTrace, l_cache: int, l_max: int) -> RewardBreakdown:
    """Correctness minus a linear ramp between l_cache and l_max; 0 past l_max."""
    if not l_cache < l_max:
        raise ConfigError("soft_l_cache must be < soft_l_max")
    length = scored.length_total
    p = min(1.0, max(0.0, (length - l_cache) / (l_max - l_cache)))
    r_c = correctness_reward(scored)
    total = 0.0 if length > l_max else r_c - p
    return RewardBreakdown(
        scheme=RewardScheme.SOFT_LENGTH,
        r_c=r_c,
        r_l=0.0,
        total=total,
        details={"penalty": p, "l_cache": float(l_cache), "l_max": float(l_max)},
    )


def normalized_length_reward(group: Sequence[ScoredTrace]) -> list[RewardBreakdown]:
    """Length bonus of 0.5 for the group's shortest down to -0.5 for its longest.

    Correct members earn correctness plus the bonus; incorrect members
    earn min(0, bonus) so brevity never pays for being wrong. A group
    of equal lengths gets bonus 0 everywhere.
    """
    if not group:
        raise ValueError("group must be non-empty")
    lengths = [s.length_total for s in group]
    lo, hi = min(lengths), max(lengths)
    out = []
    for scored in group:
        bonus = 0.0 if hi == lo else 0.5 - (scored.length_total - lo) / (hi - lo)
        r_c = correctness_reward(scored)
        total = r_c + bonus if scored.correct else min(0.0, bonus)
        out.append(
            RewardBreakdown(
                scheme=RewardScheme.NORMALIZED_LENGTH,
                r_c=r_c,
                r_l=0.0,
                total=total,
                details={"bonus": bonus},
            )
        )
    return out


def twyn_reward(group: Sequence[ScoredTrace], beta: float = 0.5) -> list[RewardBreakdown]:
    """Rank-discounted reward among correct members; incorrect members get 0.

    Correct members are ranked ascending by length; equal lengths share
    the lower rank. Reward is 1 - beta * rank / max(c - 1, 1) over the
    c correct members, so a lone correct member keeps 1.0.
    """
    if not group:
        raise ValueError("group must be non-empty")
    if not 0.0 <= beta <= 1.0:
        raise ConfigError("twyn_beta must be in [0, 1]")
    correct_lengths = sorted(s.length_total for s in group if s.correct)
    c = len(correct_lengths)
    denom = max(c - 1, 1)
    out = []
    for scored in group:
        if not scored.correct:
            out.append(
                RewardBreakdown(
                    scheme=RewardScheme.TWYN, r_c=0.0, r_l=0.0, total=0.0, details={"n_correct": float(c)}
                )
            )
            continue
        rank = _count_strictly_less(correct_lengths, scored.length_total)
        total = 1.0 - beta * rank / denom
        out.append(
            RewardBreakdown(
                scheme=RewardScheme.TWYN,
                r_c=1.0,
                r_l=0.0,
                total=total,
                details={"rank": float(rank), "n_correct": float(c)},
            )
        )
    return out


def _count_strictly_less(sorted_values: list[int], value: int) -> int:
    return bisect.bisect_left(sorted_values, value)


def grpo_advantages(rewards: Sequence[float], epsilon: float = 1e-6) -> list[float]:
    """Center and scale rewards by the group's population deviation.

    epsilon is added to the deviation for stability; a group with zero
    deviation gets all-zero advantages rather than a divide-by-zero.
    """
    if not rewards:
        raise ValueError("rewards must be non-empty")
    if epsilon <= 0:
        raise ConfigError("advantage_epsilon must be > 0")
    n = len(rewards)
    mean = math.fsum(rewards) / n
    variance = math.fsum((r - mean) ** 2 for r in rewards) / n
    std = math.sqrt(variance)
    if std == 0.0:
        return [0.0] * n
    return [(r - mean) / (std + epsilon) for r in rewards]


def score_group(
    members: Sequence[ScoredTrace], scheme: RewardScheme, cfg: RewardConfig | None = None
) -> tuple[list[RewardBreakdown], SampleGroup]:
    """Apply a scheme to one problem's samples and attach advantages."""
    if not members:
        raise ValueError("members must be non-empty")
    cfg = cfg or RewardConfig()
    if scheme is RewardScheme.ADAPTIVE:
        breakdowns = [adaptive_reward(s, cfg) for s in members]
    elif scheme is RewardScheme.HARD_LENGTH:
        if cfg.hard_cutoff is None:
            raise ConfigError("hard_length scheme requires hard_cutoff")
        breakdowns = [hard_length_reward(s, cfg.hard_cutoff) for s in members]
    elif scheme is RewardScheme.SOFT_LENGTH:
        if cfg.soft_l_cache is None or cfg.soft_l_max is None:
            raise ConfigError("soft_length scheme requires soft_l_cache and soft_l_max")
        breakdowns = [soft_length_reward(s, cfg.soft_l_cache, cfg.soft_l_max) for s in members]
    elif scheme is RewardScheme.NORMALIZED_LENGTH:
        breakdowns = normalized_length_reward(members)
    elif scheme is RewardScheme.TWYN:
        breakdowns = twyn_reward(members, cfg.twyn_beta)
    else:  # pragma: no cover - enum is closed
        raise ConfigError(f"unknown scheme {scheme!r}")
    rewards = [b.total for b in breakdowns]
    advantages = grpo_advantages(rewards, cfg.advantage_epsilon)
    group = SampleGroup(
        problem_id=members[0].problem_id,
        members=tuple(members),
        rewards=tuple(rewards),
        advantages=tuple(advantages),
    )
    return breakdowns, group


_CONFIG_KEYS = {
    "lambda": ("lambda_", float),
    "hard_cutoff": ("hard_cutoff", int),
    "soft_l_max": ("soft_l_max", int),
    "soft_l_cache": ("soft_l_cache", int),
    "twyn_beta": ("twyn_beta", float),
    "advantage_epsilon": ("advantage_epsilon", float),
    "group_size": ("group_size", int),
}


def load_reward_config(path: str) -> RewardConfig:
    """Read a flat key=value config file; unknown keys are an error."""
    kwargs: dict[str, float | int] = {}
    try:
        with open(path, encoding="utf-8") as fp:
            lines = fp.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno} is not key=value: {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r} on line {lineno}")
        attr, cast = _CONFIG_KEYS[key]
        try:
            kwargs[attr] = cast(value)
        except ValueError:
            raise ConfigError(f"config key {key!r} has a bad value {value!r}") from None
    return RewardConfig(**kwargs)
