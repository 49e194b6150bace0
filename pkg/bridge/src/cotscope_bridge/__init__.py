"""Batch reward adapter for training loops.

A trainer that already holds rollouts in memory should not have to
shell out to the cotscope command line and re-parse JSONL just to get
rewards. The two functions here take lists of plain dicts (exactly the
payloads the command line reads) and return lists of plain dicts
(exactly the rows it writes), so swapping one for the other changes
nothing downstream. Everything is stateless and safe to call from
several threads at once.

Only the primary package's public surface is used; no reward or
parsing logic is reimplemented here.
"""
from __future__ import annotations

import json
from collections.abc import Iterable, Iterator, Mapping, Sequence
from typing import Any

from cotscope import (
    ConfigError,
    DataError,
    GROUP_SCHEMES,
    RewardConfig,
    RewardScheme,
    ScoredTrace,
    Tokenizer,
    TokenizerMode,
    TokenizerSpec,
    TraceRecord,
    score_group,
    score_record,
    scored_to_json,
)

__version__ = "0.1.0"

__all__ = ["bridge_score", "bridge_group_advantages", "__version__"]

# public option name -> RewardConfig attribute; same vocabulary the
# command line accepts in its key=value config files
_OPTION_NAMES = {
    "lambda": "lambda_",
    "hard_cutoff": "hard_cutoff",
    "soft_l_max": "soft_l_max",
    "soft_l_cache": "soft_l_cache",
    "twyn_beta": "twyn_beta",
    "advantage_epsilon": "advantage_epsilon",
    "group_size": "group_size",
}


def _reward_config(options: Mapping[str, Any]) -> RewardConfig:
    kwargs: dict[str, Any] = {}
    for key, value in options.items():
        attr = _OPTION_NAMES.get(key)
        if attr is None:
            raise ConfigError(f"unknown reward option {key!r}")
        kwargs[attr] = value
    return RewardConfig(**kwargs)


def _tokenizer(name: str, sidecar: str | None) -> Tokenizer:
    if name == "provided":
        return Tokenizer(TokenizerSpec(TokenizerMode.PROVIDED_COUNTS))
    if name == "unicode-words":
        return Tokenizer(TokenizerSpec(TokenizerMode.UNICODE_WORDS))
    if name == "sidecar":
        if not sidecar:
            raise ConfigError("tokenizer 'sidecar' requires a sidecar path")
        return Tokenizer(TokenizerSpec(TokenizerMode.EXTERNAL_MAP, external_map=sidecar))
    raise ConfigError(f"unknown tokenizer {name!r}")


def _as_record(payload: TraceRecord | Mapping[str, Any]) -> TraceRecord:
    if isinstance(payload, TraceRecord):
        return payload
    return TraceRecord.from_dict(dict(payload))


def _as_scored(payload: ScoredTrace | Mapping[str, Any]) -> ScoredTrace:
    if isinstance(payload, ScoredTrace):
        return payload
    return ScoredTrace.from_dict(dict(payload))


def bridge_score(
    records: Iterable[TraceRecord | Mapping[str, Any]],
    *,
    tokenizer: str = "unicode-words",
    sidecar: str | None = None,
    **options: Any,
) -> list[dict[str, Any]]:
    """Score a batch of trace records; list in, list out, input order kept.

    ``options`` take the command line's config vocabulary (``lambda``,
    ``twyn_beta``, ...). Each returned dict equals one line of
    ``cotscope score`` output for the same record and settings.
    """
    cfg = _reward_config(options)
    tok = _tokenizer(tokenizer, sidecar)
    out = []
    for payload in records:
        scored = score_record(_as_record(payload), tok, lambda_=cfg.lambda_)
        out.append(json.loads(scored_to_json(scored)))
    return out


def _grouped(scored: Iterable[ScoredTrace]) -> Iterator[list[ScoredTrace]]:
    # same contiguity contract as the command line: a key may not reappear
    seen: set[tuple[str, str]] = set()
    key: tuple[str, str] | None = None
    bucket: list[ScoredTrace] = []
    for s in scored:
        k = (s.dataset_id, s.problem_id)
        if k != key:
            if bucket:
                yield bucket
            if k in seen:
                raise DataError(f"records for {k!r} are not contiguous in the input")
            seen.add(k)
            key = k
            bucket = []
        bucket.append(s)
    if bucket:
        yield bucket


def bridge_group_advantages(
    scored: Sequence[ScoredTrace | Mapping[str, Any]],
    *,
    scheme: str | RewardScheme = "adaptive",
    **options: Any,
) -> list[dict[str, Any]]:
    """Apply a reward scheme and group-relative advantages to scored traces.

    Input must be grouped by problem, like the command line's reward
    input. Each returned dict equals one line of ``cotscope reward``
    output for the same rows and settings.
    """
    try:
        scheme = RewardScheme(scheme)
    except ValueError:
        raise ConfigError(f"unknown reward scheme {scheme!r}") from None
    cfg = _reward_config(options)
    rows = []
    for group in _grouped(_as_scored(s) for s in scored):
        if scheme in GROUP_SCHEMES and any(not s.problem_id for s in group):
            raise ConfigError(f"scheme {scheme.value} needs a grouping key on every record")
        breakdowns, sample_group = score_group(group, scheme, cfg)
        for member, breakdown, advantage in zip(group, breakdowns, sample_group.advantages):
            rows.append(
                json.loads(
                    json.dumps(
                        {
                            "problem_id": member.problem_id,
                            "dataset_id": member.dataset_id,
                            "sample_index": member.sample_index,
                            "scheme": breakdown.scheme.value,
                            "r_c": breakdown.r_c,
                            "r_l": breakdown.r_l,
                            "total": breakdown.total,
                            "details": breakdown.details,
                            "advantage": advantage,
                        },
                        ensure_ascii=False,
                    )
                )
            )
    return rows
