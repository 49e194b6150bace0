"""Independent reference implementations the tests compare against.

Everything here is written from the observable definitions, not by
calling into the package, so a bug in the library cannot hide behind
an identical bug in its own test. The trace generator plants answers
at positions it chooses itself, which makes the expected first-correct
length a matter of arithmetic rather than of parsing.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np


def count_tokens_oracle(text: str) -> int:
    """Character state machine: a maximal alphanumeric run is one token,
    any other non-whitespace character is one token by itself."""
    n = 0
    in_word = False
    for ch in text:
        if ch.isalnum():
            if not in_word:
                n += 1
                in_word = True
        else:
            in_word = False
            if not ch.isspace():
                n += 1
    return n


def boxed_contents_oracle(text: str) -> list[tuple[str, int]]:
    """(content, end_offset) for each balanced \\boxed{...}, via an
    explicit depth counter rather than regex."""
    out: list[tuple[str, int]] = []
    pos = 0
    needle = "\\boxed{"
    while True:
        i = text.find(needle, pos)
        if i == -1:
            return out
        depth = 0
        j = i + len(needle) - 1
        while j < len(text):
            if text[j] == "{":
                depth += 1
            elif text[j] == "}":
                depth -= 1
                if depth == 0:
                    break
            j += 1
        if j >= len(text):
            # unbalanced: skip the command, keep scanning inside it
            pos = i + len(needle)
            continue
        out.append((text[i + len(needle) : j], j + 1))
        pos = j + 1


def oaa_oracle(accuracies: list[float], mean_tokens: list[float], t: int) -> float:
    if not accuracies:
        return 0.0
    total = sum(a for a, m in zip(accuracies, mean_tokens) if m < t)
    return total / len(accuracies)


def auc_oracle(accuracies: list[float], mean_tokens: list[float], t_max: int) -> float:
    """Literal mean of the curve over every integer budget 1..t_max."""
    if not accuracies:
        return 0.0
    acc = np.asarray(accuracies, dtype=np.float64)
    means = np.asarray(mean_tokens, dtype=np.float64)
    budgets = np.arange(1, t_max + 1, dtype=np.float64)[:, None]
    per_budget = (means[None, :] < budgets) @ acc / len(accuracies)
    return float(per_budget.sum() / t_max)


# ---------------------------------------------------------------------------
# Planted-answer trace construction.
#
# Filler words are plain ASCII letter runs: one token each under the word
# tokenizer, joined by single spaces. The other pieces have fixed token
# costs that follow directly from the tokenizer definition:
#
#   "\boxed{N}"          5 tokens  (backslash, word, brace, number, brace)
#   "<think>"            3 tokens
#   "</think>"           4 tokens
#   "**Final Answer**"   6 tokens
#
# so the expected total length and the expected first-correct prefix
# length are computed by adding up the plan, never by parsing.
# ---------------------------------------------------------------------------

_FILLER = (
    "so", "then", "we", "expand", "both", "sides", "and", "collect", "terms",
    "which", "gives", "a", "tidy", "product", "of", "two", "binomials", "hence",
    "the", "count", "follows", "from", "symmetry", "by", "inspection",
)

BOXED_TOKENS = 5
THINK_OPEN_TOKENS = 3
THINK_CLOSE_TOKENS = 4
MARKER_TOKENS = 6


@dataclass(frozen=True)
class PlantedTrace:
    response: str
    gold: str
    expected_total: int
    expected_first_correct: int | None
    expected_count: int
    expected_correct: bool


def _words(rng: random.Random, n: int) -> tuple[str, int]:
    return " ".join(rng.choice(_FILLER) for _ in range(n)), n


def make_planted_trace(rng: random.Random) -> PlantedTrace:
    """A synthetic response whose scoring outcome is known by construction."""
    gold_value = rng.randrange(10, 10_000)
    gold = str(gold_value)
    wrong = str(gold_value + 1 + rng.randrange(50))

    with_think = rng.random() < 0.5
    final_correct = rng.random() < 0.8
    n_mid = rng.randrange(0, 4)

    parts: list[str] = []
    tokens = 0
    first_correct: int | None = None
    n_correct_spans = 0

    def add(text: str, cost: int) -> None:
        nonlocal tokens
        parts.append(text)
        tokens += cost

    def add_boxed(value: str) -> None:
        nonlocal first_correct, n_correct_spans
        add("\\boxed{" + value + "}", BOXED_TOKENS)
        if value == gold:
            n_correct_spans += 1
            if first_correct is None:
                first_correct = tokens

    if with_think:
        add("<think>", THINK_OPEN_TOKENS)
    body, cost = _words(rng, rng.randrange(3, 30))
    add(body, cost)
    add_boxed(gold if rng.random() < 0.7 else wrong)
    for _ in range(n_mid):
        body, cost = _words(rng, rng.randrange(1, 15))
        add(body, cost)
        add_boxed(gold if rng.random() < 0.5 else wrong)
    if with_think:
        add("</think>", THINK_CLOSE_TOKENS)
        body, cost = _words(rng, rng.randrange(1, 10))
        add(body, cost)
    add("**Final Answer**", MARKER_TOKENS)
    add_boxed(gold if final_correct else wrong)

    return PlantedTrace(
        response=" ".join(parts),
        gold=gold,
        expected_total=tokens,
        expected_first_correct=first_correct,
        expected_count=n_correct_spans,
        expected_correct=final_correct,
    )


def planted_penalty(trace: PlantedTrace) -> float:
    """Expected adaptive penalty, straight from the planted positions."""
    if not trace.expected_correct or trace.expected_first_correct is None:
        return 0.0
    return (trace.expected_total - trace.expected_first_correct) / trace.expected_total
