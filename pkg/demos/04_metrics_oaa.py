"""Accuracy alone hides overthinking; charge answers against a token budget.

A problem only counts at budget t if its mean response stays strictly
under t tokens. Sweeping t from 0 to a reference budget traces a curve;
the area under it (normalized) rewards being right AND being brief.

Run from the repository root:  python3 demos/04_metrics_oaa.py
"""
from cotscope import (
    ScoredTrace,
    aggregate_problems,
    auc_oaa,
    dataset_accuracy,
    oaa_at,
    oaa_grid,
    t_max_from_baseline,
)


def run(name: str, problems: list[tuple[str, bool, int]]) -> list[ScoredTrace]:
    traces = []
    for pid, correct, tokens in problems:
        traces.append(
            ScoredTrace(
                problem_id=pid,
                dataset_id="demo",
                sample_index=0,
                correct=correct,
                length_total=tokens,
                length_first_correct=tokens if correct else None,
                reward_correctness=1.0 if correct else 0.0,
                reward_length_penalty=0.0,
                reward_total=1.0 if correct else 0.0,
                intermediate_correct_count=1 if correct else 0,
            )
        )
    return traces


# Two models on the same ten problems. The verbose one is slightly MORE
# accurate; the concise one answers in a fraction of the tokens.
verbose = run(
    "verbose",
    [("p0", True, 900), ("p1", True, 1400), ("p2", True, 2600), ("p3", False, 3100),
     ("p4", True, 1900), ("p5", True, 2400), ("p6", False, 2800), ("p7", True, 1700),
     ("p8", True, 2200), ("p9", True, 1300)],
)
concise = run(
    "concise",
    [("p0", True, 300), ("p1", True, 500), ("p2", True, 800), ("p3", False, 700),
     ("p4", True, 600), ("p5", False, 400), ("p6", False, 900), ("p7", True, 450),
     ("p8", True, 650), ("p9", True, 350)],
)

# The budget comes from the baseline's own mean length, so the verbose
# model is judged against the envelope it set for itself.
agg_verbose = aggregate_problems(verbose)
agg_concise = aggregate_problems(concise)
t_max = t_max_from_baseline(
    ("demo", a.problem_id, a.mean_tokens) for a in agg_verbose
)
print(f"budget from baseline mean length: t_max = {t_max} tokens\n")

print(f"{'budget t':>9}  {'verbose':>8}  {'concise':>8}")
for t, _ in oaa_grid(agg_verbose, t_max, n_points=9):
    print(f"{t:>9}  {oaa_at(agg_verbose, t):>8.2f}  {oaa_at(agg_concise, t):>8.2f}")

print()
for name, aggs in (("verbose", agg_verbose), ("concise", agg_concise)):
    print(
        f"{name:>8}: accuracy {dataset_accuracy(aggs):.2f}"
        f"  area-under-curve {auc_oaa(aggs, t_max):.3f}"
    )

print()
print("Plain accuracy says the verbose model wins by one problem. The")
print("budget-adjusted area says the opposite: most of the verbose model's")
print("correct answers only arrive near the edge of the budget, while the")
print("concise model banks its wins almost immediately and keeps them at")
print("every budget from a few hundred tokens up.")
