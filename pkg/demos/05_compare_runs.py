"""Decide whether a shorter model is actually better, per dataset.

On the accuracy/length plane one method dominates another only when it
is at least as accurate AND at most as long, strictly better in one.
Anything else is a trade-off, and the honest output is "incomparable",
not a single winner.

Run from the repository root:  python3 demos/05_compare_runs.py
"""
from cotscope import MethodPoint, dominance, length_reduction, macro_average

# Accuracy and mean response tokens for three methods on three datasets.
RESULTS = {
    "competition-math": {
        "base": (69.9, 8298.0),
        "short-tuned": (69.0, 6349.0),
        "short-strict": (68.7, 5925.0),
    },
    "grade-school": {
        "base": (94.1, 1900.0),
        "short-tuned": (94.3, 1100.0),
        "short-strict": (93.6, 950.0),
    },
    "word-puzzles": {
        "base": (41.0, 5200.0),
        "short-tuned": (39.4, 5300.0),
        "short-strict": (37.4, 4100.0),
    },
}

for dataset, methods in RESULTS.items():
    points = [
        MethodPoint(method_id=m, dataset_id=dataset, accuracy=acc, mean_tokens=tok)
        for m, (acc, tok) in methods.items()
    ]
    result = dominance(points, reference="base")
    print(f"=== {dataset} ===")
    for p in points:
        verdict = result.classification[p.method_id]
        cut = length_reduction(methods["base"][1], p.mean_tokens)
        print(
            f"  {p.method_id:<13} acc={p.accuracy:>5.1f}  tokens={p.mean_tokens:>7.0f}"
            f"  cut={cut:>+6.1%}  {verdict}"
        )
    print()

print("grade-school: short-tuned is a clean win (more accurate AND shorter),")
print("so it dominates the reference. word-puzzles: short-tuned is worse on")
print("both axes, so the reference dominates it. competition-math trades a")
print("point of accuracy for a quarter of the tokens: incomparable, and the")
print("matrix refuses to pretend otherwise.")

print()
macro = {
    m: macro_average(RESULTS[d][m][0] for d in RESULTS) for m in ("base", "short-tuned", "short-strict")
}
tokens = {
    m: macro_average(RESULTS[d][m][1] for d in RESULTS) for m in ("base", "short-tuned", "short-strict")
}
print("macro over the three datasets:")
for m in macro:
    print(
        f"  {m:<13} accuracy {macro[m]:5.1f}  mean tokens {tokens[m]:7.0f}"
        f"  ({length_reduction(tokens['base'], tokens[m]):+.0%} vs base)"
    )
print()
print("The same sweep is available end to end from the command line:")
print("  cotscope compare base.manifest.json tuned.manifest.json --dominance-csv dom.csv")
