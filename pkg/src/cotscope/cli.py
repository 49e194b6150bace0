"""Command line interface.

Subcommands: score, reward, build-sft, metrics, analyze, compare.
Outputs are deterministic byte for byte for the same inputs and flags.
Warnings and summaries go to stderr as single-line JSON; exit codes are
0 on success, 2 for input errors, 3 for configuration errors, and 4
for data-consistency errors.
"""
from __future__ import annotations

import argparse
import csv
import functools
import json
import logging
import multiprocessing
import os
import sys
from pathlib import Path
from typing import Any, Iterable, Iterator, TextIO

from . import __version__
from .corpus import BuildMode, build_sft_corpus
from .errors import ConfigError, CotscopeError, DataError, DatasetMismatch, InputError
from .metrics import (
    MethodPoint,
    aggregate_problems,
    dataset_accuracy,
    difficulty_strata,
    dominance,
    intermediate_answer_distribution,
    length_distribution,
    length_reduction,
    macro_average,
    run_metrics,
    t_max_from_baseline,
)
from .parsing import Tokenizer, TokenizerMode, TokenizerSpec
from .records import (
    RewardConfig,
    ScoredTrace,
    TraceRecord,
    record_to_json,
    scored_to_json,
    validate_record,
    with_gold_answer,
)
from .rewards import GROUP_SCHEMES, RewardScheme, load_reward_config, score_group
from .scoring import score_record

logger = logging.getLogger(__name__)


def _emit_stderr(obj: dict[str, Any]) -> None:
    print(json.dumps(obj, ensure_ascii=False), file=sys.stderr)


def _warn(message: str, **fields: Any) -> None:
    _emit_stderr({"warning": message, **fields})


class _JsonWarningHandler(logging.Handler):
    """Routes library log records to stderr in the warning format."""

    def emit(self, record: logging.LogRecord) -> None:
        _emit_stderr({"warning": record.getMessage(), "logger": record.name})


def _open_input(path: str) -> TextIO:
    if path == "-":
        return sys.stdin
    try:
        return open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read input: {exc}") from None


def _open_output(path: str | None) -> TextIO:
    if path is None or path == "-":
        return sys.stdout
    try:
        return open(path, "w", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write output: {exc}") from None


def _close(fp: TextIO) -> None:
    if fp not in (sys.stdin, sys.stdout, sys.stderr):
        fp.close()


def _tokenizer_spec(args: argparse.Namespace) -> TokenizerSpec:
    name = args.tokenizer
    if name == "provided":
        return TokenizerSpec(TokenizerMode.PROVIDED_COUNTS)
    if name == "unicode-words":
        return TokenizerSpec(TokenizerMode.UNICODE_WORDS)
    if name == "sidecar":
        if not args.sidecar:
            raise ConfigError("--tokenizer sidecar requires --sidecar PATH")
        if not Path(args.sidecar).is_file():
            raise InputError(f"sidecar file not found: {args.sidecar}")
        return TokenizerSpec(TokenizerMode.EXTERNAL_MAP, external_map=args.sidecar)
    raise ConfigError(f"unknown tokenizer {name!r}")


def _reward_config(args: argparse.Namespace) -> RewardConfig:
    if getattr(args, "config", None):
        return load_reward_config(args.config)
    return RewardConfig()


def _load_gold_map(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fp:
            data = json.load(fp)
    except OSError as exc:
        raise InputError(f"cannot read gold file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"gold file is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InputError("gold file must be a JSON object mapping problem_id to answer")
    return {str(k): str(v) for k, v in data.items()}


def _iter_records_lenient(fp: TextIO, counters: dict[str, int]) -> Iterator[TraceRecord]:
    for lineno, line in enumerate(fp, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise ValueError("expected a JSON object")
            record = TraceRecord.from_dict(obj)
        except ValueError as exc:
            counters["malformed"] = counters.get("malformed", 0) + 1
            _warn("malformed_line", line=lineno, error=str(exc))
            continue
        yield record


def _iter_scored_lenient(fp: TextIO, counters: dict[str, int]) -> Iterator[ScoredTrace]:
    for lineno, line in enumerate(fp, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise ValueError("expected a JSON object")
            scored = ScoredTrace.from_dict(obj)
        except (ValueError, TypeError) as exc:
            counters["malformed"] = counters.get("malformed", 0) + 1
            _warn("malformed_line", line=lineno, error=str(exc))
            continue
        yield scored


def _resolve_gold(record: TraceRecord, gold_map: dict[str, str]) -> TraceRecord | None:
    from_file = gold_map.get(record.problem_id)
    if record.gold_answer:
        if from_file is not None and from_file != record.gold_answer:
            _warn(
                "gold_conflict",
                problem_id=record.problem_id,
                detail="inline gold_answer wins over --gold file",
            )
        return record
    if from_file is not None:
        return with_gold_answer(record, from_file)
    return None


class _ScoreFailure:
    """Picklable marker for a record that could not be scored."""

    __slots__ = ("problem_id", "sample_index", "message")

    def __init__(self, problem_id: str, sample_index: int, message: str) -> None:
        self.problem_id = problem_id
        self.sample_index = sample_index
        self.message = message


def _score_one(record: TraceRecord, spec: TokenizerSpec, lambda_: float) -> ScoredTrace | _ScoreFailure:
    try:
        return score_record(record, spec, lambda_=lambda_)
    except CotscopeError as exc:
        return _ScoreFailure(record.problem_id, record.sample_index, str(exc))


def cmd_score(args: argparse.Namespace) -> int:
    spec = _tokenizer_spec(args)
    cfg = _reward_config(args)
    gold_map = _load_gold_map(args.gold)
    counters: dict[str, int] = {}
    n_scored = 0
    n_correct = 0
    sum_r_l = 0.0

    fp_in = _open_input(args.input)
    fp_out = _open_output(args.output)
    try:

        def resolved_records() -> Iterator[TraceRecord]:
            for record in _iter_records_lenient(fp_in, counters):
                resolved = _resolve_gold(record, gold_map)
                if resolved is None:
                    counters["no_gold"] = counters.get("no_gold", 0) + 1
                    _warn("missing_gold", problem_id=record.problem_id, sample_index=record.sample_index)
                    continue
                for violation in validate_record(resolved):
                    _warn("invalid_record", problem_id=record.problem_id, detail=str(violation))
                yield resolved

        worker = functools.partial(_score_one, spec=spec, lambda_=cfg.lambda_)
        if args.parallel > 1 and spec.mode is not TokenizerMode.EXTERNAL_MAP:
            with multiprocessing.Pool(processes=args.parallel) as pool:
                results: Iterable[ScoredTrace | _ScoreFailure] = pool.imap(
                    worker, resolved_records(), chunksize=64
                )
                n_scored, n_correct, sum_r_l = _write_scored(results, fp_out, counters)
        else:
            results = map(worker, resolved_records())
            n_scored, n_correct, sum_r_l = _write_scored(results, fp_out, counters)
    finally:
        _close(fp_in)
        _close(fp_out)

    if n_scored == 0:
        raise InputError("no records scored")
    _emit_stderr(
        {
            "summary": {
                "records": n_scored,
                "correct": n_correct,
                "mean_length_penalty": sum_r_l / n_scored,
                "malformed_lines": counters.get("malformed", 0),
                "skipped": counters.get("skipped", 0) + counters.get("no_gold", 0),
            }
        }
    )
    return 0


def _write_scored(
    results: Iterable[ScoredTrace | _ScoreFailure], fp_out: TextIO, counters: dict[str, int]
) -> tuple[int, int, float]:
    n_scored = 0
    n_correct = 0
    sum_r_l = 0.0
    for result in results:
        if isinstance(result, _ScoreFailure):
            counters["skipped"] = counters.get("skipped", 0) + 1
            _warn(
                "record_skipped",
                problem_id=result.problem_id,
                sample_index=result.sample_index,
                error=result.message,
            )
            continue
        n_scored += 1
        n_correct += 1 if result.correct else 0
        sum_r_l += result.reward_length_penalty
        fp_out.write(scored_to_json(result) + "\n")
    return n_scored, n_correct, sum_r_l


def _group_scored(scored: Iterable[ScoredTrace]) -> Iterator[list[ScoredTrace]]:
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


def cmd_reward(args: argparse.Namespace) -> int:
    scheme = RewardScheme(args.scheme)
    cfg = _reward_config(args)
    counters: dict[str, int] = {}
    n_out = 0
    fp_in = _open_input(args.input)
    fp_out = _open_output(args.output)
    try:
        for group in _group_scored(_iter_scored_lenient(fp_in, counters)):
            if scheme in GROUP_SCHEMES and any(not s.problem_id for s in group):
                raise ConfigError(f"scheme {scheme.value} needs a grouping key on every record")
            if len(group) != cfg.group_size:
                _warn(
                    "group_size_mismatch",
                    problem_id=group[0].problem_id,
                    size=len(group),
                    expected=cfg.group_size,
                )
            breakdowns, sample_group = score_group(group, scheme, cfg)
            for scored, breakdown, advantage in zip(group, breakdowns, sample_group.advantages):
                fp_out.write(
                    json.dumps(
                        {
                            "problem_id": scored.problem_id,
                            "dataset_id": scored.dataset_id,
                            "sample_index": scored.sample_index,
                            "scheme": breakdown.scheme.value,
                            "r_c": breakdown.r_c,
                            "r_l": breakdown.r_l,
                            "total": breakdown.total,
                            "details": breakdown.details,
                            "advantage": advantage,
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )
                n_out += 1
    finally:
        _close(fp_in)
        _close(fp_out)
    if n_out == 0:
        raise InputError("no scored records to reward")
    return 0


def cmd_build_sft(args: argparse.Namespace) -> int:
    mode = BuildMode(args.mode.replace("-", "_"))
    spec = _tokenizer_spec(args)
    cfg = _reward_config(args)
    gold_map = _load_gold_map(args.gold)
    counters: dict[str, int] = {}

    def records() -> Iterator[TraceRecord]:
        for record in _iter_records_lenient(fp_in, counters):
            resolved = _resolve_gold(record, gold_map)
            if resolved is None:
                counters["no_gold"] = counters.get("no_gold", 0) + 1
                _warn("missing_gold", problem_id=record.problem_id, sample_index=record.sample_index)
                continue
            yield resolved

    def on_skip(record: TraceRecord, reason: str) -> None:
        _warn("record_skipped", problem_id=record.problem_id, reason=reason)

    fp_in = _open_input(args.input)
    fp_out = _open_output(args.output)
    try:
        gen = build_sft_corpus(records(), mode, tokenizer=Tokenizer(spec), lambda_=cfg.lambda_, on_skip=on_skip)
        while True:
            try:
                out = next(gen)
            except StopIteration as stop:
                stats = stop.value
                break
            fp_out.write(record_to_json(out) + "\n")
    finally:
        _close(fp_in)
        _close(fp_out)

    stats_dict = stats.to_dict()
    stats_dict["records_skipped"] += counters.get("no_gold", 0)
    stats_dict["malformed_lines"] = counters.get("malformed", 0)
    payload = json.dumps(stats_dict, ensure_ascii=False)
    if args.stats_out:
        with open(args.stats_out, "w", encoding="utf-8") as fp:
            fp.write(payload + "\n")
    elif args.output not in (None, "-"):
        print(payload)
    else:
        _emit_stderr({"stats": stats_dict})
    return 0


def _read_scored_file(path: str, counters: dict[str, int]) -> list[ScoredTrace]:
    fp = _open_input(path)
    try:
        return list(_iter_scored_lenient(fp, counters))
    finally:
        _close(fp)


def _baseline_triples(path: str) -> Iterator[tuple[str, str, float]]:
    fp = _open_input(path)
    try:
        for lineno, line in enumerate(fp, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                length = obj.get("length_total", obj.get("token_count"))
                if length is None:
                    raise ValueError("record has neither length_total nor token_count")
                yield str(obj["dataset_id"]), str(obj["problem_id"]), float(length)
            except (ValueError, KeyError, TypeError) as exc:
                _warn("malformed_line", file=path, line=lineno, error=str(exc))
    finally:
        _close(fp)


def _format_float(x: float) -> str:
    return f"{x:.6f}"


def cmd_metrics(args: argparse.Namespace) -> int:
    if (args.t_max is None) == (args.baseline_run is None):
        raise ConfigError("exactly one of --t-max or --baseline-run is required")
    counters: dict[str, int] = {}
    fp_in = _open_input(args.input)
    try:
        scored = list(_iter_scored_lenient(fp_in, counters))
    finally:
        _close(fp_in)
    if not scored:
        raise InputError("no scored records")
    dataset_ids = sorted({s.dataset_id for s in scored})
    if len(dataset_ids) != 1:
        raise DatasetMismatch(f"metrics expects a single dataset, found {dataset_ids}")
    if args.t_max is not None:
        if args.t_max < 1:
            raise ConfigError("--t-max must be >= 1")
        t_max = args.t_max
    else:
        t_max = t_max_from_baseline(_baseline_triples(args.baseline_run), dataset_ids[0])
    metrics = run_metrics(scored, t_max=t_max, grid_points=args.grid, per_sample=args.per_sample)

    payload = metrics.to_dict()
    payload["accuracy"] = round(payload["accuracy"], 6)
    payload["mean_tokens"] = round(payload["mean_tokens"], 6)
    payload["auc_oaa"] = round(payload["auc_oaa"], 6)
    payload["oaa_points"] = [[t, round(v, 6)] for t, v in payload["oaa_points"]]
    if "per_difficulty" in payload:
        payload["per_difficulty"] = {
            k: {kk: round(vv, 6) for kk, vv in v.items()} for k, v in payload["per_difficulty"].items()
        }
    fp_out = _open_output(args.output)
    try:
        fp_out.write(json.dumps(payload, ensure_ascii=False) + "\n")
    finally:
        _close(fp_out)
    if args.oaa_csv:
        with open(args.oaa_csv, "w", encoding="utf-8", newline="") as fp:
            writer = csv.writer(fp)
            writer.writerow(["t", "oaa"])
            for t, v in metrics.oaa_points:
                writer.writerow([t, _format_float(v)])
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    facets = [f.strip() for f in args.facets.split(",") if f.strip()]
    known = {"length", "intermediate", "difficulty"}
    unknown = set(facets) - known
    if unknown:
        raise ConfigError(f"unknown facets: {sorted(unknown)}")
    counters: dict[str, int] = {}
    fp_in = _open_input(args.input)
    try:
        scored = list(_iter_scored_lenient(fp_in, counters))
    finally:
        _close(fp_in)
    if not scored:
        raise InputError("no scored records")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if "length" in facets:
        summaries = length_distribution(scored, split_by_correctness=True, bucket_width=args.bucket_width)
        with open(out_dir / "length_distribution.csv", "w", encoding="utf-8", newline="") as fp:
            writer = csv.writer(fp)
            writer.writerow(["bucket_lo", "bucket_hi", "count", "split"])
            for summary in summaries:
                for lo, hi, count in summary.buckets:
                    writer.writerow([lo, hi, count, summary.split])
        for summary in summaries:
            _emit_stderr(
                {
                    "length_split": summary.split,
                    "count": summary.count,
                    "mean": summary.mean,
                    "median": summary.median,
                    "p10": summary.p10,
                    "p90": summary.p90,
                }
            )

    if "intermediate" in facets:
        hist = intermediate_answer_distribution(scored)
        with open(out_dir / "intermediate_counts.csv", "w", encoding="utf-8", newline="") as fp:
            writer = csv.writer(fp)
            writer.writerow(["count", "frequency"])
            for count, freq in hist.frequencies.items():
                writer.writerow([count, freq])
        _emit_stderr({"intermediate_mean": hist.mean})

    if "difficulty" in facets:
        aggregates = aggregate_problems(scored)
        strata = difficulty_strata(aggregates, scored)
        if set(strata) == {None}:
            _warn("no_difficulty_ratings", detail="all problems fall into the unrated stratum")
        with open(out_dir / "difficulty_strata.csv", "w", encoding="utf-8", newline="") as fp:
            writer = csv.writer(fp)
            writer.writerow(["difficulty", "n_problems", "accuracy", "mean_tokens", "mean_intermediate_correct"])
            for level, st in strata.items():
                writer.writerow(
                    [
                        "unrated" if level is None else level,
                        st.n_problems,
                        _format_float(st.accuracy),
                        _format_float(st.mean_tokens),
                        _format_float(st.mean_intermediate_correct),
                    ]
                )
    return 0


def _load_manifest(path: str) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as fp:
            manifest = json.load(fp)
    except OSError as exc:
        raise InputError(f"cannot read manifest: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"manifest {path} is not valid JSON: {exc}") from None
    if not isinstance(manifest, dict) or "run_id" not in manifest or "records_path" not in manifest:
        raise InputError(f"manifest {path} must carry run_id and records_path")
    records_path = Path(manifest["records_path"])
    if not records_path.is_absolute():
        records_path = Path(path).parent / records_path
    if not records_path.is_file():
        raise InputError(f"records_path {records_path} from manifest {path} does not exist")
    manifest["records_path"] = str(records_path)
    return manifest


def cmd_compare(args: argparse.Namespace) -> int:
    manifests = [_load_manifest(p) for p in args.manifests]
    run_ids = [m["run_id"] for m in manifests]
    if len(set(run_ids)) != len(run_ids):
        raise DataError("run_id values must be unique across manifests")
    reference = args.reference or run_ids[0]
    if reference not in run_ids:
        raise ConfigError(f"--reference {reference!r} is not among the runs")

    counters: dict[str, int] = {}
    per_run: dict[str, dict[str, tuple[float, float]]] = {}
    for manifest in manifests:
        scored = _read_scored_file(manifest["records_path"], counters)
        wanted = manifest.get("dataset_id")
        if wanted:
            scored = [s for s in scored if s.dataset_id == wanted]
        by_dataset: dict[str, tuple[float, float]] = {}
        for dataset_id in sorted({s.dataset_id for s in scored}):
            aggs = aggregate_problems([s for s in scored if s.dataset_id == dataset_id])
            by_dataset[dataset_id] = (
                dataset_accuracy(aggs),
                macro_average([a.mean_tokens for a in aggs]),
            )
        per_run[manifest["run_id"]] = by_dataset

    shared = set.intersection(*(set(v) for v in per_run.values())) if per_run else set()
    if not shared:
        raise DataError("runs share no datasets")
    datasets = sorted(shared)

    table: dict[str, Any] = {"reference": reference, "datasets": {}, "macro": {}}
    dominance_rows: list[tuple[str, str, str, bool]] = []
    for dataset_id in datasets:
        points = [
            MethodPoint(run_id, dataset_id, *per_run[run_id][dataset_id]) for run_id in run_ids
        ]
        result = dominance(points, reference=reference)
        ref_tokens = per_run[reference][dataset_id][1]
        table["datasets"][dataset_id] = {
            run_id: {
                "accuracy": round(per_run[run_id][dataset_id][0], 6),
                "mean_tokens": round(per_run[run_id][dataset_id][1], 6),
                "reduction_vs_reference": round(
                    length_reduction(ref_tokens, per_run[run_id][dataset_id][1]), 6
                )
                if ref_tokens
                else 0.0,
                "vs_reference": result.classification[run_id],
            }
            for run_id in run_ids
        }
        for (a, b), dom in sorted(result.matrix.items()):
            dominance_rows.append((dataset_id, a, b, dom))

    macro_points = [
        MethodPoint(
            run_id,
            "macro",
            macro_average([per_run[run_id][d][0] for d in datasets]),
            macro_average([per_run[run_id][d][1] for d in datasets]),
        )
        for run_id in run_ids
    ]
    macro_result = dominance(macro_points, reference=reference)
    ref_macro_tokens = next(p.mean_tokens for p in macro_points if p.method_id == reference)
    table["macro"] = {
        p.method_id: {
            "accuracy": round(p.accuracy, 6),
            "mean_tokens": round(p.mean_tokens, 6),
            "reduction_vs_reference": round(length_reduction(ref_macro_tokens, p.mean_tokens), 6)
            if ref_macro_tokens
            else 0.0,
            "vs_reference": macro_result.classification[p.method_id],
        }
        for p in macro_points
    }
    for (a, b), dom in sorted(macro_result.matrix.items()):
        dominance_rows.append(("macro", a, b, dom))

    fp_out = _open_output(args.output)
    try:
        fp_out.write(json.dumps(table, ensure_ascii=False) + "\n")
    finally:
        _close(fp_out)
    if args.dominance_csv:
        with open(args.dominance_csv, "w", encoding="utf-8", newline="") as fp:
            writer = csv.writer(fp)
            writer.writerow(["dataset", "method_a", "method_b", "a_dominates_b"])
            for dataset_id, a, b, dom in dominance_rows:
                writer.writerow([dataset_id, a, b, int(dom)])
    return 0


def _add_common(parser: argparse.ArgumentParser, *, needs_tokenizer: bool = False) -> None:
    parser.add_argument("--input", required=True, help="input JSONL file, or - for stdin")
    parser.add_argument("--output", default=None, help="output path; stdout when omitted")
    parser.add_argument("--config", default=None, help="flat key=value reward config file")
    parser.add_argument(
        "--parallel",
        type=int,
        default=os.cpu_count() or 1,
        help="worker processes for scoring (default: available cores)",
    )
    if needs_tokenizer:
        parser.add_argument(
            "--tokenizer",
            choices=["provided", "unicode-words", "sidecar"],
            default="unicode-words",
            help="length source: trusted token_count, built-in word counting, or a sidecar map",
        )
        parser.add_argument("--sidecar", default=None, help="sidecar JSONL path for --tokenizer sidecar")
        parser.add_argument("--gold", default=None, help="JSON object mapping problem_id to gold answer")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cotscope",
        description="Score chain-of-thought traces, shape rewards, build corpora, and measure overthinking.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score trace records into per-trace results")
    _add_common(p, needs_tokenizer=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("reward", help="apply a reward scheme and group advantages to scored traces")
    _add_common(p)
    p.add_argument(
        "--scheme",
        choices=[s.value for s in RewardScheme],
        default=RewardScheme.ADAPTIVE.value,
    )
    p.set_defaults(func=cmd_reward)

    p = sub.add_parser("build-sft", help="build a fine-tuning corpus from sampled traces")
    _add_common(p, needs_tokenizer=True)
    p.add_argument(
        "--mode",
        choices=["rejection", "reformat", "rejection-then-reformat", "rejection_then_reformat"],
        required=True,
    )
    p.add_argument("--stats-out", default=None, help="write build stats JSON here instead of stdout")
    p.set_defaults(func=cmd_build_sft)

    p = sub.add_parser("metrics", help="dataset metrics with budget-adjusted accuracy")
    _add_common(p)
    p.add_argument("--t-max", type=int, default=None, help="reference budget in tokens")
    p.add_argument("--baseline-run", default=None, help="run file whose mean length sets the budget")
    p.add_argument("--grid", type=int, default=101, help="points on the reported curve")
    p.add_argument("--per-sample", action="store_true", help="treat each sample as its own problem")
    p.add_argument("--oaa-csv", default=None, help="also write the curve as CSV here")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("analyze", help="plot-ready CSV facets of a scored run")
    _add_common(p)
    p.add_argument("--facets", default="length,intermediate,difficulty")
    p.add_argument("--out-dir", default=".", help="directory for the facet CSV files")
    p.add_argument("--bucket-width", type=int, default=512)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="compare runs on the accuracy/length plane")
    p.add_argument("manifests", nargs="+", help="run manifest JSON files")
    p.add_argument("--reference", default=None, help="run_id measured against (default: first run)")
    p.add_argument("--output", default=None)
    p.add_argument("--dominance-csv", default=None)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = _JsonWarningHandler(level=logging.WARNING)
    lib_logger = logging.getLogger("cotscope")
    lib_logger.addHandler(handler)
    try:
        return args.func(args)
    except CotscopeError as exc:
        _emit_stderr({"error": str(exc), "type": type(exc).__name__})
        return exc.exit_code
    except BrokenPipeError:
        return 0
    finally:
        lib_logger.removeHandler(handler)


if __name__ == "__main__":
    raise SystemExit(main())
