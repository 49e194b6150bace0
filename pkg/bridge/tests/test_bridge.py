"""The bridge must be indistinguishable from the command line, byte for byte."""
from __future__ import annotations

import json
import subprocess
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pytest

bridge = pytest.importorskip("cotscope_bridge")

import cotscope
from cotscope import ConfigError, DataError, TraceRecord

FIXTURES = Path(__file__).resolve().parents[2] / "fixtures"


def golden():
    with open(FIXTURES / "golden_bridge_cases.json", encoding="utf-8") as fp:
        return json.load(fp)


def run_cli(argv: list[str]) -> subprocess.CompletedProcess:
    proc = subprocess.run(
        [sys.executable, "-m", "cotscope.cli", *argv],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return proc


def write_config(tmp_path: Path, config: dict) -> str:
    path = tmp_path / "reward.cfg"
    path.write_text("".join(f"{k} = {v}\n" for k, v in config.items()), encoding="utf-8")
    return str(path)


def test_version_matches_primary():
    assert bridge.__version__ == cotscope.__version__


def test_golden_score_cases_match_cli(tmp_path):
    for i, case in enumerate(golden()["score_cases"]):
        inp = tmp_path / f"in{i}.jsonl"
        out = tmp_path / f"out{i}.jsonl"
        inp.write_text(json.dumps(case["record"]) + "\n", encoding="utf-8")
        argv = ["score", "--input", str(inp), "--output", str(out), "--parallel", "1"]
        argv += ["--tokenizer", case.get("tokenizer", "unicode-words")]
        if "config" in case:
            argv += ["--config", write_config(tmp_path, case["config"])]
        run_cli(argv)
        cli_line = out.read_text(encoding="utf-8").splitlines()[0]

        rows = bridge.bridge_score(
            [case["record"]],
            tokenizer=case.get("tokenizer", "unicode-words"),
            **case.get("config", {}),
        )
        assert len(rows) == 1
        assert json.dumps(rows[0], ensure_ascii=False) == cli_line


def test_golden_advantage_cases_match_cli(tmp_path):
    for i, case in enumerate(golden()["advantage_cases"]):
        inp = tmp_path / f"scored{i}.jsonl"
        out = tmp_path / f"rewarded{i}.jsonl"
        inp.write_text(
            "".join(json.dumps(row) + "\n" for row in case["scored"]), encoding="utf-8"
        )
        argv = ["reward", "--input", str(inp), "--output", str(out)]
        argv += ["--scheme", case.get("scheme", "adaptive")]
        if "config" in case:
            argv += ["--config", write_config(tmp_path, case["config"])]
        run_cli(argv)
        cli_lines = out.read_text(encoding="utf-8").splitlines()

        rows = bridge.bridge_group_advantages(
            case["scored"],
            scheme=case.get("scheme", "adaptive"),
            **case.get("config", {}),
        )
        assert [json.dumps(r, ensure_ascii=False) for r in rows] == cli_lines


def test_record_objects_and_dicts_agree():
    case = golden()["score_cases"][0]
    as_dict = bridge.bridge_score([case["record"]])
    as_obj = bridge.bridge_score([TraceRecord.from_dict(case["record"])])
    assert as_dict == as_obj


def test_empty_batches():
    assert bridge.bridge_score([]) == []
    assert bridge.bridge_group_advantages([]) == []


def test_sidecar_tokenizer_matches_cli(tmp_path):
    record = dict(
        problem_id="sc1",
        dataset_id="ds",
        sample_index=0,
        prompt="q",
        gold_answer="4",
        response="<think>so \\boxed{4}</think> **Final Answer** \\boxed{4}",
    )
    sidecar = tmp_path / "sidecar.jsonl"
    sidecar.write_text(
        json.dumps(
            {
                "problem_id": "sc1",
                "dataset_id": "ds",
                "sample_index": 0,
                "token_count": 40,
                "answer_token_ends": [10, 40],
            }
        )
        + "\n",
        encoding="utf-8",
    )
    inp = tmp_path / "in.jsonl"
    out = tmp_path / "out.jsonl"
    inp.write_text(json.dumps(record) + "\n", encoding="utf-8")
    run_cli(
        [
            "score",
            "--input",
            str(inp),
            "--output",
            str(out),
            "--tokenizer",
            "sidecar",
            "--sidecar",
            str(sidecar),
        ]
    )
    cli_line = out.read_text(encoding="utf-8").splitlines()[0]
    rows = bridge.bridge_score([record], tokenizer="sidecar", sidecar=str(sidecar))
    assert json.dumps(rows[0], ensure_ascii=False) == cli_line
    assert rows[0]["length_total"] == 40 and rows[0]["length_first_correct"] == 10


def test_unknown_option_rejected():
    with pytest.raises(ConfigError):
        bridge.bridge_score([], cutoff=5)


def test_unknown_scheme_rejected():
    with pytest.raises(ConfigError):
        bridge.bridge_group_advantages([], scheme="mystery")


def test_sidecar_mode_requires_path():
    with pytest.raises(ConfigError):
        bridge.bridge_score([], tokenizer="sidecar")


def test_non_contiguous_groups_rejected():
    rows = golden()["advantage_cases"][0]["scored"]
    shuffled = [rows[0], dict(rows[1], problem_id="other"), rows[2]]
    with pytest.raises(DataError):
        bridge.bridge_group_advantages(shuffled)


def test_thread_reentrancy():
    cases = golden()
    records = [c["record"] for c in cases["score_cases"] if "config" not in c and "tokenizer" not in c]
    expected_scores = bridge.bridge_score(records)
    adv_case = cases["advantage_cases"][1]
    expected_rows = bridge.bridge_group_advantages(
        adv_case["scored"], scheme=adv_case["scheme"], **adv_case["config"]
    )

    def one_pass(_):
        got = bridge.bridge_score(records)
        rows = bridge.bridge_group_advantages(
            adv_case["scored"], scheme=adv_case["scheme"], **adv_case["config"]
        )
        return got == expected_scores and rows == expected_rows

    with ThreadPoolExecutor(max_workers=8) as pool:
        assert all(pool.map(one_pass, range(40)))
