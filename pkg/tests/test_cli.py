import json
import os
import subprocess
import sys

import pytest

from fqsimplex.cli import main

ENVELOPE = {"check", "params", "value", "bound", "pass"}


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    records = [json.loads(line) for line in out.strip().splitlines()]
    return code, records, out


def test_verify_gauss(capsys):
    code, records, _ = run_cli(capsys, "verify-gauss", "--q", "7", "--d", "2")
    assert code == 0
    assert records[-1]["check"] == "summary" and records[-1]["pass"]
    per_pair = [r for r in records if r["check"] == "verify-gauss"]
    assert len(per_pair) == 6 * 49  # one record per (a, b)
    for r in records:
        assert ENVELOPE <= set(r)


def test_charsum_audit(capsys):
    code, records, _ = run_cli(capsys, "charsum-audit", "--q-max", "31")
    assert code == 0
    rows = [r for r in records if r["check"] == "charsum-audit"]
    assert {r["q"] for r in rows} == {3, 5, 7, 11, 13, 17, 19, 23, 29, 31}
    for r in rows:
        assert {"q", "n", "a", "b", "abs_value", "ratio_to_sqrt_q"} <= set(r)
        assert r["ratio_to_sqrt_q"] <= 2.0


def test_verify_measures_schema(capsys):
    code, records, _ = run_cli(capsys, "verify-measures", "--q", "5", "--d", "3", "--seed", "3")
    assert code == 0
    rows = [r for r in records if r["check"] == "verify-measures"]
    assert rows
    for r in rows:
        assert {"lemma", "q", "d", "j", "rank", "max_err", "bound", "implied_constant"} <= set(r)
        assert r["lemma"] in {"3.2", "3.3", "3.4", "3.5"}


def test_count_full_space(capsys):
    code, records, _ = run_cli(
        capsys, "count", "--q", "5", "--d", "3",
        "--simplex", "[[0,0,0],[1,0,0],[0,1,0]]", "--set", "full",
    )
    assert code == 0
    rec = records[0]
    assert rec["exact_count"] == 15000
    assert rec["value"] == rec["exact_count"]
    assert isinstance(rec["exact_count"], int)


def test_count_extremal_flag(capsys):
    code, records, _ = run_cli(
        capsys, "count", "--q", "5", "--d", "3", "--extremal", "2", "1", "--set", "full",
    )
    assert code == 0
    assert records[0]["rank"] == 1


def test_count_random_set(capsys):
    code, records, _ = run_cli(
        capsys, "count", "--q", "5", "--d", "3", "--k", "1",
        "--set", "random", "--alpha", "0.4", "--seed", "7",
    )
    assert code == 0
    assert 0 < records[0]["alpha"] < 1


def test_random_experiment_summary(capsys):
    code, records, _ = run_cli(
        capsys, "random-experiment", "--q", "7", "--d", "3", "--k", "1",
        "--alpha", "0.3", "--trials", "4", "--seed", "42",
    )
    assert code == 0
    summary = records[-1]
    assert summary["check"] == "summary"
    assert {"max_normalized_error", "mean_normalized_error", "trials"} <= set(summary)
    trials = [r for r in records if r["check"] == "random-experiment"]
    assert [r["trial"] for r in trials] == [0, 1, 2, 3]


def test_random_experiment_byte_identical_across_threads(tmp_path):
    base = [sys.executable, "-m", "fqsimplex", "random-experiment", "--q", "7", "--d", "3",
            "--k", "1", "--alpha", "0.3", "--trials", "4", "--seed", "42"]
    outputs = []
    for threads in ("1", "2", "8"):
        proc = subprocess.run(base + ["--threads", threads], capture_output=True, check=True)
        outputs.append(proc.stdout)
    assert outputs[0] == outputs[1] == outputs[2]


def test_verify_lemma_subcommands(capsys):
    for which in ("4.1", "4.2", "4.3"):
        code, records, _ = run_cli(
            capsys, "verify-lemma", "--which", which, "--q", "5", "--d", "3",
            "--k", "2", "--samples", "5", "--seed", "1",
        )
        assert code == 0, which
        rows = [r for r in records if r["check"] == "verify-lemma"]
        assert rows and all(r["lemma"] == which for r in rows)


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["count", "--q", "6", "--d", "2", "--k", "1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["random-experiment", "--q", "7", "--d", "3", "--k", "1", "--alpha", "1.5"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["no-such-command"])


def test_bound_violation_exit_code(capsys):
    code = main(["verify-measures", "--q", "5", "--d", "3", "--accept-constant", "0.01"])
    out = capsys.readouterr().out
    assert code == 1
    records = [json.loads(line) for line in out.strip().splitlines()]
    assert any(not r["pass"] for r in records)
    assert not records[-1]["pass"]


def test_out_file_and_csv(tmp_path, capsys):
    path = tmp_path / "report.jsonl"
    code = main(["count", "--q", "5", "--d", "3", "--k", "1", "--set", "full",
                 "--out", str(path)])
    assert code == 0
    lines = path.read_text().strip().splitlines()
    assert json.loads(lines[0])["check"] == "count"

    csv_path = tmp_path / "report.csv"
    code = main(["count", "--q", "5", "--d", "3", "--k", "1", "--set", "full",
                 "--out", str(csv_path), "--format", "csv"])
    assert code == 0
    text = csv_path.read_text().splitlines()
    assert text[0].startswith("check,")
    assert len(text) == 3  # header + record + summary


def test_threads_env_fallback(tmp_path):
    base = [sys.executable, "-m", "fqsimplex", "random-experiment", "--q", "7", "--d", "3",
            "--k", "1", "--alpha", "0.3", "--trials", "3", "--seed", "5"]
    env = dict(os.environ, FQSIMPLEX_THREADS="3")
    with_env = subprocess.run(base, capture_output=True, check=True, env=env)
    plain = subprocess.run(base, capture_output=True, check=True)
    assert with_env.stdout == plain.stdout
