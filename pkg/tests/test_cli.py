"""CLI contract: files written, summaries printed, exit codes stable."""

import json
import subprocess
import sys

import pytest

from ppl.cli import EXIT_BOUND_FAILED, EXIT_OK, EXIT_USAGE, build_parser, main
from ppl.partitions import partition_from_doc


def run(args):
    return main(list(args))


def construct(tmp_path, *args):
    out = tmp_path / "partition.json"
    code = run(["construct", *args, "--out", str(out)])
    assert code == EXIT_OK
    return out


def test_server_flag_parses_before_or_after_subcommand():
    base = ["construct", "modular", "--k", "2", "--primes", "2"]
    parser = build_parser()
    assert parser.parse_args(base).server is None
    assert parser.parse_args(["--server", "http://h:1", *base]).server == "http://h:1"
    assert parser.parse_args([*base, "--server", "http://h:2"]).server == "http://h:2"


def test_construct_writes_a_valid_spec(tmp_path, capsys):
    out = construct(tmp_path, "modular", "--k", "3", "--primes", "2,3")
    doc = json.loads(out.read_text())
    partition_from_doc(doc)  # fully validates
    assert doc["exponents"] == [2, 1]
    assert len(doc["table"]) == 12
    stdout = capsys.readouterr().out
    assert "modular k=3" in stdout and "table=12 entries" in stdout


def test_construct_usage_error(tmp_path, capsys):
    out = tmp_path / "x.json"
    code = run(["construct", "modular", "--k", "3", "--primes", "2", "--out", str(out)])
    assert code == EXIT_USAGE
    assert not out.exists()
    assert "error:" in capsys.readouterr().err


def test_construct_rejects_malformed_primes(tmp_path):
    code = run(["construct", "modular", "--k", "2", "--primes", "2;3", "--out", str(tmp_path / "x.json")])
    assert code == EXIT_USAGE


def test_scan_zp_roundtrip(tmp_path, capsys):
    spec = construct(tmp_path, "modular", "--k", "2", "--primes", "2")
    report = tmp_path / "report.json"
    csv = tmp_path / "report.csv"
    code = run([
        "scan", "--mode", "zp", "--spec", str(spec), "--primes-upto", "20",
        "--window", "3000", "--out", str(report), "--csv", str(csv),
    ])
    assert code == EXIT_OK
    doc = json.loads(report.read_text())
    assert doc["exceptional"] == [2] and doc["bound_holds"] is True
    lines = csv.read_text().splitlines()
    assert lines[0] == "prime,part,verdict,certificate"
    assert len(lines) == 1 + 2 * 8  # 8 primes below 20, 2 parts
    assert "exceptional=[2]" in capsys.readouterr().out


def test_scan_qp_alias(tmp_path):
    spec = construct(tmp_path, "valuation-parity", "--k", "2", "--primes", "2")
    report = tmp_path / "q.json"
    code = run([
        "scan", "--mode", "qp", "--spec", str(spec), "--primes-upto", "20",
        "--window", "5000", "--s-range", "-1..1", "--out", str(report),
    ])
    assert code == EXIT_OK
    doc = json.loads(report.read_text())
    assert doc["config"]["mode"] == "qp-ratio"
    assert doc["config"]["s_range"] == [-1, 1]
    assert doc["exceptional"] == [2]


def test_scan_exit_1_when_bound_fails(tmp_path, capsys):
    # a window this small cannot cover the largest primes, and the report
    # says so: exceptional count above floor(log2 k) gives exit 1
    spec = construct(tmp_path, "legendre", "--k", "4", "--primes", "2,3")
    code = run([
        "scan", "--mode", "qp-ratio", "--spec", str(spec), "--primes-upto", "50",
        "--window", "2000", "--out", str(tmp_path / "r.json"),
    ])
    assert code == EXIT_BOUND_FAILED
    assert "window-limited" in capsys.readouterr().out


def test_scan_missing_spec_is_usage_error(tmp_path, capsys):
    code = run(["scan", "--mode", "zp", "--spec", str(tmp_path / "nope.json")])
    assert code == EXIT_USAGE
    assert "not found" in capsys.readouterr().err


def test_scan_bad_s_range(tmp_path):
    spec = construct(tmp_path, "modular", "--k", "2", "--primes", "2")
    code = run(["scan", "--mode", "qp", "--spec", str(spec), "--s-range", "1to2"])
    assert code == EXIT_USAGE


def test_scan_reports_are_byte_identical(tmp_path):
    spec = construct(tmp_path, "modular", "--k", "3", "--primes", "2,3")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert run([
            "scan", "--mode", "zp", "--spec", str(spec), "--primes-upto", "20",
            "--window", "2000", "--out", str(out),
        ]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_check_lemma_full_window(capsys):
    code = run([
        "check-lemma", "--p", "2", "--w", "1", "--t", "1", "--c", "3/4", "--m", "8",
        "--full-window", "256",
    ])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "hypothesis ✓  conclusion ✓" in out


def test_check_lemma_hypothesis_miss_is_not_a_failure(capsys):
    code = run([
        "check-lemma", "--p", "2", "--w", "1", "--t", "1", "--c", "3/4", "--m", "12",
        "--elements", "1",
    ])
    assert code == EXIT_OK
    assert "hypothesis ✗ (conclusion skipped)" in capsys.readouterr().out


def test_check_lemma_random_suite(tmp_path, capsys):
    out = tmp_path / "suite.json"
    code = run(["check-lemma", "--random", "60", "--seed", "9", "--window", "2000", "--out", str(out)])
    assert code == EXIT_OK
    assert "violations=0" in capsys.readouterr().out
    assert json.loads(out.read_text())["trials"] == 60


def test_check_lemma_random_rejects_explicit_params(capsys):
    code = run(["check-lemma", "--random", "10", "--p", "2"])
    assert code == EXIT_USAGE
    assert "--random" in capsys.readouterr().err


def test_check_lemma_missing_params(capsys):
    code = run(["check-lemma", "--p", "2", "--w", "1"])
    assert code == EXIT_USAGE
    err = capsys.readouterr().err
    assert "--t" in err and "--c" in err and "--m" in err


def test_check_lemma_bad_c():
    code = run([
        "check-lemma", "--p", "2", "--w", "1", "--t", "1", "--c", "most", "--m", "8",
        "--full-window", "16",
    ])
    assert code == EXIT_USAGE


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        run(["bogus"])
    assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    out = tmp_path / "p.json"
    proc = subprocess.run(
        [sys.executable, "-m", "ppl.cli", "construct", "legendre", "--k", "2",
         "--primes", "3", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == EXIT_OK, proc.stderr
    assert "legendre k=2" in proc.stdout
    assert out.exists()
