import csv
import io
import json
from fractions import Fraction

import pytest

from effshift.cli import SCHEMA, main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    return code, json.loads(text)


DECIDE_10 = ("decide", "--shift", "golden-mean", "--property", "periods", "--params", '{"ref":[1,3,6,10]}',
             "--pattern", "10", "--budget", "100000", "--format", "json")


def test_decide_example():
    code, doc = run_json(*DECIDE_10)
    assert code == 0
    assert doc["verdict"] == "yes" and doc["schema"] == SCHEMA
    assert doc["certificate"]["kind"] == "refutation"
    assert "minimal" in doc["contract"]


def test_complexity_csv():
    code, text = run("complexity", "--shift", "fibonacci", "--max-n", "10", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [(int(r["n"]), int(r["count"])) for r in rows] == [(n, n + 1) for n in range(1, 11)]


def test_entropy_json_contains_log2_phi():
    code, doc = run_json("entropy", "--shift", "golden-mean", "--n", "12", "--gluing", "1", "--format", "json")
    assert code == 0
    iv = doc["interval"]
    assert iv["N"] == 377
    lo, hi = Fraction(iv["lower"]), Fraction(iv["upper"])
    # log2(phi) = 0.694241913...
    assert lo <= Fraction(694241, 10 ** 6) and Fraction(694242, 10 ** 6) <= hi


def test_output_is_byte_identical_across_runs():
    assert run(*DECIDE_10) == run(*DECIDE_10)
    a = run("enumerate", "--shift", "fibonacci", "--property", "nonempty", "--limit", "6", "--budget", "2000000")
    b = run("enumerate", "--shift", "fibonacci", "--property", "nonempty", "--limit", "6", "--budget", "2000000")
    assert a == b and a[0] == 0


def test_replay_round_trip_and_tamper(tmp_path):
    code, text = run("decide", "--shift", "golden-mean", "--property", "periods", "--params", '{"ref":[1,3,6,10]}',
                     "--pattern", "10", "--pattern", "11", "--budget", "100000")
    assert code == 0
    cert = tmp_path / "cert.json"
    cert.write_text(text)
    code, doc = run_json("replay", str(cert))
    assert code == 0 and doc["verified"] and [r["verdict"] for r in doc["runs"]] == ["yes", "no"]

    tampered = json.loads(text)
    no_run = tampered["runs"][1]
    no_run["certificate"]["prefixLen"] = no_run["certificate"]["prefixLen"] - 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(tampered))
    code, doc = run_json("replay", str(bad))
    assert code == 1 and not doc["verified"]

    flipped = json.loads(text)
    flipped["runs"][0]["verdict"] = "no"
    bad.write_text(json.dumps(flipped))
    assert run("replay", str(bad))[0] == 1


def test_replay_malformed(tmp_path):
    p = tmp_path / "junk.json"
    p.write_text("{not json")
    assert run("replay", str(p))[0] == 1
    p.write_text(json.dumps({"shift": "golden-mean"}))
    assert run("replay", str(p))[0] == 1


def test_exhausted_exit_code():
    code, doc = run_json("decide", "--shift", "golden-mean", "--property", "periods",
                         "--params", '{"ref":[1,3,6,10]}', "--pattern", "00001", "--budget", "2000")
    assert code == 2 and doc["verdict"] == "exhausted" and doc["certificate"] is None


def test_errors_exit_one(capsys):
    assert run("decide", "--shift", "nope", "--property", "nonempty", "--pattern", "1")[0] == 1
    assert "golden-mean" in capsys.readouterr().err
    assert run("decide", "--shift", "golden-mean", "--property", "nope", "--pattern", "1")[0] == 1
    assert "periods" in capsys.readouterr().err
    assert run("decide", "--shift", "golden-mean", "--property", "nonempty", "--pattern", "1",
               "--budget", "0")[0] == 1
    assert run("frobnicate")[0] == 1
    assert run("decide", "--shift", "golden-mean")[0] == 1
    assert run("decide", "--shift", "golden-mean", "--property", "periods", "--params", "[1]",
               "--pattern", "1")[0] == 1


def test_extension_cap_environment(monkeypatch):
    monkeypatch.setenv("EFFSHIFT_EXTENSION_CAP", "not-a-number")
    assert run("zoo")[0] == 1
    monkeypatch.setenv("EFFSHIFT_EXTENSION_CAP", "4096")
    assert run("zoo")[0] == 0


def test_jobs_match_serial():
    base = ("decide", "--shift", "fibonacci", "--property", "nonempty", "--pattern", "00", "--pattern", "11",
            "--pattern", "010", "--budget", "500000")
    assert run(*base) == run(*base, "--jobs", "2")


def test_zoo_and_table_format(capsys):
    code, doc = run_json("zoo")
    assert code == 0 and "golden-mean" in doc["shifts"]
    code, text = run("decide", "--shift", "golden-mean", "--property", "periods", "--params", '{"ref":[1,3,6,10]}',
                     "--pattern", "11", "--format", "table")
    assert code == 0 and text.splitlines()[0].split() == ["pattern", "verdict", "budgetUsed"]
    assert "contract" in capsys.readouterr().err


def test_analytics_subcommands():
    code, doc = run_json("periods", "--shift", "golden-mean", "--i-max", "6", "--method", "both")
    assert code == 0 and doc["agree"] and doc["brute"][:4] == [1, 3, 6, 10]
    code, doc = run_json("slope", "--shift", "sturmian:0,1/3", "--n", "9")
    assert code == 0 and doc["maxOnes"] == 3
    code, doc = run_json("window", "--alpha", "1/4", "--budget", "200")
    assert code == 0 and Fraction(doc["lower"]) <= Fraction(1, 4) <= Fraction(doc["upper"])
    code, doc = run_json("invariance", "--shift", "thue-morse", "--n", "3")
    assert code == 0 and doc["violations"] == []


def test_reduction_subcommands():
    code, doc = run_json("product", "--left", "golden-mean", "--right", "full:ab", "--budget", "200000")
    assert code == 0 and "11" in doc["emitted"] and not any("11" not in w for w in doc["emitted"])
    code, doc = run_json("union", "--x", "golden-mean", "--y", "orbit:1", "--budget", "100000")
    assert code == 0 and doc["separated"] and doc["radius"] == 0
    assert "11" in doc["emitted"] and "00" not in doc["emitted"]
    code, doc = run_json("union", "--x", "golden-mean", "--y", "full", "--n-max", "2")
    assert code == 0 and not doc["separated"]
