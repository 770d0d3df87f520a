import io
import json
import subprocess
import sys

import pytest

from secantsv.cli import (EXIT_INCONCLUSIVE, EXIT_IO, EXIT_OK, EXIT_USAGE, UsageError, execute,
                          main, parse)
from secantsv.space import SegreVeronesePair


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    try:
        cmd = parse(argv)
    except UsageError as exc:
        return EXIT_USAGE, "", str(exc)
    code = execute(cmd, out, err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv, "--json")
    return code, json.loads(out) if out else None


def test_parse_examples():
    cmd = parse(["h0", "--factors", "2,2", "--degrees", "2,3"])
    assert cmd.verb == "h0" and cmd.options["pair"] == SegreVeronesePair([2, 2], [2, 3])
    cmd = parse(["claims", "--check", "claim7", "--a", "6"])
    assert cmd.options["a"] == 6
    cmd = parse(["rank", "--factors", "2", "--degrees", "4", "-z", "5", "--prime", "101"])
    assert (cmd.options["z"], cmd.options["prime"]) == (5, 101)


@pytest.mark.parametrize("argv", [
    [], ["nope"], ["h0", "--factors", "2"], ["h0", "--factors", "2", "--degrees", "x"],
    ["h0", "--factors", "2,2", "--degrees", "2"], ["claims"], ["claims", "--check", "claim2", "--r", "2"],
    ["validate"], ["lemma", "--factors", "2", "--degrees", "3"],
    ["defect", "--factors", "2", "--degrees", "4", "--trials", "0"],
])
def test_usage_errors(argv):
    with pytest.raises(UsageError):
        parse(argv)
    assert main(argv) == EXIT_USAGE


def test_h0_json():
    code, doc = run_json("h0", "--factors", "2,2", "--degrees", "2,2", "-z", "7")
    assert code == EXIT_OK
    assert doc == {"pair": "P2xP2 deg (2,2)", "N": 36, "dim": 4, "z_lo": 7, "z_hi": 8,
                   "z": 7, "expected_secant_dim": 34}


def test_rank_json_and_scheme():
    code, doc = run_json("rank", "--factors", "2", "--degrees", "2", "-z", "2")
    assert code == EXIT_OK and (doc["h0"], doc["h1"]) == (1, 1)
    code, doc = run_json("rank", "--factors", "2,2", "--degrees", "2,2", "--scheme", "2*2pt@H2")
    assert code == EXIT_OK and doc["degree"] == 8
    assert run("rank", "--factors", "2", "--degrees", "2")[0] == EXIT_USAGE
    assert run("rank", "--factors", "2", "--degrees", "2", "--scheme", "3*3pt")[0] == EXIT_USAGE


def test_defect():
    code, doc = run_json("defect", "--factors", "2", "--degrees", "4")
    assert code == EXIT_OK and doc["probably_defective"] == [5]
    code, doc = run_json("defect", "--factors", "2", "--degrees", "4", "-z", "5", "--prime", "101")
    assert code == EXIT_INCONCLUSIVE and [v["z"] for v in doc["scan"]] == [5]
    code, out, _ = run("defect", "--factors", "2", "--degrees", "4")
    assert "PROBABLY_DEFECTIVE" in out and "DEFECTIVE (AH)" in out


def test_claims_every_check():
    base = ["claims", "--json", "--check"]
    cases = {
        "claim1": ["--r", "2", "--alpha", "60", "-z", "72"],
        "claim2": ["--r", "2", "--alpha", "60", "-z", "72", "--x1", "43", "--y1", "8"],
        "claim3": ["--r", "4", "--alpha", "98"],
        "claim7": ["--a", "6"],
        "claim11": ["--r", "7", "--alpha", "231", "--t", "4"],
        "gap": ["--r", "5"],
        "tail": [],
        "all": ["--r", "3", "--alpha", "60"],
    }
    for check, extra in cases.items():
        code, out, err = run(*base, check, *extra)
        assert code == EXIT_OK, (check, err)
        doc = json.loads(out)
        assert doc["check"] == check and doc["holds"] is True


def test_claims_domain_errors_are_usage_errors():
    assert run("claims", "--check", "claim7", "--a", "5")[0] == EXIT_USAGE
    assert run("claims", "--check", "tail", "--name", "bogus")[0] == EXIT_USAGE


def test_thresholds():
    code, doc = run_json("thresholds")
    assert code == EXIT_OK and doc["rows"][0]["alpha_min"] == 60
    code, out, _ = run("thresholds")
    assert out.splitlines()[0].split()[0] == "r"


def test_lemma():
    code, doc = run_json("lemma", "--id", "a1a", "--factors", "2", "--degrees", "3", "-z", "4")
    assert code == EXIT_OK and doc["conclusion_holds"]
    assert run("lemma", "--id", "a3a", "--factors", "2", "--degrees", "3", "-z", "1")[0] == EXIT_USAGE


def test_derive_and_validate(tmp_path):
    cert = tmp_path / "c.json"
    code, doc = run_json("derive", "--factors", "2,2,2,2", "--degrees", "2,2,2,2",
                         "--emit-cert", str(cert))
    assert code == EXIT_OK and doc["rule"] == "RULE_A5"
    assert json.loads(cert.read_text()) == doc
    code, doc = run_json("validate", "--cert", str(cert))
    assert code == EXIT_OK and doc["valid"] is True
    bad = json.loads(cert.read_text())
    bad["hypotheses"]["alpha"] = 175
    cert.write_text(json.dumps(bad))
    assert run_json("validate", "--cert", str(cert))[0] == EXIT_INCONCLUSIVE
    cert.write_text("{}")
    assert run("validate", "--cert", str(cert))[0] == EXIT_USAGE


def test_derive_inconclusive():
    code, doc = run_json("derive", "--factors", "3,3,3", "--degrees", "2,2,2", "--budget", "10")
    assert code == EXIT_INCONCLUSIVE and doc["verdict"] == "INCONCLUSIVE"


def test_derive_text_tree():
    code, out, _ = run("derive", "--factors", "1,3,2", "--degrees", "3,3,2")
    lines = out.splitlines()
    assert code == EXIT_OK and "RULE_A41" in lines[0] and lines[1].startswith("  ")


def test_io_errors(tmp_path):
    assert run("validate", "--cert", str(tmp_path / "missing.json"))[0] == EXIT_IO
    blocker = tmp_path / "file"
    blocker.write_text("")
    code = run("rank", "--factors", "2", "--degrees", "2", "-z", "1",
               "--cache", str(blocker / "sub" / "c.jsonl"))[0]
    assert code == EXIT_IO


def test_cache_option_writes_jsonl(tmp_path):
    path = tmp_path / "ranks.jsonl"
    run("rank", "--factors", "2", "--degrees", "3", "-z", "3", "--cache", str(path))
    rows = [json.loads(line) for line in path.read_text().splitlines()]
    assert rows and rows[0]["pair"] == "P2 deg (3)" and rows[0]["z"] == 3


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "secantsv.cli", "h0", "--factors", "2",
                           "--degrees", "2", "--json"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["N"] == 6
