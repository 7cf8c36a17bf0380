import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr

from hardy_rellich import cli
from hardy_rellich import weights as W
from hardy_rellich.precision import PrecisionContext, from_hex, to_decimal


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(out):
    return list(csv.DictReader(io.StringIO(out)))


def test_gamma_example(capsys):
    code, out, _ = run(capsys, "gamma", "--delta", "shifted", "--mu", "pow:1.5", "--n-max", "100",
                       "--format", "csv")
    rows = rows_of(out)
    assert code == 0 and len(rows) == 100
    lo, g, hi = (float(rows[0][k]) for k in list(rows[0])[1:4])
    assert abs(lo - 5.19616) < 1e-5 and abs(g - 7.06036) < 1e-5 and abs(hi - 8) < 1e-12


def test_weights_example(capsys):
    code, out, _ = run(capsys, "weights", "--family", "hardy-classical", "--n-max", "5")
    rows = rows_of(out)
    assert code == 0 and [r["n"] for r in rows] == ["1", "2", "3", "4", "5"]
    assert list(rows[0]) == ["n", "value", "classical_bound", "excess"]
    assert mpfr(rows[0]["value"], 256) - (2 - gmpy2.sqrt(mpfr(2, 256))) < mpfr(10) ** -75


def test_verify_rellich_example(capsys):
    code, out, _ = run(capsys, "verify", "--identity", "rellich", "--delta", "ones", "--mu", "pow:1.5",
                       "--support", "15", "--seed", "7")
    assert code == 0


@pytest.mark.parametrize("argv", [
    ["verify", "--identity", "hardy", "--lambda", "linear", "--mu", "pow:1/2", "--c", "3/2"],
    ["verify", "--identity", "copson-tilde", "--count", "5"],
    ["verify", "--identity", "copson-hat", "--count", "5"],
    ["verify", "--identity", "knopp", "--alpha", "3", "--count", "5"],
    ["scan", "--family", "rho2", "--n-max", "3000"],
    ["scan", "--family", "gupta", "--alpha", "1/3", "--n-max", "200"],
    ["criticality", "--variant", "hat", "--N", "4,8,16"],
    ["knopp", "--alpha", "2"],
    ["knopp", "--alpha", "2", "--normalization", "order2", "--random"],
])
def test_commands_pass(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    assert out.strip()


def test_failure_exit_status(capsys):
    code, out, err = run(capsys, "scan", "--family", "hardy-bound", "--versus", "hardy-classical",
                         "--n-max", "10")
    assert code == 1
    assert err.strip() and "\t1\t" in err.splitlines()[0]


def test_breakdown_is_a_failure(capsys, tmp_path):
    f = tmp_path / "delta.txt"
    f.write_text("\n".join(str(3 ** n) for n in range(1, 40)))
    code, _, err = run(capsys, "gamma", "--delta", f"file:{f}", "--mu", "pow:3/2", "--n-max", "10")
    assert code == 1 and err


@pytest.mark.parametrize("argv", [
    ["weights", "--family", "nope"],
    ["verify", "--identity", "nope"],
    ["gamma", "--delta", "shifted"],
    ["gamma", "--delta", "bogus:1", "--mu", "ones"],
    ["weights", "--family", "hardy-classical", "--precision-bits", "32"],
    ["weights", "--family", "hardy-classical", "--n-max", "0"],
    ["criticality", "--N", "4,x"],
    ["criticality", "--variant", "wide"],
    ["frobnicate"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_json_schema_and_hex_round_trip(capsys):
    code, out, _ = run(capsys, "weights", "--family", "rho2", "--n-max", "6", "--format", "json")
    doc = json.loads(out)
    assert set(doc) == {"command", "params", "rows", "verdict", "max_residual", "precision_bits", "seed"}
    assert doc["precision_bits"] == 256 and doc["verdict"] == "pass"
    p = PrecisionContext(256)
    for row in doc["rows"]:
        n = int(row["n"])
        exact = W.rellich_rho2(n)
        assert from_hex(row["value_hex"], 256) == exact
        # decimal text is stable at its own digit count
        with p.activate():
            assert to_decimal(mpfr(row["value"]), p.decimal_digits) == row["value"]
            assert abs(mpfr(row["value"]) - exact) <= abs(exact) * mpfr(10) ** -(p.decimal_digits - 1)


def test_precision_env(capsys, monkeypatch):
    monkeypatch.setenv("HARDY_RELLICH_PRECISION_BITS", "128")
    code, out, _ = run(capsys, "weights", "--family", "hardy-classical", "--n-max", "1", "--format", "json")
    doc = json.loads(out)
    assert doc["precision_bits"] == 128
    assert len(doc["rows"][0]["value"].replace("0.", "", 1)) <= PrecisionContext(128).decimal_digits


def test_parse_sequence_spec():
    P = cli.parse_sequence_spec
    assert P("pow:1.5")(4) == 8
    assert P("shifted")(1) == Fraction(3, 2)
    assert P("copson-tilde-lambda")(1) == 1
    assert P("copson-hat-lambda")(2) == W.copson_hat_lambda(2)
    assert P("linear")(7) == 7 and P("ones")(9) == 1
    assert P("ones", zero_value=5)(0) == 5
    for bad in ("pow:", "pow:x", "triangle", ""):
        with pytest.raises(cli.UsageError):
            P(bad)


def test_file_sequences(tmp_path):
    good = tmp_path / "g.txt"
    good.write_text("1\n2.5\n\n3\n")
    s = cli.parse_sequence_spec(f"file:{good}")
    assert s(2) == mpfr("2.5") and s(3) == 3
    with pytest.raises(cli.SequenceFileError):
        s(4)
    bad = tmp_path / "b.txt"
    bad.write_text("1\n-2\n")
    with pytest.raises(cli.SequenceFileError):
        cli.parse_sequence_spec(f"file:{bad}")
    junk = tmp_path / "j.txt"
    junk.write_text("1\nabc\n")
    with pytest.raises(cli.SequenceFileError):
        cli.parse_sequence_spec(f"file:{junk}")
    with pytest.raises(cli.UsageError):
        cli.parse_sequence_spec(f"file:{tmp_path / 'missing.txt'}")


def test_sequence_file_for_verify(capsys, tmp_path):
    f = tmp_path / "seqs.txt"
    f.write_text("# two sequences\n0 0 1 2\n0 0 1+2j -3 0.5j\n")
    code, out, _ = run(capsys, "verify", "--identity", "rellich", "--delta", "shifted", "--mu", "pow:3/2",
                       "--sequence-file", str(f))
    assert code == 0
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1 2\n")
    code, _, err = run(capsys, "verify", "--identity", "rellich", "--delta", "shifted", "--mu",
                       "pow:3/2", "--sequence-file", str(bad))
    assert code == 2 and err


def test_config_validation():
    with pytest.raises(cli.UsageError):
        cli.CliConfig("weights", 5, 256, 1e-30, "xml", 1)
    cfg = cli.CliConfig("gamma", 5, 128, 1e-20, "csv", 1)
    assert cfg.precision.mantissa_bits == 128


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hardy_rellich", "weights", "--family", "copson-hat",
                           "--n-max", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert rows_of(proc.stdout)[0]["value"].startswith("0.625")
